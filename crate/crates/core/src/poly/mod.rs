//! Polynomial matrices over GF(2^k), kernel recursions and decoding.

mod decode;
mod mat;
mod polymatrix;

pub use decode::{build_m, decodability_test, decoder_for, sequential_decode, solve_decoder, RankCache, SinkDecoder};
pub use mat::{rank_gf, solve_right, ColumnBasis, Mat};
pub use polymatrix::{
    conv_step, conv_step_into, det_nonzero_oracle, determinant, encode_symbol, scalar, ColumnSeries, PolyMatrix,
};
