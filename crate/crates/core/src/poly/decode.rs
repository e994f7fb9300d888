//! Decodability tests on the block Toeplitz matrices built from a sink's
//! global kernel coefficients, and the delayed sequential decoder.

use crate::error::MatrixError;
use crate::gf::{Gf, Sym};

use super::mat::{solve_right, ColumnBasis, Mat};

/// Block upper-triangular Toeplitz matrix of size `(i+1)m x (i+1)n` with
/// `F_0` on the diagonal and `F_j` on the j-th block superdiagonal.
pub fn build_m(f_coeffs: &[Mat], i: usize) -> Result<Mat, MatrixError> {
    let first = f_coeffs.first().ok_or_else(|| MatrixError::Dimension("no coefficients".into()))?;
    let (m, n) = (first.rows(), first.cols());
    if f_coeffs.len() <= i {
        return Err(MatrixError::Dimension(format!("need {} coefficients, have {}", i + 1, f_coeffs.len())));
    }
    if f_coeffs[..=i].iter().any(|c| c.rows() != m || c.cols() != n) {
        return Err(MatrixError::Dimension("inconsistent block shapes".into()));
    }
    let mut out = Mat::zeros((i + 1) * m, (i + 1) * n);
    for br in 0..=i {
        for bc in br..=i {
            let block = &f_coeffs[bc - br];
            for r in 0..m {
                for c in 0..n {
                    out.set(br * m + r, bc * n + c, block.get(r, c));
                }
            }
        }
    }
    Ok(out)
}

/// Incremental rank state for one sink.
///
/// `M_t` is `M_{t-1}` with one block column appended on the right and a
/// zero-padded block row below, so the column basis of `M_{t-1}` stays
/// valid and only the new block column needs eliminating. The basis is
/// extended lazily, only when the cheap first condition passes.
#[derive(Clone, Debug)]
pub struct RankCache {
    m: usize,
    t_last: Option<usize>,
    hat_basis: ColumnBasis,
    block_basis: ColumnBasis,
    /// Times whose block columns are already in `block_basis`.
    block_time: Option<usize>,
    rank_prev: usize,
    rank_last: usize,
}

impl RankCache {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            t_last: None,
            hat_basis: ColumnBasis::new(),
            block_basis: ColumnBasis::new(),
            block_time: None,
            rank_prev: 0,
            rank_last: 0,
        }
    }

    pub fn t_last(&self) -> Option<usize> {
        self.t_last
    }

    /// Rank of `(F_0, ..., F_t)` at the last tested time.
    pub fn hat_rank(&self) -> usize {
        self.hat_basis.rank()
    }

    /// `rank(M_t)` at the last time the second condition was evaluated.
    pub fn rank_last(&self) -> usize {
        self.rank_last
    }

    /// Times covered by the block basis, if any.
    pub fn block_time(&self) -> Option<usize> {
        self.block_time
    }

    fn extend_block_basis(&mut self, gf: &Gf, f_coeffs: &[Mat], through: usize) {
        let m = self.m;
        let start = self.block_time.map_or(0, |t| t + 1);
        for t in start..=through {
            self.rank_prev = self.block_basis.rank();
            let n = f_coeffs[0].cols();
            for c in 0..n {
                let mut v = vec![0; (t + 1) * m];
                for br in 0..=t {
                    let block = &f_coeffs[t - br];
                    for r in 0..m {
                        v[br * m + r] = block.get(r, c);
                    }
                }
                self.block_basis.insert(gf, v);
            }
            self.block_time = Some(t);
        }
        self.rank_last = self.block_basis.rank();
    }
}

/// True iff `rank(F_0..F_t) = m` and `rank(M_t) - rank(M_{t-1}) = m`.
///
/// Must be called for t = 0, 1, 2, ... in order with the same cache.
pub fn decodability_test(gf: &Gf, f_coeffs: &[Mat], t: usize, cache: &mut RankCache) -> Result<bool, MatrixError> {
    let expected = cache.t_last.map_or(0, |x| x + 1);
    if t != expected {
        return Err(MatrixError::Dimension(format!("cache is at time {expected}, asked for {t}")));
    }
    if f_coeffs.len() <= t {
        return Err(MatrixError::Dimension(format!("need {} coefficients, have {}", t + 1, f_coeffs.len())));
    }
    let m = cache.m;
    let f_t = &f_coeffs[t];
    if f_t.rows() != m {
        return Err(MatrixError::Dimension(format!("coefficient has {} rows, expected {m}", f_t.rows())));
    }
    cache.t_last = Some(t);
    if cache.hat_basis.rank() < m {
        for c in 0..f_t.cols() {
            cache.hat_basis.insert(gf, f_t.column(c));
        }
    }
    if cache.hat_basis.rank() < m {
        return Ok(false);
    }
    cache.extend_block_basis(gf, f_coeffs, t);
    Ok(cache.rank_last - cache.rank_prev == m)
}

/// Solves `M D = [I_m; 0]`.
pub fn solve_decoder(gf: &Gf, m_mat: &Mat, m: usize) -> Result<Mat, MatrixError> {
    if m_mat.rows() < m {
        return Err(MatrixError::Dimension("fewer rows than sources".into()));
    }
    let mut target = Mat::zeros(m_mat.rows(), m);
    for i in 0..m {
        target.set(i, i, 1);
    }
    solve_right(gf, m_mat, &target)
}

/// Decoder for one sink: which incoming streams it reads and the matrix
/// applied to a window of `delay + 1` received vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinkDecoder {
    pub streams: Vec<usize>,
    pub delay: usize,
    pub matrix: Mat,
}

/// Builds a decoder at the first decoding time `delay`, reading only `m`
/// incoming streams when some such subset suffices (the lexicographically
/// first one), otherwise all of them.
pub fn decoder_for(gf: &Gf, f_coeffs: &[Mat], delay: usize) -> Result<SinkDecoder, MatrixError> {
    let first = f_coeffs.first().ok_or_else(|| MatrixError::Dimension("no coefficients".into()))?;
    let (m, n) = (first.rows(), first.cols());
    if n > m {
        let mut subset: Vec<usize> = (0..m).collect();
        loop {
            let restricted: Vec<Mat> = f_coeffs[..=delay].iter().map(|c| c.select_columns(&subset)).collect();
            if let Ok(d) = solve_decoder(gf, &build_m(&restricted, delay)?, m) {
                return Ok(SinkDecoder { streams: subset, delay, matrix: d });
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    let matrix = solve_decoder(gf, &build_m(f_coeffs, delay)?, m)?;
    Ok(SinkDecoder { streams: (0..n).collect(), delay, matrix })
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Recovers `x_0, x_1, ...` from received vectors, `delay` steps behind.
///
/// `y_stream[t]` holds the symbols on all incoming streams at time t and
/// `f_coeffs` the sink's kernel coefficients for at least as many times.
/// Earlier decoded symbols are cancelled from each window before applying
/// the decoder matrix.
pub fn sequential_decode(
    gf: &Gf,
    decoder: &SinkDecoder,
    f_coeffs: &[Mat],
    y_stream: &[Vec<Sym>],
) -> Result<Vec<Vec<Sym>>, MatrixError> {
    let delay = decoder.delay;
    if y_stream.len() < delay + 1 {
        return Err(MatrixError::StreamUnderflow { needed: delay + 1, have: y_stream.len() });
    }
    if f_coeffs.len() < y_stream.len() {
        return Err(MatrixError::StreamUnderflow { needed: y_stream.len(), have: f_coeffs.len() });
    }
    let f_sel: Vec<Mat> = f_coeffs.iter().map(|c| c.select_columns(&decoder.streams)).collect();
    let m = decoder.matrix.cols();
    let width = decoder.streams.len();
    let count = y_stream.len() - delay;
    let mut xs: Vec<Vec<Sym>> = Vec::with_capacity(count);
    let mut window = vec![0; (delay + 1) * width];
    for t in 0..count {
        for j in 0..=delay {
            let slot = &mut window[j * width..(j + 1) * width];
            let y = &y_stream[t + j];
            for (s, &e) in slot.iter_mut().zip(&decoder.streams) {
                *s = y[e];
            }
            // subtract contributions of already-decoded x_{t+j-i}, i > j
            for i in j + 1..=t + j {
                let x = &xs[t + j - i];
                let contrib = f_sel[i].left_mul_vec(gf, x)?;
                for (s, c) in slot.iter_mut().zip(contrib) {
                    *s ^= c;
                }
            }
        }
        let x = decoder.matrix.left_mul_vec(gf, &window)?;
        debug_assert_eq!(x.len(), m);
        xs.push(x);
    }
    Ok(xs)
}
