//! Adaptive randomized convolutional network coding over GF(2^k).

pub mod error;
pub mod gf;
pub mod net;
pub mod poly;
pub mod topology;
pub mod engine;
pub mod experiment;
pub mod metrics;
pub mod rlnc;
