//! One-shot random linear network coding: constant coefficients, no
//! memory, success only if every sink has full rank at once.

use rand::RngCore;

use crate::engine::{Input, SourceMode};
use crate::error::{BoundError, EngineError};
use crate::gf::{Gf, Sym};
use crate::net::{multicast_rate, Network, NodeId};
use crate::poly::{rank_gf, Mat};

/// Result of one constant-coefficient trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RlncOutcome {
    pub success: bool,
    /// Sinks whose incoming kernels have full rank.
    pub decoded: Vec<NodeId>,
    pub draws: usize,
}

/// Draws one constant kernel per adjacent pair at every coding node and
/// checks `rank(F_r) = m` at every sink. Coefficients are drawn in the
/// same order as the first step of the adaptive engine, so the two agree
/// trial for trial on a shared rng stream.
pub fn rlnc_run<R: RngCore + ?Sized>(
    net: &Network,
    q: u32,
    source_mode: SourceMode,
    rng: &mut R,
) -> Result<RlncOutcome, EngineError> {
    if !net.is_acyclic() {
        return Err(EngineError::CyclicNetwork);
    }
    let gf = Gf::for_q(q)?;
    let m = multicast_rate(net);
    let s = net.source();
    let mut source_out = net.out_edges(s).to_vec();
    source_out.sort_by_key(|&e| net.edge_index(e));

    let mut f: Vec<Vec<Sym>> = vec![vec![0; m]; net.num_edges()];
    let mut draws = 0;
    for &e in net.edge_order() {
        let v = net.edge(e).tail;
        let inputs: Vec<Input> = if v == s {
            (0..m).map(Input::Source).collect()
        } else {
            net.in_edges(v).iter().map(|&i| Input::Edge(i)).collect()
        };
        let unit = (v == s && source_mode == SourceMode::Identity)
            .then(|| source_out.iter().position(|&x| x == e).filter(|&p| p < m))
            .flatten();
        let coeffs: Vec<Sym> = if let Some(j) = unit {
            (0..m).map(|i| Sym::from(i == j)).collect()
        } else if inputs.len() <= 1 {
            vec![1; inputs.len()]
        } else {
            draws += inputs.len();
            inputs.iter().map(|_| gf.sample(rng)).collect()
        };
        let mut acc = vec![0; m];
        for (input, &c) in inputs.iter().zip(&coeffs) {
            match *input {
                Input::Source(j) => acc[j] ^= c,
                Input::Edge(i) => gf.axpy(&mut acc, c, &f[i]),
            }
        }
        f[e] = acc;
    }

    let mut decoded = Vec::new();
    for &r in net.sinks() {
        let cols: Vec<&[Sym]> = net.in_edges(r).iter().map(|&e| f[e].as_slice()).collect();
        let mat = Mat::from_columns(m, &cols)?;
        if rank_gf(gf, &mat) == m {
            decoded.push(r);
        }
    }
    Ok(RlncOutcome { success: decoded.len() == net.sinks().len(), decoded, draws })
}

fn check_epsilon(epsilon: f64) -> Result<(), BoundError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(BoundError::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

/// Lower bound on the field bits RLNC needs on an umbrella network so the
/// deepest sink, behind `2 beta` random links, succeeds with probability
/// `1 - epsilon`.
pub fn rlnc_field_bits_umbrella(beta: usize, epsilon: f64) -> Result<f64, BoundError> {
    check_epsilon(epsilon)?;
    if beta == 0 {
        return Err(BoundError::Domain("beta must be at least 1".into()));
    }
    let root = (1.0 - epsilon).powf(1.0 / (2 * beta) as f64);
    Ok(-(1.0 - root).log2())
}

/// Lower bound on the field bits RLNC needs on a sparsified combination
/// network with `n - m + 1` sinks.
pub fn rlnc_field_bits_sparsified(n: usize, m: usize, epsilon: f64) -> Result<f64, BoundError> {
    check_epsilon(epsilon)?;
    if m == 0 || n < m {
        return Err(BoundError::Domain(format!("need 1 <= m <= n, got n={n}, m={m}")));
    }
    let d = (n - m + 1) as f64;
    Ok((1.0 + d / (1.0 - (1.0 - epsilon).sqrt())).log2())
}

/// Which success-probability bound sizes the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlncBound {
    /// `(1 - d/q)^eta` over `eta` randomly coded links.
    PerLink,
    /// `(1 - d/(q-1))^(J+1)` over `J` encoding nodes.
    EncodingNodes,
}

impl RlncBound {
    pub fn probability(self, d: usize, count: usize, q: f64) -> f64 {
        let (base, exp) = match self {
            Self::PerLink => (1.0 - d as f64 / q, count as i32),
            Self::EncodingNodes => (1.0 - d as f64 / (q - 1.0), count as i32 + 1),
        };
        if base <= 0.0 {
            0.0
        } else {
            base.powi(exp)
        }
    }
}

/// Smallest power of two `q` whose bound reaches `target`.
pub fn rlnc_min_q_for_target(d: usize, count: usize, target: f64, kind: RlncBound) -> Result<u64, BoundError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(BoundError::Domain(format!("target must lie in (0, 1), got {target}")));
    }
    (1..64)
        .map(|k| 1u64 << k)
        .find(|&q| kind.probability(d, count, q as f64) >= target)
        .ok_or_else(|| BoundError::Domain("no field up to 2^63 reaches the target".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, RunConfig};
    use crate::topology::{gen_combination, gen_shuttle, gen_sparsified};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_bit_examples() {
        assert!((rlnc_field_bits_umbrella(3, 0.01).unwrap() - 9.22).abs() < 0.01);
        assert!(rlnc_field_bits_umbrella(10, 0.01).unwrap() > rlnc_field_bits_umbrella(3, 0.01).unwrap());
        assert!(rlnc_field_bits_umbrella(3, 0.5).unwrap() < rlnc_field_bits_umbrella(3, 0.01).unwrap());
        assert!((rlnc_field_bits_sparsified(10, 3, 0.01).unwrap() - 10.64).abs() < 0.01);
        let a = rlnc_field_bits_sparsified(100, 1, 1e-4).unwrap();
        let b = rlnc_field_bits_sparsified(200, 1, 1e-4).unwrap();
        assert!((b - a - 1.0).abs() < 0.01);
        assert!(rlnc_field_bits_umbrella(3, 0.0).is_err());
        assert!(rlnc_field_bits_sparsified(2, 3, 0.1).is_err());
    }

    #[test]
    fn bounds_are_monotone() {
        let mut prev = 0.0;
        for beta in 1..20 {
            let v = rlnc_field_bits_umbrella(beta, 0.05).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = f64::INFINITY;
        for eps in [0.001, 0.01, 0.1, 0.5, 0.9] {
            let v = rlnc_field_bits_sparsified(20, 2, eps).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        let mut prev = 0;
        for d in [1, 2, 10, 100, 1000] {
            let q = rlnc_min_q_for_target(d, 3, 0.99, RlncBound::PerLink).unwrap();
            assert!(q >= prev);
            prev = q;
        }
    }

    #[test]
    fn minimum_field_examples() {
        let q = rlnc_min_q_for_target(120, 1, 0.99, RlncBound::EncodingNodes).unwrap();
        assert!(q as f64 > 2.4e4);
        assert_eq!(q.trailing_zeros(), 15);
        let q = rlnc_min_q_for_target(25, 10, 0.99, RlncBound::EncodingNodes).unwrap();
        assert!(q.trailing_zeros() >= 15);
        assert_eq!(rlnc_min_q_for_target(1, 1, 0.4, RlncBound::PerLink).unwrap(), 2);
    }

    #[test]
    fn constant_coefficients_agree_with_adaptive_first_step() {
        for net in [gen_combination(4, 2).unwrap(), gen_combination(5, 3).unwrap(), gen_sparsified(7, 2).unwrap()] {
            for q in [2, 4, 16] {
                for seed in 0..50 {
                    let one_shot = rlnc_run(&net, q, SourceMode::Random, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                    let cfg = RunConfig { t_max: 0, ..RunConfig::with_q(q) };
                    let adaptive = run(&net, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                    assert_eq!(one_shot.success, adaptive.success);
                    let at_zero: Vec<NodeId> =
                        adaptive.sink_times.iter().filter(|(_, t)| *t == Some(0)).map(|(r, _)| *r).collect();
                    assert_eq!(one_shot.decoded, at_zero);
                    assert_eq!(one_shot.draws, adaptive.draws);
                }
            }
        }
    }

    #[test]
    fn large_field_success_rate() {
        let net = gen_combination(3, 2).unwrap();
        let ok = (0..1000)
            .filter(|&s| rlnc_run(&net, 256, SourceMode::Random, &mut ChaCha8Rng::seed_from_u64(s)).unwrap().success)
            .count();
        assert!(ok >= 970, "{ok}");
        let big = gen_combination(16, 2).unwrap();
        let ok = (0..200)
            .filter(|&s| rlnc_run(&big, 2, SourceMode::Random, &mut ChaCha8Rng::seed_from_u64(s)).unwrap().success)
            .count();
        assert!(ok <= 2, "{ok}");
    }

    #[test]
    fn single_symbol_always_succeeds() {
        let net = gen_combination(5, 1).unwrap();
        for q in [2, 4, 256] {
            for mode in [SourceMode::Identity, SourceMode::Random] {
                assert!(rlnc_run(&net, q, mode, &mut ChaCha8Rng::seed_from_u64(q as u64)).unwrap().success);
            }
        }
    }

    #[test]
    fn cyclic_networks_are_rejected() {
        let err = rlnc_run(&gen_shuttle(), 4, SourceMode::Random, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert_eq!(err, EngineError::CyclicNetwork);
    }
}
