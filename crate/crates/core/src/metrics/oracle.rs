use num_rational::Ratio;
use rand::RngCore;

use crate::engine::{Engine, RunConfig};
use crate::error::MetricsError;
use crate::net::{Network, NodeId};

/// Exact probability.
pub type Prob = Ratio<u128>;

/// Largest number of engine steps the oracle will run.
pub const ORACLE_BRANCH_LIMIT: u128 = 1 << 22;

/// Exact distribution of first decoding times up to a horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeDist {
    pub horizon: usize,
    pub sinks: Vec<NodeId>,
    /// `at_least[i][t] = P(T_{sinks[i]} >= t)` for `t` in `0..=horizon + 1`.
    pub at_least: Vec<Vec<Prob>>,
    /// `all_by[t] = P(every sink decoded by t)` for `t` in `0..=horizon`.
    pub all_by: Vec<Prob>,
}

impl DecodeDist {
    pub fn p_at_least(&self, r: NodeId, t: usize) -> Option<Prob> {
        let i = self.sinks.iter().position(|&s| s == r)?;
        self.at_least[i].get(t).copied()
    }
}

/// Replays a fixed list of field elements as `next_u32` outputs.
struct Replay {
    values: Vec<u32>,
    next: usize,
}

impl RngCore for Replay {
    fn next_u32(&mut self) -> u32 {
        let v = self.values[self.next];
        self.next += 1;
        v
    }

    fn next_u64(&mut self) -> u64 {
        u64::from(self.next_u32())
    }

    fn fill_bytes(&mut self, _: &mut [u8]) {
        unreachable!("kernel draws only use next_u32")
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

struct Walk<'a> {
    q: u128,
    horizon: usize,
    spent: u128,
    sinks: &'a [NodeId],
    at_least: Vec<Vec<Prob>>,
    all_by: Vec<Prob>,
}

impl Walk<'_> {
    fn record(&mut self, engine: &Engine<'_>, weight: Prob) {
        let mut last = Some(0);
        for (i, &r) in self.sinks.iter().enumerate() {
            let t_r = engine.decode_time(r);
            let reach = t_r.map_or(self.horizon + 1, |t| t);
            for p in &mut self.at_least[i][..=reach] {
                *p += weight;
            }
            last = last.zip(t_r).map(|(a, b)| a.max(b));
        }
        if let Some(t_n) = last {
            for p in &mut self.all_by[t_n..] {
                *p += weight;
            }
        }
    }

    fn explore(&mut self, engine: &Engine<'_>, weight: Prob) -> Result<(), MetricsError> {
        if engine.all_decoded() || engine.time() > self.horizon {
            self.record(engine, weight);
            return Ok(());
        }
        let draws = engine.pending_draws();
        let branches = u32::try_from(draws)
            .ok()
            .and_then(|d| self.q.checked_pow(d))
            .filter(|b| *b <= ORACLE_BRANCH_LIMIT)
            .ok_or(MetricsError::StateSpace(u128::MAX))?;
        self.spent += branches;
        if self.spent > ORACLE_BRANCH_LIMIT {
            return Err(MetricsError::StateSpace(self.spent));
        }
        let share = weight / Prob::from_integer(branches);
        for code in 0..branches {
            let values = (0..draws).map(|j| ((code / self.q.pow(j as u32)) % self.q) as u32).collect();
            let mut rng = Replay { values, next: 0 };
            let mut child = engine.clone();
            child.step(&mut rng)?;
            debug_assert_eq!(rng.next, draws);
            self.explore(&child, share)?;
        }
        Ok(())
    }
}

/// Enumerates every kernel draw sequence through `horizon` with equal
/// weight and returns the exact first decoding time distribution.
///
/// Fails with [`MetricsError::StateSpace`] when the number of steps to
/// simulate exceeds [`ORACLE_BRANCH_LIMIT`].
pub fn exact_dist_oracle(net: &Network, cfg: &RunConfig, horizon: usize) -> Result<DecodeDist, MetricsError> {
    let cfg = RunConfig { trace: false, t_max: horizon, ..cfg.clone() };
    let engine = Engine::new(net, cfg.clone())?;
    let sinks = net.sinks().to_vec();
    let zero = Prob::from_integer(0);
    let mut walk = Walk {
        q: u128::from(cfg.q),
        horizon,
        spent: 0,
        sinks: &sinks,
        at_least: vec![vec![zero; horizon + 2]; sinks.len()],
        all_by: vec![zero; horizon + 1],
    };
    walk.explore(&engine, Prob::from_integer(1))?;
    let (at_least, all_by) = (walk.at_least, walk.all_by);
    Ok(DecodeDist { horizon, sinks, at_least, all_by })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SourceMode;
    use crate::metrics::bounds::combination_decode_dist_exact;
    use crate::topology::gen_combination;

    #[test]
    fn single_sink_combination_matches_closed_form_at_one() {
        let net = gen_combination(2, 2).unwrap();
        let dist = exact_dist_oracle(&net, &RunConfig::with_q(2), 1).unwrap();
        let r = net.sinks()[0];
        assert_eq!(dist.p_at_least(r, 0), Some(Prob::from_integer(1)));
        assert_eq!(dist.p_at_least(r, 1), Some(Prob::new(5, 8)));
        assert_eq!(dist.p_at_least(r, 1).unwrap(), combination_decode_dist_exact(2, 2, 1).unwrap());
        assert_eq!(dist.all_by[0], Prob::new(3, 8));
    }

    #[test]
    fn relay_chain_needs_one_nonzero_draw() {
        // two parallel edges into a relay that codes them onto a single link
        let net = Network::new(3, 0, &[2], &[(0, 1), (0, 1), (1, 2)]).unwrap();
        let r = 2;
        for q in [2u32, 4] {
            let dist = exact_dist_oracle(&net, &RunConfig::with_q(q), 2).unwrap();
            assert_eq!(dist.p_at_least(r, 1), Some(Prob::new(1, u128::from(q))));
            assert_eq!(dist.p_at_least(r, 2), Some(Prob::new(1, u128::from(q * q))));
        }
    }

    #[test]
    fn identity_source_decodes_immediately() {
        let net = gen_combination(3, 2).unwrap();
        let cfg = RunConfig { source_mode: SourceMode::Identity, ..RunConfig::with_q(2) };
        let dist = exact_dist_oracle(&net, &cfg, 2).unwrap();
        // one of the three sinks is fed both unit vectors
        let sure = dist.at_least.iter().filter(|row| row[1] == Prob::from_integer(0)).count();
        assert!(sure >= 1);
    }

    #[test]
    fn oversized_enumerations_are_refused() {
        let net = gen_combination(8, 2).unwrap();
        assert!(matches!(exact_dist_oracle(&net, &RunConfig::with_q(16), 1), Err(MetricsError::StateSpace(_))));
    }
}
