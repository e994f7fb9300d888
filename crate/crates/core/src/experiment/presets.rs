use crate::error::ConfigError;
use crate::metrics::{et_lb, et_ub, sparsified_bounds, umbrella_bounds, var_t_avg_ub, BoundReport, RlncField};
use crate::topology::{RggParams, TopologySpec};

use super::{cmd_sim, ExperimentConfig, ResultRow, SummaryRow};

/// One plotted curve: a sweep of topology points at fixed field sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub name: String,
    pub points: Vec<ExperimentConfig>,
}

/// A named figure: its curves and the closed-form bounds drawn beside them.
#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub id: &'static str,
    pub description: &'static str,
    pub curves: Vec<Curve>,
    pub bounds: Vec<BoundReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PresetOutput {
    /// Per-trial rows and summaries for each curve, in curve order.
    pub curves: Vec<(String, Vec<ResultRow>, Vec<SummaryRow>)>,
    pub bounds: Vec<BoundReport>,
}

const IDS: [&str; 11] = [
    "combination-fixed-m",
    "combination-fixed-m-q",
    "combination-n2m",
    "shuttle-q",
    "umbrella-beta-sweep",
    "umbrella-alpha-sweep",
    "sparsified",
    "rgg-acyclic",
    "rgg-cyclic",
    "rgg-acyclic-nodes",
    "rgg-cyclic-nodes",
];

pub fn preset_ids() -> &'static [&'static str] {
    &IDS
}

fn point(topology: TopologySpec, q: &[u32]) -> ExperimentConfig {
    ExperimentConfig { q_list: q.to_vec(), ..ExperimentConfig::new(topology) }
}

fn curve(name: impl Into<String>, points: Vec<ExperimentConfig>) -> Curve {
    Curve { name: name.into(), points }
}

fn combination_bounds(points: &[(usize, usize)], q: u64) -> Vec<BoundReport> {
    let mut out = Vec::new();
    for &(n, m) in points {
        let params = vec![("n".to_string(), n as f64), ("m".to_string(), m as f64), ("q".to_string(), q as f64)];
        for (name, value) in [("et_ub", et_ub(m, q)), ("et_lb", et_lb(m, q))] {
            out.push(BoundReport { name: name.into(), params: params.clone(), value, asymptotic: false });
        }
        if let Ok(var) = var_t_avg_ub(n, m, q) {
            out.push(BoundReport { name: "std_t_avg_ub".into(), value: var.value.max(0.0).sqrt(), ..var });
        }
    }
    out
}

fn rgg(nodes: usize, sinks: usize, cyclic: bool) -> TopologySpec {
    TopologySpec::Rgg(RggParams::new(nodes, sinks, 0.4, cyclic))
}

/// Looks up a figure preset by id.
pub fn preset(id: &str) -> Result<Preset, ConfigError> {
    let (description, curves, bounds) = match id {
        "combination-fixed-m" => {
            let ns: Vec<(usize, usize)> = (3..=16).map(|n| (n, 2)).collect();
            let pts = ns.iter().map(|&(n, m)| point(TopologySpec::Combination { n, m }, &[2])).collect();
            ("combination networks, m = 2, n = 3..16, q = 2", vec![curve("q2", pts)], combination_bounds(&ns, 2))
        }
        "combination-fixed-m-q" => {
            let ns: Vec<(usize, usize)> = (3..=16).map(|n| (n, 2)).collect();
            let curves = [2u32, 4, 16, 256]
                .iter()
                .map(|&q| curve(format!("q{q}"), ns.iter().map(|&(n, m)| point(TopologySpec::Combination { n, m }, &[q])).collect()))
                .collect();
            let bounds = [2u64, 4, 16, 256].iter().flat_map(|&q| combination_bounds(&ns[..1], q)).collect();
            ("combination networks, m = 2, n = 3..16, q in {2, 4, 16, 256}", curves, bounds)
        }
        "combination-n2m" => {
            let ns: Vec<(usize, usize)> = (2..=6).map(|m| (2 * m, m)).collect();
            let pts = ns.iter().map(|&(n, m)| point(TopologySpec::Combination { n, m }, &[2])).collect();
            ("combination networks, n = 2m, m = 2..6, q = 2", vec![curve("q2", pts)], combination_bounds(&ns, 2))
        }
        "shuttle-q" => {
            let qs: Vec<u32> = (1..=8).map(|k| 1 << k).collect();
            ("shuttle network, q = 2^1..2^8", vec![curve("shuttle", vec![point(TopologySpec::Shuttle, &qs)])], Vec::new())
        }
        "umbrella-beta-sweep" => {
            let pts = (3..=10).map(|beta| point(TopologySpec::Umbrella { alpha: 5, beta }, &[4])).collect();
            let bounds = (3..=10)
                .flat_map(|beta| umbrella_bounds(5, beta, 4, RlncField::Epsilon(0.01)).expect("valid umbrella"))
                .collect();
            ("umbrella networks, alpha = 5, beta = 3..10, q = 4", vec![curve("q4", pts)], bounds)
        }
        "umbrella-alpha-sweep" => {
            let alphas: Vec<usize> = (5..=29).step_by(2).collect();
            let pts = alphas.iter().map(|&alpha| point(TopologySpec::Umbrella { alpha, beta: 3 }, &[4])).collect();
            let bounds = alphas
                .iter()
                .flat_map(|&alpha| umbrella_bounds(alpha, 3, 4, RlncField::Epsilon(0.01)).expect("valid umbrella"))
                .collect();
            ("umbrella networks, beta = 3, alpha = 5..29, q = 4", vec![curve("q4", pts)], bounds)
        }
        "sparsified" => {
            let pts = [6, 12, 24, 48].iter().map(|&n| point(TopologySpec::Sparsified { n, m: 2 }, &[2])).collect();
            ("sparsified combination networks, m = 2, n in {6, 12, 24, 48}, q = 2", vec![curve("q2", pts)], sparsified_bounds(2, 2)?)
        }
        "rgg-acyclic" | "rgg-cyclic" => {
            let cyclic = id == "rgg-cyclic";
            let pts = (2..=12).map(|s| point(rgg(25, s, cyclic), &[4])).collect();
            ("random geometric graphs, 25 nodes, radius 0.4, sinks 2..12, q = 4", vec![curve("q4", pts)], Vec::new())
        }
        "rgg-acyclic-nodes" | "rgg-cyclic-nodes" => {
            let cyclic = id == "rgg-cyclic-nodes";
            let pts = (10..=45).step_by(5).map(|n| point(rgg(n, 3, cyclic), &[4])).collect();
            ("random geometric graphs, 10..45 nodes, 3 sinks, radius 0.4, q = 4", vec![curve("q4", pts)], Vec::new())
        }
        other => {
            return Err(ConfigError::Invalid(format!("unknown figure `{other}` (one of {})", IDS.join(", "))));
        }
    };
    let id = IDS.iter().find(|&&k| k == id).expect("matched above");
    Ok(Preset { id, description, curves, bounds })
}

/// Runs every point of every curve with the given trial count and seed.
pub fn run_preset(preset: &Preset, trials: usize, seed: u64) -> Result<PresetOutput, ConfigError> {
    let mut curves = Vec::new();
    for c in &preset.curves {
        let mut rows = Vec::new();
        let mut summaries = Vec::new();
        for p in &c.points {
            let cfg = ExperimentConfig { trials, master_seed: seed, ..p.clone() };
            let out = cmd_sim(&cfg)?;
            rows.extend(out.rows);
            summaries.extend(out.summaries);
        }
        curves.push((c.name.clone(), rows, summaries));
    }
    Ok(PresetOutput { curves, bounds: preset.bounds.clone() })
}
