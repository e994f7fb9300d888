//! Seeded trial batches, CSV rows and summaries, bound tables and figure
//! presets.

mod bounds;
mod presets;

pub use bounds::{bounds_report, format_bounds, BoundsKind};
pub use presets::{preset, preset_ids, run_preset, Curve, Preset, PresetOutput};

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run, RunConfig, SourceMode};
use crate::error::ConfigError;
use crate::gf::FieldSpec;
use crate::metrics::{w_avg_of_lengths, Summary};
use crate::rlnc::rlnc_run;
use crate::topology::TopologySpec;

/// Fixed CSV header for per-trial rows.
pub const CSV_HEADER: &str = "topology,family_params,q,trial,success,t_n,t_avg,w_avg,sink_t_r_json,runtime_ms";

/// Which coding scheme to simulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Arcnc,
    Rlnc,
    Both,
}

impl Scheme {
    fn expand(self) -> &'static [Scheme] {
        match self {
            Self::Arcnc => &[Self::Arcnc],
            Self::Rlnc => &[Self::Rlnc],
            Self::Both => &[Self::Arcnc, Self::Rlnc],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Arcnc => "arcnc",
            Self::Rlnc => "rlnc",
            Self::Both => "both",
        }
    }
}

impl FromStr for Scheme {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arcnc" => Ok(Self::Arcnc),
            "rlnc" => Ok(Self::Rlnc),
            "both" => Ok(Self::Both),
            other => Err(ConfigError::Invalid(format!("unknown mode `{other}` (arcnc, rlnc, both)"))),
        }
    }
}

/// Everything needed to reproduce one batch of trials.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub q_list: Vec<u32>,
    pub trials: usize,
    pub master_seed: u64,
    pub t_max: usize,
    pub mode: Scheme,
    pub source_mode: SourceMode,
    /// Record wall time per trial in the `runtime_ms` column.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(topology: TopologySpec) -> Self {
        Self {
            topology,
            q_list: vec![2],
            trials: 1000,
            master_seed: 0,
            t_max: RunConfig::default().t_max,
            mode: Scheme::Arcnc,
            source_mode: SourceMode::Random,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        if self.q_list.is_empty() {
            return Err(ConfigError::Invalid("at least one field size is required".into()));
        }
        for &q in &self.q_list {
            FieldSpec::from_q(q)?;
        }
        self.topology.validate()?;
        Ok(())
    }

    /// Parses a flat `key=value` file. Topology keys (`family`, `n`, `m`,
    /// ...) and run keys (`q`, `trials`, `seed`, `t_max`, `mode`,
    /// `source_mode`, `timing`) may be mixed in any order.
    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        let mut topo = Vec::new();
        let mut run_keys = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
            let pair = (k.trim().to_string(), v.trim().to_string());
            if RUN_KEYS.contains(&pair.0.as_str()) {
                run_keys.push(pair);
            } else {
                topo.push(pair);
            }
        }
        let mut cfg = Self::new(TopologySpec::from_pairs(&topo)?);
        for (k, v) in &run_keys {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one run key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |what: &str| ConfigError::Invalid(format!("{key}: expected {what}, got `{value}`"));
        match key {
            "q" => self.q_list = parse_q_list(value)?,
            "trials" => self.trials = value.parse().map_err(|_| bad("an integer"))?,
            "seed" => self.master_seed = value.parse().map_err(|_| bad("an integer"))?,
            "t_max" => self.t_max = value.parse().map_err(|_| bad("an integer"))?,
            "mode" => self.mode = value.parse()?,
            "source_mode" => {
                self.source_mode = match value {
                    "random" => SourceMode::Random,
                    "identity" => SourceMode::Identity,
                    _ => return Err(bad("random or identity")),
                }
            }
            "timing" => self.timing = value.parse().map_err(|_| bad("true or false"))?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }
}

const RUN_KEYS: &[&str] = &["q", "trials", "seed", "t_max", "mode", "source_mode", "timing"];

/// Parses `2,4,16` into field sizes, checking each is supported.
pub fn parse_q_list(text: &str) -> Result<Vec<u32>, ConfigError> {
    text.split(',')
        .map(|s| {
            let q: u32 = s.trim().parse().map_err(|_| ConfigError::Invalid(format!("q: expected an integer, got `{s}`")))?;
            FieldSpec::from_q(q)?;
            Ok(q)
        })
        .collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Coefficient (and graph) rng of one trial: stream `trial` of the master seed.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Seed of the source data stream of one trial.
pub fn data_seed(master_seed: u64, trial: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(trial))
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub topology: String,
    pub family_params: String,
    pub q: u32,
    pub trial: usize,
    pub success: bool,
    pub t_n: Option<usize>,
    pub t_avg: Option<f64>,
    pub w_avg: Option<f64>,
    pub sink_t_r_json: String,
    pub runtime_ms: Option<f64>,
}

/// Aggregate over the trials of one (topology, q, scheme).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub topology: String,
    pub family_params: String,
    pub scheme: Scheme,
    pub q: u32,
    pub trials: usize,
    pub success_rate: Summary,
    /// Over successful trials; `None` when none succeeded.
    pub t_avg: Option<Summary>,
    pub w_avg: Option<Summary>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimOutput {
    pub rows: Vec<ResultRow>,
    pub summaries: Vec<SummaryRow>,
}

impl SimOutput {
    /// Fraction of failed ARCNC trials over all field sizes.
    pub fn arcnc_fail_rate(&self) -> f64 {
        let arcnc: Vec<&SummaryRow> = self.summaries.iter().filter(|s| s.scheme == Scheme::Arcnc).collect();
        let total: usize = arcnc.iter().map(|s| s.trials).sum();
        if total == 0 {
            return 0.0;
        }
        let failed: f64 = arcnc.iter().map(|s| (1.0 - s.success_rate.mean) * s.trials as f64).sum();
        failed / total as f64
    }
}

fn sink_json(times: &[Option<usize>]) -> String {
    serde_json::to_string(times).expect("a list of optional integers always serializes")
}

fn one_trial(cfg: &ExperimentConfig, scheme: Scheme, q: u32, trial: usize) -> Result<ResultRow, ConfigError> {
    let start = Instant::now();
    let mut rng = trial_rng(cfg.master_seed, trial as u64);
    let net = cfg.topology.build(&mut rng)?;
    let mut params = cfg.topology.params_string();
    let row = match scheme {
        Scheme::Rlnc => {
            let out = rlnc_run(&net, q, cfg.source_mode, &mut rng)?;
            let times: Vec<Option<usize>> =
                net.sinks().iter().map(|r| out.decoded.contains(r).then_some(0)).collect();
            params.push_str(if params.is_empty() { "scheme=rlnc" } else { ";scheme=rlnc" });
            let bits = f64::from(q.trailing_zeros());
            ResultRow {
                topology: cfg.topology.family().to_string(),
                family_params: params,
                q,
                trial,
                success: out.success,
                t_n: out.success.then_some(0),
                t_avg: out.success.then_some(0.0),
                w_avg: out.success.then_some(bits),
                sink_t_r_json: sink_json(&times),
                runtime_ms: None,
            }
        }
        _ => {
            let run_cfg = RunConfig {
                t_max: cfg.t_max,
                source_mode: cfg.source_mode,
                data_seed: data_seed(cfg.master_seed, trial as u64),
                ..RunConfig::with_q(q)
            };
            let res = run(&net, &run_cfg, &mut rng)?;
            let times: Vec<Option<usize>> = res.sink_times.iter().map(|(_, t)| *t).collect();
            let (t_avg, w_avg) = if res.success {
                let sum: usize = times.iter().flatten().sum();
                let w = w_avg_of_lengths(&res.node_lengths, q, net.num_nodes()).expect("one length per node");
                (Some(sum as f64 / times.len() as f64), Some(w))
            } else {
                (None, None)
            };
            ResultRow {
                topology: cfg.topology.family().to_string(),
                family_params: params,
                q,
                trial,
                success: res.success,
                t_n: res.t_n,
                t_avg,
                w_avg,
                sink_t_r_json: sink_json(&times),
                runtime_ms: None,
            }
        }
    };
    let runtime_ms = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(ResultRow { runtime_ms, ..row })
}

fn summarize(rows: &[ResultRow], scheme: Scheme) -> SummaryRow {
    let first = &rows[0];
    let flags: Vec<bool> = rows.iter().map(|r| r.success).collect();
    let t: Vec<f64> = rows.iter().filter_map(|r| r.t_avg).collect();
    let w: Vec<f64> = rows.iter().filter_map(|r| r.w_avg).collect();
    SummaryRow {
        topology: first.topology.clone(),
        family_params: first.family_params.clone(),
        scheme,
        q: first.q,
        trials: rows.len(),
        success_rate: Summary::of_flags(&flags).expect("at least one trial"),
        t_avg: Summary::of(&t).ok(),
        w_avg: Summary::of(&w).ok(),
    }
}

/// Runs every (scheme, q, trial) of `cfg`. Trials run in parallel; rows
/// come back in trial order, so output does not depend on thread count.
pub fn cmd_sim(cfg: &ExperimentConfig) -> Result<SimOutput, ConfigError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &scheme in cfg.mode.expand() {
        for &q in &cfg.q_list {
            let batch = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| one_trial(cfg, scheme, q, trial))
                .collect::<Result<Vec<_>, _>>()?;
            summaries.push(summarize(&batch, scheme));
            rows.extend(batch);
        }
    }
    Ok(SimOutput { rows, summaries })
}

/// Writes rows under [`CSV_HEADER`].
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), ConfigError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn fmt_summary(s: &Option<Summary>) -> String {
    match s {
        Some(s) => format!("{:.4} ± {:.4}", s.mean, s.stderr),
        None => "-".into(),
    }
}

/// Human-readable summary table.
pub fn format_summary(summaries: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<12} {:<40} {:<6} {:>6} {:>7} {:>8} {:>18} {:>18}\n",
        "topology", "params", "scheme", "q", "trials", "success", "t_avg", "w_avg"
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{:<12} {:<40} {:<6} {:>6} {:>7} {:>8.4} {:>18} {:>18}",
            s.topology,
            s.family_params,
            s.scheme.name(),
            s.q,
            s.trials,
            s.success_rate.mean,
            fmt_summary(&s.t_avg),
            fmt_summary(&s.w_avg)
        );
    }
    out
}
