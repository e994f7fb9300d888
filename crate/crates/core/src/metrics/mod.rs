//! Empirical statistics over runs, closed-form bounds, and an exhaustive
//! oracle for the first decoding time distribution on tiny networks.

mod bounds;
mod oracle;

pub use bounds::{
    combination_decode_dist, combination_decode_dist_exact, et_lb, et_n_ub, et_ub, et_ub_exact, sparsified_bounds, sparsified_lr_cdf,
    umbrella_bounds, var_t_avg_ub, BoundReport, RlncField,
};
pub use oracle::{exact_dist_oracle, DecodeDist, Prob, ORACLE_BRANCH_LIMIT};

use serde::Serialize;

use crate::engine::TraceResult;
use crate::error::MetricsError;

/// Mean, standard error and sample count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self, MetricsError> {
        if values.is_empty() {
            return Err(MetricsError::Empty);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stderr = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Ok(Self { mean, stderr, count: values.len() })
    }

    /// Summary of 0/1 outcomes.
    pub fn of_flags(flags: &[bool]) -> Result<Self, MetricsError> {
        let values: Vec<f64> = flags.iter().map(|&b| f64::from(u8::from(b))).collect();
        Self::of(&values)
    }

    /// True when `value` lies within `k` standard errors of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// Mean first decoding time over the sinks of one successful run.
pub fn t_avg(res: &TraceResult) -> Result<f64, MetricsError> {
    if !res.success {
        return Err(MetricsError::Unsuccessful(0));
    }
    if res.sink_times.is_empty() {
        return Err(MetricsError::Empty);
    }
    let total: usize = res.sink_times.iter().map(|(_, t)| t.expect("successful runs decode every sink")).sum();
    Ok(total as f64 / res.sink_times.len() as f64)
}

/// `t_avg` averaged over runs.
pub fn t_avg_over(runs: &[TraceResult]) -> Result<Summary, MetricsError> {
    let per_run = runs
        .iter()
        .enumerate()
        .map(|(i, r)| t_avg(r).map_err(|_| MetricsError::Unsuccessful(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Summary::of(&per_run)
}

/// Bits of memory per node: `ceil(log2 q) / |V| * sum_v (L_v + 1)`.
pub fn w_avg(res: &TraceResult, q: u32, num_nodes: usize) -> Result<f64, MetricsError> {
    if !res.success {
        return Err(MetricsError::Unsuccessful(0));
    }
    w_avg_of_lengths(&res.node_lengths, q, num_nodes)
}

/// The memory formula on raw constraint lengths.
pub fn w_avg_of_lengths(lengths: &[usize], q: u32, num_nodes: usize) -> Result<f64, MetricsError> {
    if lengths.len() != num_nodes || num_nodes == 0 {
        return Err(MetricsError::MissingLengths { have: lengths.len(), want: num_nodes });
    }
    let bits = f64::from(q.next_power_of_two().trailing_zeros());
    let total: usize = lengths.iter().map(|l| l + 1).sum();
    Ok(bits * total as f64 / num_nodes as f64)
}

/// `w_avg` averaged over runs.
pub fn w_avg_over(runs: &[TraceResult], q: u32, num_nodes: usize) -> Result<Summary, MetricsError> {
    let per_run = runs
        .iter()
        .enumerate()
        .map(|(i, r)| w_avg(r, q, num_nodes).map_err(|e| if r.success { e } else { MetricsError::Unsuccessful(i) }))
        .collect::<Result<Vec<_>, _>>()?;
    Summary::of(&per_run)
}
