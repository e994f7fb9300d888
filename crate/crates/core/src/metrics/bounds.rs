use num_rational::Ratio;
use serde::Serialize;

use crate::error::BoundError;
use crate::rlnc::rlnc_field_bits_umbrella;

use super::Prob;

/// A named bound value with the parameters that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub value: f64,
    /// Set when the value ignores integer constraints.
    pub asymptotic: bool,
}

impl BoundReport {
    fn new(name: &str, params: &[(&str, f64)], value: f64) -> Self {
        Self {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value,
            asymptotic: false,
        }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sign(k: usize) -> f64 {
    if k % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `sum_{k=1..m} (-1)^(k-1) C(m,k) / (q^k - 1)`: upper bound on the mean
/// first decoding time of a sink with `m` random parents.
pub fn et_ub(m: usize, q: u64) -> f64 {
    (1..=m).map(|k| sign(k) * binom(m, k) / ((q as f64).powi(k as i32) - 1.0)).sum()
}

/// `et_ub` in exact rational arithmetic, when `q^m` fits in 120 bits.
pub fn et_ub_exact(m: usize, q: u64) -> Result<Ratio<i128>, BoundError> {
    let overflow = || BoundError::Domain(format!("q^m overflows for m={m}, q={q}"));
    let mut total = Ratio::from_integer(0i128);
    let mut c: i128 = 1;
    for k in 1..=m {
        c = c * (m - k + 1) as i128 / k as i128;
        let qk = (q as i128).checked_pow(k as u32).filter(|v| *v < 1 << 120).ok_or_else(overflow)?;
        let term = Ratio::new(c, qk - 1);
        total = if k % 2 == 1 { total + term } else { total - term };
    }
    Ok(total)
}

/// `sum_{k=1..m} (-1)^(k-1) C(m,k) / (q^(km) - 1)`.
pub fn et_lb(m: usize, q: u64) -> f64 {
    (1..=m).map(|k| sign(k) * binom(m, k) / ((q as f64).powi((k * m) as i32) - 1.0)).sum()
}

/// Upper bound on the mean global termination time with `d` sinks and
/// `eta` randomly coded links. The offset uses `c = max(1, ceil(log_q d))`
/// so that `d = 1` stays nonnegative.
pub fn et_n_ub(d: usize, q: u64, eta: usize) -> Result<f64, BoundError> {
    if d == 0 || q < 2 || eta == 0 {
        return Err(BoundError::Domain(format!("need d >= 1, q >= 2, eta >= 1; got d={d}, q={q}, eta={eta}")));
    }
    let mut c = 0u32;
    while (q as f64).powi(c as i32) < d as f64 {
        c += 1;
    }
    let c = c.max(1);
    let qc = (q as f64).powi(c as i32);
    let tail: f64 = (1..=eta)
        .map(|k| sign(k) * binom(eta, k) * (d as f64).powi(k as i32) / (qc.powi(k as i32) - 1.0))
        .sum();
    Ok(c as f64 - 1.0 + tail)
}

/// Upper bound on `var[T_avg]` for an `(n, m)` combination network.
///
/// The second-moment term uses the closed form
/// `sum_t t x^t = x / (1 - x)^2` with `x = q^-k`.
pub fn var_t_avg_ub(n: usize, m: usize, q: u64) -> Result<BoundReport, BoundError> {
    if m == 0 || n < m || q < 2 {
        return Err(BoundError::Domain(format!("need n >= m >= 1 and q >= 2; got n={n}, m={m}, q={q}")));
    }
    let d = binom(n, m);
    let ub = et_ub(m, q);
    let lb = et_lb(m, q);
    let second: f64 = (1..=m)
        .map(|k| {
            let qk = (q as f64).powi(k as i32);
            sign(k) * binom(m, k) * qk / ((qk - 1.0) * (qk - 1.0))
        })
        .sum();
    let et2_ub = ub + 2.0 * second;
    let rho_ub = (1..m).map(|lambda| ub * et_ub(m - lambda, q)).fold(0.0, f64::max);
    let delta = d - 1.0 - binom(n - m, m);
    let value = et2_ub / d + delta / d * rho_ub - (delta + 1.0) / d * lb * lb;
    Ok(BoundReport::new(
        "var_t_avg_ub",
        &[
            ("n", n as f64),
            ("m", m as f64),
            ("q", q as f64),
            ("d", d),
            ("delta", delta),
            ("delta_over_d", delta / d),
            ("et2_ub", et2_ub),
            ("rho_ub", rho_ub),
            ("et_lb", lb),
        ],
        value,
    ))
}

fn full_rank_prob(m: usize, q: u64, t: usize) -> f64 {
    (1..=m).map(|l| 1.0 - (q as f64).powi(-((t * l) as i32))).product()
}

/// `P(T_r >= t) = 1 - prod_{l=1..m} (1 - q^(-tl))` for a sink of a
/// combination network.
pub fn combination_decode_dist(m: usize, q: u64, t: usize) -> f64 {
    1.0 - full_rank_prob(m, q, t)
}

/// `combination_decode_dist` as an exact fraction.
pub fn combination_decode_dist_exact(m: usize, q: u64, t: usize) -> Result<Prob, BoundError> {
    let mut prod = Prob::from_integer(1);
    for l in 1..=m {
        let den = (q as u128)
            .checked_pow((t * l) as u32)
            .filter(|v| *v < 1 << 60)
            .ok_or_else(|| BoundError::Domain(format!("q^(tl) overflows for m={m}, q={q}, t={t}")))?;
        prod *= Prob::new(den - 1, den);
    }
    Ok(Prob::from_integer(1) - prod)
}

/// `P(L_r < t) = Q (1 - q^-t)^(2m-2)` for a sink of a sparsified
/// combination network with the full `2(m-1)` related sinks.
pub fn sparsified_lr_cdf(m: usize, q: u64, t: usize) -> f64 {
    full_rank_prob(m, q, t) * (1.0 - (q as f64).powi(-(t as i32))).powi((2 * m).saturating_sub(2) as i32)
}

/// Constraint-length bounds for sparsified combination networks: sinks
/// by `et_ub(3m - 2, q)`, intermediate nodes by `et_ub(2m, q)`.
pub fn sparsified_bounds(m: usize, q: u64) -> Result<Vec<BoundReport>, BoundError> {
    if m == 0 || q < 2 {
        return Err(BoundError::Domain(format!("need m >= 1 and q >= 2; got m={m}, q={q}")));
    }
    let p = [("m", m as f64), ("q", q as f64)];
    Ok(vec![
        BoundReport::new("sink_length_ub", &p, et_ub(3 * m - 2, q)),
        BoundReport::new("intermediate_length_ub", &p, et_ub(2 * m, q)),
    ])
}

/// How the RLNC field for the umbrella comparison is given.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RlncField {
    /// `log2 q_R` directly.
    Bits(f64),
    /// Target failure probability; `log2 q_R` follows from the deepest sink.
    Epsilon(f64),
}

/// Umbrella memory bounds: per-sink `E[L_r]`, the ARCNC `W_avg` upper
/// bound, the RLNC lower bound and the gain `G`, plus the gain's two
/// limiting forms.
pub fn umbrella_bounds(alpha: usize, beta: usize, q: u64, rlnc: RlncField) -> Result<Vec<BoundReport>, BoundError> {
    if alpha < 3 || alpha % 2 == 0 || beta < 2 || q < 2 {
        return Err(BoundError::Domain(format!(
            "need odd alpha >= 3, beta >= 2, q >= 2; got alpha={alpha}, beta={beta}, q={q}"
        )));
    }
    let bits_r = match rlnc {
        RlncField::Bits(b) if b > 0.0 => b,
        RlncField::Bits(b) => return Err(BoundError::Domain(format!("log2 q_R must be positive, got {b}"))),
        RlncField::Epsilon(eps) => rlnc_field_bits_umbrella(beta, eps)?,
    };
    let qf = q as f64;
    let bits = qf.log2();
    let nodes = (2 * alpha + 6 * beta - 5) as f64;
    let ratio = (qf * qf + 2.0 * qf) / (qf * qf - 1.0);
    let w_ub = bits * (2 * alpha - 5) as f64 / nodes * ratio + bits_r * 6.0 * beta as f64 / nodes;
    let mut p = vec![("alpha", alpha as f64), ("beta", beta as f64), ("q", qf), ("log2_q_r", bits_r)];
    if let RlncField::Epsilon(eps) = rlnc {
        p.push(("epsilon", eps));
    }
    let mut reports = vec![
        BoundReport::new("sink_length_ub", &p, (2.0 * qf + 1.0) / (qf * qf - 1.0)),
        BoundReport::new("w_avg_arcnc_ub", &p, w_ub),
        BoundReport::new("w_avg_rlnc_lb", &p, bits_r),
        BoundReport::new("gain_lb", &p, bits_r / w_ub),
        BoundReport::new("gain_wide_limit", &p, bits_r / (bits * ratio)),
        BoundReport::new("gain_deep_limit", &p, 1.0),
    ];
    for r in &mut reports[1..] {
        r.asymptotic = true;
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn decoding_time_bounds() {
        assert!(close(et_ub(2, 2), 5.0 / 3.0));
        assert_eq!(et_ub_exact(2, 2).unwrap(), Ratio::new(5, 3));
        assert_eq!(et_ub_exact(3, 2).unwrap(), Ratio::new(15, 7));
        assert!(close(et_ub(3, 2), 15.0 / 7.0));
        assert!(close(et_lb(2, 2), 0.6));
        for q in [2, 4, 16, 256] {
            assert!(close(et_ub(1, q), 1.0 / (q as f64 - 1.0)));
            assert!(close(et_lb(1, q), et_ub(1, q)));
        }
        for m in 1..=6 {
            for q in [2, 4, 8, 16, 64, 256] {
                assert!(et_lb(m, q) <= et_ub(m, q));
                assert_eq!(et_ub(m, q).to_bits(), et_ub(m, q).to_bits());
            }
        }
    }

    #[test]
    fn termination_bound() {
        assert!(close(et_n_ub(2, 2, 1).unwrap(), 2.0));
        assert!(et_n_ub(2, 1 << 16, 4).unwrap() < 0.05);
        assert!(close(et_n_ub(1, 4, 3).unwrap(), et_ub(3, 4)));
        assert!(et_n_ub(1, 2, 5).unwrap() >= 0.0);
        // d = 5 > q = 4 pushes the offset to 1
        assert!(et_n_ub(5, 4, 2).unwrap() > 1.0);
        assert!(et_n_ub(0, 2, 1).is_err());
    }

    #[test]
    fn variance_bound() {
        let r = var_t_avg_ub(6, 2, 2).unwrap();
        assert_eq!(r.param("d"), Some(15.0));
        assert_eq!(r.param("delta"), Some(8.0));
        assert!(close(r.param("rho_ub").unwrap(), 5.0 / 3.0));
        let half = var_t_avg_ub(4, 2, 2).unwrap();
        assert!(close(half.param("delta_over_d").unwrap(), 1.0 - 2.0 / 6.0));
        let below = var_t_avg_ub(3, 2, 2).unwrap();
        assert!(close(below.param("delta_over_d").unwrap(), 1.0 - 1.0 / 3.0));
        let mut prev = f64::INFINITY;
        for n in [6, 10, 16, 24] {
            let v = var_t_avg_ub(n, 2, 2).unwrap().value;
            assert!(v < prev, "n={n}");
            prev = v;
        }
        assert!(var_t_avg_ub(1, 2, 2).is_err());
    }

    #[test]
    fn decode_distribution() {
        assert!(close(combination_decode_dist(1, 2, 1), 0.5));
        assert!(close(combination_decode_dist(2, 2, 1), 5.0 / 8.0));
        assert_eq!(combination_decode_dist_exact(2, 2, 1).unwrap(), Prob::new(5, 8));
        assert_eq!(combination_decode_dist_exact(2, 2, 2).unwrap(), Prob::new(19, 64));
        assert!(combination_decode_dist(2, 2, 60) < 1e-15);
    }

    #[test]
    fn sparsified() {
        assert!(close(sparsified_lr_cdf(1, 2, 3), full_rank_prob(1, 2, 3)));
        let b = sparsified_bounds(2, 2).unwrap();
        assert!(close(b[0].value, et_ub(4, 2)));
        assert!(close(b[1].value, et_ub(4, 2)));
        let mean: f64 = (1..200).map(|t| 1.0 - sparsified_lr_cdf(2, 2, t)).sum();
        assert!(mean < b[0].value);
    }

    #[test]
    fn umbrella() {
        let r = umbrella_bounds(5, 3, 2, RlncField::Bits(15.0)).unwrap();
        assert!(close(r[0].value, 5.0 / 3.0));
        assert!(close(r[4].value, 3.0 / 8.0 * 15.0));
        assert!(!r[0].asymptotic && r[1].asymptotic);
        let eps = umbrella_bounds(29, 3, 4, RlncField::Epsilon(0.01)).unwrap();
        assert!((eps[2].value - 9.22).abs() < 0.01);
        assert!(eps[3].value > 1.0);
        let wide = umbrella_bounds(10_001, 3, 2, RlncField::Bits(15.0)).unwrap();
        assert!((wide[3].value - wide[4].value).abs() / wide[4].value < 0.01);
        let deep = umbrella_bounds(3, 100_000, 2, RlncField::Bits(15.0)).unwrap();
        assert!((deep[3].value - 1.0).abs() < 0.01);
        assert!(umbrella_bounds(4, 3, 2, RlncField::Bits(15.0)).is_err());
    }
}
