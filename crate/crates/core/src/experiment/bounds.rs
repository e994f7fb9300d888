use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::ConfigError;
use crate::metrics::{
    combination_decode_dist, et_lb, et_n_ub, et_ub, sparsified_bounds, umbrella_bounds, var_t_avg_ub, BoundReport,
    RlncField,
};
use crate::rlnc::{rlnc_field_bits_sparsified, rlnc_min_q_for_target, RlncBound};

/// Bound families printable by the `bounds` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundsKind {
    Et,
    Etn,
    Var,
    Sparsified,
    Umbrella,
    RlncQ,
}

impl BoundsKind {
    pub const ALL: [&'static str; 6] = ["et", "etn", "var", "sparsified", "umbrella", "rlnc-q"];
}

impl FromStr for BoundsKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "et" => Self::Et,
            "etn" => Self::Etn,
            "var" => Self::Var,
            "sparsified" => Self::Sparsified,
            "umbrella" => Self::Umbrella,
            "rlnc-q" => Self::RlncQ,
            other => {
                return Err(ConfigError::Invalid(format!(
                    "unknown bound kind `{other}` (one of {})",
                    Self::ALL.join(", ")
                )))
            }
        })
    }
}

struct Params<'a>(&'a [(String, String)]);

impl Params<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|v| v.parse().map_err(|_| ConfigError::Invalid(format!("{key}: cannot parse `{v}`"))))
            .transpose()
    }

    fn need<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.get(key)?.ok_or_else(|| ConfigError::Invalid(format!("missing parameter `{key}`")))
    }

    fn only(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.0.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(ConfigError::UnknownKey(k.clone())),
            None => Ok(()),
        }
    }
}

fn report(name: &str, params: &[(&str, f64)], value: f64) -> BoundReport {
    BoundReport {
        name: name.into(),
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        value,
        asymptotic: false,
    }
}

/// Evaluates one bound family on `key=value` parameters.
pub fn bounds_report(kind: BoundsKind, pairs: &[(String, String)]) -> Result<Vec<BoundReport>, ConfigError> {
    let p = Params(pairs);
    Ok(match kind {
        BoundsKind::Et => {
            p.only(&["m", "q", "t"])?;
            let (m, q): (usize, u64) = (p.need("m")?, p.need("q")?);
            let base = [("m", m as f64), ("q", q as f64)];
            let mut out = vec![report("et_ub", &base, et_ub(m, q)), report("et_lb", &base, et_lb(m, q))];
            if let Some(t) = p.get::<usize>("t")? {
                out.push(report("p_t_r_at_least", &[base[0], base[1], ("t", t as f64)], combination_decode_dist(m, q, t)));
            }
            out
        }
        BoundsKind::Etn => {
            p.only(&["d", "q", "eta"])?;
            let (d, q, eta): (usize, u64, usize) = (p.need("d")?, p.need("q")?, p.need("eta")?);
            vec![report("et_n_ub", &[("d", d as f64), ("q", q as f64), ("eta", eta as f64)], et_n_ub(d, q, eta)?)]
        }
        BoundsKind::Var => {
            p.only(&["n", "m", "q"])?;
            let r = var_t_avg_ub(p.need("n")?, p.need("m")?, p.need("q")?)?;
            let sd = BoundReport { name: "std_t_avg_ub".into(), value: r.value.max(0.0).sqrt(), ..r.clone() };
            vec![r, sd]
        }
        BoundsKind::Sparsified => {
            p.only(&["n", "m", "q", "epsilon"])?;
            let (m, q): (usize, u64) = (p.need("m")?, p.need("q")?);
            let mut out = sparsified_bounds(m, q)?;
            if let (Some(n), Some(eps)) = (p.get::<usize>("n")?, p.get::<f64>("epsilon")?) {
                let bits = rlnc_field_bits_sparsified(n, m, eps)?;
                out.push(report("w_avg_rlnc_lb", &[("n", n as f64), ("m", m as f64), ("epsilon", eps)], bits.ceil()));
            }
            out
        }
        BoundsKind::Umbrella => {
            p.only(&["alpha", "beta", "q", "epsilon", "qr_bits"])?;
            let field = match (p.get::<f64>("epsilon")?, p.get::<f64>("qr_bits")?) {
                (Some(eps), None) => RlncField::Epsilon(eps),
                (None, Some(bits)) => RlncField::Bits(bits),
                _ => return Err(ConfigError::Invalid("give exactly one of `epsilon` and `qr_bits`".into())),
            };
            umbrella_bounds(p.need("alpha")?, p.need("beta")?, p.need("q")?, field)?
        }
        BoundsKind::RlncQ => {
            p.only(&["d", "j", "eta", "target"])?;
            let d: usize = p.need("d")?;
            let target: f64 = p.need("target")?;
            let (kind, count, key) = match (p.get::<usize>("j")?, p.get::<usize>("eta")?) {
                (Some(j), None) => (RlncBound::EncodingNodes, j, "j"),
                (None, Some(eta)) => (RlncBound::PerLink, eta, "eta"),
                _ => return Err(ConfigError::Invalid("give exactly one of `j` and `eta`".into())),
            };
            let q = rlnc_min_q_for_target(d, count, target, kind)?;
            let params = [("d", d as f64), (key, count as f64), ("target", target)];
            vec![report("rlnc_min_q", &params, q as f64), report("rlnc_bits", &params, f64::from(q.trailing_zeros()))]
        }
    })
}

/// Table of bound reports, one per line.
pub fn format_bounds(reports: &[BoundReport]) -> String {
    let mut out = format!("{:<24} {:>14}  params\n", "bound", "value");
    for r in reports {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mark = if r.asymptotic { " (asymptotic)" } else { "" };
        let _ = writeln!(out, "{:<24} {:>14.6}  {}{mark}", r.name, r.value, params.join(" "));
    }
    out
}
