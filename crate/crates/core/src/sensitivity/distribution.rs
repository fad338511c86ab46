use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Marginal distribution of one uncertain input factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorDistribution {
    Uniform { lo: f64, hi: f64 },
    DiscreteUniform { values: Vec<f64> },
    Triangular { lo: f64, mode: f64, hi: f64 },
    TruncatedNormal { mean: f64, sd: f64, lo: f64, hi: f64 },
}

impl FactorDistribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Design(msg));
        match *self {
            FactorDistribution::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return bad(format!("uniform bounds must satisfy lo <= hi, got [{lo}, {hi}]"));
                }
            }
            FactorDistribution::DiscreteUniform { ref values } => {
                if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                    return bad("discrete_uniform needs a non-empty list of finite values".into());
                }
            }
            FactorDistribution::Triangular { lo, mode, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= mode && mode <= hi) {
                    return bad(format!("triangular needs lo <= mode <= hi, got ({lo}, {mode}, {hi})"));
                }
            }
            FactorDistribution::TruncatedNormal { mean, sd, lo, hi } => {
                if !(mean.is_finite() && sd.is_finite() && sd > 0.0 && lo <= hi && !lo.is_nan() && !hi.is_nan()) {
                    return bad(format!(
                        "truncated_normal needs sd > 0 and lo <= hi, got mean {mean}, sd {sd}, [{lo}, {hi}]"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn bounds(&self) -> (f64, f64) {
        match self {
            FactorDistribution::Uniform { lo, hi }
            | FactorDistribution::Triangular { lo, hi, .. }
            | FactorDistribution::TruncatedNormal { lo, hi, .. } => (*lo, *hi),
            FactorDistribution::DiscreteUniform { values } => values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v))),
        }
    }

    /// Maps a probability `u` in `[0, 1]` to a value of the distribution.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match *self {
            FactorDistribution::Uniform { lo, hi } => lo + u * (hi - lo),
            FactorDistribution::DiscreteUniform { ref values } => {
                let n = values.len();
                values[((u * n as f64).floor() as usize).min(n - 1)]
            }
            FactorDistribution::Triangular { lo, mode, hi } => {
                let width = hi - lo;
                if width == 0.0 {
                    return lo;
                }
                let split = (mode - lo) / width;
                let x = if u < split {
                    lo + (u * width * (mode - lo)).sqrt()
                } else {
                    hi - ((1.0 - u) * width * (hi - mode)).sqrt()
                };
                x.clamp(lo, hi)
            }
            FactorDistribution::TruncatedNormal { mean, sd, lo, hi } => {
                if u == 0.0 {
                    return lo;
                }
                if u == 1.0 {
                    return hi;
                }
                let std = Normal::standard();
                let a = std.cdf((lo - mean) / sd);
                let b = std.cdf((hi - mean) / sd);
                let x = if b - a > 0.0 {
                    mean + sd * std.inverse_cdf(a + u * (b - a))
                } else {
                    // All mass lies in a far tail; fall back to the interval.
                    lo + u * (hi - lo)
                };
                if x.is_nan() {
                    lo
                } else {
                    x.clamp(lo, hi)
                }
            }
        }
    }

    pub fn median(&self) -> f64 {
        self.inverse_cdf(0.5)
    }
}
