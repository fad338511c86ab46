//! Difficulty functions: the probability that a technique does *not*
//! detect a given fault after a given amount of effort.
//!
//! Four families are supported. Every evaluation is a probability in
//! `[0, 1]` and is non-increasing in effort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Person-hours per staff-day.
pub const HOURS_PER_STAFF_DAY: f64 = 8.0;

/// Effort spent on one technique application, in person-hours.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Effort(f64);

impl Effort {
    pub const ZERO: Effort = Effort(0.0);

    pub fn new(hours: f64) -> Result<Self> {
        if hours.is_finite() && hours >= 0.0 {
            Ok(Effort(hours))
        } else {
            Err(Error::invariant(
                "effort",
                format!("effort must be a finite non-negative number of hours, got {hours}"),
            ))
        }
    }

    pub fn from_staff_days(days: f64) -> Result<Self> {
        Self::new(days * HOURS_PER_STAFF_DAY)
    }

    pub fn hours(self) -> f64 {
        self.0
    }

    pub fn staff_days(self) -> f64 {
        self.0 / HOURS_PER_STAFF_DAY
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

impl TryFrom<f64> for Effort {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Effort::new(value)
    }
}

impl From<Effort> for f64 {
    fn from(e: Effort) -> f64 {
        e.0
    }
}

/// Functional form of a difficulty curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum DifficultyCurve {
    /// `lambda * exp(-lambda * t)` for `t > 0`, and 1 at `t = 0`; clamped to 1.
    Exponential { lambda: f64 },
    /// `slope * t + 1`, clamped to `[0, 1]`. The slope is non-positive.
    Linear { slope: f64 },
    /// Effort-independent.
    Constant { theta: f64 },
    /// Complementary logistic `1 / (1 + exp(steepness * (t - midpoint)))`.
    Sigmoid { steepness: f64, midpoint: f64 },
}

/// Discriminant of [`DifficultyCurve`], used where only the family is chosen
/// and parameters are derived (e.g. sampled by sensitivity analysis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveForm {
    Exponential,
    Linear,
    Constant,
    Sigmoid,
}

impl CurveForm {
    pub const ALL: [CurveForm; 4] = [
        CurveForm::Exponential,
        CurveForm::Linear,
        CurveForm::Constant,
        CurveForm::Sigmoid,
    ];
}

impl DifficultyCurve {
    /// The "technique cannot detect this fault" curve.
    pub const UNDETECTABLE: DifficultyCurve = DifficultyCurve::Constant { theta: 1.0 };

    pub fn form(&self) -> CurveForm {
        match self {
            DifficultyCurve::Exponential { .. } => CurveForm::Exponential,
            DifficultyCurve::Linear { .. } => CurveForm::Linear,
            DifficultyCurve::Constant { .. } => CurveForm::Constant,
            DifficultyCurve::Sigmoid { .. } => CurveForm::Sigmoid,
        }
    }

    pub fn is_undetectable(&self) -> bool {
        matches!(self, DifficultyCurve::Constant { theta } if *theta == 1.0)
    }

    /// Checks the parameter domain of each family.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DifficultyCurve::Exponential { lambda } => lambda.is_finite() && lambda > 0.0,
            DifficultyCurve::Linear { slope } => slope.is_finite() && slope <= 0.0,
            DifficultyCurve::Constant { theta } => (0.0..=1.0).contains(&theta),
            DifficultyCurve::Sigmoid {
                steepness,
                midpoint,
            } => steepness.is_finite() && steepness > 0.0 && midpoint.is_finite() && midpoint >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invariant(
                "difficulty_curve",
                format!("parameters out of domain: {self:?}"),
            ))
        }
    }

    /// Probability of non-detection after `effort`.
    pub fn eval(&self, effort: Effort) -> f64 {
        let t = effort.hours();
        match *self {
            DifficultyCurve::Exponential { lambda } => {
                if t > 0.0 {
                    (lambda * (-lambda * t).exp()).min(1.0)
                } else {
                    1.0
                }
            }
            DifficultyCurve::Linear { slope } => (slope * t + 1.0).clamp(0.0, 1.0),
            DifficultyCurve::Constant { theta } => theta,
            DifficultyCurve::Sigmoid {
                steepness,
                midpoint,
            } => logistic_complement(steepness * (t - midpoint)),
        }
    }

    /// Calibrates an exponential curve from an empirically measured mean
    /// difficulty: `lambda` is its inverse.
    pub fn calibrate_exponential(mean_difficulty: f64) -> Result<Self> {
        if mean_difficulty > 0.0 && mean_difficulty <= 1.0 {
            Ok(DifficultyCurve::Exponential {
                lambda: 1.0 / mean_difficulty,
            })
        } else {
            Err(Error::Calibration(mean_difficulty))
        }
    }

    /// Builds a curve of the given family whose mean difficulty is `mean`.
    ///
    /// Exponential curves use the inverse-mean calibration. Linear and
    /// sigmoid curves are solved so that their average over `[0, horizon]`
    /// equals `mean`. A mean of 1 always yields the undetectable curve and a
    /// mean of 0 certain detection.
    pub fn with_mean(form: CurveForm, mean: f64, horizon: Effort) -> Result<Self> {
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::Calibration(mean));
        }
        if mean >= 1.0 {
            return Ok(Self::UNDETECTABLE);
        }
        if mean <= 0.0 {
            return Ok(DifficultyCurve::Constant { theta: 0.0 });
        }
        let h = horizon.hours();
        if form != CurveForm::Constant && form != CurveForm::Exponential && h <= 0.0 {
            return Err(Error::Design(format!(
                "{form:?} curve needs a positive effort horizon to match a mean"
            )));
        }
        Ok(match form {
            CurveForm::Exponential => Self::calibrate_exponential(mean)?,
            CurveForm::Constant => DifficultyCurve::Constant { theta: mean },
            CurveForm::Linear => {
                // Unclamped line averages 1 + slope*h/2; once the clamp at
                // zero is reached inside the horizon the average is t0/(2h).
                let slope = if mean >= 0.5 {
                    -2.0 * (1.0 - mean) / h
                } else {
                    -1.0 / (2.0 * mean * h)
                };
                DifficultyCurve::Linear { slope }
            }
            CurveForm::Sigmoid => sigmoid_with_mean(mean, h),
        })
    }
}

fn logistic_complement(z: f64) -> f64 {
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Mean of the complementary logistic over `[0, h]`.
fn sigmoid_mean(steepness: f64, midpoint: f64, h: f64) -> f64 {
    let integral =
        h - (softplus(steepness * (h - midpoint)) - softplus(-steepness * midpoint)) / steepness;
    integral / h
}

const SIGMOID_STEEPNESS_PER_HORIZON: f64 = 10.0;

fn sigmoid_with_mean(mean: f64, h: f64) -> DifficultyCurve {
    let steepness = SIGMOID_STEEPNESS_PER_HORIZON / h;
    // sigmoid_mean is increasing in the midpoint.
    if sigmoid_mean(steepness, 0.0, h) <= mean {
        let midpoint = bisect(0.0, 1e3 * h, |m| sigmoid_mean(steepness, m, h) - mean);
        DifficultyCurve::Sigmoid {
            steepness,
            midpoint,
        }
    } else {
        // Midpoint pinned at zero: steepen the curve instead (mean is
        // decreasing in steepness there).
        let k = bisect(steepness, 1e12 * steepness, |k| {
            mean - sigmoid_mean(k, 0.0, h)
        });
        DifficultyCurve::Sigmoid {
            steepness: k,
            midpoint: 0.0,
        }
    }
}

/// Root of an increasing function on `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}
