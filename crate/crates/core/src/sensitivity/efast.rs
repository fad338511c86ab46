//! Extended Fourier amplitude sensitivity test.
//!
//! For every factor of interest and every resample, all factors are driven
//! along a periodic search curve. The factor of interest oscillates at the
//! high frequency `omega_max`, the others at low complementary frequencies
//! `<= omega_max / (2M)`. The output spectrum at the harmonics
//! `p * omega_max, p = 1..=M` gives the first-order variance; everything at
//! frequencies `<= omega_max / 2` belongs to the other factors, and its
//! complement gives the total-order variance.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::{FactorIndices, SensitivityDesign, SensitivityResult};
use crate::error::{Error, Result};
use crate::seed;

/// Frequency plan shared by every search curve of a design.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPlan {
    pub omega_max: usize,
    /// Frequencies handed to the non-focus factors, in assignment order.
    pub complementary: Vec<usize>,
}

impl FrequencyPlan {
    pub fn new(samples_per_curve: usize, interference: usize, factor_count: usize) -> Result<Self> {
        if interference == 0 {
            return Err(Error::Design("interference order M must be at least 1".into()));
        }
        if samples_per_curve.is_multiple_of(2) {
            return Err(Error::Design(format!(
                "samples_per_curve must be odd, got {samples_per_curve}"
            )));
        }
        let omega_max = samples_per_curve.saturating_sub(1) / (2 * interference);
        let max_complementary = omega_max / (2 * interference);
        if max_complementary == 0 {
            return Err(Error::Design(format!(
                "samples_per_curve = {samples_per_curve} is too small for interference M = {interference}: \
                 need at least {} samples so that omega_max >= 2M",
                4 * interference * interference + 1
            )));
        }
        let others = factor_count.saturating_sub(1);
        let complementary = if others == 1 {
            vec![1]
        } else if max_complementary >= others {
            // Spread evenly over 1..=max_complementary.
            (0..others)
                .map(|k| 1 + k * (max_complementary - 1) / (others - 1))
                .collect()
        } else {
            (0..others).map(|k| k % max_complementary + 1).collect()
        };
        Ok(FrequencyPlan {
            omega_max,
            complementary,
        })
    }
}

/// Search-curve samples for every (focus factor, resample) block.
///
/// Rows are grouped in blocks of `samples_per_curve`; block `b` belongs to
/// focus factor `b / resamples` (declaration order) and resample
/// `b % resamples`. Columns follow factor declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub samples_per_curve: usize,
    pub resamples: usize,
}

/// Uniform-marginal periodic carrier: `1/2 + arcsin(sin(angle)) / pi`.
fn carrier(angle: f64) -> f64 {
    (0.5 + angle.sin().asin() / PI).clamp(0.0, 1.0)
}

/// Phase of `factor` on the curve for `focus` in resample `r`, keyed by names
/// so that declaration order is irrelevant.
fn phase(master: u64, focus: &str, resample: usize, factor: &str) -> f64 {
    let s = seed::derive(
        seed::derive(seed::derive(master, seed::hash_key(focus)), resample as u64),
        seed::hash_key(factor),
    );
    seed::rng(s).random::<f64>() * 2.0 * PI
}

pub fn generate_samples(design: &SensitivityDesign, master_seed: u64) -> Result<SampleMatrix> {
    design.validate_sampling()?;
    let n = design.samples_per_curve;
    let d = design.factors.len();
    let plan = FrequencyPlan::new(n, design.interference, d)?;

    let mut rows = Vec::with_capacity(d * design.resamples * n);
    for focus in &design.factors {
        // Complementary frequencies go to the other factors in name order.
        let mut others: Vec<&str> = design
            .factors
            .iter()
            .map(|f| f.name.as_str())
            .filter(|name| *name != focus.name)
            .collect();
        others.sort_unstable();
        let omega: Vec<usize> = design
            .factors
            .iter()
            .map(|f| {
                if f.name == focus.name {
                    plan.omega_max
                } else {
                    let k = others.binary_search(&f.name.as_str()).expect("factor listed");
                    plan.complementary[k]
                }
            })
            .collect();

        for r in 0..design.resamples {
            let phases: Vec<f64> = design
                .factors
                .iter()
                .map(|f| phase(master_seed, &focus.name, r, &f.name))
                .collect();
            for j in 0..n {
                let row = design
                    .factors
                    .iter()
                    .zip(&omega)
                    .zip(&phases)
                    .map(|((f, &w), &ph)| {
                        let angle = 2.0 * PI * ((w * j) % n) as f64 / n as f64 + ph;
                        f.distribution.inverse_cdf(carrier(angle))
                    })
                    .collect();
                rows.push(row);
            }
        }
    }

    Ok(SampleMatrix {
        names: design.factors.iter().map(|f| f.name.clone()).collect(),
        rows,
        samples_per_curve: n,
        resamples: design.resamples,
    })
}

/// Spectral decomposition of one curve's output.
struct CurveSpectrum<'a> {
    cos: &'a [f64],
    sin: &'a [f64],
}

impl CurveSpectrum<'_> {
    /// Variance carried by frequency `w`: `(A_w^2 + B_w^2) / 2`.
    fn power(&self, y: &[f64], w: usize) -> f64 {
        let n = y.len();
        let (mut c, mut s) = (0.0, 0.0);
        for (j, &v) in y.iter().enumerate() {
            let k = (w * j) % n;
            c += v * self.cos[k];
            s += v * self.sin[k];
        }
        2.0 * (c * c + s * s) / (n * n) as f64
    }
}

/// Computes indices from model outputs aligned with [`generate_samples`].
pub fn analyze_outputs(design: &SensitivityDesign, outputs: &[f64]) -> Result<SensitivityResult> {
    design.validate_sampling()?;
    let n = design.samples_per_curve;
    let d = design.factors.len();
    let m = design.interference;
    let plan = FrequencyPlan::new(n, m, d)?;
    let expected = d * design.resamples * n;
    if outputs.len() != expected {
        return Err(Error::Design(format!(
            "expected {expected} model outputs for this design, got {}",
            outputs.len()
        )));
    }
    if let Some(k) = outputs.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("model output row {k} is not finite")));
    }

    let cos: Vec<f64> = (0..n).map(|k| (2.0 * PI * k as f64 / n as f64).cos()).collect();
    let sin: Vec<f64> = (0..n).map(|k| (2.0 * PI * k as f64 / n as f64).sin()).collect();
    let spectrum = CurveSpectrum { cos: &cos, sin: &sin };

    let mut degenerate = false;
    let mut indices = Vec::with_capacity(d);
    for (fi, factor) in design.factors.iter().enumerate() {
        let (mut first, mut total) = (0.0, 0.0);
        for r in 0..design.resamples {
            let start = (fi * design.resamples + r) * n;
            let y = &outputs[start..start + n];
            let mean = y.iter().sum::<f64>() / n as f64;
            let variance = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            if variance <= 1e-24 * mean * mean || variance == 0.0 {
                degenerate = true;
                continue;
            }
            let d_first: f64 = (1..=m).map(|p| spectrum.power(y, p * plan.omega_max)).sum();
            let d_rest: f64 = (1..=plan.omega_max / 2).map(|w| spectrum.power(y, w)).sum();
            first += d_first / variance;
            total += 1.0 - d_rest / variance;
        }
        let nr = design.resamples as f64;
        indices.push(FactorIndices {
            name: factor.name.clone(),
            first_order: (first / nr).clamp(0.0, 1.0),
            total_order: (total / nr).clamp(0.0, 1.0),
        });
    }
    if degenerate {
        for ix in &mut indices {
            ix.first_order = 0.0;
            ix.total_order = 0.0;
        }
    }
    Ok(SensitivityResult {
        indices,
        degenerate,
    })
}

/// Evaluates `model` on every sample row (in parallel) and decomposes the
/// output variance.
pub fn efast_indices<F>(model: F, design: &SensitivityDesign, master_seed: u64) -> Result<SensitivityResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let samples = generate_samples(design, master_seed)?;
    let outputs = samples
        .rows
        .par_iter()
        .map(|row| model(row))
        .collect::<Result<Vec<f64>>>()?;
    analyze_outputs(design, &outputs)
}
