//! Monte-Carlo simulation of the defect-detection process.
//!
//! Each run samples one world: which application detects which fault,
//! which derived defects disappear with their detected predecessors, and
//! which faults would fail in the field. The sample means converge to the
//! analytic cost terms of [`crate::model`] and serve as their oracle.
//!
//! Run `k` of an estimate uses the stream `seed::derive(seed, k)`, so
//! results do not depend on scheduling or thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::difficulty::Effort;
use crate::error::{Error, Result};
use crate::model::{Program, Scenario};
use crate::seed;

/// One sampled world.
///
/// Every fault draws a field-failure Bernoulli. The field cost of a failing
/// fault is booked to exactly one of `future` (never removed), `revenue`
/// (detected by an application) or `screened` (removed because a
/// predecessor was detected), so per run
/// `revenue + screened + future` equals the realized field-cost total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SimOutcome {
    pub direct: f64,
    pub future: f64,
    pub revenue: f64,
    pub screened: f64,
    /// Field cost of every fault that drew a failure, whatever its fate.
    pub realized_field_cost: f64,
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Statistic {
    pub mean: f64,
    /// `sample_std / sqrt(n)` with the `n - 1` denominator; 0 when `n = 1`.
    pub stderr: f64,
}

impl Statistic {
    fn from_samples(values: impl Iterator<Item = f64> + Clone, n: usize) -> Self {
        let mean = values.clone().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Statistic { mean, stderr }
    }

    /// True if `value` lies within `k` standard errors of the mean. A
    /// relative slack of 1e-9 absorbs rounding when the stderr is zero.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr + 1e-9 * value.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEstimate {
    pub n: usize,
    pub direct: Statistic,
    pub future: Statistic,
    pub revenue: Statistic,
    pub screened: Statistic,
}

/// A scenario/program pair prepared for repeated sampling.
pub struct Simulator<'a> {
    scenario: &'a Scenario,
    steps: Vec<(usize, Effort)>,
    descendants: Vec<Vec<usize>>,
}

impl<'a> Simulator<'a> {
    pub fn new(scenario: &'a Scenario, program: &Program) -> Result<Self> {
        let steps = program
            .applications
            .iter()
            .map(|a| Ok((scenario.technique_pos(a.technique)?, a.effort)))
            .collect::<Result<Vec<_>>>()?;
        let n = scenario.faults().len();
        let mut descendants = vec![Vec::new(); n];
        for f in 0..n {
            for &a in scenario.ancestors_of(f) {
                descendants[a].push(f);
            }
        }
        Ok(Simulator {
            scenario,
            steps,
            descendants,
        })
    }

    pub fn run(&self, seed: u64) -> SimOutcome {
        #[derive(Clone, Copy, PartialEq)]
        enum Fate {
            Live,
            Detected,
            Screened,
        }
        let scenario = self.scenario;
        let faults = scenario.faults();
        let mut rng = seed::rng(seed);
        let mut fate = vec![Fate::Live; faults.len()];
        let mut hit = Vec::with_capacity(faults.len());
        let mut out = SimOutcome::default();

        for &(tk, effort) in &self.steps {
            if effort.is_zero() {
                continue;
            }
            let tech = &scenario.techniques()[tk];
            out.direct += tech.setup_cost + tech.execution_cost(effort, scenario.labour_rate());
            hit.clear();
            for (fk, state) in fate.iter().enumerate() {
                if *state != Fate::Live {
                    continue;
                }
                let d = scenario.detection_at(tk, fk);
                let u: f64 = rng.random();
                if u < 1.0 - d.difficulty.eval(effort) {
                    hit.push(fk);
                }
            }
            // Screening applies from the next application on.
            for &fk in &hit {
                fate[fk] = Fate::Detected;
                out.direct += scenario.detection_at(tk, fk).removal_cost;
            }
            for &fk in &hit {
                for &succ in &self.descendants[fk] {
                    if fate[succ] == Fate::Live {
                        fate[succ] = Fate::Screened;
                    }
                }
            }
        }

        for (f, state) in faults.iter().zip(&fate) {
            let u: f64 = rng.random();
            if u < f.failure_probability {
                let cost = f.field_cost();
                out.realized_field_cost += cost;
                match state {
                    Fate::Live => out.future += cost,
                    Fate::Detected => out.revenue += cost,
                    Fate::Screened => out.screened += cost,
                }
            }
        }
        out
    }

    /// `n` independent runs, aggregated in run-index order.
    pub fn estimate(&self, n: usize, seed: u64) -> Result<SimEstimate> {
        if n == 0 {
            return Err(Error::Config("simulation needs at least one run".into()));
        }
        let outcomes: Vec<SimOutcome> = (0..n as u64)
            .into_par_iter()
            .map(|k| self.run(seed::derive(seed, k)))
            .collect();
        let stat = |f: fn(&SimOutcome) -> f64| Statistic::from_samples(outcomes.iter().map(f), n);
        Ok(SimEstimate {
            n,
            direct: stat(|o| o.direct),
            future: stat(|o| o.future),
            revenue: stat(|o| o.revenue),
            screened: stat(|o| o.screened),
        })
    }
}

/// Exact variance of one run's quantities.
///
/// With `n` runs, the standard error of an estimate is `sqrt(var / n)`.
/// Unlike the sample standard error this does not collapse to zero when
/// the relevant events are too rare to show up in the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunVariance {
    pub direct: f64,
    pub future: f64,
    pub revenue: f64,
    pub screened: f64,
}

impl RunVariance {
    pub fn stderr(var: f64, n: usize) -> f64 {
        (var.max(0.0) / n as f64).sqrt()
    }
}

/// An event on the detection draws: every draw in `pass` misses and the
/// draw `hit`, if any, detects.
struct Atom {
    pass: Vec<usize>,
    hit: Option<usize>,
}

/// Computes [`RunVariance`] from pairwise joint probabilities.
///
/// Draw `(application k, fault j)` detects with probability `1 - theta`,
/// independently of all others. Fault `i` is still live before application
/// `x` iff no draw of `i` or of any ancestor of `i` detected before `x`; it
/// is detected at `x` iff additionally its own draw at `x` detects.
pub fn run_variance(scenario: &Scenario, program: &Program) -> Result<RunVariance> {
    let steps: Vec<(usize, Effort)> = Simulator::new(scenario, program)?
        .steps
        .into_iter()
        .filter(|(_, e)| !e.is_zero())
        .collect();
    let faults = scenario.faults();
    let nf = faults.len();
    let draw = |k: usize, j: usize| k * nf + j;
    let miss: Vec<f64> = steps
        .iter()
        .flat_map(|&(tk, e)| (0..nf).map(move |j| scenario.detection_at(tk, j).difficulty.eval(e)))
        .collect();
    let family: Vec<Vec<usize>> = (0..nf)
        .map(|i| std::iter::once(i).chain(scenario.ancestors_of(i).iter().copied()).collect())
        .collect();
    let pass_before = |i: usize, x: usize| -> Vec<usize> {
        (0..x).flat_map(|k| family[i].iter().map(move |&j| draw(k, j))).collect()
    };

    // (weight, failing fault or none, atom); quantities are sums of terms.
    let mut atoms: Vec<Atom> = Vec::new();
    let mut push = |a: Atom| {
        atoms.push(a);
        atoms.len() - 1
    };
    let mut direct = Vec::new();
    let mut future = Vec::new();
    let mut revenue = Vec::new();
    let mut screened = Vec::new();
    for (i, f) in faults.iter().enumerate() {
        let c = f.field_cost();
        let live = push(Atom {
            pass: pass_before(i, steps.len()),
            hit: None,
        });
        let always = push(Atom {
            pass: Vec::new(),
            hit: None,
        });
        future.push((c, Some(i), live));
        screened.push((c, Some(i), always));
        screened.push((-c, Some(i), live));
        for (x, &(tk, _)) in steps.iter().enumerate() {
            let detected = push(Atom {
                pass: pass_before(i, x),
                hit: Some(draw(x, i)),
            });
            direct.push((scenario.detection_at(tk, i).removal_cost, None, detected));
            revenue.push((c, Some(i), detected));
            screened.push((-c, Some(i), detected));
        }
    }

    let mut state = vec![0u8; miss.len()];
    let mut joint = |a: &Atom, b: Option<&Atom>| -> f64 {
        state.iter_mut().for_each(|s| *s = 0);
        let mut p = 1.0;
        for atom in std::iter::once(a).chain(b) {
            for &d in &atom.pass {
                match state[d] {
                    0 => {
                        state[d] = 1;
                        p *= miss[d];
                    }
                    2 => return 0.0,
                    _ => {}
                }
            }
            if let Some(d) = atom.hit {
                match state[d] {
                    0 => {
                        state[d] = 2;
                        p *= 1.0 - miss[d];
                    }
                    1 => return 0.0,
                    _ => {}
                }
            }
        }
        p
    };
    let single: Vec<f64> = atoms.iter().map(|a| joint(a, None)).collect();
    let fail = |i: Option<usize>| i.map_or(1.0, |i| faults[i].failure_probability);
    let mut variance = |terms: &[(f64, Option<usize>, usize)]| -> f64 {
        let mut v = 0.0;
        for &(wa, fa, a) in terms {
            for &(wb, fb, b) in terms {
                let both_fail = match (fa, fb) {
                    (Some(i), Some(j)) if i == j => fail(Some(i)),
                    _ => fail(fa) * fail(fb),
                };
                let pab = joint(&atoms[a], Some(&atoms[b]));
                v += wa * wb * (both_fail * pab - fail(fa) * single[a] * fail(fb) * single[b]);
            }
        }
        v.max(0.0)
    };
    Ok(RunVariance {
        direct: variance(&direct),
        future: variance(&future),
        revenue: variance(&revenue),
        screened: variance(&screened),
    })
}

pub fn simulate_once(scenario: &Scenario, program: &Program, seed: u64) -> Result<SimOutcome> {
    Ok(Simulator::new(scenario, program)?.run(seed))
}

pub fn estimate(scenario: &Scenario, program: &Program, n: usize, seed: u64) -> Result<SimEstimate> {
    Simulator::new(scenario, program)?.estimate(n, seed)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::difficulty::DifficultyCurve;
    use crate::model::{Detection, DocumentClass, Fault, Technique};

    fn e(h: f64) -> Effort {
        Effort::new(h).unwrap()
    }

    fn scenario(theta: f64, pi: f64) -> Scenario {
        Scenario::new(
            0.0,
            vec![Fault {
                id: 1,
                doc_class: DocumentClass::Code,
                predecessors: BTreeSet::new(),
                failure_probability: pi,
                field_removal_cost: 100.0,
                field_effect_cost: 900.0,
            }],
            vec![Technique {
                id: 0,
                name: "t".into(),
                setup_cost: 3.0,
                execution_cost_rate: Some(2.0),
                capable_classes: DocumentClass::ALL.into_iter().collect(),
                detections: [(
                    1,
                    Detection {
                        removal_cost: 4.0,
                        difficulty: DifficultyCurve::Constant { theta },
                    },
                )]
                .into_iter()
                .collect(),
            }],
        )
        .unwrap()
    }

    #[test]
    fn nothing_detectable() {
        let s = scenario(1.0, 0.5);
        let p = Program::single(0, e(5.0));
        for seed in 0..50 {
            let o = simulate_once(&s, &p, seed).unwrap();
            assert_eq!(o.direct, 13.0);
            assert_eq!(o.revenue, 0.0);
            assert!(o.future == 0.0 || o.future == 1000.0);
        }
    }

    #[test]
    fn certain_detection_and_failure() {
        let s = scenario(0.0, 1.0);
        let o = simulate_once(&s, &Program::single(0, e(5.0)), 7).unwrap();
        assert_eq!(o.revenue, 1000.0);
        assert_eq!(o.future, 0.0);
        assert_eq!(o.direct, 3.0 + 10.0 + 4.0);
    }

    #[test]
    fn deterministic_under_seed() {
        let s = scenario(0.5, 0.3);
        let p = Program::single(0, e(5.0));
        assert_eq!(simulate_once(&s, &p, 42).unwrap(), simulate_once(&s, &p, 42).unwrap());
        assert_eq!(estimate(&s, &p, 1000, 9).unwrap(), estimate(&s, &p, 1000, 9).unwrap());
    }

    #[test]
    fn single_run_estimate() {
        let s = scenario(0.5, 0.3);
        let p = Program::single(0, e(5.0));
        let est = estimate(&s, &p, 1, 11).unwrap();
        let one = simulate_once(&s, &p, seed::derive(11, 0)).unwrap();
        assert_eq!(est.revenue.mean, one.revenue);
        assert_eq!(est.revenue.stderr, 0.0);
        assert!(estimate(&s, &p, 0, 11).is_err());
    }

    #[test]
    fn exact_variance_of_worked_fault() {
        let s = scenario(0.5, 0.1);
        let v = run_variance(&s, &Program::single(0, e(5.0))).unwrap();
        // revenue = 1000 * F * D with P(F D) = 0.05
        assert!((v.revenue - 1e6 * 0.05 * 0.95).abs() < 1e-6);
        assert!((v.future - 1e6 * 0.05 * 0.95).abs() < 1e-6);
        // direct = 13 + 4 * D with P(D) = 0.5
        assert!((v.direct - 16.0 * 0.25).abs() < 1e-12);
        assert_eq!(v.screened, 0.0);
        let none = run_variance(&s, &Program::default()).unwrap();
        assert!((none.future - 1e6 * 0.1 * 0.9).abs() < 1e-6);
    }

    #[test]
    fn converges_on_worked_fault() {
        let s = scenario(0.5, 0.1);
        let est = estimate(&s, &Program::single(0, e(5.0)), 100_000, 3).unwrap();
        assert!(est.revenue.covers(50.0, 3.0), "{:?}", est.revenue);
        let empty = estimate(&s, &Program::default(), 100_000, 4).unwrap();
        assert!(empty.future.covers(100.0, 3.0), "{:?}", empty.future);
    }
}
