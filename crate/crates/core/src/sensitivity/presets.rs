//! Built-in designs and templates.
//!
//! The synthetic scenarios describe a small program of roughly 1000 lines
//! with a dozen faults and the seven standard techniques. All numeric
//! ranges are placeholders chosen to give the analysis a plausible shape;
//! they are not measured data. Field effect costs are left at zero.

use std::f64::consts::PI;

use rand::Rng;

use super::{
    Binding, Factor, FactorDistribution, FaultSpec, Grouping, IdealTemplate, PracticalTechniqueSpec,
    PracticalTemplate, ScenarioTemplate, SensitivityDesign, TechniqueEffort, TechniqueSpec,
};
use crate::difficulty::{CurveForm, Effort};
use crate::model::{DocumentClass, StandardTechnique, TechniqueId};
use crate::practical::DefectType;
use crate::seed;

pub const SYNTHETIC_FAULTS: u32 = 12;
pub const EFFORT_HORIZON_HOURS: f64 = 40.0;
const CLASS_PATTERNS: usize = 6;

fn factor(name: &str, distribution: FactorDistribution, binding: Binding) -> Factor {
    Factor {
        name: name.to_string(),
        distribution,
        binding,
    }
}

fn uniform(lo: f64, hi: f64) -> FactorDistribution {
    FactorDistribution::Uniform { lo, hi }
}

fn indices(n: usize) -> FactorDistribution {
    FactorDistribution::DiscreteUniform {
        values: (0..n).map(|k| k as f64).collect(),
    }
}

/// Application orders: the conventional one, a static-analysis-first
/// variant, one interleaving tests with inspections, the reversed order and
/// a tests-first order. The last two are deliberately unreasonable.
pub fn synthetic_sequences() -> Vec<Vec<TechniqueId>> {
    vec![
        vec![0, 1, 2, 3, 4, 5, 6],
        vec![2, 0, 1, 3, 4, 5, 6],
        vec![0, 1, 3, 4, 2, 5, 6],
        vec![6, 5, 4, 3, 2, 1, 0],
        vec![4, 5, 6, 0, 1, 2, 3],
    ]
}

/// Pattern 0 is a fixed 3/3/4/2 split over requirements, design, code and
/// test specification; the rest are seeded random assignments.
fn class_patterns() -> Vec<Vec<DocumentClass>> {
    use DocumentClass::*;
    let base = vec![
        Requirements, Requirements, Requirements, Design, Design, Design, Code, Code, Code, Code,
        TestSpec, TestSpec,
    ];
    let mut patterns = vec![base];
    for k in 1..CLASS_PATTERNS {
        let mut rng = seed::rng(seed::derive(seed::DEFAULT_SEED, k as u64));
        patterns.push(
            (0..SYNTHETIC_FAULTS)
                .map(|_| DocumentClass::ALL[rng.random_range(0..DocumentClass::ALL.len())])
                .collect(),
        );
    }
    patterns
}

fn horizon() -> Effort {
    Effort::new(EFFORT_HORIZON_HOURS).expect("positive constant")
}

/// Placeholder (setup cost, removal cost) per standard technique.
fn placeholder_costs(t: StandardTechnique) -> (f64, f64) {
    match t {
        StandardTechnique::RequirementsInspection => (200.0, 60.0),
        StandardTechnique::DesignInspection => (200.0, 80.0),
        StandardTechnique::StaticAnalysis => (400.0, 40.0),
        StandardTechnique::CodeInspection => (150.0, 50.0),
        StandardTechnique::UnitTest => (300.0, 70.0),
        StandardTechnique::IntegrationTest => (500.0, 150.0),
        StandardTechnique::SystemTest => (800.0, 250.0),
    }
}

fn standard_efforts(hours: f64) -> Vec<TechniqueEffort> {
    StandardTechnique::ALL
        .iter()
        .map(|t| TechniqueEffort {
            technique: t.id(),
            effort: Effort::new(hours).expect("non-negative constant"),
        })
        .collect()
}

pub fn synthetic_ideal_template() -> ScenarioTemplate {
    ScenarioTemplate::Ideal(IdealTemplate {
        labour_rate: 60.0,
        effort_horizon: horizon(),
        faults: (1..=SYNTHETIC_FAULTS)
            .map(|id| FaultSpec {
                id,
                failure_probability: 0.25,
                field_removal_cost: 2000.0,
                field_effect_cost: 0.0,
            })
            .collect(),
        class_patterns: class_patterns(),
        class_pattern: 0,
        predecessors: 1,
        techniques: StandardTechnique::ALL
            .iter()
            .map(|&t| {
                let (setup, removal) = placeholder_costs(t);
                TechniqueSpec {
                    id: t.id(),
                    name: t.name().to_string(),
                    setup_cost: setup,
                    execution_cost_rate: None,
                    removal_cost: removal,
                    mean_difficulty: 0.6,
                    form: CurveForm::Exponential,
                    capable_classes: t.capable_classes().to_vec(),
                }
            })
            .collect(),
        sequences: synthetic_sequences(),
        sequence: 0,
        efforts: standard_efforts(10.0),
    })
}

fn effort_distribution() -> FactorDistribution {
    uniform(1.0, EFFORT_HORIZON_HOURS)
}

fn mean_difficulty_distribution() -> FactorDistribution {
    uniform(0.2, 0.9)
}

fn field_removal_distribution() -> FactorDistribution {
    FactorDistribution::Triangular {
        lo: 500.0,
        mode: 1500.0,
        hi: 5000.0,
    }
}

fn labour_rate_distribution() -> FactorDistribution {
    FactorDistribution::TruncatedNormal {
        mean: 60.0,
        sd: 15.0,
        lo: 30.0,
        hi: 100.0,
    }
}

/// The eleven factors of the abstract grouping, each shared by all
/// techniques.
pub fn abstract_design() -> SensitivityDesign {
    SensitivityDesign {
        factors: vec![
            factor("c", indices(CLASS_PATTERNS), Binding::DefectClass),
            factor("t", effort_distribution(), Binding::Effort { technique: None }),
            factor("theta", mean_difficulty_distribution(), Binding::MeanDifficulty { technique: None }),
            factor("v_f", field_removal_distribution(), Binding::FieldRemovalCost),
            factor("phi", indices(CurveForm::ALL.len()), Binding::DifficultyForm { technique: None }),
            factor("u", uniform(50.0, 800.0), Binding::SetupCost { technique: None }),
            factor("v", uniform(20.0, 250.0), Binding::RemovalCost { technique: None }),
            factor("rho", indices(3), Binding::Predecessors),
            factor("pi", uniform(0.05, 0.5), Binding::FailureProbability),
            factor("s", indices(synthetic_sequences().len()), Binding::Sequence),
            factor("l", labour_rate_distribution(), Binding::LabourRate),
        ],
        grouping: Grouping::Abstract,
        samples_per_curve: 257,
        resamples: 2,
        interference: 4,
    }
}

/// The 41 factors of the detailed grouping: effort, setup cost, removal
/// cost, mean difficulty and curve form per technique, plus the six shared
/// factors.
pub fn detailed_design() -> SensitivityDesign {
    let mut factors = Vec::new();
    for t in StandardTechnique::ALL {
        let id = Some(t.id());
        let k = t.id();
        factors.push(factor(&format!("t_{k}"), effort_distribution(), Binding::Effort { technique: id }));
        factors.push(factor(&format!("u_{k}"), uniform(50.0, 800.0), Binding::SetupCost { technique: id }));
        factors.push(factor(&format!("v_{k}"), uniform(20.0, 250.0), Binding::RemovalCost { technique: id }));
        factors.push(factor(
            &format!("theta_{k}"),
            mean_difficulty_distribution(),
            Binding::MeanDifficulty { technique: id },
        ));
        factors.push(factor(
            &format!("phi_{k}"),
            indices(CurveForm::ALL.len()),
            Binding::DifficultyForm { technique: id },
        ));
    }
    factors.extend([
        factor("c", indices(CLASS_PATTERNS), Binding::DefectClass),
        factor("v_f", field_removal_distribution(), Binding::FieldRemovalCost),
        factor("rho", indices(3), Binding::Predecessors),
        factor("pi", uniform(0.05, 0.5), Binding::FailureProbability),
        factor("s", indices(synthetic_sequences().len()), Binding::Sequence),
        factor("l", labour_rate_distribution(), Binding::LabourRate),
    ]);
    SensitivityDesign {
        factors,
        grouping: Grouping::Detailed,
        samples_per_curve: 1313,
        resamples: 1,
        interference: 4,
    }
}

/// Four ODC-like defect types and the seven standard techniques.
pub fn synthetic_practical_template() -> ScenarioTemplate {
    let types = [
        (1, "function", 0.4, 2500.0),
        (2, "assignment", 0.3, 1000.0),
        (3, "interface", 0.2, 1800.0),
        (4, "timing", 0.1, 4000.0),
    ];
    let detectable: [&[u32]; 7] = [&[1], &[1, 3], &[2], &[2, 3], &[2, 3], &[1, 3, 4], &[1, 4]];
    ScenarioTemplate::Practical(PracticalTemplate {
        labour_rate: 60.0,
        effort_horizon: horizon(),
        expected_fault_count: SYNTHETIC_FAULTS,
        defect_types: types
            .iter()
            .map(|&(id, name, fraction, cost)| DefectType {
                id,
                name: name.to_string(),
                fraction,
                failure_probability: 0.25,
                avg_field_removal_cost: cost,
                avg_field_effect_cost: 0.0,
            })
            .collect(),
        techniques: StandardTechnique::ALL
            .iter()
            .map(|&t| {
                let (setup, removal) = placeholder_costs(t);
                PracticalTechniqueSpec {
                    id: t.id(),
                    name: t.name().to_string(),
                    avg_setup_cost: setup,
                    execution_cost_rate: None,
                    avg_removal_cost: removal,
                    mean_difficulty: 0.6,
                    detectable_types: detectable[t.id() as usize].to_vec(),
                }
            })
            .collect(),
        sequences: synthetic_sequences(),
        sequence: 0,
        efforts: standard_efforts(10.0),
    })
}

pub fn practical_design() -> SensitivityDesign {
    SensitivityDesign {
        factors: vec![
            factor("t", effort_distribution(), Binding::Effort { technique: None }),
            factor("theta", mean_difficulty_distribution(), Binding::MeanDifficulty { technique: None }),
            factor("v_f", field_removal_distribution(), Binding::FieldRemovalCost),
            factor("u", uniform(50.0, 800.0), Binding::SetupCost { technique: None }),
            factor("v", uniform(20.0, 250.0), Binding::RemovalCost { technique: None }),
            factor("pi", uniform(0.05, 0.5), Binding::FailureProbability),
            factor("s", indices(synthetic_sequences().len()), Binding::Sequence),
            factor("l", labour_rate_distribution(), Binding::LabourRate),
            factor("alpha", uniform(0.1, 0.7), Binding::DefectFraction),
        ],
        grouping: Grouping::Abstract,
        samples_per_curve: 257,
        resamples: 2,
        interference: 4,
    }
}

pub const ISHIGAMI_A: f64 = 7.0;
pub const ISHIGAMI_B: f64 = 0.1;

/// `sin x1 + a sin^2 x2 + b x3^4 sin x1`.
pub fn ishigami(x: &[f64]) -> f64 {
    x[0].sin() + ISHIGAMI_A * x[1].sin().powi(2) + ISHIGAMI_B * x[2].powi(4) * x[0].sin()
}

/// Three independent `U(-pi, pi)` inputs `x1..x3`.
///
/// Interference order 6: `sin^2 x2` and `x3^4` put a visible share of
/// their variance above the fourth harmonic.
pub fn ishigami_design(samples_per_curve: usize, resamples: usize) -> SensitivityDesign {
    SensitivityDesign {
        factors: ["x1", "x2", "x3"]
            .iter()
            .map(|n| factor(n, uniform(-PI, PI), Binding::Variable))
            .collect(),
        grouping: Grouping::Abstract,
        samples_per_curve,
        resamples,
        interference: 6,
    }
}
