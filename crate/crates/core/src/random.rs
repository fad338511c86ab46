//! Random scenario and program generators for property tests and
//! benchmarks.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::difficulty::{DifficultyCurve, Effort};
use crate::model::{Detection, DocumentClass, Fault, Program, Scenario, Technique, TechniqueId};
use crate::practical::{DefectType, PracticalScenario, PracticalTechnique};

/// Size limits of generated instances.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_faults: usize,
    pub max_techniques: usize,
    pub max_effort: f64,
    /// Generate defect propagation between faults.
    pub predecessors: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_faults: 10,
            max_techniques: 5,
            max_effort: 40.0,
            predecessors: true,
        }
    }
}

pub fn curve(rng: &mut impl Rng) -> DifficultyCurve {
    match rng.random_range(0..4) {
        0 => DifficultyCurve::Exponential {
            lambda: rng.random_range(0.01..2.0),
        },
        1 => DifficultyCurve::Linear {
            slope: -rng.random_range(0.0..0.2),
        },
        2 => DifficultyCurve::Constant {
            theta: rng.random_range(0.0..=1.0),
        },
        _ => DifficultyCurve::Sigmoid {
            steepness: rng.random_range(0.05..2.0),
            midpoint: rng.random_range(0.0..30.0),
        },
    }
}

/// A valid ideal-model scenario with 1..=max_faults faults and
/// 1..=max_techniques techniques with distinct ids from 0..10.
pub fn scenario(rng: &mut impl Rng, limits: Limits) -> Scenario {
    let n_faults = rng.random_range(1..=limits.max_faults);
    let mut faults: Vec<Fault> = Vec::with_capacity(n_faults);
    for k in 0..n_faults {
        let doc_class = *DocumentClass::ALL.choose(rng).expect("non-empty");
        let mut predecessors = BTreeSet::new();
        if limits.predecessors {
            for f in &faults {
                if f.doc_class.stage() <= doc_class.stage() && rng.random_bool(0.3) {
                    predecessors.insert(f.id);
                }
            }
        }
        faults.push(Fault {
            id: k as u32 + 1,
            doc_class,
            predecessors,
            failure_probability: rng.random_range(0.0..=1.0),
            field_removal_cost: rng.random_range(0.0..5000.0),
            field_effect_cost: if rng.random_bool(0.5) { rng.random_range(0.0..5000.0) } else { 0.0 },
        });
    }

    let n_techniques = rng.random_range(1..=limits.max_techniques);
    let mut ids: Vec<TechniqueId> = (0..10).collect();
    ids.shuffle(rng);
    let techniques = ids[..n_techniques]
        .iter()
        .map(|&id| {
            let mut capable: BTreeSet<DocumentClass> = DocumentClass::ALL
                .into_iter()
                .filter(|_| rng.random_bool(0.6))
                .collect();
            if capable.is_empty() {
                capable.insert(*DocumentClass::ALL.choose(rng).expect("non-empty"));
            }
            let detections: BTreeMap<_, _> = faults
                .iter()
                .filter(|f| capable.contains(&f.doc_class))
                .map(|f| {
                    (
                        f.id,
                        Detection {
                            removal_cost: rng.random_range(0.0..300.0),
                            difficulty: curve(rng),
                        },
                    )
                })
                .collect();
            Technique {
                id,
                name: format!("technique {id}"),
                setup_cost: rng.random_range(0.0..500.0),
                execution_cost_rate: rng.random_bool(0.5).then(|| rng.random_range(0.0..100.0)),
                capable_classes: capable,
                detections,
            }
        })
        .collect();
    Scenario::new(rng.random_range(0.0..100.0), faults, techniques).expect("generator produces valid scenarios")
}

/// A program over the given techniques: random length up to twice the
/// catalogue, repeats and zero efforts allowed.
pub fn program(rng: &mut impl Rng, techniques: &[TechniqueId], max_effort: f64) -> Program {
    let len = rng.random_range(0..=2 * techniques.len());
    Program::new((0..len).map(|_| {
        let t = *techniques.choose(rng).expect("at least one technique");
        let hours = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..max_effort) };
        (t, Effort::new(hours).expect("non-negative"))
    }))
}

/// A valid practical scenario with 1..=6 defect types.
pub fn practical_scenario(rng: &mut impl Rng, limits: Limits) -> PracticalScenario {
    let n_types = rng.random_range(1..=6);
    let weights: Vec<f64> = (0..n_types).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut defect_types: Vec<DefectType> = weights
        .iter()
        .enumerate()
        .map(|(k, w)| DefectType {
            id: k as u32 + 1,
            name: format!("type {}", k + 1),
            fraction: w / total,
            failure_probability: rng.random_range(0.0..=1.0),
            avg_field_removal_cost: rng.random_range(0.0..5000.0),
            avg_field_effect_cost: rng.random_range(0.0..2000.0),
        })
        .collect();
    // Make the fractions sum to one exactly enough for validation.
    let drift: f64 = 1.0 - defect_types.iter().map(|d| d.fraction).sum::<f64>();
    defect_types[0].fraction += drift;

    let n_techniques = rng.random_range(1..=limits.max_techniques);
    let techniques = (0..n_techniques as u32)
        .map(|id| PracticalTechnique {
            id,
            name: format!("technique {id}"),
            avg_setup_cost: rng.random_range(0.0..500.0),
            execution_cost_rate: rng.random_bool(0.5).then(|| rng.random_range(0.0..100.0)),
            avg_removal_cost: defect_types.iter().map(|d| (d.id, rng.random_range(0.0..300.0))).collect(),
            difficulty_slope: defect_types
                .iter()
                .map(|d| (d.id, if rng.random_bool(0.2) { 0.0 } else { -rng.random_range(0.0..0.2) }))
                .collect(),
        })
        .collect();
    PracticalScenario::new(
        defect_types,
        rng.random_range(0..=25),
        techniques,
        rng.random_range(0.0..100.0),
    )
    .expect("generator produces valid scenarios")
}
