//! Scenario templates: parameterized scenarios whose fields are filled in
//! from sampled factor values before each model evaluation.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{efast, Binding, SampleMatrix, SensitivityDesign, SensitivityResult};
use crate::difficulty::{CurveForm, DifficultyCurve, Effort};
use crate::error::{Error, Result};
use crate::model::{
    CostModel, CostTerms, Detection, DocumentClass, Fault, FaultId, Program, Scenario, Technique,
    TechniqueId,
};
use crate::practical::{DefectType, DefectTypeId, PracticalScenario, PracticalTechnique};

/// Model output analysed by sensitivity runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputMeasure {
    #[default]
    Roi,
    NetBenefit,
}

impl OutputMeasure {
    fn of(self, terms: &CostTerms) -> Result<f64> {
        match self {
            OutputMeasure::Roi => terms.breakdown().map(|b| b.roi),
            OutputMeasure::NetBenefit => Ok(terms.net_benefit()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSpec {
    pub id: FaultId,
    pub failure_probability: f64,
    pub field_removal_cost: f64,
    #[serde(default)]
    pub field_effect_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechniqueSpec {
    pub id: TechniqueId,
    #[serde(default)]
    pub name: String,
    pub setup_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub execution_cost_rate: Option<f64>,
    /// Removal cost of every fault the technique finds.
    pub removal_cost: f64,
    pub mean_difficulty: f64,
    pub form: CurveForm,
    pub capable_classes: Vec<DocumentClass>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechniqueEffort {
    pub technique: TechniqueId,
    pub effort: Effort,
}

/// Parameterized ideal-model scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealTemplate {
    pub labour_rate: f64,
    /// Effort range over which linear and sigmoid curves match their mean.
    pub effort_horizon: Effort,
    pub faults: Vec<FaultSpec>,
    /// Candidate document-class assignments, one class per fault each.
    pub class_patterns: Vec<Vec<DocumentClass>>,
    #[serde(default)]
    pub class_pattern: usize,
    /// Predecessors per fault, drawn from faults in earlier document stages.
    #[serde(default)]
    pub predecessors: u32,
    pub techniques: Vec<TechniqueSpec>,
    /// Candidate application orders.
    pub sequences: Vec<Vec<TechniqueId>>,
    #[serde(default)]
    pub sequence: usize,
    pub efforts: Vec<TechniqueEffort>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PracticalTechniqueSpec {
    pub id: TechniqueId,
    #[serde(default)]
    pub name: String,
    pub avg_setup_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub execution_cost_rate: Option<f64>,
    pub avg_removal_cost: f64,
    pub mean_difficulty: f64,
    /// Types with a non-zero slope; all others get `m = 0`.
    pub detectable_types: Vec<DefectTypeId>,
}

/// Parameterized practical-model scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PracticalTemplate {
    pub labour_rate: f64,
    pub effort_horizon: Effort,
    pub expected_fault_count: u32,
    pub defect_types: Vec<DefectType>,
    pub techniques: Vec<PracticalTechniqueSpec>,
    pub sequences: Vec<Vec<TechniqueId>>,
    #[serde(default)]
    pub sequence: usize,
    pub efforts: Vec<TechniqueEffort>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ScenarioTemplate {
    Ideal(IdealTemplate),
    Practical(PracticalTemplate),
}

fn index_value(v: f64, len: usize, what: &str) -> Result<usize> {
    let k = v.round();
    if k >= 0.0 && (k as usize) < len {
        Ok(k as usize)
    } else {
        Err(Error::Design(format!(
            "{what} index {v} is out of range (0..{len})"
        )))
    }
}

fn non_negative(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::Design(format!("{what} value {v} must be finite and >= 0")))
    }
}

fn probability(v: f64, what: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::Design(format!("{what} value {v} is outside [0, 1]")))
    }
}

/// Applies `f` to the technique(s) selected by `technique`.
fn for_selected<T>(
    items: &mut [T],
    technique: Option<TechniqueId>,
    id: impl Fn(&T) -> TechniqueId,
    mut f: impl FnMut(&mut T) -> Result<()>,
) -> Result<()> {
    let mut hit = false;
    for item in items.iter_mut() {
        if technique.is_none_or(|t| t == id(item)) {
            f(item)?;
            hit = true;
        }
    }
    match technique {
        Some(t) if !hit => Err(Error::unresolved("technique", t)),
        _ => Ok(()),
    }
}

fn set_effort(efforts: &mut [TechniqueEffort], technique: Option<TechniqueId>, v: f64) -> Result<()> {
    let effort = Effort::new(v).map_err(|_| Error::Design(format!("effort value {v} must be >= 0")))?;
    for_selected(efforts, technique, |e| e.technique, |e| {
        e.effort = effort;
        Ok(())
    })
}

fn program_of(sequences: &[Vec<TechniqueId>], sequence: usize, efforts: &[TechniqueEffort]) -> Result<Program> {
    let order = sequences
        .get(sequence)
        .ok_or_else(|| Error::Design(format!("sequence index {sequence} is out of range")))?;
    order
        .iter()
        .map(|&t| {
            efforts
                .iter()
                .find(|e| e.technique == t)
                .map(|e| (t, e.effort))
                .ok_or_else(|| Error::Design(format!("template has no effort for technique {t}")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Program::new)
}

impl IdealTemplate {
    pub fn apply(&mut self, binding: &Binding, v: f64) -> Result<()> {
        match *binding {
            Binding::Effort { technique } => set_effort(&mut self.efforts, technique, v)?,
            Binding::SetupCost { technique } => {
                let v = non_negative(v, "setup cost")?;
                for_selected(&mut self.techniques, technique, |t| t.id, |t| {
                    t.setup_cost = v;
                    Ok(())
                })?
            }
            Binding::RemovalCost { technique } => {
                let v = non_negative(v, "removal cost")?;
                for_selected(&mut self.techniques, technique, |t| t.id, |t| {
                    t.removal_cost = v;
                    Ok(())
                })?
            }
            Binding::MeanDifficulty { technique } => {
                let v = probability(v, "mean difficulty")?;
                for_selected(&mut self.techniques, technique, |t| t.id, |t| {
                    t.mean_difficulty = v;
                    Ok(())
                })?
            }
            Binding::DifficultyForm { technique } => {
                let form = CurveForm::ALL[index_value(v, 4, "difficulty form")?];
                for_selected(&mut self.techniques, technique, |t| t.id, |t| {
                    t.form = form;
                    Ok(())
                })?
            }
            Binding::FieldRemovalCost => {
                let v = non_negative(v, "field removal cost")?;
                self.faults.iter_mut().for_each(|f| f.field_removal_cost = v);
            }
            Binding::FieldEffectCost => {
                let v = non_negative(v, "field effect cost")?;
                self.faults.iter_mut().for_each(|f| f.field_effect_cost = v);
            }
            Binding::FailureProbability => {
                let v = probability(v, "failure probability")?;
                self.faults.iter_mut().for_each(|f| f.failure_probability = v);
            }
            Binding::LabourRate => self.labour_rate = non_negative(v, "labour rate")?,
            Binding::Sequence => self.sequence = index_value(v, self.sequences.len(), "sequence")?,
            Binding::DefectClass => {
                self.class_pattern = index_value(v, self.class_patterns.len(), "class pattern")?
            }
            Binding::Predecessors => {
                self.predecessors = non_negative(v, "predecessor count")?.round() as u32
            }
            Binding::DefectFraction | Binding::Variable => {
                return Err(Error::Design(format!(
                    "{binding:?} cannot be bound into an ideal-model template"
                )))
            }
        }
        Ok(())
    }

    /// Builds the concrete scenario and program.
    pub fn instantiate(&self) -> Result<(Scenario, Program)> {
        let classes = self
            .class_patterns
            .get(self.class_pattern)
            .ok_or_else(|| Error::Design(format!("class pattern {} is out of range", self.class_pattern)))?;
        if classes.len() != self.faults.len() {
            return Err(Error::Design(format!(
                "class pattern {} has {} entries for {} faults",
                self.class_pattern,
                classes.len(),
                self.faults.len()
            )));
        }
        let n = self.faults.len();
        let faults: Vec<Fault> = self
            .faults
            .iter()
            .enumerate()
            .map(|(k, f)| {
                // Nearest faults (cyclically before k) in strictly earlier stages.
                let predecessors: BTreeSet<FaultId> = (1..n)
                    .map(|d| (k + n - d) % n)
                    .filter(|&j| classes[j].stage() < classes[k].stage())
                    .take(self.predecessors as usize)
                    .map(|j| self.faults[j].id)
                    .collect();
                Fault {
                    id: f.id,
                    doc_class: classes[k],
                    predecessors,
                    failure_probability: f.failure_probability,
                    field_removal_cost: f.field_removal_cost,
                    field_effect_cost: f.field_effect_cost,
                }
            })
            .collect();
        let techniques = self
            .techniques
            .iter()
            .map(|t| {
                let curve = DifficultyCurve::with_mean(t.form, t.mean_difficulty, self.effort_horizon)?;
                let capable: BTreeSet<DocumentClass> = t.capable_classes.iter().copied().collect();
                let detections = faults
                    .iter()
                    .filter(|f| capable.contains(&f.doc_class))
                    .map(|f| {
                        (
                            f.id,
                            Detection {
                                removal_cost: t.removal_cost,
                                difficulty: curve,
                            },
                        )
                    })
                    .collect();
                Ok(Technique {
                    id: t.id,
                    name: t.name.clone(),
                    setup_cost: t.setup_cost,
                    execution_cost_rate: t.execution_cost_rate,
                    capable_classes: capable,
                    detections,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let scenario = Scenario::new(self.labour_rate, faults, techniques)?;
        let program = program_of(&self.sequences, self.sequence, &self.efforts)?;
        for a in &program.applications {
            scenario.technique(a.technique)?;
        }
        Ok((scenario, program))
    }
}

impl PracticalTemplate {
    pub fn apply(&mut self, binding: &Binding, v: f64) -> Result<()> {
        match *binding {
            Binding::Effort { technique } => set_effort(&mut self.efforts, technique, v)?,
            Binding::SetupCost { technique } => {
                let v = non_negative(v, "setup cost")?;
                for_selected(&mut self.techniques, technique, |t| t.id, |t| {
                    t.avg_setup_cost = v;
                    Ok(())
                })?
            }
            Binding::RemovalCost { technique } => {
                let v = non_negative(v, "removal cost")?;
                for_selected(&mut self.techniques, technique, |t| t.id, |t| {
                    t.avg_removal_cost = v;
                    Ok(())
                })?
            }
            Binding::MeanDifficulty { technique } => {
                let v = probability(v, "mean difficulty")?;
                for_selected(&mut self.techniques, technique, |t| t.id, |t| {
                    t.mean_difficulty = v;
                    Ok(())
                })?
            }
            Binding::FieldRemovalCost => {
                let v = non_negative(v, "field removal cost")?;
                self.defect_types.iter_mut().for_each(|d| d.avg_field_removal_cost = v);
            }
            Binding::FieldEffectCost => {
                let v = non_negative(v, "field effect cost")?;
                self.defect_types.iter_mut().for_each(|d| d.avg_field_effect_cost = v);
            }
            Binding::FailureProbability => {
                let v = probability(v, "failure probability")?;
                self.defect_types.iter_mut().for_each(|d| d.failure_probability = v);
            }
            Binding::LabourRate => self.labour_rate = non_negative(v, "labour rate")?,
            Binding::Sequence => self.sequence = index_value(v, self.sequences.len(), "sequence")?,
            Binding::DefectFraction => {
                let alpha = probability(v, "defect fraction")?;
                let (first, rest) = self
                    .defect_types
                    .split_first_mut()
                    .filter(|(_, rest)| !rest.is_empty())
                    .ok_or_else(|| Error::Design("defect fraction needs at least two defect types".into()))?;
                let others: f64 = rest.iter().map(|d| d.fraction).sum();
                if others <= 0.0 {
                    return Err(Error::Design(
                        "defect fraction needs other types with positive fractions".into(),
                    ));
                }
                first.fraction = alpha;
                let scale = (1.0 - alpha) / others;
                rest.iter_mut().for_each(|d| d.fraction *= scale);
            }
            Binding::DifficultyForm { .. }
            | Binding::DefectClass
            | Binding::Predecessors
            | Binding::Variable => {
                return Err(Error::Design(format!(
                    "{binding:?} cannot be bound into a practical-model template"
                )))
            }
        }
        Ok(())
    }

    pub fn instantiate(&self) -> Result<(PracticalScenario, Program)> {
        let techniques = self
            .techniques
            .iter()
            .map(|t| {
                let slope = match DifficultyCurve::with_mean(CurveForm::Linear, t.mean_difficulty, self.effort_horizon)? {
                    DifficultyCurve::Linear { slope } => slope,
                    c if c.is_undetectable() => 0.0,
                    _ => {
                        return Err(Error::Design(format!(
                            "technique {}: a linear curve cannot have mean difficulty {}",
                            t.id, t.mean_difficulty
                        )))
                    }
                };
                for ty in &t.detectable_types {
                    if !self.defect_types.iter().any(|d| d.id == *ty) {
                        return Err(Error::unresolved("defect type", ty));
                    }
                }
                Ok(PracticalTechnique {
                    id: t.id,
                    name: t.name.clone(),
                    avg_setup_cost: t.avg_setup_cost,
                    execution_cost_rate: t.execution_cost_rate,
                    avg_removal_cost: self.defect_types.iter().map(|d| (d.id, t.avg_removal_cost)).collect(),
                    difficulty_slope: self
                        .defect_types
                        .iter()
                        .map(|d| (d.id, if t.detectable_types.contains(&d.id) { slope } else { 0.0 }))
                        .collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let scenario = PracticalScenario::new(
            self.defect_types.clone(),
            self.expected_fault_count,
            techniques,
            self.labour_rate,
        )?;
        let program = program_of(&self.sequences, self.sequence, &self.efforts)?;
        Ok((scenario, program))
    }
}

impl ScenarioTemplate {
    fn apply(&mut self, binding: &Binding, v: f64) -> Result<()> {
        match self {
            ScenarioTemplate::Ideal(t) => t.apply(binding, v),
            ScenarioTemplate::Practical(t) => t.apply(binding, v),
        }
    }

    /// Cost terms of the template as it stands.
    pub fn cost_terms(&self) -> Result<CostTerms> {
        match self {
            ScenarioTemplate::Ideal(t) => {
                let (s, p) = t.instantiate()?;
                s.cost_terms(&p)
            }
            ScenarioTemplate::Practical(t) => {
                let (s, p) = t.instantiate()?;
                s.cost_terms(&p)
            }
        }
    }
}

/// Substitutes one sample row into a copy of the template.
pub fn bind(design: &SensitivityDesign, row: &[f64], template: &ScenarioTemplate) -> Result<ScenarioTemplate> {
    if row.len() != design.factors.len() {
        return Err(Error::Design(format!(
            "sample row has {} values for {} factors",
            row.len(),
            design.factors.len()
        )));
    }
    let mut t = template.clone();
    for (f, &v) in design.factors.iter().zip(row) {
        if f.binding == Binding::Variable {
            return Err(Error::Design(format!("factor {:?} is not bound to any scenario field", f.name)));
        }
        t.apply(&f.binding, v)
            .map_err(|e| Error::Design(format!("factor {:?}: {e}", f.name)))?;
    }
    Ok(t)
}

pub fn bind_and_evaluate(
    design: &SensitivityDesign,
    row: &[f64],
    template: &ScenarioTemplate,
    output: OutputMeasure,
) -> Result<f64> {
    output.of(&bind(design, row, template)?.cost_terms()?)
}

/// Samples, model outputs and indices of one template analysis.
#[derive(Debug, Clone)]
pub struct TemplateAnalysis {
    pub samples: SampleMatrix,
    pub outputs: Vec<f64>,
    pub result: SensitivityResult,
}

pub fn analyze_template(
    design: &SensitivityDesign,
    template: &ScenarioTemplate,
    output: OutputMeasure,
    seed: u64,
) -> Result<TemplateAnalysis> {
    design.validate_bindings()?;
    let samples = efast::generate_samples(design, seed)?;
    let outputs = samples
        .rows
        .par_iter()
        .map(|row| bind_and_evaluate(design, row, template, output))
        .collect::<Result<Vec<_>>>()?;
    let result = efast::analyze_outputs(design, &outputs)?;
    Ok(TemplateAnalysis {
        samples,
        outputs,
        result,
    })
}
