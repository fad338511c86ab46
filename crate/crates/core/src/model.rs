//! The ideal analytical model: an explicit fault population with defect
//! propagation, a catalogue of techniques, and the cost equations for single
//! and combined technique applications.
//!
//! Money is a plain `f64` in arbitrary currency units.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::difficulty::{DifficultyCurve, Effort};
use crate::error::{Error, Result};

pub type FaultId = u32;
pub type TechniqueId = u32;

/// Artifact type a fault lives in. Defects propagate
/// Requirements → Design → {Code, TestSpec}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentClass {
    Requirements,
    Design,
    Code,
    TestSpec,
}

impl DocumentClass {
    pub const ALL: [DocumentClass; 4] = [
        DocumentClass::Requirements,
        DocumentClass::Design,
        DocumentClass::Code,
        DocumentClass::TestSpec,
    ];

    /// Position in the propagation order; Code and TestSpec share a stage.
    pub fn stage(self) -> u8 {
        match self {
            DocumentClass::Requirements => 0,
            DocumentClass::Design => 1,
            DocumentClass::Code | DocumentClass::TestSpec => 2,
        }
    }
}

/// The seven reference techniques and their conventional ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardTechnique {
    RequirementsInspection = 0,
    DesignInspection = 1,
    StaticAnalysis = 2,
    CodeInspection = 3,
    UnitTest = 4,
    IntegrationTest = 5,
    SystemTest = 6,
}

impl StandardTechnique {
    pub const ALL: [StandardTechnique; 7] = [
        StandardTechnique::RequirementsInspection,
        StandardTechnique::DesignInspection,
        StandardTechnique::StaticAnalysis,
        StandardTechnique::CodeInspection,
        StandardTechnique::UnitTest,
        StandardTechnique::IntegrationTest,
        StandardTechnique::SystemTest,
    ];

    pub fn id(self) -> TechniqueId {
        self as TechniqueId
    }

    pub fn name(self) -> &'static str {
        match self {
            StandardTechnique::RequirementsInspection => "requirements inspection",
            StandardTechnique::DesignInspection => "design inspection",
            StandardTechnique::StaticAnalysis => "static analysis",
            StandardTechnique::CodeInspection => "code inspection",
            StandardTechnique::UnitTest => "unit test",
            StandardTechnique::IntegrationTest => "integration test",
            StandardTechnique::SystemTest => "system test",
        }
    }

    /// Document classes the technique can find defects in. Unit tests are
    /// structural, system tests functional, integration tests both.
    pub fn capable_classes(self) -> &'static [DocumentClass] {
        use DocumentClass::*;
        match self {
            StandardTechnique::RequirementsInspection => &[Requirements],
            StandardTechnique::DesignInspection => &[Design],
            StandardTechnique::StaticAnalysis | StandardTechnique::CodeInspection => &[Code],
            StandardTechnique::UnitTest => &[Code, TestSpec],
            StandardTechnique::IntegrationTest => &[Design, Code, TestSpec],
            StandardTechnique::SystemTest => &[Requirements, Design, Code],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fault {
    pub id: FaultId,
    pub doc_class: DocumentClass,
    #[serde(default)]
    pub predecessors: BTreeSet<FaultId>,
    pub failure_probability: f64,
    pub field_removal_cost: f64,
    #[serde(default)]
    pub field_effect_cost: f64,
}

impl Fault {
    /// Field removal plus effect cost, incurred if the fault fails in the field.
    pub fn field_cost(&self) -> f64 {
        self.field_removal_cost + self.field_effect_cost
    }

    /// Expected field cost `pi * (v_F + f_F)`.
    pub fn expected_field_cost(&self) -> f64 {
        self.failure_probability * self.field_cost()
    }
}

/// How one technique fares against one fault.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detection {
    pub removal_cost: f64,
    pub difficulty: DifficultyCurve,
}

impl Detection {
    pub const UNDETECTABLE: Detection = Detection {
        removal_cost: 0.0,
        difficulty: DifficultyCurve::UNDETECTABLE,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct Technique {
    pub id: TechniqueId,
    pub name: String,
    pub setup_cost: f64,
    /// Cost per person-hour; `None` falls back to the scenario labour rate.
    pub execution_cost_rate: Option<f64>,
    pub capable_classes: BTreeSet<DocumentClass>,
    pub detections: BTreeMap<FaultId, Detection>,
}

impl Technique {
    pub fn rate(&self, labour_rate: f64) -> f64 {
        self.execution_cost_rate.unwrap_or(labour_rate)
    }

    /// Execution cost `rate * t`.
    pub fn execution_cost(&self, effort: Effort, labour_rate: f64) -> f64 {
        if effort.is_zero() {
            0.0
        } else {
            self.rate(labour_rate) * effort.hours()
        }
    }

    fn detection(&self, fault: FaultId) -> Result<&Detection> {
        self.detections.get(&fault).ok_or_else(|| {
            Error::Config(format!(
                "technique {} has no removal cost/difficulty entry for fault {fault}",
                self.id
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Application {
    pub technique: TechniqueId,
    pub effort: Effort,
}

/// Ordered technique applications. A zero-effort application is skipped:
/// it costs nothing and detects nothing.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Program {
    #[serde(default)]
    pub applications: Vec<Application>,
}

impl Program {
    pub fn new(applications: impl IntoIterator<Item = (TechniqueId, Effort)>) -> Self {
        Program {
            applications: applications
                .into_iter()
                .map(|(technique, effort)| Application { technique, effort })
                .collect(),
        }
    }

    pub fn single(technique: TechniqueId, effort: Effort) -> Self {
        Self::new([(technique, effort)])
    }

    pub fn total_effort(&self) -> f64 {
        self.applications.iter().map(|a| a.effort.hours()).sum()
    }

    pub fn len(&self) -> usize {
        self.applications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.applications.is_empty()
    }
}

/// Direct costs, future costs, revenues and ROI of one evaluated program.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub direct: f64,
    pub future: f64,
    pub revenue: f64,
    pub roi: f64,
}

impl CostBreakdown {
    pub fn new(direct: f64, future: f64, revenue: f64) -> Result<Self> {
        Ok(CostBreakdown {
            direct,
            future,
            revenue,
            roi: roi(direct, future, revenue)?,
        })
    }

    pub fn net_benefit(&self) -> f64 {
        self.revenue - self.direct
    }
}

/// `(r - d - t) / (d + t)`.
pub fn roi(direct: f64, future: f64, revenue: f64) -> Result<f64> {
    let cost = direct + future;
    if cost == 0.0 {
        return Err(Error::UndefinedRoi);
    }
    Ok((revenue - direct - future) / cost)
}

/// All components of a combined evaluation.
///
/// `screened` is the expected field cost avoided because a predecessor
/// defect was detected earlier; the revenue equation credits it to no
/// application. For every program
/// `revenue + future + screened == total expected field cost`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CostTerms {
    pub direct: f64,
    pub future: f64,
    pub revenue: f64,
    pub screened: f64,
}

impl CostTerms {
    pub fn breakdown(&self) -> Result<CostBreakdown> {
        CostBreakdown::new(self.direct, self.future, self.revenue)
    }

    pub fn net_benefit(&self) -> f64 {
        self.revenue - self.direct
    }
}

/// Anything that can price a program: the ideal [`Scenario`] and the
/// defect-type based [`crate::practical::PracticalScenario`].
pub trait CostModel: Sync {
    fn technique_ids(&self) -> Vec<TechniqueId>;

    fn cost_terms(&self, program: &Program) -> Result<CostTerms>;

    fn breakdown(&self, program: &Program) -> Result<CostBreakdown> {
        self.cost_terms(program)?.breakdown()
    }

    /// Objective of the optimization problem: revenues minus direct costs.
    fn net_benefit(&self, program: &Program) -> Result<f64> {
        Ok(self.cost_terms(program)?.net_benefit())
    }
}

/// A validated fault population and technique catalogue.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    labour_rate: f64,
    faults: Vec<Fault>,
    techniques: Vec<Technique>,
    fault_index: HashMap<FaultId, usize>,
    technique_index: HashMap<TechniqueId, usize>,
    /// Transitive predecessors of each fault, as fault indices.
    ancestors: Vec<Vec<usize>>,
    /// `detections[technique][fault]`, dense.
    detections: Vec<Vec<Detection>>,
}

impl Scenario {
    /// Validates and indexes a scenario. Techniques without an entry for a
    /// fault outside their capable classes get the undetectable curve.
    pub fn new(labour_rate: f64, faults: Vec<Fault>, techniques: Vec<Technique>) -> Result<Self> {
        if !(labour_rate.is_finite() && labour_rate >= 0.0) {
            return Err(Error::invariant(
                "labour_rate",
                format!("labour_rate must be finite and >= 0, got {labour_rate}"),
            ));
        }
        let mut fault_index = HashMap::with_capacity(faults.len());
        for (k, f) in faults.iter().enumerate() {
            if fault_index.insert(f.id, k).is_some() {
                return Err(Error::invariant("unique_ids", format!("duplicate fault id {}", f.id)));
            }
            check_probability("failure_probability", f.failure_probability, "fault", f.id)?;
            check_money("field_removal_cost", f.field_removal_cost, "fault", f.id)?;
            check_money("field_effect_cost", f.field_effect_cost, "fault", f.id)?;
        }
        for f in &faults {
            for p in &f.predecessors {
                let pk = *fault_index.get(p).ok_or_else(|| Error::unresolved("fault", p))?;
                if faults[pk].doc_class.stage() > f.doc_class.stage() {
                    return Err(Error::invariant(
                        "predecessor_order",
                        format!(
                            "fault {} ({:?}) cannot derive from fault {p} ({:?}) in a later document class",
                            f.id, f.doc_class, faults[pk].doc_class
                        ),
                    ));
                }
            }
        }
        let ancestors = ancestor_closure(&faults, &fault_index)?;

        let mut technique_index = HashMap::with_capacity(techniques.len());
        let mut detections = Vec::with_capacity(techniques.len());
        let mut techniques = techniques;
        for (k, t) in techniques.iter_mut().enumerate() {
            if technique_index.insert(t.id, k).is_some() {
                return Err(Error::invariant(
                    "unique_ids",
                    format!("duplicate technique id {}", t.id),
                ));
            }
            check_money("setup_cost", t.setup_cost, "technique", t.id)?;
            if let Some(rate) = t.execution_cost_rate {
                check_money("execution_cost_rate", rate, "technique", t.id)?;
            }
            for (fid, d) in &t.detections {
                let fk = *fault_index.get(fid).ok_or_else(|| Error::unresolved("fault", fid))?;
                check_money("removal_cost", d.removal_cost, "technique", t.id)?;
                d.difficulty.validate().map_err(|_| {
                    Error::invariant(
                        "difficulty_curve",
                        format!(
                            "technique {} fault {fid}: parameters out of domain: {:?}",
                            t.id, d.difficulty
                        ),
                    )
                })?;
                if !t.capable_classes.contains(&faults[fk].doc_class)
                    && !d.difficulty.is_undetectable()
                {
                    return Err(Error::invariant(
                        "capable_classes",
                        format!(
                            "technique {} cannot detect {:?} faults, so fault {fid} needs the undetectable curve",
                            t.id, faults[fk].doc_class
                        ),
                    ));
                }
            }
            let mut row = Vec::with_capacity(faults.len());
            for f in &faults {
                let d = match t.detections.get(&f.id) {
                    Some(d) => *d,
                    None if !t.capable_classes.contains(&f.doc_class) => {
                        t.detections.insert(f.id, Detection::UNDETECTABLE);
                        Detection::UNDETECTABLE
                    }
                    None => {
                        return Err(Error::Config(format!(
                            "technique {} has no removal cost/difficulty entry for fault {}",
                            t.id, f.id
                        )))
                    }
                };
                row.push(d);
            }
            detections.push(row);
        }

        Ok(Scenario {
            labour_rate,
            faults,
            techniques,
            fault_index,
            technique_index,
            ancestors,
            detections,
        })
    }

    pub fn labour_rate(&self) -> f64 {
        self.labour_rate
    }

    pub fn faults(&self) -> &[Fault] {
        &self.faults
    }

    pub fn techniques(&self) -> &[Technique] {
        &self.techniques
    }

    pub fn fault(&self, id: FaultId) -> Result<&Fault> {
        self.fault_index
            .get(&id)
            .map(|&k| &self.faults[k])
            .ok_or_else(|| Error::unresolved("fault", id))
    }

    pub fn technique(&self, id: TechniqueId) -> Result<&Technique> {
        self.technique_pos(id).map(|k| &self.techniques[k])
    }

    pub(crate) fn technique_pos(&self, id: TechniqueId) -> Result<usize> {
        self.technique_index
            .get(&id)
            .copied()
            .ok_or_else(|| Error::unresolved("technique", id))
    }

    pub(crate) fn ancestors_of(&self, fault_pos: usize) -> &[usize] {
        &self.ancestors[fault_pos]
    }

    pub(crate) fn detection_at(&self, technique_pos: usize, fault_pos: usize) -> &Detection {
        &self.detections[technique_pos][fault_pos]
    }

    /// Transitive predecessors of a fault.
    pub fn ancestors(&self, id: FaultId) -> Result<Vec<FaultId>> {
        let k = *self.fault_index.get(&id).ok_or_else(|| Error::unresolved("fault", id))?;
        Ok(self.ancestors[k].iter().map(|&a| self.faults[a].id).collect())
    }

    /// `sum_i pi_i (v_F(i) + f_F(i))`: the field cost at stake, split between
    /// revenues, future costs and screened savings by any program.
    pub fn total_expected_field_cost(&self) -> f64 {
        self.faults.iter().map(Fault::expected_field_cost).sum()
    }

    pub fn execution_cost(&self, technique: TechniqueId, effort: Effort) -> Result<f64> {
        Ok(self.technique(technique)?.execution_cost(effort, self.labour_rate))
    }

    /// Direct costs of one technique alone: setup, execution, and expected
    /// in-house removal costs.
    pub fn direct_costs_single(&self, technique: TechniqueId, effort: Effort) -> Result<f64> {
        let tech = self.technique(technique)?;
        if effort.is_zero() {
            return Ok(0.0);
        }
        let mut removal = 0.0;
        for f in &self.faults {
            let d = tech.detection(f.id)?;
            removal += (1.0 - d.difficulty.eval(effort)) * d.removal_cost;
        }
        Ok(tech.setup_cost + tech.execution_cost(effort, self.labour_rate) + removal)
    }

    /// Expected field costs of the faults a single technique misses.
    pub fn future_costs_single(&self, technique: TechniqueId, effort: Effort) -> Result<f64> {
        let tech = self.technique(technique)?;
        let mut total = 0.0;
        for f in &self.faults {
            let theta = if effort.is_zero() {
                1.0
            } else {
                tech.detection(f.id)?.difficulty.eval(effort)
            };
            total += f.failure_probability * theta * f.field_cost();
        }
        Ok(total)
    }

    /// Expected field costs saved by a single technique.
    pub fn revenues_single(&self, technique: TechniqueId, effort: Effort) -> Result<f64> {
        let tech = self.technique(technique)?;
        let mut total = 0.0;
        if effort.is_zero() {
            return Ok(total);
        }
        for f in &self.faults {
            let theta = tech.detection(f.id)?.difficulty.eval(effort);
            total += f.failure_probability * (1.0 - theta) * f.field_cost();
        }
        Ok(total)
    }

    /// Probability that neither `fault` nor any of its predecessors was
    /// detected by the applications strictly before `position`.
    pub fn residual_nondetection(
        &self,
        fault: FaultId,
        position: usize,
        program: &Program,
    ) -> Result<f64> {
        let fk = *self
            .fault_index
            .get(&fault)
            .ok_or_else(|| Error::unresolved("fault", fault))?;
        if position > program.len() {
            return Err(Error::Config(format!(
                "position {position} is past the end of a {}-application program",
                program.len()
            )));
        }
        let mut live = 1.0;
        for app in &program.applications[..position] {
            let tk = self.technique_pos(app.technique)?;
            live *= self.screen_factor(tk, fk, app.effort);
        }
        Ok(live)
    }

    /// `theta_x(i) * prod_{j in R_i} theta_x(j)` for one application.
    fn screen_factor(&self, tk: usize, fk: usize, effort: Effort) -> f64 {
        if effort.is_zero() {
            return 1.0;
        }
        let mut s = self.detections[tk][fk].difficulty.eval(effort);
        for &a in &self.ancestors[fk] {
            s *= self.detections[tk][a].difficulty.eval(effort);
        }
        s
    }

    pub fn direct_costs_combined(&self, program: &Program) -> Result<f64> {
        Ok(self.cost_terms(program)?.direct)
    }

    pub fn future_costs_combined(&self, program: &Program) -> Result<f64> {
        Ok(self.cost_terms(program)?.future)
    }

    pub fn revenues_combined(&self, program: &Program) -> Result<f64> {
        Ok(self.cost_terms(program)?.revenue)
    }

    pub fn evaluate(&self, program: &Program) -> Result<CostBreakdown> {
        self.cost_terms(program)?.breakdown()
    }
}

impl CostModel for Scenario {
    fn technique_ids(&self) -> Vec<TechniqueId> {
        self.techniques.iter().map(|t| t.id).collect()
    }

    fn cost_terms(&self, program: &Program) -> Result<CostTerms> {
        let positions = program
            .applications
            .iter()
            .map(|a| self.technique_pos(a.technique))
            .collect::<Result<Vec<_>>>()?;
        let n = self.faults.len();
        // live[i]: probability that neither i nor any predecessor has been
        // detected by the applications processed so far.
        let mut live = vec![1.0; n];
        let mut terms = CostTerms::default();
        for (app, &tk) in program.applications.iter().zip(&positions) {
            if app.effort.is_zero() {
                continue;
            }
            let tech = &self.techniques[tk];
            let mut removal = 0.0;
            for (fk, f) in self.faults.iter().enumerate() {
                let d = &self.detections[tk][fk];
                let theta = d.difficulty.eval(app.effort);
                let screen = self.screen_factor(tk, fk, app.effort);
                removal += (1.0 - theta) * live[fk] * d.removal_cost;
                terms.revenue += f.failure_probability * (1.0 - theta) * live[fk] * f.field_cost();
                terms.screened += f.failure_probability * (theta - screen) * live[fk] * f.field_cost();
                live[fk] *= screen;
            }
            terms.direct += tech.setup_cost + tech.execution_cost(app.effort, self.labour_rate) + removal;
        }
        for (fk, f) in self.faults.iter().enumerate() {
            terms.future += f.failure_probability * live[fk] * f.field_cost();
        }
        Ok(terms)
    }
}

fn ancestor_closure(faults: &[Fault], index: &HashMap<FaultId, usize>) -> Result<Vec<Vec<usize>>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(
        k: usize,
        faults: &[Fault],
        index: &HashMap<FaultId, usize>,
        marks: &mut [Mark],
        out: &mut [Vec<usize>],
    ) -> Result<()> {
        match marks[k] {
            Mark::Done => return Ok(()),
            Mark::Active => {
                return Err(Error::invariant(
                    "predecessor_dag",
                    format!("predecessor cycle through fault {}", faults[k].id),
                ))
            }
            Mark::New => {}
        }
        marks[k] = Mark::Active;
        let mut acc = BTreeSet::new();
        for p in &faults[k].predecessors {
            let pk = index[p];
            visit(pk, faults, index, marks, out)?;
            acc.insert(pk);
            acc.extend(out[pk].iter().copied());
        }
        out[k] = acc.into_iter().collect();
        marks[k] = Mark::Done;
        Ok(())
    }
    let mut marks = vec![Mark::New; faults.len()];
    let mut out = vec![Vec::new(); faults.len()];
    for k in 0..faults.len() {
        visit(k, faults, index, &mut marks, &mut out)?;
    }
    Ok(out)
}

fn check_probability(field: &'static str, v: f64, kind: &str, id: u32) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invariant(field, format!("{kind} {id}: {field} = {v} is outside [0, 1]")))
    }
}

fn check_money(field: &'static str, v: f64, kind: &str, id: u32) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invariant(field, format!("{kind} {id}: {field} = {v} must be finite and >= 0")))
    }
}
