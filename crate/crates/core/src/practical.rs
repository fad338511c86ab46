//! The practical, defect-type based model.
//!
//! Individual faults are replaced by defect types carrying averaged costs,
//! a per-type failure probability and a linear difficulty slope. Defect
//! propagation is dropped. The fault population is the expectation
//! `expected_fault_count * fraction` per type; counts need not be integral.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::difficulty::{DifficultyCurve, Effort};
use crate::error::{Error, Result};
use crate::model::{
    CostBreakdown, CostModel, CostTerms, Detection, DocumentClass, Fault, FaultId, Program,
    Scenario, Technique, TechniqueId,
};

pub type DefectTypeId = u32;

const FRACTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectType {
    pub id: DefectTypeId,
    pub name: String,
    pub fraction: f64,
    pub failure_probability: f64,
    pub avg_field_removal_cost: f64,
    #[serde(default)]
    pub avg_field_effect_cost: f64,
}

impl DefectType {
    pub fn field_cost(&self) -> f64 {
        self.avg_field_removal_cost + self.avg_field_effect_cost
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PracticalTechnique {
    pub id: TechniqueId,
    pub name: String,
    pub avg_setup_cost: f64,
    pub execution_cost_rate: Option<f64>,
    pub avg_removal_cost: BTreeMap<DefectTypeId, f64>,
    /// Slope `m <= 0` of the linear difficulty `m t + 1`; 0 means the type is
    /// undetectable by this technique.
    pub difficulty_slope: BTreeMap<DefectTypeId, f64>,
}

impl PracticalTechnique {
    fn rate(&self, labour_rate: f64) -> f64 {
        self.execution_cost_rate.unwrap_or(labour_rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PracticalScenario {
    defect_types: Vec<DefectType>,
    expected_fault_count: u32,
    techniques: Vec<PracticalTechnique>,
    labour_rate: f64,
    technique_index: HashMap<TechniqueId, usize>,
    /// `rows[technique][type] = (removal cost, slope)`, dense.
    rows: Vec<Vec<(f64, f64)>>,
}

impl PracticalScenario {
    pub fn new(
        defect_types: Vec<DefectType>,
        expected_fault_count: u32,
        techniques: Vec<PracticalTechnique>,
        labour_rate: f64,
    ) -> Result<Self> {
        if !(labour_rate.is_finite() && labour_rate >= 0.0) {
            return Err(Error::invariant(
                "labour_rate",
                format!("labour_rate must be finite and >= 0, got {labour_rate}"),
            ));
        }
        let mut ids = BTreeSet::new();
        let mut fraction_sum = 0.0;
        for d in &defect_types {
            if !ids.insert(d.id) {
                return Err(Error::invariant("unique_ids", format!("duplicate defect type id {}", d.id)));
            }
            if !(0.0..=1.0).contains(&d.fraction) {
                return Err(Error::invariant(
                    "fraction",
                    format!("defect type {}: fraction = {} is outside [0, 1]", d.id, d.fraction),
                ));
            }
            if !(0.0..=1.0).contains(&d.failure_probability) {
                return Err(Error::invariant(
                    "failure_probability",
                    format!(
                        "defect type {}: failure_probability = {} is outside [0, 1]",
                        d.id, d.failure_probability
                    ),
                ));
            }
            for (field, v) in [
                ("avg_field_removal_cost", d.avg_field_removal_cost),
                ("avg_field_effect_cost", d.avg_field_effect_cost),
            ] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::invariant(
                        field,
                        format!("defect type {}: {field} = {v} must be finite and >= 0", d.id),
                    ));
                }
            }
            fraction_sum += d.fraction;
        }
        if (fraction_sum - 1.0).abs() > FRACTION_TOLERANCE {
            return Err(Error::invariant(
                "fraction_sum",
                format!("defect type fractions sum to {fraction_sum}, expected 1"),
            ));
        }

        let mut technique_index = HashMap::new();
        let mut rows = Vec::with_capacity(techniques.len());
        for (k, t) in techniques.iter().enumerate() {
            if technique_index.insert(t.id, k).is_some() {
                return Err(Error::invariant("unique_ids", format!("duplicate technique id {}", t.id)));
            }
            if !(t.avg_setup_cost.is_finite() && t.avg_setup_cost >= 0.0) {
                return Err(Error::invariant(
                    "avg_setup_cost",
                    format!("technique {}: avg_setup_cost = {} must be >= 0", t.id, t.avg_setup_cost),
                ));
            }
            if let Some(r) = t.execution_cost_rate {
                if !(r.is_finite() && r >= 0.0) {
                    return Err(Error::invariant(
                        "execution_cost_rate",
                        format!("technique {}: execution_cost_rate = {r} must be >= 0", t.id),
                    ));
                }
            }
            for ty in t.avg_removal_cost.keys().chain(t.difficulty_slope.keys()) {
                if !ids.contains(ty) {
                    return Err(Error::unresolved("defect type", ty));
                }
            }
            let mut row = Vec::with_capacity(defect_types.len());
            for d in &defect_types {
                let v = *t.avg_removal_cost.get(&d.id).ok_or_else(|| {
                    Error::Config(format!("technique {} has no avg_removal_cost for defect type {}", t.id, d.id))
                })?;
                let m = *t.difficulty_slope.get(&d.id).ok_or_else(|| {
                    Error::Config(format!("technique {} has no difficulty_slope for defect type {}", t.id, d.id))
                })?;
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::invariant(
                        "avg_removal_cost",
                        format!("technique {} type {}: avg_removal_cost = {v} must be >= 0", t.id, d.id),
                    ));
                }
                if !(m.is_finite() && m <= 0.0) {
                    return Err(Error::invariant(
                        "difficulty_slope",
                        format!("technique {} type {}: difficulty_slope = {m} must be <= 0", t.id, d.id),
                    ));
                }
                row.push((v, m));
            }
            rows.push(row);
        }

        Ok(PracticalScenario {
            defect_types,
            expected_fault_count,
            techniques,
            labour_rate,
            technique_index,
            rows,
        })
    }

    pub fn defect_types(&self) -> &[DefectType] {
        &self.defect_types
    }

    pub fn techniques(&self) -> &[PracticalTechnique] {
        &self.techniques
    }

    pub fn expected_fault_count(&self) -> u32 {
        self.expected_fault_count
    }

    pub fn labour_rate(&self) -> f64 {
        self.labour_rate
    }

    fn technique_pos(&self, id: TechniqueId) -> Result<usize> {
        self.technique_index
            .get(&id)
            .copied()
            .ok_or_else(|| Error::unresolved("technique", id))
    }

    /// Expected number of faults of each type.
    fn type_count(&self, d: &DefectType) -> f64 {
        self.expected_fault_count as f64 * d.fraction
    }

    /// `Ibar * sum_types fraction * pi * (vbar_F + fbar_F)`.
    pub fn total_expected_field_cost(&self) -> f64 {
        self.defect_types
            .iter()
            .map(|d| self.type_count(d) * d.failure_probability * d.field_cost())
            .sum()
    }

    pub fn direct_single(&self, technique: TechniqueId, effort: Effort) -> Result<f64> {
        let k = self.technique_pos(technique)?;
        if effort.is_zero() {
            return Ok(0.0);
        }
        let t = &self.techniques[k];
        let mut removal = 0.0;
        for (d, &(v, m)) in self.defect_types.iter().zip(&self.rows[k]) {
            let theta = linear(m, effort);
            removal += self.type_count(d) * (1.0 - theta) * v;
        }
        Ok(t.avg_setup_cost + t.rate(self.labour_rate) * effort.hours() + removal)
    }

    pub fn revenues_single(&self, technique: TechniqueId, effort: Effort) -> Result<f64> {
        let k = self.technique_pos(technique)?;
        let mut total = 0.0;
        if effort.is_zero() {
            return Ok(total);
        }
        for (d, &(_, m)) in self.defect_types.iter().zip(&self.rows[k]) {
            let theta = linear(m, effort);
            total += self.type_count(d) * d.failure_probability * (1.0 - theta) * d.field_cost();
        }
        Ok(total)
    }

    pub fn future_single(&self, technique: TechniqueId, effort: Effort) -> Result<f64> {
        let k = self.technique_pos(technique)?;
        let mut total = 0.0;
        for (d, &(_, m)) in self.defect_types.iter().zip(&self.rows[k]) {
            let theta = if effort.is_zero() { 1.0 } else { linear(m, effort) };
            total += self.type_count(d) * d.failure_probability * theta * d.field_cost();
        }
        Ok(total)
    }

    pub fn combined(&self, program: &Program) -> Result<CostBreakdown> {
        self.breakdown(program)
    }

    /// Expands the expected population into explicit faults: per type,
    /// `floor(n)` unit faults plus one fault whose costs are scaled by the
    /// fractional remainder of `n = expected_fault_count * fraction`.
    pub fn to_explicit(&self) -> Result<Scenario> {
        let mut faults = Vec::new();
        // (fault id, type position, weight)
        let mut members: Vec<(FaultId, usize, f64)> = Vec::new();
        for (tp, d) in self.defect_types.iter().enumerate() {
            let n = self.type_count(d);
            let whole = n.floor();
            let rest = n - whole;
            let weights = std::iter::repeat_n(1.0, whole as usize).chain((rest > 0.0).then_some(rest));
            for w in weights {
                let id = faults.len() as FaultId;
                faults.push(Fault {
                    id,
                    doc_class: DocumentClass::Code,
                    predecessors: BTreeSet::new(),
                    failure_probability: d.failure_probability,
                    field_removal_cost: w * d.avg_field_removal_cost,
                    field_effect_cost: w * d.avg_field_effect_cost,
                });
                members.push((id, tp, w));
            }
        }
        let techniques = self
            .techniques
            .iter()
            .zip(&self.rows)
            .map(|(t, row)| Technique {
                id: t.id,
                name: t.name.clone(),
                setup_cost: t.avg_setup_cost,
                execution_cost_rate: t.execution_cost_rate,
                capable_classes: DocumentClass::ALL.into_iter().collect(),
                detections: members
                    .iter()
                    .map(|&(id, tp, w)| {
                        let (v, m) = row[tp];
                        (
                            id,
                            Detection {
                                removal_cost: w * v,
                                difficulty: DifficultyCurve::Linear { slope: m },
                            },
                        )
                    })
                    .collect(),
            })
            .collect();
        Scenario::new(self.labour_rate, faults, techniques)
    }
}

fn linear(slope: f64, effort: Effort) -> f64 {
    DifficultyCurve::Linear { slope }.eval(effort)
}

impl CostModel for PracticalScenario {
    fn technique_ids(&self) -> Vec<TechniqueId> {
        self.techniques.iter().map(|t| t.id).collect()
    }

    fn cost_terms(&self, program: &Program) -> Result<CostTerms> {
        let positions = program
            .applications
            .iter()
            .map(|a| self.technique_pos(a.technique))
            .collect::<Result<Vec<_>>>()?;
        let mut live = vec![1.0; self.defect_types.len()];
        let mut terms = CostTerms::default();
        for (app, &k) in program.applications.iter().zip(&positions) {
            if app.effort.is_zero() {
                continue;
            }
            let t = &self.techniques[k];
            let mut removal = 0.0;
            for (tp, (d, &(v, m))) in self.defect_types.iter().zip(&self.rows[k]).enumerate() {
                let theta = linear(m, app.effort);
                let count = self.type_count(d);
                removal += count * (1.0 - theta) * live[tp] * v;
                terms.revenue +=
                    count * d.failure_probability * (1.0 - theta) * live[tp] * d.field_cost();
                live[tp] *= theta;
            }
            terms.direct += t.avg_setup_cost + t.rate(self.labour_rate) * app.effort.hours() + removal;
        }
        for (tp, d) in self.defect_types.iter().enumerate() {
            terms.future += self.type_count(d) * d.failure_probability * live[tp] * d.field_cost();
        }
        Ok(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(h: f64) -> Effort {
        Effort::new(h).unwrap()
    }

    fn ty(id: DefectTypeId, fraction: f64, pi: f64, field: f64) -> DefectType {
        DefectType {
            id,
            name: format!("type{id}"),
            fraction,
            failure_probability: pi,
            avg_field_removal_cost: field,
            avg_field_effect_cost: 0.0,
        }
    }

    fn tech(id: TechniqueId, setup: f64, rate: f64, entries: &[(DefectTypeId, f64, f64)]) -> PracticalTechnique {
        PracticalTechnique {
            id,
            name: String::new(),
            avg_setup_cost: setup,
            execution_cost_rate: Some(rate),
            avg_removal_cost: entries.iter().map(|&(t, v, _)| (t, v)).collect(),
            difficulty_slope: entries.iter().map(|&(t, _, m)| (t, m)).collect(),
        }
    }

    fn worked() -> PracticalScenario {
        PracticalScenario::new(
            vec![ty(1, 1.0, 0.1, 1000.0)],
            10,
            vec![tech(0, 0.0, 0.0, &[(1, 4.0, -0.01)]), tech(1, 0.0, 0.0, &[(1, 4.0, -0.01)])],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn single_examples() {
        let s = worked();
        assert_eq!(s.direct_single(0, e(50.0)).unwrap(), 20.0);
        assert_eq!(s.revenues_single(0, e(50.0)).unwrap(), 500.0);
        assert_eq!(s.future_single(0, e(50.0)).unwrap(), 500.0);
        assert_eq!(s.total_expected_field_cost(), 1000.0);
        assert_eq!(s.direct_single(0, Effort::ZERO).unwrap(), 0.0);
        assert_eq!(s.revenues_single(0, Effort::ZERO).unwrap(), 0.0);
        // clamp boundary at t = -1/m
        assert_eq!(s.future_single(0, e(100.0)).unwrap(), 0.0);
        assert_eq!(s.future_single(0, e(250.0)).unwrap(), 0.0);
    }

    #[test]
    fn undetectable_types() {
        let s = PracticalScenario::new(
            vec![ty(1, 0.4, 0.1, 1000.0), ty(2, 0.6, 0.5, 10.0)],
            7,
            vec![tech(0, 3.0, 2.0, &[(1, 4.0, 0.0), (2, 8.0, 0.0)])],
            0.0,
        )
        .unwrap();
        assert_eq!(s.direct_single(0, e(5.0)).unwrap(), 3.0 + 10.0);
        assert_eq!(s.revenues_single(0, e(5.0)).unwrap(), 0.0);
        assert!((s.future_single(0, e(5.0)).unwrap() - s.total_expected_field_cost()).abs() < 1e-12);
        let b = s.combined(&Program::single(0, e(9.0))).unwrap();
        assert_eq!(b.revenue, 0.0);
    }

    #[test]
    fn combined_examples() {
        let s = worked();
        let p = Program::new([(0, e(50.0)), (1, e(50.0))]);
        let b = s.combined(&p).unwrap();
        assert!((b.revenue - 0.75 * 10.0 * 0.1 * 1000.0).abs() < 1e-12);
        assert!((b.revenue + b.future - 1000.0).abs() < 1e-12);

        let one = s.combined(&Program::single(0, e(50.0))).unwrap();
        assert_eq!(one.direct, s.direct_single(0, e(50.0)).unwrap());
        assert_eq!(one.revenue, s.revenues_single(0, e(50.0)).unwrap());
        assert_eq!(one.future, s.future_single(0, e(50.0)).unwrap());

        let empty = s.combined(&Program::default()).unwrap();
        assert_eq!((empty.direct, empty.revenue, empty.future), (0.0, 0.0, 1000.0));
    }

    #[test]
    fn validation() {
        let err = PracticalScenario::new(vec![ty(1, 0.5, 0.1, 1.0)], 1, vec![], 0.0).unwrap_err();
        assert!(matches!(err, Error::Invariant { rule: "fraction_sum", .. }));

        let err = PracticalScenario::new(
            vec![ty(1, 1.0, 0.1, 1.0)],
            1,
            vec![tech(0, 0.0, 0.0, &[(1, 1.0, 0.0), (7, 1.0, 0.0)])],
            0.0,
        )
        .unwrap_err();
        assert_eq!(err, Error::unresolved("defect type", 7));

        let err = PracticalScenario::new(vec![ty(1, 1.0, 0.1, 1.0)], 1, vec![tech(0, 0.0, 0.0, &[])], 0.0)
            .unwrap_err();
        assert!(matches!(err, Error::Config(_)));

        let err = PracticalScenario::new(
            vec![ty(1, 1.0, 0.1, 1.0)],
            1,
            vec![tech(0, 0.0, 0.0, &[(1, 1.0, 0.2)])],
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invariant { rule: "difficulty_slope", .. }));
    }

    #[test]
    fn explicit_expansion_with_fractional_counts() {
        let s = PracticalScenario::new(
            vec![ty(1, 0.35, 0.2, 300.0), ty(2, 0.65, 0.05, 2000.0)],
            3,
            vec![tech(0, 5.0, 1.5, &[(1, 4.0, -0.02), (2, 9.0, -0.005)])],
            20.0,
        )
        .unwrap();
        let explicit = s.to_explicit().unwrap();
        // 1.05 -> 1 + 0.05, 1.95 -> 1 + 0.95
        assert_eq!(explicit.faults().len(), 4);
        let p = Program::single(0, e(30.0));
        let a = s.cost_terms(&p).unwrap();
        let b = explicit.cost_terms(&p).unwrap();
        assert!((a.direct - b.direct).abs() < 1e-9);
        assert!((a.revenue - b.revenue).abs() < 1e-9);
        assert!((a.future - b.future).abs() < 1e-9);
    }
}
