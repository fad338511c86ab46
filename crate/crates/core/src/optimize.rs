//! Choosing technique efforts and their order to maximize net benefit
//! `r - d` under effort, level and precedence constraints.
//!
//! Candidate programs apply every technique at most once. A technique at
//! zero effort is left out of the program, so subset choice is part of the
//! effort assignment.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::difficulty::Effort;
use crate::error::{Error, Result};
use crate::model::{CostModel, Program, TechniqueId};
use crate::seed;

/// Search-space size above which [`optimize_exhaustive`] refuses to run.
pub const DEFAULT_SEARCH_CEILING: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Precedence {
    pub before: TechniqueId,
    pub after: TechniqueId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffortLevels {
    pub technique: TechniqueId,
    /// Efforts the technique may be applied with; leaving it out is always
    /// allowed.
    pub levels: Vec<Effort>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_total_effort: Option<Effort>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub allowed_levels: Vec<EffortLevels>,
    /// `before` must be applied earlier than `after` when both are applied.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub precedence: Vec<Precedence>,
}

impl Constraints {
    fn levels_of(&self, t: TechniqueId) -> Option<&[Effort]> {
        self.allowed_levels
            .iter()
            .find(|l| l.technique == t)
            .map(|l| l.levels.as_slice())
    }

    /// Checks the constraints themselves against the candidate techniques.
    pub fn validate(&self, techniques: &[TechniqueId]) -> Result<()> {
        let known: BTreeSet<_> = techniques.iter().copied().collect();
        let mut seen = BTreeSet::new();
        for l in &self.allowed_levels {
            if !known.contains(&l.technique) {
                return Err(Error::unresolved("technique", l.technique));
            }
            if !seen.insert(l.technique) {
                return Err(Error::Constraint(format!(
                    "technique {} has more than one level set",
                    l.technique
                )));
            }
            if l.levels.is_empty() {
                return Err(Error::Constraint(format!(
                    "technique {} has an empty level set",
                    l.technique
                )));
            }
        }
        for p in &self.precedence {
            for t in [p.before, p.after] {
                if !known.contains(&t) {
                    return Err(Error::unresolved("technique", t));
                }
            }
        }
        if let Some(cycle) = self.precedence_cycle() {
            return Err(Error::Constraint(format!(
                "precedence constraints form a cycle through technique {cycle}"
            )));
        }
        Ok(())
    }

    fn precedence_cycle(&self) -> Option<TechniqueId> {
        let mut succ: BTreeMap<TechniqueId, Vec<TechniqueId>> = BTreeMap::new();
        for p in &self.precedence {
            succ.entry(p.before).or_default().push(p.after);
            succ.entry(p.after).or_default();
        }
        // Kahn's algorithm; whatever is left over lies on or behind a cycle.
        let mut indeg: BTreeMap<TechniqueId, usize> = succ.keys().map(|&k| (k, 0)).collect();
        for v in succ.values().flatten() {
            *indeg.get_mut(v).expect("all nodes inserted") += 1;
        }
        let mut ready: Vec<_> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&k, _)| k).collect();
        while let Some(n) = ready.pop() {
            indeg.remove(&n);
            for v in &succ[&n] {
                if let Some(d) = indeg.get_mut(v) {
                    *d -= 1;
                    if *d == 0 {
                        ready.push(*v);
                    }
                }
            }
        }
        indeg.keys().next().copied()
    }

    fn order_ok(&self, order: &[TechniqueId]) -> bool {
        self.precedence.iter().all(|p| {
            match (
                order.iter().position(|&t| t == p.before),
                order.iter().position(|&t| t == p.after),
            ) {
                (Some(a), Some(b)) => a < b,
                _ => true,
            }
        })
    }

    /// Independent feasibility check of a finished program.
    pub fn check(&self, program: &Program) -> Result<()> {
        let mut seen = BTreeSet::new();
        for a in &program.applications {
            if !seen.insert(a.technique) {
                return Err(Error::Constraint(format!(
                    "technique {} is applied more than once",
                    a.technique
                )));
            }
            if let Some(levels) = self.levels_of(a.technique) {
                if !a.effort.is_zero() && !levels.contains(&a.effort) {
                    return Err(Error::Constraint(format!(
                        "technique {} is applied with {} h, which is not an allowed level",
                        a.technique,
                        a.effort.hours()
                    )));
                }
            }
        }
        if let Some(max) = self.max_total_effort {
            let total = program.total_effort();
            if total > max.hours() * (1.0 + 1e-12) {
                return Err(Error::Constraint(format!(
                    "total effort {total} h exceeds the maximum of {} h",
                    max.hours()
                )));
            }
        }
        let order: Vec<_> = program
            .applications
            .iter()
            .filter(|a| !a.effort.is_zero())
            .map(|a| a.technique)
            .collect();
        if !self.order_ok(&order) {
            return Err(Error::Constraint("program violates a precedence constraint".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    /// Evaluations spent when the improvement was found.
    pub evaluation: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub best_program: Program,
    pub objective: f64,
    pub evaluations: usize,
    /// Successive improvements of the best objective.
    pub trace: Vec<TraceEntry>,
}

/// Net benefit `r - d` of a program.
pub fn net_benefit<M: CostModel + ?Sized>(model: &M, program: &Program) -> Result<f64> {
    model.net_benefit(program)
}

/// Candidate ordering: higher objective, then lower total effort, then the
/// lexicographically smaller program.
fn better(a: (f64, &Program), b: (f64, &Program)) -> bool {
    let tol = 1e-9 * a.0.abs().max(b.0.abs()).max(1.0);
    if (a.0 - b.0).abs() > tol {
        return a.0 > b.0;
    }
    match a.1.total_effort().total_cmp(&b.1.total_effort()) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => lexicographic(a.1, b.1) == Ordering::Less,
    }
}

fn lexicographic(a: &Program, b: &Program) -> Ordering {
    let key = |p: &Program| -> Vec<(TechniqueId, f64)> {
        p.applications.iter().map(|x| (x.technique, x.effort.hours())).collect()
    };
    let (ka, kb) = (key(a), key(b));
    for (x, y) in ka.iter().zip(&kb) {
        let o = x.0.cmp(&y.0).then(x.1.total_cmp(&y.1));
        if o != Ordering::Equal {
            return o;
        }
    }
    ka.len().cmp(&kb.len())
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Visits every permutation of `items` (Heap's algorithm).
fn permutations(items: &mut Vec<TechniqueId>, k: usize, visit: &mut impl FnMut(&[TechniqueId]) -> Result<()>) -> Result<()> {
    if k <= 1 {
        return visit(items);
    }
    for i in 0..k - 1 {
        permutations(items, k - 1, visit)?;
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    permutations(items, k - 1, visit)
}

/// Level set per technique for the exhaustive search: the allowed levels if
/// constrained, else the grid; zero is always included.
fn level_sets(techniques: &[TechniqueId], constraints: &Constraints, grid: &[Effort]) -> Vec<Vec<Effort>> {
    techniques
        .iter()
        .map(|&t| {
            let src = constraints.levels_of(t).unwrap_or(grid);
            let mut v: Vec<Effort> = std::iter::once(Effort::ZERO).chain(src.iter().copied()).collect();
            v.sort_by(|a, b| a.hours().total_cmp(&b.hours()));
            v.dedup();
            v
        })
        .collect()
}

/// Brute force over every precedence-respecting order and every effort
/// assignment from the grid.
pub fn optimize_exhaustive<M: CostModel + ?Sized>(
    model: &M,
    constraints: &Constraints,
    effort_grid: &[Effort],
    ceiling: u128,
) -> Result<OptimizationResult> {
    let techniques = model.technique_ids();
    constraints.validate(&techniques)?;
    if effort_grid.is_empty() {
        return Err(Error::Constraint("effort grid is empty".into()));
    }
    let levels = level_sets(&techniques, constraints, effort_grid);
    let size = levels
        .iter()
        .try_fold(factorial(techniques.len()), |acc, l| acc.checked_mul(l.len() as u128))
        .unwrap_or(u128::MAX);
    if size > ceiling {
        return Err(Error::SearchSpaceTooLarge { size, ceiling });
    }

    let mut best = Program::default();
    let mut best_obj = model.net_benefit(&best)?;
    let mut evaluations = 1;
    let mut trace = vec![TraceEntry {
        evaluation: 1,
        objective: best_obj,
    }];
    let mut choice = vec![0usize; techniques.len()];
    loop {
        let applied: Vec<(TechniqueId, Effort)> = techniques
            .iter()
            .zip(&choice)
            .zip(&levels)
            .map(|((&t, &c), l)| (t, l[c]))
            .filter(|(_, e)| !e.is_zero())
            .collect();
        let total: f64 = applied.iter().map(|(_, e)| e.hours()).sum();
        let within_budget = constraints
            .max_total_effort
            .is_none_or(|m| total <= m.hours() * (1.0 + 1e-12));
        if within_budget && !applied.is_empty() {
            let mut order: Vec<TechniqueId> = applied.iter().map(|(t, _)| *t).collect();
            let n = order.len();
            permutations(&mut order, n, &mut |perm| {
                if !constraints.order_ok(perm) {
                    return Ok(());
                }
                let program = Program::new(perm.iter().map(|t| {
                    let e = applied.iter().find(|(x, _)| x == t).expect("from applied").1;
                    (*t, e)
                }));
                let obj = model.net_benefit(&program)?;
                evaluations += 1;
                if better((obj, &program), (best_obj, &best)) {
                    if obj > best_obj {
                        trace.push(TraceEntry {
                            evaluation: evaluations,
                            objective: obj,
                        });
                    }
                    best = program;
                    best_obj = obj;
                }
                Ok(())
            })?;
        }
        // Odometer step over the level choices.
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(OptimizationResult {
                    best_program: best,
                    objective: best_obj,
                    evaluations,
                    trace,
                });
            }
            choice[k] += 1;
            if choice[k] < levels[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Tuning of [`optimize_heuristic`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicOptions {
    /// Effort step of a move for techniques without level sets.
    #[serde(default = "default_step")]
    pub step: Effort,
    /// Upper bound of a single technique's effort without level sets.
    #[serde(default = "default_max_effort")]
    pub max_effort: Effort,
}

fn default_step() -> Effort {
    Effort::new(1.0).expect("constant")
}

fn default_max_effort() -> Effort {
    Effort::new(200.0).expect("constant")
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions {
            step: default_step(),
            max_effort: default_max_effort(),
        }
    }
}

/// Search state: an order over all techniques plus one effort each.
#[derive(Clone)]
struct State {
    order: Vec<usize>,
    effort: Vec<f64>,
}

struct Space<'a> {
    techniques: Vec<TechniqueId>,
    levels: Vec<Option<Vec<f64>>>,
    constraints: &'a Constraints,
    options: HeuristicOptions,
}

impl Space<'_> {
    fn program(&self, s: &State) -> Program {
        Program::new(
            s.order
                .iter()
                .filter(|&&k| s.effort[k] > 0.0)
                .map(|&k| (self.techniques[k], Effort::new(s.effort[k]).expect("kept non-negative"))),
        )
    }

    fn order_ok(&self, order: &[usize]) -> bool {
        let ids: Vec<_> = order.iter().map(|&k| self.techniques[k]).collect();
        self.constraints.order_ok(&ids)
    }

    fn cap(&self) -> f64 {
        let c = self.options.max_effort.hours();
        self.constraints.max_total_effort.map_or(c, |m| c.min(m.hours()))
    }

    /// Subtracts any budget excess from coordinate `k`.
    fn project(&self, s: &mut State, k: usize) {
        if let Some(max) = self.constraints.max_total_effort {
            let total: f64 = s.effort.iter().sum();
            let excess = total - max.hours();
            if excess > 0.0 {
                s.effort[k] = (s.effort[k] - excess).max(0.0);
                if let Some(levels) = &self.levels[k] {
                    // Highest allowed level that fits.
                    s.effort[k] = levels.iter().copied().filter(|&l| l <= s.effort[k]).fold(0.0, f64::max);
                }
            }
        }
    }

    fn random_order(&self, rng: &mut impl Rng) -> Vec<usize> {
        let n = self.techniques.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        // Repair by repeatedly moving a violating `before` in front of its
        // `after`; the constraint graph is acyclic, so this terminates.
        loop {
            let pos = |order: &[usize], t: TechniqueId| order.iter().position(|&k| self.techniques[k] == t);
            let violation = self.constraints.precedence.iter().find_map(|p| {
                let (a, b) = (pos(&order, p.before)?, pos(&order, p.after)?);
                (a > b).then_some((a, b))
            });
            match violation {
                Some((a, b)) => {
                    let k = order.remove(a);
                    order.insert(b, k);
                }
                None => return order,
            }
        }
    }

    fn random_state(&self, rng: &mut impl Rng) -> State {
        let order = self.random_order(rng);
        let step = self.options.step.hours();
        let steps = (self.cap() / step).floor() as u64;
        let mut s = State {
            order,
            effort: self
                .levels
                .iter()
                .map(|l| match l {
                    Some(l) => l[rng.random_range(0..l.len())],
                    None => rng.random_range(0..=steps) as f64 * step,
                })
                .collect(),
        };
        let mut ks: Vec<usize> = (0..self.techniques.len()).collect();
        ks.shuffle(rng);
        for k in ks {
            self.project(&mut s, k);
        }
        s
    }

    fn neighbours(&self, s: &State) -> Vec<State> {
        let n = self.techniques.len();
        let mut out = Vec::new();
        let cap = self.cap();
        for k in 0..n {
            let moves: Vec<f64> = match &self.levels[k] {
                Some(l) => {
                    let i = l.iter().position(|&x| x == s.effort[k]).unwrap_or(0);
                    [i.checked_sub(1), (i + 1 < l.len()).then_some(i + 1)]
                        .into_iter()
                        .flatten()
                        .map(|j| l[j])
                        .collect()
                }
                None => {
                    let step = self.options.step.hours();
                    [s.effort[k] - step, s.effort[k] + step]
                        .into_iter()
                        .map(|e| e.clamp(0.0, cap))
                        .collect()
                }
            };
            for e in moves {
                if e == s.effort[k] {
                    continue;
                }
                let mut next = s.clone();
                next.effort[k] = e;
                self.project(&mut next, k);
                if next.effort[k] != s.effort[k] {
                    out.push(next);
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut next = s.clone();
                next.order.swap(i, j);
                // Swapping two unapplied techniques changes nothing.
                if (s.effort[s.order[i]] > 0.0 || s.effort[s.order[j]] > 0.0) && self.order_ok(&next.order) {
                    out.push(next);
                }
            }
        }
        out
    }
}

/// Seeded random-restart first-improvement hill climbing.
///
/// The first climb starts at the empty program; later climbs start at
/// random feasible states. `budget` is the number of objective evaluations.
pub fn optimize_heuristic<M: CostModel + ?Sized>(
    model: &M,
    constraints: &Constraints,
    seed: u64,
    budget: usize,
    options: HeuristicOptions,
) -> Result<OptimizationResult> {
    let techniques = model.technique_ids();
    constraints.validate(&techniques)?;
    if options.step.is_zero() {
        return Err(Error::Constraint("effort step must be positive".into()));
    }
    let space = Space {
        levels: techniques
            .iter()
            .map(|&t| {
                constraints.levels_of(t).map(|l| {
                    let mut v: Vec<f64> = std::iter::once(0.0).chain(l.iter().map(|e| e.hours())).collect();
                    v.sort_by(f64::total_cmp);
                    v.dedup();
                    v
                })
            })
            .collect(),
        techniques,
        constraints,
        options,
    };
    let mut rng = seed::rng(seed);
    let start = State {
        order: space.random_order(&mut seed::rng(seed::derive(seed, 0))),
        effort: vec![0.0; space.techniques.len()],
    };
    let mut best = space.program(&start);
    let mut best_obj = if budget == 0 {
        return Ok(OptimizationResult {
            objective: model.net_benefit(&best)?,
            best_program: best,
            evaluations: 0,
            trace: Vec::new(),
        });
    } else {
        model.net_benefit(&best)?
    };
    let mut evaluations = 1;
    let mut trace = vec![TraceEntry {
        evaluation: 1,
        objective: best_obj,
    }];
    let mut current = start;
    let mut current_obj = best_obj;

    while evaluations < budget {
        let mut neighbours = space.neighbours(&current);
        neighbours.shuffle(&mut rng);
        let mut improved = false;
        for next in neighbours {
            if evaluations >= budget {
                break;
            }
            let program = space.program(&next);
            let obj = model.net_benefit(&program)?;
            evaluations += 1;
            if better((obj, &program), (best_obj, &best)) {
                if obj > best_obj {
                    trace.push(TraceEntry {
                        evaluation: evaluations,
                        objective: obj,
                    });
                }
                best = program;
                best_obj = obj;
            }
            if obj > current_obj + 1e-12 * current_obj.abs().max(1.0) {
                current = next;
                current_obj = obj;
                improved = true;
                break;
            }
        }
        if !improved && evaluations < budget {
            current = space.random_state(&mut rng);
            let program = space.program(&current);
            current_obj = model.net_benefit(&program)?;
            evaluations += 1;
            if better((current_obj, &program), (best_obj, &best)) {
                if current_obj > best_obj {
                    trace.push(TraceEntry {
                        evaluation: evaluations,
                        objective: current_obj,
                    });
                }
                best = program;
                best_obj = current_obj;
            }
        }
    }
    Ok(OptimizationResult {
        best_program: best,
        objective: best_obj,
        evaluations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::difficulty::DifficultyCurve;
    use crate::model::{Detection, DocumentClass, Fault, Scenario, Technique};

    fn e(h: f64) -> Effort {
        Effort::new(h).unwrap()
    }

    fn technique(id: TechniqueId, setup: f64, theta: f64) -> Technique {
        Technique {
            id,
            name: format!("t{id}"),
            setup_cost: setup,
            execution_cost_rate: None,
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
        }
    }

    fn scenario(techniques: Vec<Technique>) -> Scenario {
        Scenario::new(
            0.0,
            vec![Fault {
                id: 1,
                doc_class: DocumentClass::Code,
                predecessors: BTreeSet::new(),
                failure_probability: 0.1,
                field_removal_cost: 100.0,
                field_effect_cost: 900.0,
            }],
            techniques,
        )
        .unwrap()
    }

    #[test]
    fn net_benefit_examples() {
        let s = scenario(vec![technique(0, 0.0, 0.5)]);
        assert_eq!(net_benefit(&s, &Program::default()).unwrap(), 0.0);
        assert_eq!(net_benefit(&s, &Program::single(0, e(1.0))).unwrap(), 48.0);
    }

    #[test]
    fn expensive_setup_keeps_the_empty_program() {
        let s = scenario(vec![technique(0, 1000.0, 0.0)]);
        let r = optimize_exhaustive(&s, &Constraints::default(), &[e(5.0), e(10.0)], DEFAULT_SEARCH_CEILING).unwrap();
        assert!(r.best_program.is_empty());
        assert_eq!(r.objective, 0.0);
        let h = optimize_heuristic(&s, &Constraints::default(), 1, 500, HeuristicOptions::default()).unwrap();
        assert!(h.best_program.is_empty());
    }

    #[test]
    fn two_point_argmax() {
        let s = scenario(vec![technique(0, 0.0, 0.5)]);
        let r = optimize_exhaustive(&s, &Constraints::default(), &[e(0.0), e(10.0)], DEFAULT_SEARCH_CEILING).unwrap();
        assert_eq!(r.best_program, Program::single(0, e(10.0)));
        assert_eq!(r.objective, 48.0);
    }

    #[test]
    fn symmetric_techniques_tie_break_lexicographically() {
        let s = scenario(vec![technique(1, 1.0, 0.5), technique(0, 1.0, 0.5)]);
        let r = optimize_exhaustive(&s, &Constraints::default(), &[e(2.0)], DEFAULT_SEARCH_CEILING).unwrap();
        let swapped = Program::new(r.best_program.applications.iter().rev().map(|a| (a.technique, a.effort)));
        assert_eq!(net_benefit(&s, &swapped).unwrap(), r.objective);
        assert_eq!(r.best_program.applications[0].technique, 0);
    }

    #[test]
    fn refuses_large_spaces() {
        let s = scenario((0..4).map(|k| technique(k, 1.0, 0.5)).collect());
        let grid: Vec<_> = (0..10).map(|k| e(k as f64)).collect();
        assert!(matches!(
            optimize_exhaustive(&s, &Constraints::default(), &grid, 1000),
            Err(Error::SearchSpaceTooLarge { size: 240_000, ceiling: 1000 })
        ));
    }

    #[test]
    fn constraint_errors() {
        let s = scenario(vec![technique(0, 1.0, 0.5), technique(1, 1.0, 0.5)]);
        let cyclic = Constraints {
            precedence: vec![Precedence { before: 0, after: 1 }, Precedence { before: 1, after: 0 }],
            ..Default::default()
        };
        assert!(matches!(
            optimize_heuristic(&s, &cyclic, 1, 10, HeuristicOptions::default()),
            Err(Error::Constraint(_))
        ));
        let empty = Constraints {
            allowed_levels: vec![EffortLevels { technique: 0, levels: vec![] }],
            ..Default::default()
        };
        assert!(matches!(empty.validate(&[0, 1]), Err(Error::Constraint(_))));
        let unknown = Constraints {
            precedence: vec![Precedence { before: 0, after: 9 }],
            ..Default::default()
        };
        assert!(matches!(unknown.validate(&[0, 1]), Err(Error::UnresolvedReference { .. })));
    }

    #[test]
    fn budget_zero_returns_start() {
        let s = scenario(vec![technique(0, 0.0, 0.5)]);
        let r = optimize_heuristic(&s, &Constraints::default(), 3, 0, HeuristicOptions::default()).unwrap();
        assert!(r.best_program.is_empty());
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn heuristic_respects_constraints_and_is_deterministic() {
        let s = scenario(vec![technique(0, 0.0, 0.5), technique(1, 0.0, 0.3), technique(2, 2.0, 0.2)]);
        let c = Constraints {
            max_total_effort: Some(e(7.0)),
            allowed_levels: vec![EffortLevels { technique: 2, levels: vec![e(4.0)] }],
            precedence: vec![Precedence { before: 2, after: 0 }],
        };
        let a = optimize_heuristic(&s, &c, 11, 400, HeuristicOptions::default()).unwrap();
        let b = optimize_heuristic(&s, &c, 11, 400, HeuristicOptions::default()).unwrap();
        assert_eq!(a, b);
        c.check(&a.best_program).unwrap();
        assert!((net_benefit(&s, &a.best_program).unwrap() - a.objective).abs() < 1e-9);
        assert!(a.trace.windows(2).all(|w| w[0].objective <= w[1].objective));
    }
}
