use qualecon_core::optimize::{
    optimize_exhaustive, optimize_heuristic, Constraints, EffortLevels, HeuristicOptions, Precedence,
    DEFAULT_SEARCH_CEILING,
};
use qualecon_core::random::{self, Limits};
use qualecon_core::{seed, CostModel, Effort, Program, Scenario, TechniqueId};
use rand::Rng;

fn small(k: u64, predecessors: bool) -> Scenario {
    let mut rng = seed::rng(seed::derive(404, k));
    random::scenario(
        &mut rng,
        Limits {
            max_faults: 6,
            max_techniques: 3,
            predecessors,
            ..Limits::default()
        },
    )
}

fn grid() -> Vec<Effort> {
    [0.0, 5.0, 10.0].iter().map(|&h| Effort::new(h).unwrap()).collect()
}

/// Every ordered selection of distinct techniques with non-zero grid levels.
fn all_programs(techniques: &[TechniqueId], levels: &[Effort]) -> Vec<Program> {
    let mut out = vec![Program::default()];
    let mut frontier = vec![Program::default()];
    while let Some(p) = frontier.pop() {
        for &t in techniques {
            if p.applications.iter().any(|a| a.technique == t) {
                continue;
            }
            for &e in levels.iter().filter(|e| !e.is_zero()) {
                let mut q = p.clone();
                q.applications.push(qualecon_core::Application { technique: t, effort: e });
                out.push(q.clone());
                frontier.push(q);
            }
        }
    }
    out
}

fn random_constraints(rng: &mut impl Rng, techniques: &[TechniqueId]) -> Constraints {
    let mut c = Constraints::default();
    if rng.random_bool(0.5) {
        c.max_total_effort = Some(Effort::new(rng.random_range(5.0..25.0)).unwrap());
    }
    if techniques.len() >= 2 && rng.random_bool(0.5) {
        c.precedence.push(Precedence { before: techniques[1], after: techniques[0] });
    }
    if rng.random_bool(0.3) {
        c.allowed_levels.push(EffortLevels { technique: techniques[0], levels: vec![Effort::new(10.0).unwrap()] });
    }
    c
}

#[test]
fn exhaustive_matches_independent_enumeration() {
    for k in 0..40 {
        let s = small(k, true);
        let mut rng = seed::rng(k);
        let c = random_constraints(&mut rng, &s.technique_ids());
        let r = optimize_exhaustive(&s, &c, &grid(), DEFAULT_SEARCH_CEILING).unwrap();
        c.check(&r.best_program).unwrap();
        let oracle = all_programs(&s.technique_ids(), &grid())
            .into_iter()
            .filter(|p| c.check(p).is_ok())
            .map(|p| s.net_benefit(&p).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((r.objective - oracle).abs() <= 1e-9 * oracle.abs().max(1.0), "instance {k}");
        assert!((s.net_benefit(&r.best_program).unwrap() - r.objective).abs() <= 1e-9);
    }
}

#[test]
fn net_benefit_and_negative_total_cost_share_the_argmax() {
    // Without propagation r + t is the same for every program.
    for k in 0..40 {
        let s = small(k, false);
        let total = s.total_expected_field_cost();
        let programs = all_programs(&s.technique_ids(), &grid());
        let score = |p: &Program| {
            let t = s.cost_terms(p).unwrap();
            (t.revenue - t.direct, total - t.direct - t.future)
        };
        let by_benefit = programs.iter().max_by(|a, b| score(a).0.total_cmp(&score(b).0)).unwrap();
        let best_alt = programs.iter().map(|p| score(p).1).fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-9 * total.max(1.0);
        assert!((score(by_benefit).1 - best_alt).abs() <= tol, "instance {k}");
        assert!((score(by_benefit).0 - score(by_benefit).1).abs() <= tol, "{:?} {total}", score(by_benefit));
    }
}

#[test]
fn heuristic_is_feasible_consistent_and_monotone() {
    for k in 0..40 {
        let s = small(k, true);
        let mut rng = seed::rng(k + 100);
        let c = random_constraints(&mut rng, &s.technique_ids());
        let r = optimize_heuristic(&s, &c, k, 300, HeuristicOptions::default()).unwrap();
        c.check(&r.best_program).unwrap();
        assert!(r.evaluations <= 300);
        assert!((s.net_benefit(&r.best_program).unwrap() - r.objective).abs() <= 1e-9 * r.objective.abs().max(1.0));
        assert!(r.trace.windows(2).all(|w| w[0].objective <= w[1].objective));
        assert_eq!(r.trace.last().map(|t| t.objective), Some(r.objective));
    }
}

#[test]
fn heuristic_on_a_grid_finds_the_exhaustive_optimum() {
    let mut hits = 0;
    for k in 0..30 {
        let s = small(k, true);
        let c = Constraints {
            allowed_levels: s
                .technique_ids()
                .into_iter()
                .map(|t| EffortLevels { technique: t, levels: grid() })
                .collect(),
            ..Constraints::default()
        };
        let opt = optimize_exhaustive(&s, &c, &grid(), DEFAULT_SEARCH_CEILING).unwrap().objective;
        let h = optimize_heuristic(&s, &c, k, 500, HeuristicOptions::default()).unwrap().objective;
        assert!(h <= opt + 1e-9 * opt.abs().max(1.0));
        if h >= opt - 0.01 * opt.abs() {
            hits += 1;
        }
    }
    assert!(hits >= 29, "{hits}/30");
}
