use qualecon_core::random::{self, Limits};
use qualecon_core::simulate::{estimate, run_variance, simulate_once, RunVariance};
use qualecon_core::{seed, CostModel, Program, Scenario};

#[test]
fn means_match_analytic_terms() {
    let limits = Limits {
        max_faults: 6,
        max_techniques: 3,
        ..Limits::default()
    };
    let mut misses = Vec::new();
    for k in 0..12 {
        let mut rng = seed::rng(seed::derive(1000, k));
        let s = random::scenario(&mut rng, limits);
        let p = random::program(&mut rng, &s.technique_ids(), limits.max_effort);
        let terms = s.cost_terms(&p).unwrap();
        let n = 30_000;
        let est = estimate(&s, &p, n, k).unwrap();
        let var = run_variance(&s, &p).unwrap();
        for (name, stat, value, v) in [
            ("direct", est.direct, terms.direct, var.direct),
            ("future", est.future, terms.future, var.future),
            ("revenue", est.revenue, terms.revenue, var.revenue),
            ("screened", est.screened, terms.screened, var.screened),
        ] {
            let se = RunVariance::stderr(v, n);
            if (stat.mean - value).abs() > 4.0 * se + 1e-9 * value.abs().max(1.0) {
                misses.push(format!("instance {k} {name}: {stat:?} vs {value}, exact se {se}"));
            }
        }
    }
    assert!(misses.len() <= 1, "{misses:#?}");
}

/// Mean and variance of (direct, future, revenue, screened) by enumerating
/// every combination of detection and failure outcomes.
fn enumerate_moments(s: &Scenario, p: &Program) -> [(f64, f64); 4] {
    let apps: Vec<_> = p.applications.iter().filter(|a| a.effort.hours() > 0.0).map(|a| (a.technique, a.effort)).collect();
    let faults = s.faults();
    let nf = faults.len();
    let ancestors: Vec<Vec<usize>> = faults
        .iter()
        .map(|f| {
            let ids = s.ancestors(f.id).unwrap();
            ids.iter().map(|id| faults.iter().position(|g| g.id == *id).unwrap()).collect()
        })
        .collect();
    let mut fixed = 0.0;
    let mut miss = Vec::new();
    let mut removal = Vec::new();
    for &(t, e) in &apps {
        let tech = s.technique(t).unwrap();
        fixed += tech.setup_cost + s.execution_cost(t, e).unwrap();
        for f in faults {
            match tech.detections.get(&f.id) {
                Some(d) => {
                    miss.push(d.difficulty.eval(e));
                    removal.push(d.removal_cost);
                }
                None => {
                    miss.push(1.0);
                    removal.push(0.0);
                }
            }
        }
    }
    let draws = miss.len();
    let mut m1 = [0.0; 4];
    let mut m2 = [0.0; 4];
    for outcome in 0u32..1 << (draws + nf) {
        let bit = |k: usize| outcome >> k & 1 == 1;
        let mut prob = 1.0;
        for (d, m) in miss.iter().enumerate() {
            prob *= if bit(d) { 1.0 - m } else { *m };
        }
        for (i, f) in faults.iter().enumerate() {
            prob *= if bit(draws + i) { f.failure_probability } else { 1.0 - f.failure_probability };
        }
        if prob == 0.0 {
            continue;
        }
        // 0 live, 1 detected, 2 screened
        let mut state = vec![0u8; nf];
        let mut q = [fixed, 0.0, 0.0, 0.0];
        for x in 0..apps.len() {
            let hits: Vec<usize> = (0..nf).filter(|&i| state[i] == 0 && bit(x * nf + i)).collect();
            for &i in &hits {
                state[i] = 1;
                q[0] += removal[x * nf + i];
                if bit(draws + i) {
                    q[2] += faults[i].field_cost();
                }
            }
            for i in 0..nf {
                if state[i] == 0 && ancestors[i].iter().any(|&j| hits.contains(&j)) {
                    state[i] = 2;
                    if bit(draws + i) {
                        q[3] += faults[i].field_cost();
                    }
                }
            }
        }
        for i in 0..nf {
            if state[i] == 0 && bit(draws + i) {
                q[1] += faults[i].field_cost();
            }
        }
        for k in 0..4 {
            m1[k] += prob * q[k];
            m2[k] += prob * q[k] * q[k];
        }
    }
    std::array::from_fn(|k| (m1[k], m2[k] - m1[k] * m1[k]))
}

#[test]
fn exact_variance_matches_enumeration() {
    let limits = Limits {
        max_faults: 3,
        max_techniques: 2,
        ..Limits::default()
    };
    let mut rng = seed::rng(seed::derive(2000, 0));
    for _ in 0..300 {
        let s = random::scenario(&mut rng, limits);
        let mut p = random::program(&mut rng, &s.technique_ids(), limits.max_effort);
        p.applications.truncate(3);
        let terms = s.cost_terms(&p).unwrap();
        let var = run_variance(&s, &p).unwrap();
        let brute = enumerate_moments(&s, &p);
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-9 * scale.max(1.0);
        let means = [terms.direct, terms.future, terms.revenue, terms.screened];
        let vars = [var.direct, var.future, var.revenue, var.screened];
        for k in 0..4 {
            assert!(close(means[k], brute[k].0, brute[k].0.abs()), "{s:?} {p:?} mean {k}: {} vs {}", means[k], brute[k].0);
            // rough magnitude of one run
        let bound: f64 = s.faults().iter().map(|f| f.field_cost()).sum::<f64>() + terms.direct.abs() * 10.0;
            assert!(close(vars[k], brute[k].1, bound * bound), "{s:?} {p:?} var {k}: {} vs {}", vars[k], brute[k].1);
        }
    }
}

#[test]
fn every_run_conserves_realized_field_cost() {
    let mut rng = seed::rng(3);
    for k in 0..200 {
        let s = random::scenario(&mut rng, Limits::default());
        let p = random::program(&mut rng, &s.technique_ids(), 40.0);
        let o = simulate_once(&s, &p, k).unwrap();
        let sum = o.revenue + o.screened + o.future;
        assert!((sum - o.realized_field_cost).abs() <= 1e-9 * o.realized_field_cost.max(1.0));
    }
}

#[test]
fn estimates_ignore_thread_count() {
    let mut rng = seed::rng(8);
    let s = random::scenario(&mut rng, Limits::default());
    let p = random::program(&mut rng, &s.technique_ids(), 40.0);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| estimate(&s, &p, 5000, 21).unwrap());
    let b = many.install(|| estimate(&s, &p, 5000, 21).unwrap());
    assert_eq!(a, b);
}
