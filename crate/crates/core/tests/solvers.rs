use nexus_opt_core::evo::dominates;
use nexus_opt_core::indicators::hv_exact;
use nexus_opt_core::nexus::{NexusProblem, ResourceTopology};
use nexus_opt_core::problem::LinearProblem;
use nexus_opt_core::solvers::{run, SolverConfig, Variant};
use nexus_opt_core::{Error, Problem, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cell::Cell;

fn tiny() -> NexusProblem {
    NexusProblem::new(ResourceTopology::new(1, 1, 1, 1).unwrap())
}

#[test]
fn same_seed_same_result() {
    let p = NexusProblem::new(ResourceTopology::new(2, 2, 2, 2).unwrap());
    for v in Variant::ALL {
        let cfg = SolverConfig::new(v, 20, 1500, 77);
        let a = run(&p, &cfg).unwrap();
        let b = run(&p, &cfg).unwrap();
        assert_eq!(a.front, b.front, "{}", v.name());
        assert_eq!(a.trace, b.trace, "{}", v.name());
        assert_eq!(a.evaluations, b.evaluations);
    }
}

#[test]
fn final_hv_at_least_initial_hv() {
    let p = tiny();
    for v in Variant::ALL {
        for seed in 0..3 {
            let r = run(&p, &SolverConfig::new(v, 20, 5000, seed)).unwrap();
            let reference = &r.trace_box.reference;
            let initial = hv_exact(&r.initial_front, reference);
            let fin = hv_exact(&r.front_objectives(), reference);
            assert!(fin >= initial, "{} seed {seed}: {fin} < {initial}", v.name());
            let trace: Vec<f64> = r.trace.iter().map(|t| t.hv).collect();
            assert!(trace.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}

#[test]
fn front_is_nondominated_and_feasible() {
    let p = NexusProblem::new(ResourceTopology::new(3, 2, 2, 1).unwrap());
    for v in Variant::ALL {
        let r = run(&p, &SolverConfig::new(v, 24, 3000, 4)).unwrap();
        assert!(r.evaluations <= 3000);
        assert!(!r.front.is_empty());
        for a in &r.front {
            assert!(p.bounds().contains(&a.decision));
            assert_eq!(p.evaluate(&a.decision).unwrap(), a.objectives);
            for b in &r.front {
                assert!(!dominates(&a.objectives, &b.objectives).unwrap());
            }
        }
    }
}

/// Counts calls and rejects anything out of bounds.
struct Counting<P> {
    inner: P,
    calls: Cell<usize>,
}

impl<P: Problem> Problem for Counting<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn num_objectives(&self) -> usize {
        self.inner.num_objectives()
    }
    fn bounds(&self) -> &nexus_opt_core::Bounds {
        self.inner.bounds()
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.calls.set(self.calls.get() + 1);
        self.inner.bounds().check(x)?;
        self.inner.evaluate(x)
    }
    fn objective_floor(&self) -> Option<Vec<f64>> {
        self.inner.objective_floor()
    }
}

#[test]
fn budget_accounting_matches_calls() {
    for v in Variant::ALL {
        // Budgets that do not divide evenly into generations.
        for budget in [20, 33, 777, 2501] {
            let p = Counting {
                inner: tiny(),
                calls: Cell::new(0),
            };
            let r = run(&p, &SolverConfig::new(v, 20, budget, 1)).unwrap();
            assert_eq!(r.evaluations, p.calls.get(), "{} {budget}", v.name());
            assert_eq!(r.evaluations, budget);
            assert_eq!(r.trace.last().unwrap().evaluations, budget);
        }
    }
}

#[test]
fn random_search_at_population_budget_is_initial_front() {
    let p = tiny();
    let r = run(&p, &SolverConfig::new(Variant::RandomSearch, 30, 30, 8)).unwrap();
    let mut got = r.front_objectives().iter().map(|f| f.to_vec()).collect::<Vec<_>>();
    let mut want = r.initial_front.clone();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
    want.dedup();
    assert_eq!(got, want);
}

#[test]
fn invalid_config_is_rejected() {
    let p = tiny();
    let err = run(&p, &SolverConfig::new(Variant::InverseModel, 7, 100, 0)).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert!("nsga".parse::<Variant>().is_err());
}

fn distance_to_ideal(front: &[Vec<f64>], ideal: &[f64]) -> f64 {
    front
        .iter()
        .map(|f| f.iter().zip(ideal).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn inverse_model_beats_random_search_on_linear_family() {
    let mut wins = 0;
    let (mut inv_sum, mut rnd_sum) = (0.0, 0.0);
    for seed in 0..20u64 {
        let p = LinearProblem::random(3, 30, &mut ChaCha8Rng::seed_from_u64(500 + seed));
        let ideal = p.ideal();
        let go = |v| {
            let r = run(&p, &SolverConfig::new(v, 20, 2000, seed)).unwrap();
            let objs: Vec<Vec<f64>> = r.front.into_iter().map(|i| i.objectives).collect();
            distance_to_ideal(&objs, &ideal)
        };
        let (a, b) = (go(Variant::InverseModel), go(Variant::RandomSearch));
        inv_sum += a;
        rnd_sum += b;
        if a < b {
            wins += 1;
        }
    }
    // One-sided sign test: P(X >= 15 | n = 20, p = 1/2) = 0.0207.
    assert!(inv_sum < rnd_sum);
    assert!(wins >= 15, "inverse model closer in only {wins}/20 seeds");
}
