//! Solver variants and the generational driver.
//!
//! Four variants share one loop shape: initialize `n` random solutions, then
//! repeatedly generate at most `n` offspring, evaluate them, and keep `n`
//! survivors by [`environmental_selection`]. Every evaluated solution also
//! enters an unbounded non-dominated [`Archive`], which is what a run returns
//! and what the per-generation hypervolume trace measures.
//!
//! - `ref_guided`: offspring stepped along convergence directions (toward the
//!   best individual of the same reference vector) and diversity directions
//!   (toward nearby individuals of other vectors).
//! - `reformulated_dva`: a binary-mask search labels variables as
//!   convergence- or diversity-related, then the two subproblems are varied
//!   separately.
//! - `inverse_model`: variables are labeled by perturbation, and convergence
//!   variables of new solutions come from a linear objective-to-decision model
//!   evaluated at targets sampled between the front and the ideal point.
//! - `random_search`: uniform sampling baseline.
//!
//! These are reconstructions from mechanism-level descriptions, not ports of
//! the published FLEA, LERD and EAGO codes.

mod archive;
mod dva;
mod inverse;
mod ref_guided;

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use core::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evo::{
    das_dennis_vectors, divisions_for, environmental_selection, ideal_point, mutate_masked,
    nadir_point, nondominated_sort, normalize_objectives, sbx_masked, Individual, Population,
    ReferenceVectorSet, VariationParams,
};
use crate::indicators::{reference_point, ReferenceBox};
use crate::{Error, Problem, Result};

pub use archive::{Archive, HvTrace};
pub use dva::{binary_dva, optimize_subproblem};
pub use inverse::{classify_variables, fit_inverse_model, inverse_generate, sample_targets, InverseModel};
pub use ref_guided::{direction_vectors, reference_guided_offspring, Direction, Directions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    RefGuided,
    ReformulatedDva,
    InverseModel,
    RandomSearch,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::RandomSearch,
        Variant::RefGuided,
        Variant::ReformulatedDva,
        Variant::InverseModel,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::RefGuided => "ref_guided",
            Variant::ReformulatedDva => "reformulated_dva",
            Variant::InverseModel => "inverse_model",
            Variant::RandomSearch => "random_search",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown solver variant `{s}`")))
    }
}

/// Which subproblem a variation step works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Convergence,
    Diversity,
}

/// Convergence/diversity label of every decision variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableRoles {
    convergence: Vec<bool>,
}

impl VariableRoles {
    pub fn from_convergence_mask(convergence: Vec<bool>) -> Self {
        Self { convergence }
    }

    pub fn all(dim: usize, mode: Mode) -> Self {
        Self {
            convergence: alloc::vec![mode == Mode::Convergence; dim],
        }
    }

    pub fn len(&self) -> usize {
        self.convergence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.convergence.is_empty()
    }

    pub fn role(&self, i: usize) -> Mode {
        if self.convergence[i] {
            Mode::Convergence
        } else {
            Mode::Diversity
        }
    }

    /// `true` for the variables labeled `mode`.
    pub fn mask(&self, mode: Mode) -> Vec<bool> {
        self.convergence
            .iter()
            .map(|&c| c == (mode == Mode::Convergence))
            .collect()
    }

    pub fn count(&self, mode: Mode) -> usize {
        self.convergence
            .iter()
            .filter(|&&c| c == (mode == Mode::Convergence))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Population size `n`; even and at least 4.
    pub population: usize,
    /// Total problem evaluations, at least `n`.
    pub budget: usize,
    pub seed: u64,
    pub variation: VariationParams,
    /// Reference lattice resolution; `None` picks the largest that fits `n`.
    pub divisions: Option<usize>,
    /// Fraction of offspring generated for convergence (the rest for diversity).
    pub split: f64,
    /// Perturbed copies per variable when classifying variables.
    pub perturbations: usize,
    /// Ridge coefficient of the inverse model.
    pub ridge: f64,
    /// Target sampling spread toward the ideal point.
    pub target_sigma: f64,
    /// Training archive capacity as a multiple of `n`.
    pub archive_factor: usize,
    /// Share of the budget spent on the binary mask search.
    pub dva_fraction: f64,
    /// Population members varied per mask evaluation.
    pub dva_sample: usize,
    /// Uniform samples behind the per-generation hypervolume trace.
    pub trace_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            variant: Variant::InverseModel,
            population: 70,
            budget: 50_000,
            seed: 0,
            variation: VariationParams::default(),
            divisions: None,
            split: 0.5,
            perturbations: 3,
            ridge: 1e-6,
            target_sigma: 0.2,
            archive_factor: 5,
            dva_fraction: 0.1,
            dva_sample: 10,
            trace_samples: 4096,
        }
    }
}

impl SolverConfig {
    pub fn new(variant: Variant, population: usize, budget: usize, seed: u64) -> Self {
        Self {
            variant,
            population,
            budget,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: alloc::string::String| Err(Error::Config(msg));
        if self.population < 4 || !self.population.is_multiple_of(2) {
            return fail(format!(
                "population must be even and at least 4, got {}",
                self.population
            ));
        }
        if self.budget < self.population {
            return fail(format!(
                "budget {} is smaller than the population {}",
                self.budget, self.population
            ));
        }
        if !(0.0..=1.0).contains(&self.split) {
            return fail(format!("split must lie in [0, 1], got {}", self.split));
        }
        if self.perturbations < 2 {
            return fail(format!("perturbations must be at least 2, got {}", self.perturbations));
        }
        if !(self.ridge >= 0.0) {
            return fail(format!("ridge must be non-negative, got {}", self.ridge));
        }
        if !(self.target_sigma > 0.0) {
            return fail(format!("target sigma must be positive, got {}", self.target_sigma));
        }
        if !(0.0..=1.0).contains(&self.dva_fraction) || self.dva_sample == 0 {
            return fail("DVA fraction must lie in [0, 1] with a positive sample size".into());
        }
        if self.divisions == Some(0) {
            return fail("reference divisions must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub generation: usize,
    pub evaluations: usize,
    /// Normalized archive hypervolume inside the run's trace box.
    pub hv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub variant: Variant,
    pub seed: u64,
    /// Final non-dominated archive.
    pub front: Vec<Individual>,
    /// Non-dominated objectives of the initial population.
    pub initial_front: Vec<Vec<f64>>,
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
    /// Fixed box of the hypervolume trace (set from the initial population).
    pub trace_box: ReferenceBox,
    pub trace_samples: usize,
    pub trace_seed: u64,
    /// Filled in by callers that can read a clock.
    pub wall_time: Option<Duration>,
}

impl RunResult {
    pub fn front_objectives(&self) -> Vec<&[f64]> {
        self.front.iter().map(|m| m.objectives.as_slice()).collect()
    }

    /// Rebuilds the sample set behind [`RunResult::trace`].
    pub fn trace_sampler(&self) -> HvTrace {
        HvTrace::new(self.trace_box.clone(), self.trace_samples, self.trace_seed)
    }
}

/// Counts problem evaluations against a budget and archives every result.
pub struct Evaluator<'a, P: Problem + ?Sized> {
    problem: &'a P,
    budget: usize,
    used: usize,
    archive: Archive,
}

impl<'a, P: Problem + ?Sized> Evaluator<'a, P> {
    pub fn new(problem: &'a P, budget: usize) -> Self {
        Self {
            problem,
            budget,
            used: 0,
            archive: Archive::new(),
        }
    }

    pub fn problem(&self) -> &'a P {
        self.problem
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.used
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    pub fn evaluate(&mut self, decision: Vec<f64>) -> Result<Individual> {
        if self.used >= self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        let objectives = self.problem.evaluate(&decision)?;
        self.used += 1;
        let ind = Individual::new(decision, objectives);
        self.archive.insert(&ind);
        Ok(ind)
    }

    pub fn evaluate_all(&mut self, decisions: Vec<Vec<f64>>) -> Result<Vec<Individual>> {
        decisions.into_iter().map(|d| self.evaluate(d)).collect()
    }
}

const TRACE_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Runs `config.variant` on `problem` until the evaluation budget is spent.
pub fn run<P: Problem + ?Sized>(problem: &P, config: &SolverConfig) -> Result<RunResult> {
    config.validate()?;
    let m = problem.num_objectives();
    if m < 2 {
        return Err(Error::Config(format!("need at least 2 objectives, got {m}")));
    }
    let n = config.population;
    let divisions = config.divisions.unwrap_or_else(|| divisions_for(m, n));
    let refs = das_dennis_vectors(m, divisions)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ev = Evaluator::new(problem, config.budget);

    let initial: Vec<Vec<f64>> = (0..n).map(|_| problem.bounds().sample(&mut rng)).collect();
    let pop = Population::new(ev.evaluate_all(initial)?, n);

    let objs = pop.objectives();
    let initial_front: Vec<Vec<f64>> = nondominated_sort(&objs)[0]
        .iter()
        .map(|&i| objs[i].to_vec())
        .collect();
    let trace_box = trace_box(problem, &objs);
    let trace_seed = config.seed ^ TRACE_SEED_SALT;
    let mut tracker = Tracker {
        hv: HvTrace::new(trace_box.clone(), config.trace_samples, trace_seed),
        points: Vec::new(),
    };
    tracker.record(&mut ev);

    match config.variant {
        Variant::RandomSearch => random_search(&mut ev, &mut tracker, n, &mut rng)?,
        Variant::RefGuided => ref_guided_loop(&mut ev, &mut tracker, pop, &refs, config, &mut rng)?,
        Variant::ReformulatedDva => dva_loop(&mut ev, &mut tracker, pop, &refs, config, &mut rng)?,
        Variant::InverseModel => inverse_loop(&mut ev, &mut tracker, pop, &refs, config, &mut rng)?,
    }

    Ok(RunResult {
        variant: config.variant,
        seed: config.seed,
        evaluations: ev.used(),
        front: ev.archive.into_members(),
        initial_front,
        trace: tracker.points,
        trace_box,
        trace_samples: config.trace_samples,
        trace_seed,
        wall_time: None,
    })
}

/// Lower corner: the problem's objective floor if known, else the initial
/// ideal pushed down by the initial range. Reference: derived from the
/// initial nadir so every initial point lies inside.
fn trace_box<P: Problem + ?Sized>(problem: &P, objs: &[&[f64]]) -> ReferenceBox {
    let ideal = ideal_point(objs);
    let nadir = nadir_point(objs);
    let reference = reference_point(&ideal, &nadir);
    let lower = problem
        .objective_floor()
        .filter(|f| f.len() == ideal.len() && f.iter().zip(&ideal).all(|(a, b)| a <= b))
        .unwrap_or_else(|| {
            ideal
                .iter()
                .zip(&reference)
                .map(|(lo, r)| lo - (r - lo))
                .collect()
        });
    ReferenceBox { lower, reference }
}

struct Tracker {
    hv: HvTrace,
    points: Vec<TracePoint>,
}

impl Tracker {
    fn record<P: Problem + ?Sized>(&mut self, ev: &mut Evaluator<'_, P>) {
        let fresh = ev.archive.take_pending();
        self.hv.absorb(&fresh);
        self.points.push(TracePoint {
            generation: self.points.len(),
            evaluations: ev.used(),
            hv: self.hv.value(),
        });
    }
}

fn random_search<P: Problem + ?Sized>(
    ev: &mut Evaluator<'_, P>,
    tracker: &mut Tracker,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    while ev.remaining() > 0 {
        let k = n.min(ev.remaining());
        for _ in 0..k {
            let x = ev.problem().bounds().sample(rng);
            ev.evaluate(x)?;
        }
        tracker.record(ev);
    }
    Ok(())
}

fn mutate_all<R: Rng + ?Sized>(
    children: &mut [Vec<f64>],
    bounds: &crate::Bounds,
    variation: &VariationParams,
    mask: Option<&[bool]>,
    rng: &mut R,
) {
    let active = mask.map_or(bounds.dim(), |m| m.iter().filter(|b| **b).count());
    let p_m = variation
        .mutation_prob
        .unwrap_or(1.0 / active.max(1) as f64);
    for c in children {
        mutate_masked(c, bounds, variation.eta_m, p_m, mask, rng);
    }
}

fn survive(
    pop: Population,
    offspring: Vec<Individual>,
    refs: &ReferenceVectorSet,
) -> Population {
    let n = pop.capacity;
    let mut members = pop.members;
    members.extend(offspring);
    environmental_selection(Population::new(members, n), refs, n)
}

fn ref_guided_loop<P: Problem + ?Sized>(
    ev: &mut Evaluator<'_, P>,
    tracker: &mut Tracker,
    mut pop: Population,
    refs: &ReferenceVectorSet,
    config: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let bounds = ev.problem().bounds();
    while ev.remaining() > 0 {
        let k = config.population.min(ev.remaining());
        let dirs = direction_vectors(&pop, refs);
        let mut children = reference_guided_offspring(&pop, &dirs, config.split, bounds, k, rng);
        mutate_all(&mut children, bounds, &config.variation, None, rng);
        let offspring = ev.evaluate_all(children)?;
        pop = survive(pop, offspring, refs);
        tracker.record(ev);
    }
    Ok(())
}

/// Alternates modes so that the convergence share of the evaluations tracks
/// `split`; a mode with no variables is never scheduled.
struct ModeScheduler {
    split: f64,
    convergence_evals: usize,
    total_evals: usize,
    convergence_available: bool,
    diversity_available: bool,
}

impl ModeScheduler {
    fn new(split: f64, roles: &VariableRoles) -> Self {
        Self {
            split,
            convergence_evals: 0,
            total_evals: 0,
            convergence_available: roles.count(Mode::Convergence) > 0,
            diversity_available: roles.count(Mode::Diversity) > 0,
        }
    }

    fn next(&self) -> Mode {
        match (self.convergence_available, self.diversity_available) {
            (true, false) => Mode::Convergence,
            (false, true) => Mode::Diversity,
            _ => {
                if (self.convergence_evals as f64) <= self.split * self.total_evals as f64
                    && self.split > 0.0
                {
                    Mode::Convergence
                } else {
                    Mode::Diversity
                }
            }
        }
    }

    fn spent(&mut self, mode: Mode, evals: usize) {
        self.total_evals += evals;
        if mode == Mode::Convergence {
            self.convergence_evals += evals;
        }
    }
}

fn dva_loop<P: Problem + ?Sized>(
    ev: &mut Evaluator<'_, P>,
    tracker: &mut Tracker,
    mut pop: Population,
    refs: &ReferenceVectorSet,
    config: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let dim = ev.problem().dim();
    let planned = (config.dva_fraction * config.budget as f64) as usize / config.dva_sample;
    let mask_budget = planned.min(ev.remaining() / config.dva_sample);
    let roles = if mask_budget >= 2 {
        let roles = binary_dva(&pop, ev, mask_budget, config.dva_sample, &config.variation, rng)?;
        tracker.record(ev);
        roles
    } else {
        VariableRoles::all(dim, Mode::Convergence)
    };

    let mut schedule = ModeScheduler::new(config.split, &roles);
    while ev.remaining() > 0 {
        let k = config.population.min(ev.remaining());
        let mode = schedule.next();
        pop = optimize_subproblem(pop, &roles, mode, k, refs, ev, &config.variation, rng)?;
        schedule.spent(mode, k);
        tracker.record(ev);
    }
    Ok(())
}

fn inverse_loop<P: Problem + ?Sized>(
    ev: &mut Evaluator<'_, P>,
    tracker: &mut Tracker,
    mut pop: Population,
    refs: &ReferenceVectorSet,
    config: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let problem = ev.problem();
    let bounds = problem.bounds();
    let dim = problem.dim();
    let n = config.population;

    let classification_cost = dim * config.perturbations;
    let roles = if classification_cost + n <= ev.remaining() {
        let objs = pop.objectives();
        let ideal = ideal_point(&objs);
        let nadir = nadir_point(&objs);
        let norm = normalize_objectives(&objs, &ideal, &nadir);
        // Base: the member closest to the ideal in normalized space.
        let base = (0..pop.len())
            .min_by(|&a, &b| {
                let da: f64 = norm[a].iter().map(|v| v * v).sum();
                let db: f64 = norm[b].iter().map(|v| v * v).sum();
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .expect("non-empty population");
        let base = pop.members[base].clone();
        let roles = classify_variables(ev, &base, &ideal, config.perturbations, rng)?;
        tracker.record(ev);
        roles
    } else {
        VariableRoles::all(dim, Mode::Convergence)
    };
    let diversity_mask = roles.mask(Mode::Diversity);
    let has_convergence = roles.count(Mode::Convergence) > 0;
    let has_diversity = roles.count(Mode::Diversity) > 0;

    let capacity = config.archive_factor * n;
    let mut training: VecDeque<Individual> = pop.members.iter().cloned().collect();

    while ev.remaining() > 0 {
        let k = n.min(ev.remaining());
        let mut n_conv = match (has_convergence, has_diversity) {
            (true, false) => k,
            (false, true) => 0,
            _ => libm::round(config.split * k as f64) as usize,
        };

        let objs = pop.objectives();
        let fronts = nondominated_sort(&objs);
        let first: Vec<&[f64]> = fronts[0].iter().map(|&i| objs[i]).collect();
        let ideal = ideal_point(&objs);

        let model = if n_conv > 0 {
            let mut sample: Vec<Individual> =
                fronts[0].iter().map(|&i| pop.members[i].clone()).collect();
            sample.extend(training.iter().cloned());
            fit_inverse_model(&sample, config.ridge).ok()
        } else {
            None
        };
        if model.is_none() {
            n_conv = 0;
        }

        let mut children = Vec::with_capacity(k);
        if let Some(model) = &model {
            let targets = sample_targets(&first, &ideal, config.target_sigma, n_conv, rng);
            for t in targets {
                let parent = &pop.members[rng.random_range(0..pop.len())].decision;
                let mut child = inverse_generate(model, &[t], bounds, &roles, parent)
                    .pop()
                    .expect("one target");
                mutate_all(
                    core::slice::from_mut(&mut child),
                    bounds,
                    &config.variation,
                    None,
                    rng,
                );
                children.push(child);
            }
        }
        let mask = if has_diversity { Some(diversity_mask.as_slice()) } else { None };
        while children.len() < k {
            let a = &pop.members[rng.random_range(0..pop.len())].decision;
            let b = &pop.members[rng.random_range(0..pop.len())].decision;
            let (mut c1, _) = sbx_masked(a, b, bounds, config.variation.eta_c, mask, rng);
            mutate_all(core::slice::from_mut(&mut c1), bounds, &config.variation, mask, rng);
            children.push(c1);
        }

        let offspring = ev.evaluate_all(children)?;
        for o in &offspring {
            if training.len() == capacity {
                training.pop_front();
            }
            training.push_back(o.clone());
        }
        pop = survive(pop, offspring, refs);
        tracker.record(ev);
    }
    Ok(())
}
