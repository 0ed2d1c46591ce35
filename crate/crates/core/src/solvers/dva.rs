//! Binary-mask decision variable analysis and masked subproblem optimization.

use alloc::vec::Vec;

use rand::Rng;

use super::{mutate_all, survive, Evaluator, Mode, VariableRoles};
use crate::evo::{
    ideal_point, nadir_point, nondominated_sort, normalize_objectives, sbx_masked, Population,
    ReferenceVectorSet, VariationParams,
};
use crate::{Problem, Result};

/// Evolves a binary mask over the variables with a (1+1) hill-climber for
/// `mask_budget` mask evaluations (each costs `sample` problem evaluations).
///
/// A mask is scored by the mean reduction in normalized distance-to-ideal
/// obtained when `sample` random members each take one crossover/mutation
/// step restricted to the masked variables, mated with a binary-tournament
/// winner. Set bits of the final mask become convergence labels.
pub fn binary_dva<P: Problem + ?Sized, R: Rng + ?Sized>(
    pop: &Population,
    ev: &mut Evaluator<'_, P>,
    mask_budget: usize,
    sample: usize,
    variation: &VariationParams,
    rng: &mut R,
) -> Result<VariableRoles> {
    let dim = ev.problem().dim();
    let objs = pop.objectives();
    let ideal = ideal_point(&objs);
    let nadir = nadir_point(&objs);
    let distance = |f: &[f64]| -> f64 {
        let p = &normalize_objectives(&[f], &ideal, &nadir)[0];
        libm::sqrt(p.iter().map(|v| v * v).sum::<f64>())
    };
    let parent_dist: Vec<f64> = objs.iter().map(|f| distance(f)).collect();

    let score = |mask: &[bool], ev: &mut Evaluator<'_, P>, rng: &mut R| -> Result<f64> {
        let bounds = ev.problem().bounds();
        let mut total = 0.0;
        for _ in 0..sample {
            let i = rng.random_range(0..pop.len());
            let (a, b) = (rng.random_range(0..pop.len()), rng.random_range(0..pop.len()));
            let mate = if parent_dist[b] < parent_dist[a] { b } else { a };
            let (mut child, _) = sbx_masked(
                &pop.members[i].decision,
                &pop.members[mate].decision,
                bounds,
                variation.eta_c,
                Some(mask),
                rng,
            );
            mutate_all(core::slice::from_mut(&mut child), bounds, variation, Some(mask), rng);
            let evaluated = ev.evaluate(child)?;
            total += parent_dist[i] - distance(&evaluated.objectives);
        }
        Ok(total / sample as f64)
    };

    let mut mask: Vec<bool> = (0..dim).map(|_| rng.random_bool(0.5)).collect();
    let mut fitness = score(&mask, ev, rng)?;
    let flip = 1.0 / dim as f64;
    for _ in 1..mask_budget {
        let mut candidate = mask.clone();
        let mut flipped = false;
        for bit in candidate.iter_mut() {
            if rng.random::<f64>() < flip {
                *bit = !*bit;
                flipped = true;
            }
        }
        if !flipped {
            let i = rng.random_range(0..dim);
            candidate[i] = !candidate[i];
        }
        let f = score(&candidate, ev, rng)?;
        if f >= fitness {
            mask = candidate;
            fitness = f;
        }
    }
    Ok(VariableRoles::from_convergence_mask(mask))
}

fn tournament<R: Rng + ?Sized>(rank: &[usize], rng: &mut R) -> usize {
    let a = rng.random_range(0..rank.len());
    let b = rng.random_range(0..rank.len());
    if rank[b] < rank[a] {
        b
    } else {
        a
    }
}

/// Produces `step_budget` offspring by tournament selection, crossover and
/// mutation applied only to the variables labeled `mode` (the rest copied from
/// the first parent), evaluates them, and reduces parents plus offspring back
/// to the population capacity.
#[allow(clippy::too_many_arguments)]
pub fn optimize_subproblem<P: Problem + ?Sized, R: Rng + ?Sized>(
    pop: Population,
    roles: &VariableRoles,
    mode: Mode,
    step_budget: usize,
    refs: &ReferenceVectorSet,
    ev: &mut Evaluator<'_, P>,
    variation: &VariationParams,
    rng: &mut R,
) -> Result<Population> {
    let bounds = ev.problem().bounds();
    let mask = roles.mask(mode);
    let fronts = nondominated_sort(&pop.objectives());
    let mut rank = alloc::vec![0usize; pop.len()];
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            rank[i] = r;
        }
    }
    let mut children = Vec::with_capacity(step_budget);
    while children.len() < step_budget {
        let a = tournament(&rank, rng);
        let b = tournament(&rank, rng);
        let (c1, c2) = sbx_masked(
            &pop.members[a].decision,
            &pop.members[b].decision,
            bounds,
            variation.eta_c,
            Some(&mask),
            rng,
        );
        children.push(c1);
        if children.len() < step_budget {
            children.push(c2);
        }
    }
    mutate_all(&mut children, bounds, variation, Some(&mask), rng);
    let offspring = ev.evaluate_all(children)?;
    Ok(survive(pop, offspring, refs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evo::das_dennis_vectors;
    use crate::{Bounds, Error};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Both objectives increase with variable 0 only.
    struct OnlyFirst {
        bounds: Bounds,
    }

    impl Problem for OnlyFirst {
        fn dim(&self) -> usize {
            self.bounds.dim()
        }
        fn num_objectives(&self) -> usize {
            2
        }
        fn bounds(&self) -> &Bounds {
            &self.bounds
        }
        fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
            Ok(vec![x[0], 2.0 * x[0] + 1.0])
        }
    }

    fn initial<P: Problem>(p: &P, ev: &mut Evaluator<'_, P>, n: usize, rng: &mut ChaCha8Rng) -> Population {
        let xs = (0..n).map(|_| p.bounds().sample(rng)).collect();
        Population::new(ev.evaluate_all(xs).unwrap(), n)
    }

    #[test]
    fn influential_variable_gets_selected() {
        let p = OnlyFirst {
            bounds: Bounds::unit(8),
        };
        let mut hits = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ev = Evaluator::new(&p, 10_000);
            let pop = initial(&p, &mut ev, 20, &mut rng);
            let roles = binary_dva(&pop, &mut ev, 40, 10, &VariationParams::default(), &mut rng).unwrap();
            if roles.role(0) == Mode::Convergence {
                hits += 1;
            }
        }
        // Chance level is 10 of 20.
        assert!(hits >= 16, "bit 0 selected in {hits}/20 trials");
    }

    #[test]
    fn minimal_budget_gives_total_labeling() {
        let p = OnlyFirst {
            bounds: Bounds::unit(5),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ev = Evaluator::new(&p, 100);
        let pop = initial(&p, &mut ev, 8, &mut rng);
        let roles = binary_dva(&pop, &mut ev, 2, 4, &VariationParams::default(), &mut rng).unwrap();
        assert_eq!(roles.len(), 5);
        assert_eq!(roles.count(Mode::Convergence) + roles.count(Mode::Diversity), 5);
        assert_eq!(ev.used(), 8 + 2 * 4);
    }

    #[test]
    fn dva_is_deterministic() {
        let p = OnlyFirst {
            bounds: Bounds::unit(6),
        };
        let go = || {
            let mut rng = ChaCha8Rng::seed_from_u64(44);
            let mut ev = Evaluator::new(&p, 1000);
            let pop = initial(&p, &mut ev, 10, &mut rng);
            binary_dva(&pop, &mut ev, 10, 5, &VariationParams::default(), &mut rng).unwrap()
        };
        assert_eq!(go(), go());
    }

    #[test]
    fn subproblem_budget_and_masking() {
        let p = OnlyFirst {
            bounds: Bounds::unit(6),
        };
        let refs = das_dennis_vectors(2, 5).unwrap();
        let roles = VariableRoles::from_convergence_mask(vec![true, false, true, false, false, true]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut ev = Evaluator::new(&p, 10_000);
        let mut pop = initial(&p, &mut ev, 10, &mut rng);
        for step in [10, 7, 1] {
            let before = ev.used();
            pop = optimize_subproblem(pop, &roles, Mode::Diversity, step, &refs, &mut ev, &VariationParams::default(), &mut rng).unwrap();
            assert_eq!(ev.used() - before, step);
            assert_eq!(pop.len(), 10);
        }
    }

    #[test]
    fn empty_mode_only_reselects() {
        let p = OnlyFirst {
            bounds: Bounds::unit(3),
        };
        let refs = das_dennis_vectors(2, 5).unwrap();
        let roles = VariableRoles::all(3, Mode::Diversity);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ev = Evaluator::new(&p, 1000);
        let pop = initial(&p, &mut ev, 8, &mut rng);
        let decisions: Vec<Vec<f64>> = pop.members.iter().map(|m| m.decision.clone()).collect();
        let out = optimize_subproblem(pop, &roles, Mode::Convergence, 8, &refs, &mut ev, &VariationParams::default(), &mut rng).unwrap();
        assert_eq!(ev.used(), 16);
        assert!(out.members.iter().all(|m| decisions.contains(&m.decision)));
    }

    #[test]
    fn masked_children_copy_other_variables() {
        // Mirrors the per-child masking inside optimize_subproblem over many pairs.
        let bounds = Bounds::unit(10);
        let roles = VariableRoles::from_convergence_mask((0..10).map(|i| i % 3 == 0).collect());
        let mask = roles.mask(Mode::Convergence);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10_000 {
            let a = bounds.sample(&mut rng);
            let b = bounds.sample(&mut rng);
            let (mut c, _) = sbx_masked(&a, &b, &bounds, 20.0, Some(&mask), &mut rng);
            mutate_all(core::slice::from_mut(&mut c), &bounds, &VariationParams::default(), Some(&mask), &mut rng);
            for i in 0..10 {
                if !mask[i] {
                    assert_eq!(c[i], a[i]);
                }
            }
        }
    }
}
