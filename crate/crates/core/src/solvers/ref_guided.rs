//! Reference-guided offspring generation along convergence and diversity
//! directions in decision space.

use alloc::vec::Vec;

use rand::Rng;

use crate::evo::{associate, ideal_point, nadir_point, normalize_objectives, Population, ReferenceVectorSet};
use crate::Bounds;

/// Penalty on the perpendicular distance when ranking individuals on a vector.
const PBI_THETA: f64 = 5.0;

/// A unit direction in decision space and the distance to its target.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub unit: Vec<f64>,
    pub length: f64,
}

impl Direction {
    fn between(from: &[f64], to: &[f64]) -> Self {
        let diff: Vec<f64> = to.iter().zip(from).map(|(a, b)| a - b).collect();
        let length = libm::sqrt(diff.iter().map(|v| v * v).sum::<f64>());
        if length == 0.0 {
            return Self::zero(from.len());
        }
        Self {
            unit: diff.into_iter().map(|v| v / length).collect(),
            length,
        }
    }

    fn zero(dim: usize) -> Self {
        Self {
            unit: alloc::vec![0.0; dim],
            length: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.length == 0.0
    }
}

/// Per-individual directions, indexed like the population.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Directions {
    /// Toward the best individual on the individual's reference vector; zero
    /// for that best individual itself.
    pub convergence: Vec<Direction>,
    /// Toward the (up to) two nearest individuals associated with other
    /// reference vectors.
    pub diversity: Vec<Vec<Direction>>,
}

/// Builds convergence and diversity directions. Objectives are normalized by
/// the population's ideal and nadir, each individual is associated with its
/// minimum-angle reference vector, and "best on a vector" means the smallest
/// penalty-boundary value `d1 + 5 d2` along it over the whole population.
pub fn direction_vectors(pop: &Population, refs: &ReferenceVectorSet) -> Directions {
    let n = pop.len();
    if n < 2 {
        return Directions::default();
    }
    let objs = pop.objectives();
    let ideal = ideal_point(&objs);
    let nadir = nadir_point(&objs);
    let norm = normalize_objectives(&objs, &ideal, &nadir);
    let assoc: Vec<_> = norm.iter().map(|p| associate(p, refs)).collect();

    let pbi = |point: &[f64], w: &[f64]| -> f64 {
        let proj: f64 = point.iter().zip(w).map(|(a, b)| a * b).sum();
        let sq: f64 = point.iter().map(|v| v * v).sum();
        proj + PBI_THETA * libm::sqrt((sq - proj * proj).max(0.0))
    };

    let mut best_on = alloc::vec![usize::MAX; refs.len()];
    let convergence = (0..n)
        .map(|i| {
            let k = assoc[i].vector;
            if best_on[k] == usize::MAX {
                let w = &refs.vectors()[k];
                best_on[k] = (0..n)
                    .min_by(|&a, &b| pbi(&norm[a], w).total_cmp(&pbi(&norm[b], w)).then(a.cmp(&b)))
                    .expect("non-empty");
            }
            let best = best_on[k];
            let dim = pop.members[i].decision.len();
            if best == i {
                Direction::zero(dim)
            } else {
                Direction::between(&pop.members[i].decision, &pop.members[best].decision)
            }
        })
        .collect();

    let mut dist = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = pop.members[i]
                .decision
                .iter()
                .zip(&pop.members[j].decision)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let diversity = (0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n)
                .filter(|&j| j != i && assoc[j].vector != assoc[i].vector)
                .collect();
            others.sort_by(|&a, &b| dist[i * n + a].total_cmp(&dist[i * n + b]).then(a.cmp(&b)));
            others
                .into_iter()
                .take(2)
                .map(|j| Direction::between(&pop.members[i].decision, &pop.members[j].decision))
                .collect()
        })
        .collect();

    Directions {
        convergence,
        diversity,
    }
}

/// `count` offspring: the first `round(split * count)` step along the parent's
/// convergence direction, the rest along one of its diversity directions. The
/// step is `u` times the unit direction with `u` uniform in `(0, 1]`, so a
/// child may overshoot a target closer than `u`. Parents are drawn uniformly
/// and children clipped to `bounds`.
pub fn reference_guided_offspring<R: Rng + ?Sized>(
    pop: &Population,
    directions: &Directions,
    split: f64,
    bounds: &Bounds,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let n = pop.len();
    let n_conv = libm::round(split.clamp(0.0, 1.0) * count as f64) as usize;
    (0..count)
        .map(|k| {
            let i = rng.random_range(0..n);
            let parent = &pop.members[i].decision;
            let dir = if k < n_conv {
                directions.convergence.get(i)
            } else {
                let options = directions.diversity.get(i).map_or(&[][..], Vec::as_slice);
                if options.is_empty() {
                    None
                } else {
                    options.get(rng.random_range(0..options.len()))
                }
            };
            let mut child = parent.clone();
            if let Some(dir) = dir.filter(|d| !d.is_zero()) {
                let step = 1.0 - rng.random::<f64>();
                for (c, u) in child.iter_mut().zip(&dir.unit) {
                    *c += step * u;
                }
                bounds.clip(&mut child);
            }
            child
        })
        .collect()
}
