use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evo::{dominates_unchecked, weakly_dominates, Individual};
use crate::indicators::ReferenceBox;

/// Unbounded set of mutually non-dominated individuals, in insertion order.
#[derive(Debug, Clone, Default)]
pub struct Archive {
    members: Vec<Individual>,
    /// Objectives of accepted insertions not yet handed to a trace.
    pending: Vec<Vec<f64>>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `ind` unless an existing member dominates it or has identical
    /// objectives; members it dominates are dropped. Returns whether it was
    /// accepted.
    pub fn insert(&mut self, ind: &Individual) -> bool {
        let f = ind.objectives.as_slice();
        if self
            .members
            .iter()
            .any(|m| m.objectives == f || dominates_unchecked(&m.objectives, f))
        {
            return false;
        }
        self.members.retain(|m| !dominates_unchecked(f, &m.objectives));
        self.members.push(ind.clone());
        self.pending.push(f.to_vec());
        true
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub(crate) fn take_pending(&mut self) -> Vec<Vec<f64>> {
        core::mem::take(&mut self.pending)
    }
}

/// Normalized hypervolume of an archive inside a fixed box, estimated on a
/// fixed set of uniform samples. A sample stays covered once any point has
/// weakly dominated it, which is exact for an archive that only loses members
/// to points dominating them, so the trace is non-decreasing.
#[derive(Debug, Clone)]
pub struct HvTrace {
    bx: ReferenceBox,
    samples: Vec<Vec<f64>>,
    uncovered: Vec<usize>,
}

impl HvTrace {
    pub fn new(bx: ReferenceBox, samples: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<Vec<f64>> = (0..samples)
            .map(|_| {
                bx.lower
                    .iter()
                    .zip(&bx.reference)
                    .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                    .collect()
            })
            .collect();
        let uncovered = (0..samples.len()).collect();
        Self {
            bx,
            samples,
            uncovered,
        }
    }

    pub fn reference_box(&self) -> &ReferenceBox {
        &self.bx
    }

    pub fn absorb<V: AsRef<[f64]>>(&mut self, points: &[V]) {
        for p in points {
            let p = p.as_ref();
            let samples = &self.samples;
            self.uncovered.retain(|&s| !weakly_dominates(p, &samples[s]));
        }
    }

    /// Covered fraction of the samples, in `[0, 1]`.
    pub fn value(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.len() - self.uncovered.len()) as f64 / self.samples.len() as f64
    }

    /// Fraction of the samples `front` covers, computed from scratch.
    pub fn coverage<V: AsRef<[f64]>>(&self, front: &[V]) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let hits = self
            .samples
            .iter()
            .filter(|s| front.iter().any(|p| weakly_dominates(p.as_ref(), s)))
            .count();
        hits as f64 / self.samples.len() as f64
    }
}
