//! Exact (WFG-style exclusive-volume recursion with dimension slicing) and
//! Monte Carlo hypervolume.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evo::{dominates_unchecked, ideal_point, nadir_point};
use crate::{Error, Result};

/// Exact hypervolume is used automatically up to this many objectives...
pub const EXACT_MAX_OBJECTIVES: usize = 5;
/// ...and this many non-dominated points.
pub const EXACT_MAX_POINTS: usize = 200;

/// Axis-aligned box `[lower, reference]` in objective space. Hypervolume is
/// measured against `reference` and normalized by the box volume.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBox {
    pub lower: Vec<f64>,
    pub reference: Vec<f64>,
}

impl ReferenceBox {
    pub fn new(lower: Vec<f64>, reference: Vec<f64>) -> Result<Self> {
        if lower.len() != reference.len() {
            return Err(Error::Shape {
                expected: lower.len(),
                actual: reference.len(),
            });
        }
        Ok(Self { lower, reference })
    }

    /// Box spanned by the ideal of the union of `fronts` and the reference
    /// point derived from its nadir (see [`reference_point`]).
    pub fn from_fronts<'a, I, V>(fronts: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [V]>,
        V: AsRef<[f64]> + 'a,
    {
        let points: Vec<&[f64]> = fronts
            .into_iter()
            .flat_map(|f| f.iter().map(AsRef::as_ref))
            .collect();
        if points.is_empty() {
            return None;
        }
        let lower = ideal_point(&points);
        let nadir = nadir_point(&points);
        let reference = reference_point(&lower, &nadir);
        Some(Self { lower, reference })
    }

    pub fn num_objectives(&self) -> usize {
        self.reference.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.reference)
            .map(|(l, r)| (r - l).max(0.0))
            .product()
    }
}

/// Reference point `1.1 x nadir`. Components where that does not lie beyond
/// the nadir (nadir <= 0) fall back to `nadir + 0.1 (nadir - ideal)`, and to
/// `nadir + 1` when that range is empty.
pub fn reference_point(ideal: &[f64], nadir: &[f64]) -> Vec<f64> {
    ideal
        .iter()
        .zip(nadir)
        .map(|(lo, hi)| {
            if *hi > 0.0 {
                1.1 * hi
            } else if hi - lo > 0.0 {
                hi + 0.1 * (hi - lo)
            } else {
                hi + 1.0
            }
        })
        .collect()
}

/// Points that no other point dominates, duplicates removed (first kept).
pub fn nondominated_subset<V: AsRef<[f64]>>(points: &[V]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let p = p.as_ref();
        if out
            .iter()
            .any(|q| dominates_unchecked(q, p) || q.as_slice() == p)
        {
            continue;
        }
        out.retain(|q| !dominates_unchecked(p, q));
        out.push(p.to_vec());
    }
    out
}

/// Points strictly inside the reference point in every component; others
/// enclose no volume.
fn effective<V: AsRef<[f64]>>(front: &[V], reference: &[f64]) -> Vec<Vec<f64>> {
    let inside: Vec<&[f64]> = front
        .iter()
        .map(AsRef::as_ref)
        .filter(|p| p.len() == reference.len() && p.iter().zip(reference).all(|(a, r)| a < r))
        .collect();
    nondominated_subset(&inside)
}

/// Exact Lebesgue measure of the union of boxes `[p, reference]`.
pub fn hv_exact<V: AsRef<[f64]>>(front: &[V], reference: &[f64]) -> f64 {
    let pts = effective(front, reference);
    if pts.is_empty() {
        return 0.0;
    }
    hv_recursive(pts, reference)
}

fn inclusive(p: &[f64], reference: &[f64]) -> f64 {
    p.iter().zip(reference).map(|(a, r)| r - a).product()
}

/// `pts` is non-dominated and strictly inside `reference`.
fn hv_recursive(mut pts: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let m = reference.len();
    match (pts.len(), m) {
        (0, _) => 0.0,
        (1, _) => inclusive(&pts[0], reference),
        (_, 1) => reference[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        (_, 2) => {
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
            let mut volume = 0.0;
            let mut ceiling = reference[1];
            for p in &pts {
                if p[1] < ceiling {
                    volume += (reference[0] - p[0]) * (ceiling - p[1]);
                    ceiling = p[1];
                }
            }
            volume
        }
        _ => {
            // Worst-first in the last objective: every later point's limit
            // against p has p's last coordinate, so the exclusive volume of p
            // factors into a slab height times an (M-1)-dimensional volume.
            pts.sort_by(|a, b| b[m - 1].total_cmp(&a[m - 1]));
            let sub_ref = &reference[..m - 1];
            let mut volume = 0.0;
            for i in 0..pts.len() {
                let p = &pts[i][..m - 1];
                let height = reference[m - 1] - pts[i][m - 1];
                let limited: Vec<Vec<f64>> = pts[i + 1..]
                    .iter()
                    .map(|q| q[..m - 1].iter().zip(p).map(|(a, b)| a.max(*b)).collect())
                    .collect();
                let limited = nondominated_subset(&limited);
                let covered = hv_recursive(limited, sub_ref);
                volume += height * (inclusive(p, sub_ref) - covered);
            }
            volume
        }
    }
}

/// Monte Carlo estimate: uniform samples in `[ideal-of-front, reference]`,
/// dominated fraction times the box volume.
pub fn hv_monte_carlo<V: AsRef<[f64]>>(
    front: &[V],
    reference: &[f64],
    samples: usize,
    seed: u64,
) -> f64 {
    let pts = effective(front, reference);
    if pts.is_empty() || samples == 0 {
        return 0.0;
    }
    let lower = ideal_point(&pts);
    let volume = inclusive(&lower, reference);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = alloc::vec![0.0; reference.len()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for ((s, lo), hi) in sample.iter_mut().zip(&lower).zip(reference) {
            *s = lo + (hi - lo) * rng.random::<f64>();
        }
        if pts
            .iter()
            .any(|p| p.iter().zip(&sample).all(|(a, s)| a <= s))
        {
            hits += 1;
        }
    }
    hits as f64 / samples as f64 * volume
}

/// How [`normalized_hv`] computes the volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HvMethod {
    /// Exact within [`EXACT_MAX_OBJECTIVES`] / [`EXACT_MAX_POINTS`], Monte
    /// Carlo beyond.
    Auto { samples: usize, seed: u64 },
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for HvMethod {
    fn default() -> Self {
        HvMethod::Auto {
            samples: 100_000,
            seed: 0,
        }
    }
}

/// Hypervolume of `front` against `bx.reference`, divided by the box volume.
/// Returns 0 for an empty front or a zero-volume box; the result is clamped
/// to `[0, 1]`.
pub fn normalized_hv<V: AsRef<[f64]>>(front: &[V], bx: &ReferenceBox, method: HvMethod) -> f64 {
    let volume = bx.volume();
    if volume <= 0.0 {
        return 0.0;
    }
    let pts = effective(front, &bx.reference);
    if pts.is_empty() {
        return 0.0;
    }
    let hv = match method {
        HvMethod::Exact => hv_recursive(pts, &bx.reference),
        HvMethod::MonteCarlo { samples, seed } => hv_monte_carlo(&pts, &bx.reference, samples, seed),
        HvMethod::Auto { samples, seed } => {
            if bx.num_objectives() <= EXACT_MAX_OBJECTIVES && pts.len() <= EXACT_MAX_POINTS {
                hv_recursive(pts, &bx.reference)
            } else {
                hv_monte_carlo(&pts, &bx.reference, samples, seed)
            }
        }
    };
    (hv / volume).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Inclusion–exclusion over all non-empty subsets.
    fn inclusion_exclusion(front: &[Vec<f64>], reference: &[f64]) -> f64 {
        let n = front.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << n) {
            let mut corner = vec![f64::NEG_INFINITY; reference.len()];
            for (i, p) in front.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (c, v) in corner.iter_mut().zip(p) {
                        *c = c.max(*v);
                    }
                }
            }
            let vol: f64 = corner
                .iter()
                .zip(reference)
                .map(|(c, r)| (r - c).max(0.0))
                .product();
            if mask.count_ones() % 2 == 1 {
                total += vol;
            } else {
                total -= vol;
            }
        }
        total
    }

    /// O(n log n) sweep for two objectives.
    fn sweep_2d(front: &[Vec<f64>], reference: &[f64]) -> f64 {
        let mut pts: Vec<&Vec<f64>> = front
            .iter()
            .filter(|p| p[0] < reference[0] && p[1] < reference[1])
            .collect();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let mut hv = 0.0;
        let mut prev_y = reference[1];
        for p in pts {
            if p[1] < prev_y {
                hv += (reference[0] - p[0]) * (prev_y - p[1]);
                prev_y = p[1];
            }
        }
        hv
    }

    fn random_front(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..m).map(|_| rng.random::<f64>()).collect())
            .collect()
    }

    #[test]
    fn single_box() {
        assert_eq!(hv_exact(&[vec![0.5, 0.5]], &[1.0, 1.0]), 0.25);
    }

    #[test]
    fn two_overlapping_boxes() {
        let hv = hv_exact(&[vec![0.2, 0.6], vec![0.6, 0.2]], &[1.0, 1.0]);
        assert!((hv - 0.48).abs() < 1e-15);
    }

    #[test]
    fn points_at_or_beyond_reference_contribute_nothing() {
        assert_eq!(hv_exact(&[vec![1.0, 0.5]], &[1.0, 1.0]), 0.0);
        assert_eq!(hv_exact(&[vec![1.5, 0.2]], &[1.0, 1.0]), 0.0);
        let front = [vec![0.5, 0.5], vec![1.0, 1.0]];
        assert_eq!(hv_exact(&front, &[1.0, 1.0]), 0.25);
        let empty: [Vec<f64>; 0] = [];
        assert_eq!(hv_exact(&empty, &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn one_dimension() {
        assert!((hv_exact(&[vec![0.5], vec![0.3], vec![0.2]], &[1.0]) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn exact_matches_inclusion_exclusion() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for _ in 0..200 {
            let m = rng.random_range(2..=4);
            let n = rng.random_range(1..=5);
            let front = random_front(&mut rng, n, m);
            let a = hv_exact(&front, &vec![1.0; m]);
            let b = inclusion_exclusion(&front, &vec![1.0; m]);
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn two_objective_sweep_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.random_range(1..60);
            let front = random_front(&mut rng, n, 2);
            let a = hv_exact(&front, &[1.1, 1.1]);
            let b = sweep_2d(&front, &[1.1, 1.1]);
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn monotone_and_dominance_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut front = random_front(&mut rng, 12, 4);
            let r = [1.0; 4];
            let before = hv_exact(&front, &r);
            let extra: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
            front.push(extra.clone());
            let after = hv_exact(&front, &r);
            assert!(after >= before - 1e-15);
            // A point dominated by `extra` changes nothing.
            let worse: Vec<f64> = extra.iter().map(|v| (v + 0.01).min(0.999)).collect();
            front.push(worse);
            assert!((hv_exact(&front, &r) - after).abs() < 1e-14);
        }
    }

    #[test]
    fn five_objectives_two_hundred_points_is_tractable() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        // Points on a simplex-like surface so that most are non-dominated.
        let front: Vec<Vec<f64>> = (0..200)
            .map(|_| {
                let w: Vec<f64> = (0..5).map(|_| rng.random::<f64>() + 1e-3).collect();
                let s: f64 = w.iter().sum();
                w.iter().map(|v| v / s).collect()
            })
            .collect();
        let hv = hv_exact(&front, &[1.0; 5]);
        let mc = hv_monte_carlo(&front, &[1.0; 5], 200_000, 1);
        assert!((hv - mc).abs() / hv < 0.02, "{hv} vs {mc}");
    }

    #[test]
    fn monte_carlo_edge_cases() {
        let empty: [Vec<f64>; 0] = [];
        assert_eq!(hv_monte_carlo(&empty, &[1.0, 1.0], 100, 0), 0.0);
        // The single point is the ideal corner of its own sampling box.
        let v = hv_monte_carlo(&[vec![0.25, 0.5, 0.0]], &[1.0, 1.0, 2.0], 1000, 5);
        assert_eq!(v, 0.75 * 0.5 * 2.0);
        let a = hv_monte_carlo(&[vec![0.2, 0.6], vec![0.6, 0.2]], &[1.0, 1.0], 1000, 9);
        let b = hv_monte_carlo(&[vec![0.2, 0.6], vec![0.6, 0.2]], &[1.0, 1.0], 1000, 9);
        assert_eq!(a, b);
    }

    #[test]
    fn normalized_examples() {
        let unit = ReferenceBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let front = [vec![0.2, 0.6], vec![0.6, 0.2]];
        assert!((normalized_hv(&front, &unit, HvMethod::Exact) - 0.48).abs() < 1e-15);
        assert_eq!(normalized_hv(&[vec![0.0, 0.0]], &unit, HvMethod::Exact), 1.0);
        let empty: [Vec<f64>; 0] = [];
        assert_eq!(normalized_hv(&empty, &unit, HvMethod::default()), 0.0);
        let flat = ReferenceBox::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(normalized_hv(&front, &flat, HvMethod::Exact), 0.0);
    }

    #[test]
    fn box_from_fronts() {
        let a = [vec![1.0, 4.0], vec![2.0, 3.0]];
        let b = [vec![0.5, 5.0]];
        let bx = ReferenceBox::from_fronts([&a[..], &b[..]]).unwrap();
        assert_eq!(bx.lower, vec![0.5, 3.0]);
        assert!((bx.reference[0] - 2.2).abs() < 1e-12);
        assert!((bx.reference[1] - 5.5).abs() < 1e-12);
        assert_eq!(reference_point(&[0.0], &[0.0]), vec![1.0]);
        assert_eq!(reference_point(&[-2.0], &[-1.0]), vec![-0.9]);
    }
}
