use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Unit-length reference directions in objective space.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceVectorSet {
    weights: Vec<Vec<f64>>,
    vectors: Vec<Vec<f64>>,
}

impl ReferenceVectorSet {
    /// Builds a set from simplex weights (non-negative, not all zero).
    pub fn from_weights(weights: Vec<Vec<f64>>) -> Result<Self> {
        let mut vectors = Vec::with_capacity(weights.len());
        for w in &weights {
            if w.iter().any(|v| *v < 0.0) {
                return Err(Error::Config(format!("negative reference weight {w:?}")));
            }
            let norm = libm::sqrt(w.iter().map(|v| v * v).sum::<f64>());
            if norm == 0.0 {
                return Err(Error::Config("zero reference weight".into()));
            }
            vectors.push(w.iter().map(|v| v / norm).collect());
        }
        Ok(Self { weights, vectors })
    }

    /// Simplex points (components sum to 1) before normalization.
    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn num_objectives(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }
}

/// Simplex-lattice directions: every composition of `divisions` into
/// `objectives` parts, scaled by `1/divisions`, then normalized to unit length.
pub fn das_dennis_vectors(objectives: usize, divisions: usize) -> Result<ReferenceVectorSet> {
    if objectives < 2 || divisions < 1 {
        return Err(Error::Config(format!(
            "reference lattice needs M >= 2 and H >= 1, got M = {objectives}, H = {divisions}"
        )));
    }
    let mut weights = Vec::new();
    let mut current = alloc::vec![0usize; objectives];
    compositions(&mut current, 0, divisions, &mut |parts| {
        weights.push(
            parts
                .iter()
                .map(|&p| p as f64 / divisions as f64)
                .collect(),
        );
    });
    ReferenceVectorSet::from_weights(weights)
}

fn compositions(parts: &mut [usize], pos: usize, left: usize, emit: &mut impl FnMut(&[usize])) {
    if pos == parts.len() - 1 {
        parts[pos] = left;
        emit(parts);
        return;
    }
    for k in 0..=left {
        parts[pos] = k;
        compositions(parts, pos + 1, left - k, emit);
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Largest lattice resolution whose vector count does not exceed `population`
/// (at least 1).
pub fn divisions_for(objectives: usize, population: usize) -> usize {
    let mut h = 1;
    while binomial(h + objectives, objectives - 1) <= population {
        h += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_objectives_two_divisions() {
        let set = das_dennis_vectors(2, 2).unwrap();
        assert_eq!(
            set.weights(),
            &[vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]
        );
        let s = libm::sqrt(0.5);
        assert!((set.vectors()[1][0] - s).abs() < 1e-15);
    }

    #[test]
    fn five_objectives_four_divisions() {
        assert_eq!(das_dennis_vectors(5, 4).unwrap().len(), 70);
        assert_eq!(divisions_for(5, 70), 4);
        assert_eq!(divisions_for(5, 69), 3);
        assert_eq!(divisions_for(2, 10), 9);
    }

    #[test]
    fn one_division_gives_axes() {
        let set = das_dennis_vectors(3, 1).unwrap();
        let mut v = set.vectors().to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            v,
            vec![vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]
        );
    }

    #[test]
    fn counts_match_binomial_and_are_unique() {
        for m in 2..=6 {
            for h in 1..=8 {
                let set = das_dennis_vectors(m, h).unwrap();
                assert_eq!(set.len(), binomial(h + m - 1, m - 1), "M={m} H={h}");
                for w in set.weights() {
                    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    assert!(w.iter().all(|v| *v >= 0.0));
                }
                for v in set.vectors() {
                    let n: f64 = v.iter().map(|x| x * x).sum();
                    assert!((n - 1.0).abs() < 1e-12);
                }
                let mut w = set.weights().to_vec();
                w.sort_by(|a, b| a.partial_cmp(b).unwrap());
                w.dedup();
                assert_eq!(w.len(), set.len());
            }
        }
    }

    #[test]
    fn invalid_arguments() {
        assert!(das_dennis_vectors(1, 3).is_err());
        assert!(das_dennis_vectors(3, 0).is_err());
    }
}
