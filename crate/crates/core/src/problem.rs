//! The box-constrained minimization problem consumed by every solver.

use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

/// Per-variable box `[lower_i, upper_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Shape {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if let Some(i) = lower.iter().zip(&upper).position(|(l, u)| !(l <= u)) {
            return Err(Error::Domain {
                index: i,
                value: lower[i],
                lower: lower[i],
                upper: upper[i],
            });
        }
        Ok(Self { lower, upper })
    }

    /// The unit hypercube `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Self {
        Self {
            lower: alloc::vec![0.0; dim],
            upper: alloc::vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    /// Shape and domain check with a descriptive error.
    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        for (i, v) in x.iter().enumerate() {
            let (l, u) = (self.lower[i], self.upper[i]);
            if !(l <= *v && *v <= u) {
                return Err(Error::Domain {
                    index: i,
                    value: *v,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(())
    }

    pub fn clip(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    /// Uniform sample, coordinate `i` drawn from `[lower_i, upper_i]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l + (u - l) * rng.random::<f64>())
            .collect()
    }
}

/// A minimization problem `min F(x)` over a box.
pub trait Problem {
    fn dim(&self) -> usize;

    fn num_objectives(&self) -> usize;

    fn bounds(&self) -> &Bounds;

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Known componentwise lower bound on the objectives, if any. Used as the
    /// lower corner of the fixed box that hypervolume traces are measured in.
    fn objective_floor(&self) -> Option<Vec<f64>> {
        None
    }
}

impl<P: Problem + ?Sized> Problem for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn num_objectives(&self) -> usize {
        (**self).num_objectives()
    }
    fn bounds(&self) -> &Bounds {
        (**self).bounds()
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).evaluate(x)
    }
    fn objective_floor(&self) -> Option<Vec<f64>> {
        (**self).objective_floor()
    }
}

/// Synthetic linear problem `F(x) = A x + c` on the unit box.
///
/// Used as a test family for the solvers: its ideal point is known in closed
/// form and its objective-to-decision relation is exactly linear.
#[derive(Debug, Clone)]
pub struct LinearProblem {
    /// `M x D`, row-major.
    coefficients: Vec<f64>,
    offset: Vec<f64>,
    bounds: Bounds,
}

impl LinearProblem {
    pub fn new(coefficients: Vec<f64>, offset: Vec<f64>, dim: usize) -> Result<Self> {
        if coefficients.len() != offset.len() * dim {
            return Err(Error::Shape {
                expected: offset.len() * dim,
                actual: coefficients.len(),
            });
        }
        Ok(Self {
            coefficients,
            offset,
            bounds: Bounds::unit(dim),
        })
    }

    /// Random instance with coefficients uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(objectives: usize, dim: usize, rng: &mut R) -> Self {
        let coefficients = (0..objectives * dim)
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        let offset = alloc::vec![0.0; objectives];
        Self {
            coefficients,
            offset,
            bounds: Bounds::unit(dim),
        }
    }

    pub fn coefficient(&self, objective: usize, variable: usize) -> f64 {
        self.coefficients[objective * self.dim() + variable]
    }

    /// Componentwise minimum of `F` over the box.
    pub fn ideal(&self) -> Vec<f64> {
        let d = self.dim();
        self.coefficients
            .chunks(d)
            .zip(&self.offset)
            .map(|(row, c)| c + row.iter().map(|a| a.min(0.0)).sum::<f64>())
            .collect()
    }
}

impl Problem for LinearProblem {
    fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn num_objectives(&self) -> usize {
        self.offset.len()
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.bounds.check(x)?;
        Ok(self
            .coefficients
            .chunks(self.dim())
            .zip(&self.offset)
            .map(|(row, c)| c + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>())
            .collect())
    }

    fn objective_floor(&self) -> Option<Vec<f64>> {
        Some(self.ideal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bounds_reject_inverted_box() {
        assert!(Bounds::new(vec![1.0], vec![0.0]).is_err());
        assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn linear_ideal_is_attained_at_a_vertex() {
        let p = LinearProblem::new(vec![1.0, -2.0, 0.5, 3.0], vec![0.0, 1.0], 2).unwrap();
        assert_eq!(p.ideal(), vec![-2.0, 1.0]);
        assert_eq!(p.evaluate(&[0.0, 1.0]).unwrap()[0], -2.0);
        assert_eq!(p.evaluate(&[0.0, 0.0]).unwrap()[1], 1.0);
    }

    #[test]
    fn sample_stays_in_box() {
        let b = Bounds::new(vec![-1.0, 0.5], vec![1.0, 0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            assert!(b.contains(&b.sample(&mut rng)));
        }
    }
}
