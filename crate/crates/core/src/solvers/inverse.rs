//! Perturbation-based variable classification and the linear inverse model
//! mapping objective vectors back to decision vectors.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{Evaluator, Mode, VariableRoles};
use crate::evo::{nadir_point, Individual};
use crate::linalg::{cholesky, cholesky_solve};
use crate::{Bounds, Error, Problem, Result};

/// cos(45°): displacement lines closer than this to the ideal direction mark a
/// convergence variable.
const CONVERGENCE_COSINE: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Labels each variable by perturbing it alone.
///
/// Variable `i` is set to `perturbations` evenly spaced values across its
/// range (with a common random offset inside each stratum), and the objective
/// displacement per unit change is fitted by least squares. The variable is
/// convergence-related when that displacement line lies within 45° of the
/// direction from the base objectives toward `ideal`; otherwise, including
/// when it has no effect at all, it is diversity-related. Costs
/// `dim * perturbations` evaluations.
pub fn classify_variables<P: Problem + ?Sized, R: Rng + ?Sized>(
    ev: &mut Evaluator<'_, P>,
    base: &Individual,
    ideal: &[f64],
    perturbations: usize,
    rng: &mut R,
) -> Result<VariableRoles> {
    let bounds = ev.problem().bounds().clone();
    let dim = bounds.dim();
    let mut toward: Vec<f64> = ideal
        .iter()
        .zip(&base.objectives)
        .map(|(i, f)| i - f)
        .collect();
    if norm(&toward) < 1e-12 {
        // Already at the ideal: fall back to "every objective decreases".
        toward.iter_mut().for_each(|v| *v = -1.0);
    }

    let k = perturbations as f64;
    let mut labels = Vec::with_capacity(dim);
    for i in 0..dim {
        let (lo, hi) = (bounds.lower()[i], bounds.upper()[i]);
        let offset: f64 = rng.random();
        let mut positions = Vec::with_capacity(perturbations);
        let mut responses = Vec::with_capacity(perturbations);
        for j in 0..perturbations {
            let t = lo + (hi - lo) * (j as f64 + offset) / k;
            let mut x = base.decision.clone();
            x[i] = t.clamp(lo, hi);
            positions.push(x[i]);
            responses.push(ev.evaluate(x)?.objectives);
        }
        let slope = fitted_slope(&positions, &responses);
        let convergence = match norm(&slope) {
            s if s < 1e-12 => false,
            s => {
                let cos = dot(&slope, &toward) / (s * norm(&toward));
                cos.abs() > CONVERGENCE_COSINE
            }
        };
        labels.push(convergence);
    }
    Ok(VariableRoles::from_convergence_mask(labels))
}

fn fitted_slope(t: &[f64], f: &[Vec<f64>]) -> Vec<f64> {
    let m = f[0].len();
    let n = t.len() as f64;
    let t_mean = t.iter().sum::<f64>() / n;
    let var: f64 = t.iter().map(|v| (v - t_mean) * (v - t_mean)).sum();
    if var <= 0.0 {
        return alloc::vec![0.0; m];
    }
    (0..m)
        .map(|c| {
            let f_mean = f.iter().map(|r| r[c]).sum::<f64>() / n;
            t.iter()
                .zip(f)
                .map(|(tv, r)| (tv - t_mean) * (r[c] - f_mean))
                .sum::<f64>()
                / var
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Linear map `x = W f + b` from objective space to decision space.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseModel {
    /// `D x M`, row-major.
    weights: Vec<f64>,
    intercept: Vec<f64>,
    objectives: usize,
}

impl InverseModel {
    pub fn new(weights: Vec<f64>, intercept: Vec<f64>, objectives: usize) -> Result<Self> {
        if weights.len() != intercept.len() * objectives {
            return Err(Error::Shape {
                expected: intercept.len() * objectives,
                actual: weights.len(),
            });
        }
        Ok(Self {
            weights,
            intercept,
            objectives,
        })
    }

    pub fn decision_dim(&self) -> usize {
        self.intercept.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.objectives
    }

    /// `d(x_row) / d(f_col)`.
    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.objectives + col]
    }

    pub fn intercept(&self) -> &[f64] {
        &self.intercept
    }

    pub fn predict(&self, f: &[f64]) -> Vec<f64> {
        self.weights
            .chunks(self.objectives)
            .zip(&self.intercept)
            .map(|(w, b)| b + dot(w, f))
            .collect()
    }
}

/// Ridge-regularized least squares of decisions on objectives, with an
/// unpenalized intercept (the data are centered first).
pub fn fit_inverse_model(archive: &[Individual], ridge: f64) -> Result<InverseModel> {
    let m = archive.first().map_or(0, |a| a.objectives.len());
    if archive.len() < m + 1 || m == 0 {
        return Err(Error::InsufficientData {
            needed: m + 1,
            got: archive.len(),
        });
    }
    let d = archive[0].decision.len();
    let n = archive.len() as f64;

    let mut f_mean = alloc::vec![0.0; m];
    let mut x_mean = alloc::vec![0.0; d];
    for a in archive {
        for (s, v) in f_mean.iter_mut().zip(&a.objectives) {
            *s += v / n;
        }
        for (s, v) in x_mean.iter_mut().zip(&a.decision) {
            *s += v / n;
        }
    }

    // Gram = Fc^T Fc + ridge I (M x M); cross = Fc^T Xc (M x D).
    let mut gram = alloc::vec![0.0; m * m];
    let mut cross = alloc::vec![0.0; m * d];
    let mut fc = alloc::vec![0.0; m];
    for a in archive {
        for (c, (v, mu)) in fc.iter_mut().zip(a.objectives.iter().zip(&f_mean)) {
            *c = v - mu;
        }
        for r in 0..m {
            for c in 0..m {
                gram[r * m + c] += fc[r] * fc[c];
            }
            let row = &mut cross[r * d..(r + 1) * d];
            for (acc, (x, mu)) in row.iter_mut().zip(a.decision.iter().zip(&x_mean)) {
                *acc += fc[r] * (x - mu);
            }
        }
    }
    for r in 0..m {
        gram[r * m + r] += ridge;
    }
    let factor = match cholesky(&gram, m) {
        Ok(l) => l,
        Err(_) => {
            // Singular objectives (e.g. a constant archive): a tiny jitter
            // drives the affected slopes to zero.
            let scale = (0..m).map(|r| gram[r * m + r]).sum::<f64>() / m as f64;
            let jitter = 1e-12 * scale.max(1.0);
            for r in 0..m {
                gram[r * m + r] += jitter;
            }
            cholesky(&gram, m)?
        }
    };

    let mut weights = alloc::vec![0.0; d * m];
    let mut column = alloc::vec![0.0; m];
    for j in 0..d {
        for r in 0..m {
            column[r] = cross[r * d + j];
        }
        cholesky_solve(&factor, m, &mut column);
        weights[j * m..(j + 1) * m].copy_from_slice(&column);
    }
    let intercept = (0..d)
        .map(|j| x_mean[j] - dot(&weights[j * m..(j + 1) * m], &f_mean))
        .collect();
    InverseModel::new(weights, intercept, m)
}

/// Target objective vectors near the front: a uniformly chosen front point
/// moved a uniform fraction `u in [0, sigma]` toward `ideal`, plus Gaussian
/// jitter with per-objective scale `sigma (nadir - ideal) / 10`, clipped so
/// that no component falls below the ideal.
pub fn sample_targets<V: AsRef<[f64]>, R: Rng + ?Sized>(
    front: &[V],
    ideal: &[f64],
    sigma: f64,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    if front.is_empty() {
        return Vec::new();
    }
    let nadir = nadir_point(front);
    (0..count)
        .map(|_| {
            let p = front[rng.random_range(0..front.len())].as_ref();
            let u = sigma * rng.random::<f64>();
            p.iter()
                .zip(ideal.iter().zip(&nadir))
                .map(|(f, (lo, hi))| {
                    let jitter: f64 = rng.sample(StandardNormal);
                    let t = f + u * (lo - f) + jitter * sigma * (hi - lo) / 10.0;
                    t.max(*lo)
                })
                .collect()
        })
        .collect()
}

/// One offspring per target: convergence variables from the model's
/// prediction, diversity variables copied from `parent`, clipped to `bounds`.
pub fn inverse_generate(
    model: &InverseModel,
    targets: &[Vec<f64>],
    bounds: &Bounds,
    roles: &VariableRoles,
    parent: &[f64],
) -> Vec<Vec<f64>> {
    targets
        .iter()
        .map(|t| {
            let predicted = model.predict(t);
            let mut child: Vec<f64> = (0..parent.len())
                .map(|i| match roles.role(i) {
                    Mode::Convergence => predicted[i],
                    Mode::Diversity => parent[i],
                })
                .collect();
            bounds.clip(&mut child);
            child
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// f = (x1 + x2, x1 - x2 + 1), plus an inert third variable.
    struct Plane {
        bounds: Bounds,
    }

    impl Problem for Plane {
        fn dim(&self) -> usize {
            3
        }
        fn num_objectives(&self) -> usize {
            2
        }
        fn bounds(&self) -> &Bounds {
            &self.bounds
        }
        fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![x[0] + x[1], x[0] - x[1] + 1.0])
        }
    }

    #[test]
    fn classification_of_radial_tangential_and_inert_variables() {
        let p = Plane {
            bounds: Bounds::unit(3),
        };
        let base_x = vec![0.5, 0.5, 0.5];
        let base = Individual::new(base_x.clone(), p.evaluate(&base_x).unwrap());
        // Ideal straight down the diagonal from the base objectives (1, 1).
        let ideal = [0.0, 0.0];
        let mut ev = Evaluator::new(&p, 100);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let roles = classify_variables(&mut ev, &base, &ideal, 3, &mut rng).unwrap();
        assert_eq!(roles.role(0), Mode::Convergence);
        assert_eq!(roles.role(1), Mode::Diversity);
        assert_eq!(roles.role(2), Mode::Diversity);
        assert_eq!(ev.used(), 9);

        let again = classify_variables(&mut Evaluator::new(&p, 100), &base, &ideal, 3, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(roles, again);
    }

    fn linear_archive(rng: &mut ChaCha8Rng, d: usize, m: usize, n: usize) -> (Vec<Individual>, Vec<f64>, Vec<f64>) {
        let w: Vec<f64> = (0..d * m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let archive = (0..n)
            .map(|_| {
                let f: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
                let x = (0..d)
                    .map(|j| b[j] + (0..m).map(|c| w[j * m + c] * f[c]).sum::<f64>())
                    .collect();
                Individual::new(x, f)
            })
            .collect();
        (archive, w, b)
    }

    #[test]
    fn recovers_exact_linear_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let (archive, w, b) = linear_archive(&mut rng, 30, 5, 40);
            let model = fit_inverse_model(&archive, 1e-9).unwrap();
            for j in 0..30 {
                for c in 0..5 {
                    assert!((model.weight(j, c) - w[j * 5 + c]).abs() < 1e-6);
                }
                assert!((model.intercept()[j] - b[j]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn identity_when_objectives_equal_decisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let archive: Vec<Individual> = (0..20)
            .map(|_| {
                let x: Vec<f64> = (0..3).map(|_| rng.random()).collect();
                Individual::new(x.clone(), x)
            })
            .collect();
        let model = fit_inverse_model(&archive, 1e-9).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((model.weight(r, c) - expect).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn constant_archive_predicts_constant() {
        let archive = vec![Individual::new(vec![0.3, 0.7], vec![1.0, 2.0]); 6];
        for ridge in [0.0, 1e-6] {
            let model = fit_inverse_model(&archive, ridge).unwrap();
            let p = model.predict(&[5.0, -3.0]);
            assert!((p[0] - 0.3).abs() < 1e-9 && (p[1] - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_points() {
        let archive = vec![Individual::new(vec![0.0], vec![1.0, 2.0]); 2];
        assert!(matches!(
            fit_inverse_model(&archive, 1e-6),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn targets_limits_and_clipping() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let front = vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]];
        let ideal = [0.5, 0.5];
        for t in sample_targets(&front, &ideal, 1e-300, 50, &mut rng) {
            assert!(front.iter().any(|f| (f[0] - t[0]).abs() < 1e-12 && (f[1] - t[1]).abs() < 1e-12));
        }
        let at_ideal = vec![vec![0.5, 0.5]];
        for t in sample_targets(&at_ideal, &ideal, 0.5, 20, &mut rng) {
            assert_eq!(t, vec![0.5, 0.5]);
        }
        for t in sample_targets(&front, &ideal, 2.0, 10_000, &mut rng) {
            assert!(t[0] >= 0.5 && t[1] >= 0.5);
        }
    }

    #[test]
    fn generate_respects_roles_and_bounds() {
        let bounds = Bounds::unit(2);
        let identity = InverseModel::new(vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 0.0], 2).unwrap();
        let parent = [0.25, 0.75];
        let div = VariableRoles::all(2, Mode::Diversity);
        assert_eq!(inverse_generate(&identity, &[vec![0.9, 0.1]], &bounds, &div, &parent), vec![parent.to_vec()]);
        let conv = VariableRoles::all(2, Mode::Convergence);
        assert_eq!(inverse_generate(&identity, &[parent.to_vec()], &bounds, &conv, &parent), vec![parent.to_vec()]);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10_000 {
            let w: Vec<f64> = (0..4).map(|_| rng.random_range(-5.0..5.0)).collect();
            let b: Vec<f64> = (0..2).map(|_| rng.random_range(-5.0..5.0)).collect();
            let model = InverseModel::new(w, b, 2).unwrap();
            let roles = VariableRoles::from_convergence_mask(vec![rng.random(), rng.random()]);
            let t = vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let child = &inverse_generate(&model, &[t], &bounds, &roles, &parent)[0];
            assert!(bounds.contains(child));
        }
    }
}
