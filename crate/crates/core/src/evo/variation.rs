//! Real-coded variation: simulated binary crossover and polynomial mutation.

use alloc::vec::Vec;

use rand::Rng;

use crate::Bounds;

/// Distribution indices and per-gene mutation rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationParams {
    pub eta_c: f64,
    pub eta_m: f64,
    /// Per-gene mutation probability; `None` means `1/D`.
    pub mutation_prob: Option<f64>,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self {
            eta_c: 20.0,
            eta_m: 20.0,
            mutation_prob: None,
        }
    }
}

impl VariationParams {
    pub fn mutation_rate(&self, dim: usize) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / dim.max(1) as f64)
    }
}

fn spread_factor(u: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        libm::pow(2.0 * u, e)
    } else {
        libm::pow(1.0 / (2.0 * (1.0 - u)), e)
    }
}

/// Simulated binary crossover applied to every gene (crossover probability 1),
/// with the two child values exchanged with probability 0.5 per gene. Children
/// are clipped to `bounds`.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    bounds: &Bounds,
    eta_c: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    sbx_masked(p1, p2, bounds, eta_c, None, rng)
}

/// [`sbx_crossover`] restricted to genes whose mask entry is `true`; the
/// remaining genes are copied from the corresponding parent.
pub(crate) fn sbx_masked<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    bounds: &Bounds,
    eta_c: f64,
    mask: Option<&[bool]>,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        if mask.is_some_and(|m| !m[i]) {
            continue;
        }
        let (a, b) = (p1[i], p2[i]);
        if (a - b).abs() <= 1e-14 {
            continue;
        }
        let beta = spread_factor(rng.random::<f64>(), eta_c);
        let mut x = 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b);
        let mut y = 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b);
        if rng.random_bool(0.5) {
            core::mem::swap(&mut x, &mut y);
        }
        c1[i] = x;
        c2[i] = y;
    }
    bounds.clip(&mut c1);
    bounds.clip(&mut c2);
    (c1, c2)
}

/// Bounded polynomial mutation; each gene mutates independently with
/// probability `p_m`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    v: &[f64],
    bounds: &Bounds,
    eta_m: f64,
    p_m: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = v.to_vec();
    mutate_masked(&mut out, bounds, eta_m, p_m, None, rng);
    out
}

pub(crate) fn mutate_masked<R: Rng + ?Sized>(
    v: &mut [f64],
    bounds: &Bounds,
    eta_m: f64,
    p_m: f64,
    mask: Option<&[bool]>,
    rng: &mut R,
) {
    if p_m <= 0.0 {
        return;
    }
    let power = 1.0 / (eta_m + 1.0);
    for i in 0..v.len() {
        if mask.is_some_and(|m| !m[i]) {
            continue;
        }
        if rng.random::<f64>() >= p_m {
            continue;
        }
        let (lo, hi) = (bounds.lower()[i], bounds.upper()[i]);
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        let y = v[i];
        let d1 = (y - lo) / range;
        let d2 = (hi - y) / range;
        let r = rng.random::<f64>();
        let dq = if r < 0.5 {
            let val = 2.0 * r + (1.0 - 2.0 * r) * libm::pow(1.0 - d1, eta_m + 1.0);
            libm::pow(val, power) - 1.0
        } else {
            let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * libm::pow(1.0 - d2, eta_m + 1.0);
            1.0 - libm::pow(val, power)
        };
        v[i] = (y + dq * range).clamp(lo, hi);
    }
}
