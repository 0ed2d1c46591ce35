//! Rank-sum significance markers and "mean (std)" result cells.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Outcome of comparing algorithm `a` against a reference algorithm `b` on a
/// larger-is-better indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Marker {
    /// `a` is significantly larger.
    Better,
    /// `a` is significantly smaller.
    Worse,
    /// No significant difference.
    Similar,
}

impl Marker {
    pub fn symbol(&self) -> &'static str {
        match self {
            Marker::Better => "+",
            Marker::Worse => "-",
            Marker::Similar => "≈",
        }
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Wilcoxon rank-sum statistic of `a` versus `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSum {
    /// Mann–Whitney `U` of sample `a`.
    pub u: f64,
    pub z: f64,
    /// Two-sided p-value; 1 when the tie-corrected variance vanishes.
    pub p: f64,
}

/// Normal approximation with tie correction, no continuity correction.
pub fn rank_sum(a: &[f64], b: &[f64]) -> RankSum {
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|v| (*v, true))
        .chain(b.iter().map(|v| (*v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        // Ranks i+1 ..= j+1 share their average.
        let avg = (i + j + 2) as f64 / 2.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        rank_sum_a += avg * pooled[i..=j].iter().filter(|e| e.1).count() as f64;
        i = j + 1;
    }

    let (na_f, nb_f, n_f) = (na as f64, nb as f64, n as f64);
    let u = rank_sum_a - na_f * (na_f + 1.0) / 2.0;
    let mean = na_f * nb_f / 2.0;
    let var = na_f * nb_f / 12.0 * ((n_f + 1.0) - tie_term / (n_f * (n_f - 1.0)));
    if var <= 0.0 {
        return RankSum { u, z: 0.0, p: 1.0 };
    }
    let z = (u - mean) / libm::sqrt(var);
    let p = libm::erfc(z.abs() / core::f64::consts::SQRT_2);
    RankSum { u, z, p }
}

/// Two-sided rank-sum test at significance `level`.
pub fn rank_sum_test(a: &[f64], b: &[f64], level: f64) -> Result<Marker> {
    let smallest = a.len().min(b.len());
    if smallest < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: smallest,
        });
    }
    let r = rank_sum(a, b);
    Ok(if r.p >= level {
        Marker::Similar
    } else if r.z > 0.0 {
        Marker::Better
    } else {
        Marker::Worse
    })
}

/// Scientific notation with an upper-case, sign-and-two-digit exponent:
/// `format_sci(0.60296, 4) == "6.0296E-01"`.
pub fn format_sci(value: f64, decimals: usize) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    let raw = format!("{value:.decimals$e}");
    let (mantissa, exponent) = raw.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let sign = if exponent < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exponent.abs())
}

/// Table cell "mean (std)", e.g. `6.0296E-01 (6.37E-02)`.
pub fn format_cell(mean: f64, std: f64) -> String {
    format!("{} ({})", format_sci(mean, 4), format_sci(std, 2))
}

/// Sample mean and standard deviation (`n - 1` denominator, 0 for one value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, libm::sqrt(ss / (n - 1) as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSummary {
    pub name: String,
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
    /// "mean (std)".
    pub cell: String,
    /// Verdict against the champion; `None` for the champion itself or when
    /// either side has fewer than three runs.
    pub marker: Option<Marker>,
    /// Highest mean (ties: lexicographically lowest name).
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonVerdict {
    pub algorithms: Vec<AlgorithmSummary>,
    pub champion: Option<usize>,
    pub level: f64,
}

impl ComparisonVerdict {
    pub fn get(&self, name: &str) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|a| a.name == name)
    }

    pub fn best(&self) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|a| a.best)
    }
}

/// Summarizes per-algorithm indicator samples (larger is better). Markers
/// compare each algorithm against `champion` (an index into `runs`).
pub fn summarize(runs: &[(String, Vec<f64>)], champion: Option<usize>, level: f64) -> ComparisonVerdict {
    let mut algorithms: Vec<AlgorithmSummary> = runs
        .iter()
        .enumerate()
        .map(|(i, (name, values))| {
            let (mean, std) = mean_std(values);
            let marker = match champion {
                Some(c) if c != i => rank_sum_test(values, &runs[c].1, level).ok(),
                _ => None,
            };
            AlgorithmSummary {
                name: name.clone(),
                mean,
                std,
                runs: values.len(),
                cell: format_cell(mean, std),
                marker,
                best: false,
            }
        })
        .collect();
    let best = (0..algorithms.len()).max_by(|&i, &j| {
        let (a, b) = (&algorithms[i], &algorithms[j]);
        a.mean
            .total_cmp(&b.mean)
            .then_with(|| b.name.cmp(&a.name))
    });
    if let Some(b) = best {
        algorithms[b].best = true;
    }
    ComparisonVerdict {
        algorithms,
        champion,
        level,
    }
}
