//! Hypervolume and statistical comparison of solver results.

mod hv;
mod stats;

pub use hv::{
    hv_exact, hv_monte_carlo, nondominated_subset, normalized_hv, reference_point, HvMethod,
    ReferenceBox, EXACT_MAX_OBJECTIVES, EXACT_MAX_POINTS,
};
pub use stats::{
    format_cell, format_sci, mean_std, rank_sum, rank_sum_test, summarize, AlgorithmSummary,
    ComparisonVerdict, Marker, RankSum,
};
