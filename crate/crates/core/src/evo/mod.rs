//! Shared many-objective EA machinery.

mod dominance;
mod population;
mod reference;
mod selection;
mod variation;

pub use dominance::{dominates, nondominated_sort, weakly_dominates};
pub use population::{Individual, Population};
pub use reference::{das_dennis_vectors, divisions_for, ReferenceVectorSet};
pub use selection::{
    associate, environmental_selection, ideal_point, nadir_point, normalize_objectives,
    Association,
};
pub use variation::{polynomial_mutation, sbx_crossover, VariationParams};

pub(crate) use dominance::dominates_unchecked;
pub(crate) use variation::{mutate_masked, sbx_masked};
