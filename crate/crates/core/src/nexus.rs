//! The food–energy–water nexus problem.
//!
//! Every source resource (water, energy, food) allocates flows to every other
//! resource and to the final-demand sectors. The flows are the decision
//! variables; per-source consumptions are row sums, and the five objectives
//! are resource-intensity ratios between cross-resource flows and totals.
//!
//! Layout of a [`FlowMatrix`]: rows are water sources, then energy sources,
//! then food sources. Columns are the same sources in the same order followed
//! by the demand sectors. Decision vectors are the row-major flattening.

use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;

use crate::{Bounds, Error, Problem, Result};

/// Number of intensity objectives.
pub const NUM_OBJECTIVES: usize = 5;

/// Denominators below this trigger [`PENALTY`] for the affected objectives.
pub const DENOMINATOR_GUARD: f64 = 1e-9;

pub const PENALTY: f64 = 1e6;

/// Lower bound of every demand-column flow.
pub const DEMAND_FLOOR: f64 = 0.01;

/// Resource counts of a nexus instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResourceTopology {
    water: usize,
    energy: usize,
    food: usize,
    demand: usize,
}

impl ResourceTopology {
    pub fn new(water: usize, energy: usize, food: usize, demand: usize) -> Result<Self> {
        if water == 0 || energy == 0 || food == 0 || demand == 0 {
            return Err(Error::Topology("every resource count must be at least 1"));
        }
        Ok(Self {
            water,
            energy,
            food,
            demand,
        })
    }

    /// 7 water, 7 energy and 7 food sources with 6 demand sectors: 567 variables.
    pub fn standard() -> Self {
        Self {
            water: 7,
            energy: 7,
            food: 7,
            demand: 6,
        }
    }

    pub fn water(&self) -> usize {
        self.water
    }
    pub fn energy(&self) -> usize {
        self.energy
    }
    pub fn food(&self) -> usize {
        self.food
    }
    pub fn demand(&self) -> usize {
        self.demand
    }

    /// Rows of the flow matrix.
    pub fn sources(&self) -> usize {
        self.water + self.energy + self.food
    }

    /// Columns of the flow matrix.
    pub fn destinations(&self) -> usize {
        self.sources() + self.demand
    }

    pub fn water_block(&self) -> Range<usize> {
        0..self.water
    }
    pub fn energy_block(&self) -> Range<usize> {
        self.water..self.water + self.energy
    }
    pub fn food_block(&self) -> Range<usize> {
        self.water + self.energy..self.sources()
    }
    pub fn demand_block(&self) -> Range<usize> {
        self.sources()..self.destinations()
    }
}

/// Number of decision variables: `(α+β+γ)(α+β+γ+ε)`.
pub fn decision_dim(topology: &ResourceTopology) -> usize {
    topology.sources() * topology.destinations()
}

/// Source-by-destination flow quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    topology: ResourceTopology,
    entries: Vec<f64>,
}

impl FlowMatrix {
    pub fn zeros(topology: ResourceTopology) -> Self {
        Self {
            topology,
            entries: alloc::vec![0.0; decision_dim(&topology)],
        }
    }

    /// Row-major unflattening of a decision vector.
    pub fn decode(values: &[f64], topology: ResourceTopology) -> Result<Self> {
        let expected = decision_dim(&topology);
        if values.len() != expected {
            return Err(Error::Shape {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self {
            topology,
            entries: values.to_vec(),
        })
    }

    /// Row-major flattening.
    pub fn encode(&self) -> Vec<f64> {
        self.entries.clone()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn topology(&self) -> &ResourceTopology {
        &self.topology
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.topology.destinations() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        let cols = self.topology.destinations();
        self.entries[row * cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let cols = self.topology.destinations();
        &self.entries[row * cols..(row + 1) * cols]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            topology: self.topology,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    fn block_sum(&self, rows: Range<usize>, cols: Range<usize>) -> f64 {
        rows.map(|r| self.row(r)[cols.clone()].iter().sum::<f64>())
            .sum()
    }
}

/// Per-source consumptions, resource totals and cross-flow aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsumptionSummary {
    pub water_sources: Vec<f64>,
    pub energy_sources: Vec<f64>,
    pub food_sources: Vec<f64>,
    pub water_total: f64,
    pub energy_total: f64,
    pub food_total: f64,
    /// Water used to generate energy.
    pub water_to_energy: f64,
    /// Water used to generate food.
    pub water_to_food: f64,
    /// Food used to generate water.
    pub food_to_water: f64,
    /// Energy used to generate food.
    pub energy_to_food: f64,
    /// Food used to generate energy.
    pub food_to_energy: f64,
}

pub fn consumption_summary(m: &FlowMatrix) -> ConsumptionSummary {
    let t = m.topology;
    let row_sums = |rows: Range<usize>| -> Vec<f64> {
        rows.map(|r| m.row(r).iter().sum()).collect()
    };
    let water_sources = row_sums(t.water_block());
    let energy_sources = row_sums(t.energy_block());
    let food_sources = row_sums(t.food_block());
    ConsumptionSummary {
        water_total: water_sources.iter().sum(),
        energy_total: energy_sources.iter().sum(),
        food_total: food_sources.iter().sum(),
        water_sources,
        energy_sources,
        food_sources,
        water_to_energy: m.block_sum(t.water_block(), t.energy_block()),
        water_to_food: m.block_sum(t.water_block(), t.food_block()),
        food_to_water: m.block_sum(t.food_block(), t.water_block()),
        energy_to_food: m.block_sum(t.energy_block(), t.food_block()),
        food_to_energy: m.block_sum(t.food_block(), t.energy_block()),
    }
}

fn intensity(numerator: f64, denominator: f64) -> f64 {
    if denominator < DENOMINATOR_GUARD {
        PENALTY
    } else {
        numerator / denominator
    }
}

/// The five intensity objectives of a flow matrix, without a bounds check.
pub fn objectives(m: &FlowMatrix) -> Vec<f64> {
    let s = consumption_summary(m);
    alloc::vec![
        intensity(s.water_to_energy, s.energy_total),
        intensity(s.water_to_food, s.food_total),
        intensity(s.food_to_water, s.water_total),
        intensity(s.energy_to_food, s.food_total),
        intensity(s.food_to_energy, s.energy_total),
    ]
}

/// Box bounds: `[0, 1]` on source-to-source flows, `[0.01, 1]` on demand flows.
pub fn bounds(topology: &ResourceTopology) -> Bounds {
    let cols = topology.destinations();
    let demand = topology.demand_block();
    let lower = (0..decision_dim(topology))
        .map(|i| {
            if demand.contains(&(i % cols)) {
                DEMAND_FLOOR
            } else {
                0.0
            }
        })
        .collect();
    Bounds::new(lower, alloc::vec![1.0; decision_dim(topology)])
        .expect("nexus bounds are well formed")
}

/// Bounds-checked objective evaluation of a flat decision vector.
pub fn evaluate(values: &[f64], topology: &ResourceTopology) -> Result<Vec<f64>> {
    let m = FlowMatrix::decode(values, *topology)?;
    bounds(topology).check(values)?;
    Ok(objectives(&m))
}

pub fn random_solution<R: Rng + ?Sized>(topology: &ResourceTopology, rng: &mut R) -> Vec<f64> {
    bounds(topology).sample(rng)
}

/// [`Problem`] adapter over a topology, caching its bounds.
#[derive(Debug, Clone)]
pub struct NexusProblem {
    topology: ResourceTopology,
    bounds: Bounds,
}

impl NexusProblem {
    pub fn new(topology: ResourceTopology) -> Self {
        Self {
            bounds: bounds(&topology),
            topology,
        }
    }

    pub fn topology(&self) -> &ResourceTopology {
        &self.topology
    }
}

impl Problem for NexusProblem {
    fn dim(&self) -> usize {
        decision_dim(&self.topology)
    }

    fn num_objectives(&self) -> usize {
        NUM_OBJECTIVES
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.bounds.check(x)?;
        Ok(objectives(&FlowMatrix::decode(x, self.topology)?))
    }

    fn objective_floor(&self) -> Option<Vec<f64>> {
        Some(alloc::vec![0.0; NUM_OBJECTIVES])
    }
}
