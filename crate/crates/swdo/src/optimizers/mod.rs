//! The three swarm optimizers — FOX, IGWO (with its GWO baseline), and MGTO —
//! each as a deterministic, seedable iteration over [`crate::core`]
//! populations.
//!
//! Shared structure:
//! - all state updates happen in a sequential control section; the only
//!   parallel work is batch fitness evaluation, which consumes no randomness;
//! - every stochastic step draws from its own `(iteration, agent, phase)`
//!   stream, so the number of draws one agent makes can never shift another
//!   agent's sequence;
//! - raw candidate coordinates pass through the numeric guard
//!   ([`crate::core::NUMERIC_GUARD`]) and then bound clamping before
//!   evaluation;
//! - non-finite objective values become `+∞` fitness and are counted.

pub mod fox;
pub mod gwo;
pub mod mgto;

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::{Agent, Budget, Objective, OptResult, Position, SearchSpace};
use crate::error::{Error, Result};

pub use fox::{
    fox_exploit_position, fox_exploration_control, fox_explore_from_u, fox_explore_position,
    fox_jump, fox_optimize, fox_optimize_batch, fox_scratch, fox_sound_distance, FoxParams,
    FoxScratch,
};
pub use gwo::{
    gwo_a_schedule, gwo_encircle, gwo_encircle_with, gwo_optimize, gwo_optimize_batch,
    igwo_a_schedule, igwo_optimize, igwo_optimize_batch, select_leaders, IgwoLeaders, IgwoParams,
};
pub use mgto::{
    cauchy_from_p, cauchy_sample, eobl_opposite, eobl_opposite_raw, mgto_compete_with,
    mgto_exploit, mgto_explore, mgto_optimize, mgto_optimize_batch, MgtoParams, DEFAULT_TAN_CLAMP,
};

/// A batched objective: the optimizer hands over one phase's worth of
/// candidate positions and receives one fitness per position, in order.
///
/// `iteration` is `0` for the initial population, then the 1-based optimizer
/// iteration. Implementations must be deterministic functions of
/// `(iteration order, positions)` and must not consume optimizer randomness.
pub trait BatchObjective {
    fn evaluate_batch(&mut self, iteration: usize, positions: &[Position]) -> Vec<f64>;
}

/// Adapter running a plain [`Objective`] over a rayon-parallel batch.
pub struct FnBatch<'a, O: Objective + ?Sized> {
    objective: &'a O,
}

impl<'a, O: Objective + ?Sized> FnBatch<'a, O> {
    pub fn new(objective: &'a O) -> Self {
        FnBatch { objective }
    }
}

impl<O: Objective + ?Sized> BatchObjective for FnBatch<'_, O> {
    fn evaluate_batch(&mut self, _iteration: usize, positions: &[Position]) -> Vec<f64> {
        positions
            .par_iter()
            .map(|p| self.objective.eval(&p.coords))
            .collect()
    }
}

/// Map non-finite fitness values to `+∞`, counting how many were mapped.
pub(crate) fn sanitize_fitness(values: Vec<f64>, non_finite: &mut usize) -> Vec<f64> {
    values
        .into_iter()
        .map(|v| {
            if v.is_finite() {
                v
            } else {
                *non_finite += 1;
                f64::INFINITY
            }
        })
        .collect()
}

/// Index and fitness of the best (minimum-fitness) member; first index wins
/// ties so the choice is deterministic.
pub(crate) fn best_index(fitness: &[f64]) -> (usize, f64) {
    let mut best = 0usize;
    for (i, &f) in fitness.iter().enumerate() {
        if f < fitness[best] {
            best = i;
        }
    }
    (best, fitness[best])
}

pub(crate) fn mean_fitness(fitness: &[f64]) -> f64 {
    if fitness.is_empty() {
        f64::INFINITY
    } else {
        fitness.iter().sum::<f64>() / fitness.len() as f64
    }
}

/// Evaluated population state shared by the optimizer loops.
pub(crate) struct Swarm {
    pub positions: Vec<Position>,
    pub fitness: Vec<f64>,
}

impl Swarm {
    pub fn agents(&self) -> Vec<Agent> {
        self.positions
            .iter()
            .zip(&self.fitness)
            .map(|(p, &f)| Agent {
                position: p.clone(),
                fitness: Some(f),
            })
            .collect()
    }
}

/// Algorithm selector used by the tuner and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fox,
    Gwo,
    Igwo,
    Mgto,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Fox,
        Algorithm::Gwo,
        Algorithm::Igwo,
        Algorithm::Mgto,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Fox => "fox",
            Algorithm::Gwo => "gwo",
            Algorithm::Igwo => "igwo",
            Algorithm::Mgto => "mgto",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fox" => Ok(Algorithm::Fox),
            "gwo" => Ok(Algorithm::Gwo),
            "igwo" => Ok(Algorithm::Igwo),
            "mgto" => Ok(Algorithm::Mgto),
            other => Err(Error::config(format!(
                "unknown algorithm '{other}' (expected fox, gwo, igwo, or mgto)"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Run the selected algorithm with its default parameters over a batched
/// objective.
pub fn optimize_batch(
    algorithm: Algorithm,
    objective: &mut dyn BatchObjective,
    space: &SearchSpace,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    match algorithm {
        Algorithm::Fox => fox_optimize_batch(objective, space, &FoxParams::default(), budget, seed),
        Algorithm::Gwo => gwo_optimize_batch(objective, space, budget, seed),
        Algorithm::Igwo => {
            igwo_optimize_batch(objective, space, &IgwoParams::default(), budget, seed)
        }
        Algorithm::Mgto => {
            mgto_optimize_batch(objective, space, &MgtoParams::default(), budget, seed)
        }
    }
}

/// Run the selected algorithm with default parameters over a plain objective.
pub fn optimize<O: Objective + ?Sized>(
    algorithm: Algorithm,
    objective: &O,
    space: &SearchSpace,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    let mut batch = FnBatch::new(objective);
    optimize_batch(algorithm, &mut batch, space, budget, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::benchmarks;

    #[test]
    fn algorithm_round_trips_through_strings() {
        for algo in Algorithm::ALL {
            assert_eq!(algo.name().parse::<Algorithm>().unwrap(), algo);
        }
        assert_eq!("FOX".parse::<Algorithm>().unwrap(), Algorithm::Fox);
        assert!("pso".parse::<Algorithm>().is_err());
    }

    #[test]
    fn best_index_prefers_first_on_ties() {
        assert_eq!(best_index(&[3.0, 1.0, 1.0, 2.0]), (1, 1.0));
        assert_eq!(best_index(&[5.0]), (0, 5.0));
    }

    #[test]
    fn sanitize_maps_and_counts() {
        let mut n = 0;
        let out = sanitize_fitness(vec![1.0, f64::NAN, f64::NEG_INFINITY, 2.0], &mut n);
        assert_eq!(out, vec![1.0, f64::INFINITY, f64::INFINITY, 2.0]);
        assert_eq!(n, 2);
    }

    /// All four algorithms must run end to end under the unified entry point
    /// and respect bounds for every evaluated position.
    #[test]
    fn unified_entry_point_runs_and_respects_bounds() {
        let space = SearchSpace::cube(3, -2.0, 2.0).unwrap();
        let budget = Budget::new(8, 5).unwrap();
        let bound_checking = |x: &[f64]| {
            for &v in x {
                assert!((-2.0..=2.0).contains(&v), "out-of-bounds coordinate {v}");
            }
            benchmarks::sphere(x)
        };
        for algo in Algorithm::ALL {
            let result = optimize(algo, &bound_checking, &space, &budget, 7).unwrap();
            assert_eq!(result.history.len(), 5, "{algo} history length");
            assert!(result.best_fitness.is_finite());
            assert_eq!(result.seed, 7);
        }
    }
}
