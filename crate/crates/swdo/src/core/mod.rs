//! Search-space machinery, population bookkeeping, the objective contract,
//! deterministic randomness, and standard benchmark objectives shared by all
//! optimizers.
//!
//! Conventions pinned here and relied on everywhere else:
//! - minimization: lower fitness is better, always;
//! - bound repair: clamp (project onto the box) after every position update;
//! - all randomness flows through [`rng::RngStream`];
//! - fitness evaluation may run on any number of workers, and results are
//!   byte-identical regardless, because evaluation consumes no randomness.

pub mod benchmarks;
pub mod rng;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use rng::{derive_seed, RngStream};

/// A bounded D-dimensional real box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    /// Build a space from per-dimension bounds. `lower[d] < upper[d]` must
    /// hold for every dimension.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::config("search space needs at least one dimension"));
        }
        if lower.len() != upper.len() {
            return Err(Error::shape(format!(
                "lower bounds have {} dims but upper bounds have {}",
                lower.len(),
                upper.len()
            )));
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::config(format!("non-finite bound in dimension {d}")));
            }
            if lo >= hi {
                return Err(Error::config(format!(
                    "dimension {d}: lower bound {lo} is not below upper bound {hi}"
                )));
            }
        }
        Ok(SearchSpace { lower, upper })
    }

    /// A cube: `dims` copies of the same `[lo, hi]` interval.
    pub fn cube(dims: usize, lo: f64, hi: f64) -> Result<Self> {
        SearchSpace::new(vec![lo; dims], vec![hi; dims])
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// A point in a search space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub coords: Vec<f64>,
}

impl Position {
    pub fn new(coords: Vec<f64>) -> Self {
        Position { coords }
    }

    pub fn dims(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<f64>> for Position {
    fn from(coords: Vec<f64>) -> Self {
        Position::new(coords)
    }
}

/// One population member. `fitness == None` means "not yet evaluated";
/// evaluated agents always carry a finite value or `+∞` (see
/// [`evaluate_population`] for the non-finite mapping).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub position: Position,
    pub fitness: Option<f64>,
}

impl Agent {
    pub fn unevaluated(position: Position) -> Self {
        Agent {
            position,
            fitness: None,
        }
    }
}

/// Population size and iteration count for one optimizer run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub population_size: usize,
    pub max_iterations: usize,
}

impl Budget {
    pub fn new(population_size: usize, max_iterations: usize) -> Result<Self> {
        if population_size < 2 {
            return Err(Error::config(format!(
                "population_size must be at least 2, got {population_size}"
            )));
        }
        if max_iterations < 1 {
            return Err(Error::config("max_iterations must be at least 1"));
        }
        Ok(Budget {
            population_size,
            max_iterations,
        })
    }
}

/// Per-iteration progress record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Best fitness seen anywhere up to and including this iteration.
    pub best_so_far: f64,
    /// Mean fitness of the population at the end of this iteration.
    pub mean_fitness: f64,
}

/// Universal optimizer output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_position: Position,
    pub best_fitness: f64,
    /// One record per iteration (initialization is not an iteration).
    pub history: Vec<IterationRecord>,
    /// Total objective evaluations, including initialization.
    pub evaluations: usize,
    pub seed: u64,
    /// Evaluations that returned a non-finite value and were recorded as +∞.
    pub non_finite_evaluations: usize,
    /// Intermediate update values whose magnitude exceeded the numeric guard
    /// and were clamped before bound repair.
    pub guard_clamps: usize,
}

/// Magnitude cap applied to raw position updates before bound repair, so a
/// runaway multiplicative step cannot produce infinities inside the update
/// arithmetic itself. Clamps are counted in [`OptResult::guard_clamps`].
pub const NUMERIC_GUARD: f64 = 1e12;

/// Objective-function contract: a pure, reentrant map from coordinates to a
/// scalar cost. Implemented for plain closures.
pub trait Objective: Sync {
    fn eval(&self, coords: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn eval(&self, coords: &[f64]) -> f64 {
        self(coords)
    }
}

/// Project a position onto the box. In-bounds coordinates pass through
/// unchanged; NaN coordinates are pulled to the lower bound so the result is
/// always a valid point.
pub fn clamp_to_bounds(p: &Position, s: &SearchSpace) -> Result<Position> {
    if p.dims() != s.dims() {
        return Err(Error::shape(format!(
            "position has {} dims but space has {}",
            p.dims(),
            s.dims()
        )));
    }
    let coords = p
        .coords
        .iter()
        .zip(s.lower.iter().zip(&s.upper))
        .map(|(&x, (&lo, &hi))| {
            if x.is_nan() {
                lo
            } else {
                x.max(lo).min(hi)
            }
        })
        .collect();
    Ok(Position::new(coords))
}

/// Draw `population_size` agents uniformly within the box. Coordinates are
/// drawn agent-major, dimension-minor from the given stream; all agents are
/// returned unevaluated.
pub fn init_population(s: &SearchSpace, b: &Budget, stream: RngStream) -> Vec<Agent> {
    let mut rng = stream.rng();
    (0..b.population_size)
        .map(|_| {
            let coords = s
                .lower
                .iter()
                .zip(&s.upper)
                .map(|(&lo, &hi)| lo + rng.gen::<f64>() * (hi - lo))
                .collect();
            Agent::unevaluated(Position::new(coords))
        })
        .collect()
}

/// Evaluate every agent in parallel. Order is preserved and no randomness is
/// consumed, so the result is identical for any worker count. Non-finite
/// objective values are recorded as `+∞`; the second return value counts them.
pub fn evaluate_population<O: Objective + ?Sized>(
    mut agents: Vec<Agent>,
    objective: &O,
) -> (Vec<Agent>, usize) {
    let raw: Vec<f64> = agents
        .par_iter()
        .map(|a| objective.eval(&a.position.coords))
        .collect();
    let mut non_finite = 0usize;
    for (agent, value) in agents.iter_mut().zip(raw) {
        if value.is_finite() {
            agent.fitness = Some(value);
        } else {
            agent.fitness = Some(f64::INFINITY);
            non_finite += 1;
        }
    }
    (agents, non_finite)
}

/// Clamp a raw update value into the numeric guard band, counting clamps.
/// NaN is mapped to 0.0 (and counted) so downstream bound repair stays exact.
pub fn guard(value: f64, clamps: &mut usize) -> f64 {
    if value.is_nan() {
        *clamps += 1;
        0.0
    } else if value > NUMERIC_GUARD {
        *clamps += 1;
        NUMERIC_GUARD
    } else if value < -NUMERIC_GUARD {
        *clamps += 1;
        -NUMERIC_GUARD
    } else {
        value
    }
}
