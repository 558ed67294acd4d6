//! Grey-wolf optimizer (GWO) baseline and its improved variant (IGWO).
//!
//! Both share the encircling update: each agent builds one candidate per
//! leader (alpha, beta, delta — the three best of the current population)
//! and moves to their arithmetic mean. They differ only in the control
//! schedule `a(i)`:
//! - GWO: the classic linear decay `a = 2·(1 − i/i_max)` for all three
//!   leaders;
//! - IGWO: exponential decays `a_α(i) = a_max·exp((i/i_max)·η_α·ln(a_min/a_max))`
//!   and `a_δ(i)` likewise with `η_δ`, with `a_β` their arithmetic mean.
//!   With `η_δ < η_α` the delta schedule stays highest, so delta-led moves
//!   keep the widest search radius.
//!
//! Draw order per agent per iteration (one move-phase stream): for each
//! leader in alpha, beta, delta order, and within a leader for each
//! dimension, draw `r1` then `r2`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::core::rng::ITER_INIT;
use crate::core::{
    clamp_to_bounds, guard, init_population, Agent, Budget, IterationRecord, Objective, OptResult,
    Position, RngStream, SearchSpace,
};
use crate::error::{Error, Result};
use crate::optimizers::{
    best_index, mean_fitness, sanitize_fitness, BatchObjective, FnBatch, Swarm,
};

const PH_MOVE: u64 = 1;

/// IGWO schedule parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IgwoParams {
    pub a_min: f64,
    pub a_max: f64,
    pub eta_alpha: f64,
    pub eta_delta: f64,
}

impl Default for IgwoParams {
    fn default() -> Self {
        IgwoParams {
            a_min: 0.02,
            a_max: 2.2,
            eta_alpha: 1.0,
            eta_delta: 0.5,
        }
    }
}

impl IgwoParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_min > 0.0 && self.a_min < self.a_max) {
            return Err(Error::config(format!(
                "igwo requires 0 < a_min < a_max, got a_min={}, a_max={}",
                self.a_min, self.a_max
            )));
        }
        if self.eta_alpha <= 0.0 || self.eta_delta <= 0.0 {
            return Err(Error::config("igwo eta factors must be positive"));
        }
        Ok(())
    }
}

/// The three best agents of a population, ascending by fitness.
#[derive(Clone, Debug, PartialEq)]
pub struct IgwoLeaders {
    pub alpha: Agent,
    pub beta: Agent,
    pub delta: Agent,
}

/// Select alpha/beta/delta from an evaluated population. Ties break by
/// original index, so selection is deterministic.
pub fn select_leaders(population: &[Agent]) -> Result<IgwoLeaders> {
    if population.len() < 3 {
        return Err(Error::config(format!(
            "leader selection needs at least 3 agents, got {}",
            population.len()
        )));
    }
    let mut order: Vec<usize> = (0..population.len()).collect();
    for agent in population {
        if agent.fitness.is_none() {
            return Err(Error::config("leader selection requires evaluated agents"));
        }
    }
    order.sort_by(|&i, &j| {
        let fi = population[i].fitness.unwrap();
        let fj = population[j].fitness.unwrap();
        fi.partial_cmp(&fj).unwrap().then(i.cmp(&j))
    });
    Ok(IgwoLeaders {
        alpha: population[order[0]].clone(),
        beta: population[order[1]].clone(),
        delta: population[order[2]].clone(),
    })
}

/// IGWO control schedules at iteration `i` (0 ≤ i ≤ i_max):
/// `(a_alpha, a_beta, a_delta)`.
pub fn igwo_a_schedule(i: usize, i_max: usize, params: &IgwoParams) -> Result<(f64, f64, f64)> {
    if i_max == 0 || i > i_max {
        return Err(Error::config(format!(
            "schedule index must satisfy 0 ≤ i ≤ i_max, got i={i}, i_max={i_max}"
        )));
    }
    let ratio = i as f64 / i_max as f64;
    let ln_span = (params.a_min / params.a_max).ln();
    let a_alpha = params.a_max * (ratio * params.eta_alpha * ln_span).exp();
    let a_delta = params.a_max * (ratio * params.eta_delta * ln_span).exp();
    let a_beta = 0.5 * (a_alpha + a_delta);
    Ok((a_alpha, a_beta, a_delta))
}

/// GWO baseline schedule: `a = 2·(1 − i/i_max)` shared by all leaders.
pub fn gwo_a_schedule(i: usize, i_max: usize) -> Result<f64> {
    if i_max == 0 || i > i_max {
        return Err(Error::config(format!(
            "schedule index must satisfy 0 ≤ i ≤ i_max, got i={i}, i_max={i_max}"
        )));
    }
    Ok(2.0 * (1.0 - i as f64 / i_max as f64))
}

/// Encircling update from explicit per-dimension draws:
/// `D_d = |2·r2_d·leader_d − x_d|`, `A_d = 2·a·r1_d − a`,
/// `candidate_d = leader_d − A_d·D_d`.
pub fn gwo_encircle_with(
    leader: &[f64],
    x: &[f64],
    a: f64,
    r1: &[f64],
    r2: &[f64],
) -> Result<Vec<f64>> {
    let dims = leader.len();
    if x.len() != dims || r1.len() != dims || r2.len() != dims {
        return Err(Error::shape(format!(
            "encircle inputs disagree on dims: leader {}, x {}, r1 {}, r2 {}",
            dims,
            x.len(),
            r1.len(),
            r2.len()
        )));
    }
    Ok((0..dims)
        .map(|d| {
            let dist = (2.0 * r2[d] * leader[d] - x[d]).abs();
            let amp = 2.0 * a * r1[d] - a;
            leader[d] - amp * dist
        })
        .collect())
}

/// Encircling update drawing fresh `r1`, `r2` per dimension (in that order).
pub fn gwo_encircle(leader: &[f64], x: &[f64], a: f64, rng: &mut impl Rng) -> Result<Position> {
    let dims = leader.len();
    let mut r1 = Vec::with_capacity(dims);
    let mut r2 = Vec::with_capacity(dims);
    for _ in 0..dims {
        r1.push(rng.gen::<f64>());
        r2.push(rng.gen::<f64>());
    }
    gwo_encircle_with(leader, x, a, &r1, &r2).map(Position::new)
}

/// Run IGWO over a plain objective.
pub fn igwo_optimize<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    params: &IgwoParams,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    let mut batch = FnBatch::new(objective);
    igwo_optimize_batch(&mut batch, space, params, budget, seed)
}

/// Run IGWO over a batched objective.
pub fn igwo_optimize_batch(
    objective: &mut dyn BatchObjective,
    space: &SearchSpace,
    params: &IgwoParams,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    params.validate()?;
    let p = *params;
    wolf_loop(objective, space, budget, seed, move |i, i_max| {
        igwo_a_schedule(i, i_max, &p)
    })
}

/// Run the GWO baseline over a plain objective.
pub fn gwo_optimize<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    let mut batch = FnBatch::new(objective);
    gwo_optimize_batch(&mut batch, space, budget, seed)
}

/// Run the GWO baseline over a batched objective.
pub fn gwo_optimize_batch(
    objective: &mut dyn BatchObjective,
    space: &SearchSpace,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    wolf_loop(objective, space, budget, seed, |i, i_max| {
        let a = gwo_a_schedule(i, i_max)?;
        Ok((a, a, a))
    })
}

fn wolf_loop(
    objective: &mut dyn BatchObjective,
    space: &SearchSpace,
    budget: &Budget,
    seed: u64,
    schedule: impl Fn(usize, usize) -> Result<(f64, f64, f64)>,
) -> Result<OptResult> {
    if budget.population_size < 3 {
        return Err(Error::config(format!(
            "grey-wolf optimizers need population_size ≥ 3 (alpha, beta, delta), got {}",
            budget.population_size
        )));
    }
    let mut non_finite = 0usize;
    let mut guard_clamps = 0usize;

    let init = init_population(space, budget, RngStream::for_phase(seed, ITER_INIT, 0, 0));
    let positions: Vec<Position> = init.into_iter().map(|a| a.position).collect();
    let fitness = sanitize_fitness(objective.evaluate_batch(0, &positions), &mut non_finite);
    let mut evaluations = positions.len();
    let mut swarm = Swarm { positions, fitness };

    let (bi, bf) = best_index(&swarm.fitness);
    let mut best_position = swarm.positions[bi].clone();
    let mut best_fitness = bf;

    let mut history = Vec::with_capacity(budget.max_iterations);
    for it in 1..=budget.max_iterations {
        let (a_alpha, a_beta, a_delta) = schedule(it, budget.max_iterations)?;
        let leaders = select_leaders(&swarm.agents())?;
        let mut candidates = Vec::with_capacity(budget.population_size);
        for k in 0..budget.population_size {
            let mut rng = RngStream::for_phase(seed, it as u64, k as u64, PH_MOVE).rng();
            let x = &swarm.positions[k].coords;
            let x1 = gwo_encircle(&leaders.alpha.position.coords, x, a_alpha, &mut rng)?;
            let x2 = gwo_encircle(&leaders.beta.position.coords, x, a_beta, &mut rng)?;
            let x3 = gwo_encircle(&leaders.delta.position.coords, x, a_delta, &mut rng)?;
            let raw: Vec<f64> = (0..space.dims())
                .map(|d| {
                    let v = (x1.coords[d] + x2.coords[d] + x3.coords[d]) / 3.0;
                    guard(v, &mut guard_clamps)
                })
                .collect();
            candidates.push(clamp_to_bounds(&Position::new(raw), space)?);
        }
        let fitness = sanitize_fitness(objective.evaluate_batch(it, &candidates), &mut non_finite);
        evaluations += candidates.len();
        swarm = Swarm {
            positions: candidates,
            fitness,
        };
        let (bi, bf) = best_index(&swarm.fitness);
        if bf < best_fitness {
            best_fitness = bf;
            best_position = swarm.positions[bi].clone();
        }
        history.push(IterationRecord {
            best_so_far: best_fitness,
            mean_fitness: mean_fitness(&swarm.fitness),
        });
    }

    Ok(OptResult {
        best_position,
        best_fitness,
        history,
        evaluations,
        seed,
        non_finite_evaluations: non_finite,
        guard_clamps,
    })
}
