//! FOX optimizer: a red-fox hunting metaphor alternating a sound-distance
//! exploitation jump with best-anchored exploration random walks.
//!
//! Update structure per agent per iteration:
//! 1. a fresh row of sound-travel times in `(0, 1]` is drawn (time phase);
//! 2. one draw `r` selects the phase: `r ≥ phase_threshold` exploits,
//!    otherwise explores (move phase);
//! 3. exploitation: distance-to-prey from the sound times, jump height from
//!    their mean, and a second draw `p2` choosing jump coefficient `c1`
//!    (when `p2 > direction_threshold`) or `c2`;
//! 4. exploration: a best-anchored random walk scaled by the population
//!    minimum mean time and a control value decreasing from 2 to 0.
//!
//! Agents move unconditionally (no greedy keep); the global best is tracked
//! separately. Note the literal algebra: `dist_s_t` always equals the best
//! position element-wise, so the exploitation jump lands at
//! `best/2 × jump × coeff` — implemented exactly as written.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::core::rng::ITER_INIT;
use crate::core::{
    clamp_to_bounds, guard, init_population, Budget, IterationRecord, Objective, OptResult,
    Position, RngStream, SearchSpace,
};
use crate::error::{Error, Result};
use crate::optimizers::{
    best_index, mean_fitness, sanitize_fitness, BatchObjective, FnBatch, Swarm,
};

/// Stream phases (phase 0 at iteration 0 is population initialization).
const PH_TIME: u64 = 1;
const PH_MOVE: u64 = 2;

/// FOX coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoxParams {
    /// Jump coefficient taken when `p2 > direction_threshold`.
    pub c1: f64,
    /// Jump coefficient taken otherwise.
    pub c2: f64,
    /// Threshold on `p2` selecting between `c1` and `c2`.
    pub direction_threshold: f64,
    /// Threshold on `r` selecting exploitation (`r ≥ phase_threshold`).
    pub phase_threshold: f64,
}

impl Default for FoxParams {
    fn default() -> Self {
        FoxParams {
            c1: 0.18,
            c2: 0.82,
            direction_threshold: 0.18,
            phase_threshold: 0.5,
        }
    }
}

impl FoxParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c1", self.c1),
            ("c2", self.c2),
            ("direction_threshold", self.direction_threshold),
            ("phase_threshold", self.phase_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!(
                    "fox parameter {name} must lie in [0,1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-iteration scratch values: the full time matrix, per-agent mean times,
/// their population minimum, and the exploration control value.
#[derive(Clone, Debug, PartialEq)]
pub struct FoxScratch {
    pub time_matrix: Vec<Vec<f64>>,
    pub tt: Vec<f64>,
    pub min_t: f64,
    pub a: f64,
}

/// Draw the scratch values for one iteration. Times are drawn agent-major
/// from per-agent time-phase streams as `1 − u` with `u ~ U[0,1)`, so every
/// entry lies in `(0, 1]` and division by time is always defined.
pub fn fox_scratch(
    population_size: usize,
    dims: usize,
    it: usize,
    max_it: usize,
    seed: u64,
) -> Result<FoxScratch> {
    let a = fox_exploration_control(it, max_it)?;
    let mut time_matrix = Vec::with_capacity(population_size);
    let mut tt = Vec::with_capacity(population_size);
    for agent in 0..population_size {
        let mut rng = RngStream::for_phase(seed, it as u64, agent as u64, PH_TIME).rng();
        let row: Vec<f64> = (0..dims).map(|_| 1.0 - rng.gen::<f64>()).collect();
        tt.push(row.iter().sum::<f64>() / dims as f64);
        time_matrix.push(row);
    }
    let min_t = tt.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(FoxScratch {
        time_matrix,
        tt,
        min_t,
        a,
    })
}

/// Sound speed, sound-travel distance, and fox-to-prey distance.
///
/// `sp_s = best/time`, `dist_s_t = sp_s × time`, `dist_fox_prey =
/// 0.5 × dist_s_t`, all element-wise. `dist_s_t` algebraically equals `best`;
/// the computation is kept literal.
pub fn fox_sound_distance(
    best: &[f64],
    time_row: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if best.len() != time_row.len() {
        return Err(Error::shape(format!(
            "best has {} dims but time row has {}",
            best.len(),
            time_row.len()
        )));
    }
    for (d, &t) in time_row.iter().enumerate() {
        if t <= 0.0 {
            return Err(Error::Numerical(format!(
                "sound-travel time must be strictly positive, got {t} in dimension {d}"
            )));
        }
    }
    let sp_s: Vec<f64> = best.iter().zip(time_row).map(|(&b, &t)| b / t).collect();
    let dist_s_t: Vec<f64> = sp_s.iter().zip(time_row).map(|(&s, &t)| s * t).collect();
    let dist_fox_prey: Vec<f64> = dist_s_t.iter().map(|&d| 0.5 * d).collect();
    Ok((sp_s, dist_s_t, dist_fox_prey))
}

/// Jump height from a time row: `tt = mean(row)`, `t = tt/2`,
/// `jump = 0.5 · 9.81 · t²`.
pub fn fox_jump(time_row: &[f64]) -> Result<f64> {
    if time_row.is_empty() {
        return Err(Error::config("fox_jump requires a nonempty time row"));
    }
    let tt = time_row.iter().sum::<f64>() / time_row.len() as f64;
    let t = tt / 2.0;
    Ok(0.5 * 9.81 * t * t)
}

/// Exploitation candidate: `dist_fox_prey × jump × coeff` element-wise.
pub fn fox_exploit_position(dist_fox_prey: &[f64], jump: f64, coeff: f64) -> Position {
    Position::new(dist_fox_prey.iter().map(|&d| d * jump * coeff).collect())
}

/// Exploration control value `a = 2·(1 − it/max_it)`, decreasing from just
/// under 2 to 0 as `it` runs from 1 to `max_it`.
pub fn fox_exploration_control(it: usize, max_it: usize) -> Result<f64> {
    if max_it == 0 || it == 0 || it > max_it {
        return Err(Error::config(format!(
            "iteration index must satisfy 1 ≤ it ≤ max_it, got it={it}, max_it={max_it}"
        )));
    }
    Ok(2.0 * (1.0 - it as f64 / max_it as f64))
}

/// Exploration candidate from explicit uniform draws:
/// `best ⊙ u × min_t × a`.
pub fn fox_explore_from_u(best: &[f64], min_t: f64, a: f64, u: &[f64]) -> Result<Position> {
    if best.len() != u.len() {
        return Err(Error::shape(format!(
            "best has {} dims but u has {}",
            best.len(),
            u.len()
        )));
    }
    Ok(Position::new(
        best.iter()
            .zip(u)
            .map(|(&b, &ud)| b * ud * min_t * a)
            .collect(),
    ))
}

/// Exploration candidate drawing one fresh `u ~ U[0,1)` per dimension.
pub fn fox_explore_position(
    best: &[f64],
    min_t: f64,
    a: f64,
    rng: &mut impl Rng,
) -> Position {
    let u: Vec<f64> = (0..best.len()).map(|_| rng.gen::<f64>()).collect();
    fox_explore_from_u(best, min_t, a, &u).expect("lengths match by construction")
}

/// Run FOX over a plain objective (batched via rayon internally).
pub fn fox_optimize<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    params: &FoxParams,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    let mut batch = FnBatch::new(objective);
    fox_optimize_batch(&mut batch, space, params, budget, seed)
}

/// Run FOX over a batched objective.
pub fn fox_optimize_batch(
    objective: &mut dyn BatchObjective,
    space: &SearchSpace,
    params: &FoxParams,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    params.validate()?;
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
        let scratch = fox_scratch(
            budget.population_size,
            space.dims(),
            it,
            budget.max_iterations,
            seed,
        )?;
        let mut candidates = Vec::with_capacity(budget.population_size);
        for k in 0..budget.population_size {
            let mut rng = RngStream::for_phase(seed, it as u64, k as u64, PH_MOVE).rng();
            let r: f64 = rng.gen();
            let raw = if r >= params.phase_threshold {
                let (_, _, dist_fox_prey) =
                    fox_sound_distance(&best_position.coords, &scratch.time_matrix[k])?;
                let jump = fox_jump(&scratch.time_matrix[k])?;
                let p2: f64 = rng.gen();
                let coeff = if p2 > params.direction_threshold {
                    params.c1
                } else {
                    params.c2
                };
                fox_exploit_position(&dist_fox_prey, jump, coeff)
            } else {
                fox_explore_position(&best_position.coords, scratch.min_t, scratch.a, &mut rng)
            };
            let guarded = Position::new(
                raw.coords
                    .iter()
                    .map(|&v| guard(v, &mut guard_clamps))
                    .collect(),
            );
            candidates.push(clamp_to_bounds(&guarded, space)?);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::benchmarks;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sound_distance_direct_substitution() {
        let (sp, dst, dfp) = fox_sound_distance(&[2.0, 4.0], &[0.5, 0.5]).unwrap();
        assert_eq!(sp, vec![4.0, 8.0]);
        assert_eq!(dst, vec![2.0, 4.0]);
        assert_eq!(dfp, vec![1.0, 2.0]);
    }

    #[test]
    fn sound_distance_zero_best_annihilates() {
        let (sp, dst, dfp) = fox_sound_distance(&[0.0, 0.0], &[0.3, 0.9]).unwrap();
        assert_eq!(sp, vec![0.0, 0.0]);
        assert_eq!(dst, vec![0.0, 0.0]);
        assert_eq!(dfp, vec![0.0, 0.0]);
    }

    #[test]
    fn sound_distance_unit_case() {
        let (sp, dst, dfp) = fox_sound_distance(&[1.0], &[1.0]).unwrap();
        assert_eq!((sp[0], dst[0], dfp[0]), (1.0, 1.0, 0.5));
    }

    #[test]
    fn sound_distance_rejects_nonpositive_time() {
        assert!(fox_sound_distance(&[1.0], &[0.0]).is_err());
        assert!(fox_sound_distance(&[1.0], &[-0.5]).is_err());
        assert!(fox_sound_distance(&[1.0, 2.0], &[0.5]).is_err());
    }

    /// dist_s_t = best element-wise for any strictly positive times —
    /// the literal-collapse consequence of the update algebra.
    #[test]
    fn sound_distance_literal_collapse() {
        let best = [3.5, -1.25, 0.0, 7.0];
        let times = [0.1, 0.9, 0.4, 1.0];
        let (_, dst, dfp) = fox_sound_distance(&best, &times).unwrap();
        for d in 0..best.len() {
            assert_abs_diff_eq!(dst[d], best[d], epsilon = 1e-15);
            assert_abs_diff_eq!(dfp[d], best[d] / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn jump_direct_substitution() {
        assert_abs_diff_eq!(fox_jump(&[0.4, 0.6]).unwrap(), 0.3065625);
        assert_abs_diff_eq!(fox_jump(&[0.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(fox_jump(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 1.22625);
        assert!(fox_jump(&[]).is_err());
    }

    #[test]
    fn exploit_position_examples() {
        let p = fox_exploit_position(&[1.0, 2.0], 0.3065625, 0.18);
        assert_abs_diff_eq!(p.coords[0], 0.05518125, epsilon = 1e-15);
        assert_abs_diff_eq!(p.coords[1], 0.1103625, epsilon = 1e-15);
        let p = fox_exploit_position(&[1.0, 2.0], 0.3065625, 0.82);
        assert_abs_diff_eq!(p.coords[0], 0.25138125, epsilon = 1e-15);
        assert_abs_diff_eq!(p.coords[1], 0.5027625, epsilon = 1e-15);
        let p = fox_exploit_position(&[5.0, -3.0], 0.0, 0.5);
        assert_eq!(p.coords, vec![0.0, 0.0]);
    }

    #[test]
    fn exploration_control_schedule() {
        assert_abs_diff_eq!(fox_exploration_control(1, 500).unwrap(), 1.996);
        assert_abs_diff_eq!(fox_exploration_control(500, 500).unwrap(), 0.0);
        assert_abs_diff_eq!(fox_exploration_control(250, 500).unwrap(), 1.0);
        assert!(fox_exploration_control(0, 500).is_err());
        assert!(fox_exploration_control(501, 500).is_err());
        assert!(fox_exploration_control(1, 0).is_err());
    }

    #[test]
    fn exploration_control_is_decreasing() {
        let mut prev = f64::INFINITY;
        for it in 1..=100 {
            let a = fox_exploration_control(it, 100).unwrap();
            assert!(a < prev);
            assert!((0.0..2.0).contains(&a));
            prev = a;
        }
    }

    #[test]
    fn explore_from_u_examples() {
        let p = fox_explore_from_u(&[1.0, 1.0], 0.2, 1.0, &[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(p.coords[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(p.coords[1], 0.1, epsilon = 1e-15);
        let p = fox_explore_from_u(&[3.0, -2.0], 0.7, 0.0, &[0.9, 0.1]).unwrap();
        assert_eq!(p.coords, vec![0.0, 0.0]);
        let p = fox_explore_from_u(&[0.0, 0.0], 0.7, 1.5, &[0.9, 0.1]).unwrap();
        assert_eq!(p.coords, vec![0.0, 0.0]);
    }

    #[test]
    fn scratch_times_lie_in_half_open_unit_interval() {
        let s = fox_scratch(8, 5, 3, 10, 42).unwrap();
        assert_eq!(s.time_matrix.len(), 8);
        for (k, row) in s.time_matrix.iter().enumerate() {
            assert_eq!(row.len(), 5);
            for &t in row {
                assert!(t > 0.0 && t <= 1.0);
            }
            assert_abs_diff_eq!(s.tt[k], row.iter().sum::<f64>() / 5.0);
        }
        assert_abs_diff_eq!(
            s.min_t,
            s.tt.iter().cloned().fold(f64::INFINITY, f64::min)
        );
    }

    #[test]
    fn optimize_converges_on_small_sphere() {
        let space = benchmarks::benchmark_space("sphere", 2).unwrap();
        let budget = Budget::new(10, 100).unwrap();
        let result = fox_optimize(
            &benchmarks::sphere,
            &space,
            &FoxParams::default(),
            &budget,
            42,
        )
        .unwrap();
        assert!(
            result.best_fitness < 1e-3,
            "fox on sphere-2D reached only {}",
            result.best_fitness
        );
    }

    #[test]
    fn optimize_is_bit_identical_across_calls() {
        let space = benchmarks::benchmark_space("rastrigin", 4).unwrap();
        let budget = Budget::new(12, 30).unwrap();
        let run = || {
            fox_optimize(
                &benchmarks::rastrigin,
                &space,
                &FoxParams::default(),
                &budget,
                7,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn single_iteration_history_semantics() {
        let space = benchmarks::benchmark_space("sphere", 3).unwrap();
        let budget = Budget::new(6, 1).unwrap();
        let result = fox_optimize(
            &benchmarks::sphere,
            &space,
            &FoxParams::default(),
            &budget,
            11,
        )
        .unwrap();
        assert_eq!(result.history.len(), 1);
        assert_eq!(result.evaluations, 6 * 2);
        assert!(result.history[0].best_so_far <= result.history[0].mean_fitness);
    }

    #[test]
    fn history_best_is_non_increasing() {
        let space = benchmarks::benchmark_space("ackley", 5).unwrap();
        let budget = Budget::new(10, 40).unwrap();
        let result = fox_optimize(
            &benchmarks::ackley,
            &space,
            &FoxParams::default(),
            &budget,
            3,
        )
        .unwrap();
        for w in result.history.windows(2) {
            assert!(w[1].best_so_far <= w[0].best_so_far);
        }
        assert_eq!(result.evaluations, 10 * 41);
    }

    #[test]
    fn params_are_validated() {
        let bad = FoxParams {
            c1: 1.5,
            ..FoxParams::default()
        };
        let space = benchmarks::benchmark_space("sphere", 2).unwrap();
        let budget = Budget::new(4, 2).unwrap();
        assert!(fox_optimize(&benchmarks::sphere, &space, &bad, &budget, 1).is_err());
    }
}
