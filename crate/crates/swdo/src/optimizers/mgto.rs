//! MGTO: a gorilla-troops optimizer augmented with elite opposition-based
//! learning (EOBL) and a Cauchy inverse-CDF (CICD) perturbation operator.
//!
//! Each iteration runs three sequenced, individually evaluated rounds, every
//! one applying greedy elitist replacement (a candidate replaces its agent
//! only when strictly fitter):
//! 1. **exploration** — the three-branch general update rule (migrate to a
//!    random point, move toward a random member, or drift between members),
//!    followed by an additive per-dimension Cauchy perturbation;
//! 2. **EOBL** — each agent's elite opposite within the population's
//!    per-dimension min/max box, out-of-box coordinates resampled uniformly
//!    within it;
//! 3. **exploitation** — follow-the-silverback when the control value `C`
//!    is at least `W`, otherwise the competition update.
//!
//! Control values per agent per phase: `C = F·(1 − it/max_it)` with
//! `F = cos(2·r4) + 1`, and `L = C·l` with `l ~ U(−1, 1)` drawn continuously.
//! Tangent factors are magnitude-clamped at `tan_clamp` so no update can
//! produce a non-finite coordinate.
//!
//! Draw order (one stream per agent per phase):
//! - exploration: `r4`, `l`, random-member index, branch gate; then branch
//!   draws (migrate: one uniform per dimension; social: scalar `r2` then one
//!   `Z ~ U(−C, C)` per dimension; drift: scalar `r3`); then one Cauchy `p`
//!   per dimension;
//! - EOBL: scalar `F`, then one uniform per out-of-box coordinate in
//!   ascending dimension order;
//! - exploitation: `r4`, `l`; then follow: scalar `p`; competition: `r5`
//!   then `v`.

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

use std::f64::consts::PI;

const PH_EXPLORE: u64 = 1;
const PH_EOBL: u64 = 2;
const PH_EXPLOIT: u64 = 3;

/// Magnitude cap applied to every tangent factor.
pub const DEFAULT_TAN_CLAMP: f64 = 1e3;

/// MGTO parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MgtoParams {
    /// Probability of the migrate-to-random-point exploration branch.
    pub pp: f64,
    /// Exploitation branch threshold on the control value `C`.
    pub w: f64,
    /// Cauchy location `a` of the CICD perturbation.
    pub cauchy_location: f64,
    /// Cauchy scale `b` of the CICD perturbation.
    pub cauchy_scale: f64,
    /// Magnitude cap for tangent factors.
    pub tan_clamp: f64,
}

impl Default for MgtoParams {
    fn default() -> Self {
        MgtoParams {
            pp: 0.03,
            w: 0.8,
            cauchy_location: 0.0,
            cauchy_scale: 1.0,
            tan_clamp: DEFAULT_TAN_CLAMP,
        }
    }
}

impl MgtoParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.pp) {
            return Err(Error::config(format!("mgto pp must lie in [0,1], got {}", self.pp)));
        }
        if !(0.0..=1.0).contains(&self.w) {
            return Err(Error::config(format!("mgto W must lie in [0,1], got {}", self.w)));
        }
        if self.cauchy_scale <= 0.0 {
            return Err(Error::config(format!(
                "mgto cauchy_scale must be positive, got {}",
                self.cauchy_scale
            )));
        }
        if self.tan_clamp <= 0.0 {
            return Err(Error::config(format!(
                "mgto tan_clamp must be positive, got {}",
                self.tan_clamp
            )));
        }
        Ok(())
    }
}

/// Tangent with its magnitude clamped; NaN (unreachable for finite input)
/// maps to the cap.
fn clamped_tan(angle: f64, cap: f64) -> f64 {
    let t = angle.tan();
    if t.is_nan() {
        cap
    } else {
        t.clamp(-cap, cap)
    }
}

/// Cauchy inverse CDF at probability `p`:
/// `a + b·tan(π·(p − 1/2))`, tangent magnitude clamped at `tan_clamp`.
pub fn cauchy_from_p(a: f64, b: f64, p: f64, tan_clamp: f64) -> f64 {
    a + b * clamped_tan(PI * (p - 0.5), tan_clamp)
}

/// Draw one Cauchy(a, b) variate via the inverse CDF with a fresh
/// `p ~ U(0,1)` and the default tangent cap.
pub fn cauchy_sample(a: f64, b: f64, rng: &mut impl Rng) -> Result<f64> {
    if b <= 0.0 {
        return Err(Error::config(format!(
            "cauchy scale must be positive, got {b}"
        )));
    }
    Ok(cauchy_from_p(a, b, rng.gen::<f64>(), DEFAULT_TAN_CLAMP))
}

/// Raw elite opposite before bound repair:
/// `x'_d = f·(pop_min_d + pop_max_d) − x_d`.
pub fn eobl_opposite_raw(
    x: &[f64],
    pop_min: &[f64],
    pop_max: &[f64],
    f: f64,
) -> Result<Vec<f64>> {
    let dims = x.len();
    if pop_min.len() != dims || pop_max.len() != dims {
        return Err(Error::shape(format!(
            "eobl inputs disagree on dims: x {}, pop_min {}, pop_max {}",
            dims,
            pop_min.len(),
            pop_max.len()
        )));
    }
    for d in 0..dims {
        if pop_min[d] > pop_max[d] {
            return Err(Error::config(format!(
                "eobl population bounds inverted in dimension {d}: {} > {}",
                pop_min[d], pop_max[d]
            )));
        }
    }
    Ok((0..dims)
        .map(|d| f * (pop_min[d] + pop_max[d]) - x[d])
        .collect())
}

/// Elite opposite of `x` within the population box `[pop_min, pop_max]`:
/// one fresh `F ~ U(0,1)` scales the reflection, then each coordinate that
/// left the box is resampled uniformly within it (ascending dimension
/// order). The result is finally clamped to the search space.
pub fn eobl_opposite(
    x: &[f64],
    pop_min: &[f64],
    pop_max: &[f64],
    space: &SearchSpace,
    rng: &mut impl Rng,
) -> Result<Position> {
    let f: f64 = rng.gen();
    let mut out = eobl_opposite_raw(x, pop_min, pop_max, f)?;
    for d in 0..out.len() {
        if out[d] < pop_min[d] || out[d] > pop_max[d] {
            out[d] = pop_min[d] + rng.gen::<f64>() * (pop_max[d] - pop_min[d]);
        }
    }
    clamp_to_bounds(&Position::new(out), space)
}

/// Follow-the-silverback kernel with an explicit tangent factor `g`:
/// `x + L·m ⊙ (x − silverback) · g` element-wise.
pub fn mgto_follow_with(
    x: &[f64],
    silverback: &[f64],
    m: &[f64],
    l_value: f64,
    g: f64,
) -> Result<Vec<f64>> {
    let dims = x.len();
    if silverback.len() != dims || m.len() != dims {
        return Err(Error::shape(format!(
            "follow inputs disagree on dims: x {}, silverback {}, m {}",
            dims,
            silverback.len(),
            m.len()
        )));
    }
    Ok((0..dims)
        .map(|d| x[d] + l_value * m[d] * (x[d] - silverback[d]) * g)
        .collect())
}

/// Competition kernel with explicit `q` and tangent factor `tan_v`:
/// `silverback − (silverback·q − x·q) · tan_v` element-wise.
pub fn mgto_compete_with(x: &[f64], silverback: &[f64], q: f64, tan_v: f64) -> Result<Vec<f64>> {
    if silverback.len() != x.len() {
        return Err(Error::shape(format!(
            "competition inputs disagree on dims: x {}, silverback {}",
            x.len(),
            silverback.len()
        )));
    }
    Ok(x.iter()
        .zip(silverback)
        .map(|(&xd, &sd)| sd - (sd * q - xd * q) * tan_v)
        .collect())
}

/// Per-dimension absolute population mean `M_d = |mean_d|`.
pub fn population_mean_abs(population: &[Position]) -> Result<Vec<f64>> {
    let Some(first) = population.first() else {
        return Err(Error::config("population mean requires at least one member"));
    };
    let dims = first.dims();
    let mut mean = vec![0.0f64; dims];
    for p in population {
        if p.dims() != dims {
            return Err(Error::shape("population members disagree on dims".to_string()));
        }
        for d in 0..dims {
            mean[d] += p.coords[d];
        }
    }
    let n = population.len() as f64;
    Ok(mean.into_iter().map(|s| (s / n).abs()).collect())
}

/// Exploitation update. When `c ≥ params.w` the agent follows the silverback
/// (fresh scalar `p` inside the `0.01·tan(π(p−0.5))` factor); otherwise it
/// competes (`Q = 2·r5 − 1`, tangent of a fresh `v·π`).
pub fn mgto_exploit(
    x: &Position,
    silverback: &Position,
    population: &[Position],
    c: f64,
    l_value: f64,
    params: &MgtoParams,
    rng: &mut impl Rng,
) -> Result<Position> {
    let out = if c >= params.w {
        let m = population_mean_abs(population)?;
        let p: f64 = rng.gen();
        let g = 0.01 * clamped_tan(PI * (p - 0.5), params.tan_clamp);
        mgto_follow_with(&x.coords, &silverback.coords, &m, l_value, g)?
    } else {
        let r5: f64 = rng.gen();
        let q = 2.0 * r5 - 1.0;
        let v: f64 = rng.gen();
        let tan_v = clamped_tan(v * PI, params.tan_clamp);
        mgto_compete_with(&x.coords, &silverback.coords, q, tan_v)?
    };
    Ok(Position::new(out))
}

/// Migrate kernel: a uniform point from explicit per-dimension draws,
/// `(upper_d − lower_d)·r1_d + lower_d`.
pub fn mgto_migrate_with(space: &SearchSpace, r1: &[f64]) -> Result<Vec<f64>> {
    if r1.len() != space.dims() {
        return Err(Error::shape(format!(
            "migrate draws have {} dims but space has {}",
            r1.len(),
            space.dims()
        )));
    }
    Ok(space
        .lower()
        .iter()
        .zip(space.upper())
        .zip(r1)
        .map(|((&lo, &hi), &r)| (hi - lo) * r + lo)
        .collect())
}

/// Social kernel: `(r2 − c)·xr + L·h` element-wise, `h` precomputed.
pub fn mgto_social_with(xr: &[f64], c: f64, l_value: f64, h: &[f64], r2: f64) -> Result<Vec<f64>> {
    if h.len() != xr.len() {
        return Err(Error::shape(format!(
            "social inputs disagree on dims: xr {}, h {}",
            xr.len(),
            h.len()
        )));
    }
    Ok(xr
        .iter()
        .zip(h)
        .map(|(&x, &hd)| (r2 - c) * x + l_value * hd)
        .collect())
}

/// Drift kernel: `x − L·(L·(x − xr) + r3·(x − xr))` element-wise.
pub fn mgto_drift_with(x: &[f64], xr: &[f64], l_value: f64, r3: f64) -> Result<Vec<f64>> {
    if xr.len() != x.len() {
        return Err(Error::shape(format!(
            "drift inputs disagree on dims: x {}, xr {}",
            x.len(),
            xr.len()
        )));
    }
    Ok(x.iter()
        .zip(xr)
        .map(|(&xd, &xrd)| {
            let diff = xd - xrd;
            xd - l_value * (l_value * diff + r3 * diff)
        })
        .collect())
}

/// Exploration update: one of the three general branches, clamped to the
/// space. `h_base` is the vector `H = Z ⊙ h_base` is built from (callers
/// pass the agent's current position).
pub fn mgto_explore(
    x: &Position,
    random_member: &Position,
    c: f64,
    l_value: f64,
    h_base: &[f64],
    space: &SearchSpace,
    params: &MgtoParams,
    rng: &mut impl Rng,
) -> Result<Position> {
    if x.dims() != random_member.dims() || x.dims() != h_base.len() {
        return Err(Error::shape(format!(
            "explore inputs disagree on dims: x {}, random member {}, h_base {}",
            x.dims(),
            random_member.dims(),
            h_base.len()
        )));
    }
    let gate: f64 = rng.gen();
    let out = if gate < params.pp {
        let r1: Vec<f64> = (0..space.dims()).map(|_| rng.gen::<f64>()).collect();
        mgto_migrate_with(space, &r1)?
    } else {
        let second: f64 = rng.gen();
        if second >= 0.5 {
            let r2: f64 = rng.gen();
            let h: Vec<f64> = h_base
                .iter()
                .map(|&base| {
                    let z = -c + rng.gen::<f64>() * (2.0 * c);
                    z * base
                })
                .collect();
            mgto_social_with(&random_member.coords, c, l_value, &h, r2)?
        } else {
            let r3: f64 = rng.gen();
            mgto_drift_with(&x.coords, &random_member.coords, l_value, r3)?
        }
    };
    clamp_to_bounds(&Position::new(out), space)
}

/// Control values for one agent-phase: draws `r4` then `l`, returns
/// `(C, L) = (F·(1 − it/max_it), C·l)` with `F = cos(2·r4) + 1`.
fn control_values(it: usize, max_it: usize, rng: &mut impl Rng) -> (f64, f64) {
    let r4: f64 = rng.gen();
    let f = (2.0 * r4).cos() + 1.0;
    let c = f * (1.0 - it as f64 / max_it as f64);
    let l: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    (c, c * l)
}

/// Run MGTO over a plain objective.
pub fn mgto_optimize<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    params: &MgtoParams,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    let mut batch = FnBatch::new(objective);
    mgto_optimize_batch(&mut batch, space, params, budget, seed)
}

/// Run MGTO over a batched objective.
pub fn mgto_optimize_batch(
    objective: &mut dyn BatchObjective,
    space: &SearchSpace,
    params: &MgtoParams,
    budget: &Budget,
    seed: u64,
) -> Result<OptResult> {
    mgto_loop(objective, space, params, budget, seed, |_, _| {})
}

/// MGTO loop with an observer invoked after each iteration (used by tests to
/// verify per-agent greedy monotonicity without widening the public result).
pub(crate) fn mgto_loop(
    objective: &mut dyn BatchObjective,
    space: &SearchSpace,
    params: &MgtoParams,
    budget: &Budget,
    seed: u64,
    mut observer: impl FnMut(usize, &Swarm),
) -> Result<OptResult> {
    params.validate()?;
    let mut non_finite = 0usize;
    let mut guard_clamps = 0usize;
    let pop = budget.population_size;
    let max_it = budget.max_iterations;

    let init = init_population(space, budget, RngStream::for_phase(seed, ITER_INIT, 0, 0));
    let positions: Vec<Position> = init.into_iter().map(|a| a.position).collect();
    let fitness = sanitize_fitness(objective.evaluate_batch(0, &positions), &mut non_finite);
    let mut evaluations = positions.len();
    let mut swarm = Swarm { positions, fitness };

    let (bi, bf) = best_index(&swarm.fitness);
    let mut best_position = swarm.positions[bi].clone();
    let mut best_fitness = bf;

    // Greedy keep: replace agent k only when the candidate is strictly fitter.
    let keep_fitter = |swarm: &mut Swarm, candidates: Vec<Position>, fitness: Vec<f64>| {
        for (k, (pos, fit)) in candidates.into_iter().zip(fitness).enumerate() {
            if fit < swarm.fitness[k] {
                swarm.positions[k] = pos;
                swarm.fitness[k] = fit;
            }
        }
    };

    let mut history = Vec::with_capacity(max_it);
    for it in 1..=max_it {
        // Round 1: exploration with additive Cauchy perturbation.
        let snapshot: Vec<Position> = swarm.positions.clone();
        let mut candidates = Vec::with_capacity(pop);
        for k in 0..pop {
            let mut rng = RngStream::for_phase(seed, it as u64, k as u64, PH_EXPLORE).rng();
            let (c, l_value) = control_values(it, max_it, &mut rng);
            let member = rng.gen_range(0..pop);
            let explored = mgto_explore(
                &snapshot[k],
                &snapshot[member],
                c,
                l_value,
                &snapshot[k].coords,
                space,
                params,
                &mut rng,
            )?;
            let perturbed: Vec<f64> = explored
                .coords
                .iter()
                .map(|&v| {
                    let p: f64 = rng.gen();
                    let step =
                        cauchy_from_p(params.cauchy_location, params.cauchy_scale, p, params.tan_clamp);
                    guard(v + step, &mut guard_clamps)
                })
                .collect();
            candidates.push(clamp_to_bounds(&Position::new(perturbed), space)?);
        }
        let fitness = sanitize_fitness(objective.evaluate_batch(it, &candidates), &mut non_finite);
        evaluations += pop;
        keep_fitter(&mut swarm, candidates, fitness);

        // Round 2: elite opposition within the population box.
        let mut pop_min = vec![f64::INFINITY; space.dims()];
        let mut pop_max = vec![f64::NEG_INFINITY; space.dims()];
        for p in &swarm.positions {
            for d in 0..space.dims() {
                pop_min[d] = pop_min[d].min(p.coords[d]);
                pop_max[d] = pop_max[d].max(p.coords[d]);
            }
        }
        let mut candidates = Vec::with_capacity(pop);
        for k in 0..pop {
            let mut rng = RngStream::for_phase(seed, it as u64, k as u64, PH_EOBL).rng();
            let opposite =
                eobl_opposite(&swarm.positions[k].coords, &pop_min, &pop_max, space, &mut rng)?;
            candidates.push(opposite);
        }
        let fitness = sanitize_fitness(objective.evaluate_batch(it, &candidates), &mut non_finite);
        evaluations += pop;
        keep_fitter(&mut swarm, candidates, fitness);

        // Round 3: exploitation around the silverback.
        let (bi, bf) = best_index(&swarm.fitness);
        if bf < best_fitness {
            best_fitness = bf;
            best_position = swarm.positions[bi].clone();
        }
        let silverback = best_position.clone();
        let snapshot: Vec<Position> = swarm.positions.clone();
        let mut candidates = Vec::with_capacity(pop);
        for k in 0..pop {
            let mut rng = RngStream::for_phase(seed, it as u64, k as u64, PH_EXPLOIT).rng();
            let (c, l_value) = control_values(it, max_it, &mut rng);
            let raw = mgto_exploit(
                &snapshot[k],
                &silverback,
                &snapshot,
                c,
                l_value,
                params,
                &mut rng,
            )?;
            let guarded: Vec<f64> = raw
                .coords
                .iter()
                .map(|&v| guard(v, &mut guard_clamps))
                .collect();
            candidates.push(clamp_to_bounds(&Position::new(guarded), space)?);
        }
        let fitness = sanitize_fitness(objective.evaluate_batch(it, &candidates), &mut non_finite);
        evaluations += pop;
        keep_fitter(&mut swarm, candidates, fitness);

        let (bi, bf) = best_index(&swarm.fitness);
        if bf < best_fitness {
            best_fitness = bf;
            best_position = swarm.positions[bi].clone();
        }
        history.push(IterationRecord {
            best_so_far: best_fitness,
            mean_fitness: mean_fitness(&swarm.fitness),
        });
        observer(it, &swarm);
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
