//! Hyperparameter search: the eight model dimensions encoded as a unit box
//! that any of the swarm optimizers can move through.
//!
//! Layout of the eight dimensions (fixed order everywhere — positions, CSV
//! columns, decode):
//!
//! | # | dimension       | treatment                 |
//! |---|-----------------|---------------------------|
//! | 0 | filters_size    | integer                   |
//! | 1 | kernel_size     | integer, forced odd (up)  |
//! | 2 | lr              | log₁₀                     |
//! | 3 | l2_reg          | log₁₀                     |
//! | 4 | l1_reg          | log₁₀                     |
//! | 5 | batch_size      | integer                   |
//! | 6 | epochs          | integer                   |
//! | 7 | att_reg_weight  | log₁₀                     |
//!
//! Determinism contract: one training run per distinct decoded config, its
//! seed derived from `(master seed, iteration, agent slot)`. Decoding and
//! cache bookkeeping happen sequentially in slot order before the training
//! runs are handed to rayon, so results do not depend on the worker count.
//! A config seen again (same canonical key) is served from the cache; its
//! log row carries the seed that actually produced the cached fitness, so
//! every `(config, fitness, seed)` row is a true statement about `fitness`.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::{derive_seed, Budget, IterationRecord, OptResult, Position, SearchSpace};
use crate::dataset::{train_val_split, LabeledImage};
use crate::error::{Error, Result};
use crate::minimodel::{train, ConfigBounds, ModelConfig};
use crate::optimizers::{optimize, optimize_batch, Algorithm, BatchObjective};

/// Number of tuned dimensions.
pub const DIMS: usize = 8;

/// Validation share of the tuning split.
pub const VAL_FRACTION: f64 = 0.15;

/// Column order of the evaluation-log CSV.
pub const EVAL_LOG_HEADER: [&str; 12] = [
    "iteration", "agent", "filters", "kernel", "lr", "l2", "l1", "batch", "epochs", "att_reg",
    "fitness", "seed",
];

/// The 8-dimensional hyperparameter box with its scale and rounding masks.
///
/// Integer mask: {filters_size, kernel_size, batch_size, epochs}; log₁₀ mask:
/// {lr, l2_reg, l1_reg, att_reg_weight}. The masks are structural — only the
/// bounds vary between the published table and the desk-scale box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperSpace {
    bounds: ConfigBounds,
}

impl HyperSpace {
    /// The published tuning ranges.
    pub fn table() -> Self {
        HyperSpace {
            bounds: ConfigBounds::full_scale(),
        }
    }

    /// The reduced box used for desk-scale end-to-end runs (32×32 inputs,
    /// minutes not hours). Kernels start at 9 so the attention layer sees at
    /// most 144 tokens, and the learning-rate decade [1e-2, 1e-1] is where a
    /// ≤5-epoch budget can actually move the loss.
    pub fn desk() -> Self {
        HyperSpace {
            bounds: ConfigBounds {
                filters: (2, 3),
                kernel: (9, 13),
                lr: (1e-2, 1e-1),
                l2: (1e-7, 1e-4),
                l1: (1e-7, 1e-4),
                batch: (8, 32),
                epochs: (3, 5),
                att_reg: (1e-7, 1e-5),
            },
        }
    }

    /// A custom box. Bounds must be strictly ordered, log-scale dimensions
    /// strictly positive, and the kernel bounds odd (decode rounds kernels up
    /// to the next odd integer, which must not escape the box).
    pub fn new(bounds: ConfigBounds) -> Result<Self> {
        for (name, (lo, hi)) in [
            ("filters_size", bounds.filters),
            ("kernel_size", bounds.kernel),
            ("batch_size", bounds.batch),
            ("epochs", bounds.epochs),
        ] {
            if lo < 1 || lo >= hi {
                return Err(Error::config(format!(
                    "{name} bounds [{lo}, {hi}] must satisfy 1 ≤ lo < hi"
                )));
            }
        }
        if bounds.kernel.0 % 2 == 0 || bounds.kernel.1 % 2 == 0 {
            return Err(Error::config(format!(
                "kernel bounds [{}, {}] must both be odd",
                bounds.kernel.0, bounds.kernel.1
            )));
        }
        for (name, (lo, hi)) in [
            ("lr", bounds.lr),
            ("l2_reg", bounds.l2),
            ("l1_reg", bounds.l1),
            ("att_reg_weight", bounds.att_reg),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
                return Err(Error::config(format!(
                    "{name} bounds [{lo}, {hi}] must satisfy 0 < lo < hi (log scale)"
                )));
            }
        }
        Ok(HyperSpace { bounds })
    }

    pub fn bounds(&self) -> &ConfigBounds {
        &self.bounds
    }

    /// The normalized search box the optimizers actually move through.
    pub fn encode_space(&self) -> SearchSpace {
        SearchSpace::cube(DIMS, 0.0, 1.0).expect("unit box is a valid search space")
    }

    /// Map a normalized position to a concrete config.
    ///
    /// Out-of-box coordinates are clamped to [0,1] first and flagged; the
    /// corners land exactly on the bound values. Integer dimensions round
    /// half up; the kernel additionally rounds up to the next odd integer.
    pub fn decode(&self, coords: &[f64]) -> Result<Decoded> {
        if coords.len() != DIMS {
            return Err(Error::shape(format!(
                "position has {} coordinates, expected {DIMS}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|v| !v.is_finite()) {
            return Err(Error::numerical(format!(
                "non-finite coordinate {bad} in tuner position"
            )));
        }
        let mut clamped = false;
        let mut t = [0.0; DIMS];
        for (out, &v) in t.iter_mut().zip(coords) {
            *out = v.clamp(0.0, 1.0);
            if *out != v {
                clamped = true;
            }
        }
        let b = &self.bounds;
        let config = ModelConfig {
            filters_size: int_lerp(b.filters, t[0]),
            kernel_size: odd_up(int_lerp(b.kernel, t[1])),
            lr: log_lerp(b.lr, t[2]),
            l2_reg: log_lerp(b.l2, t[3]),
            l1_reg: log_lerp(b.l1, t[4]),
            batch_size: int_lerp(b.batch, t[5]),
            epochs: int_lerp(b.epochs, t[6]),
            att_reg_weight: log_lerp(b.att_reg, t[7]),
        };
        Ok(Decoded { config, clamped })
    }

    /// The fixed mid-box default config (every coordinate at 0.5).
    pub fn mid_box_default(&self) -> ModelConfig {
        self.decode(&[0.5; DIMS])
            .expect("interior point always decodes")
            .config
    }
}

/// Result of decoding one position.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub config: ModelConfig,
    /// True when at least one coordinate had to be clamped into [0,1].
    pub clamped: bool,
}

/// Linear map onto an integer range with round-half-up.
fn int_lerp((lo, hi): (usize, usize), t: f64) -> usize {
    if t <= 0.0 {
        return lo;
    }
    if t >= 1.0 {
        return hi;
    }
    let v = lo as f64 + t * (hi as f64 - lo as f64);
    (v + 0.5).floor() as usize
}

/// Round up to the next odd integer (5 stays 5, 6 becomes 7).
fn odd_up(v: usize) -> usize {
    if v % 2 == 0 {
        v + 1
    } else {
        v
    }
}

/// Log₁₀-linear map: the exponent interpolates between the bound exponents.
fn log_lerp((lo, hi): (f64, f64), t: f64) -> f64 {
    if t <= 0.0 {
        return lo;
    }
    if t >= 1.0 {
        return hi;
    }
    10f64.powf(lo.log10() + t * (hi.log10() - lo.log10()))
}

/// The frozen 85/15 tuning split of a sample set.
#[derive(Clone, Debug)]
pub struct TuneDataset {
    train: Vec<LabeledImage>,
    val: Vec<LabeledImage>,
}

/// Stream tag for the split shuffle, outside the (iteration, agent) range
/// used for per-training seeds.
const SPLIT_TAG: u64 = u64::MAX;

impl TuneDataset {
    /// Split `samples` 85/15 with a shuffle derived from the master seed.
    pub fn split(samples: &[LabeledImage], master_seed: u64) -> Result<Self> {
        let indices: Vec<usize> = (0..samples.len()).collect();
        let (tr, va) = train_val_split(
            &indices,
            VAL_FRACTION,
            derive_seed(master_seed, SPLIT_TAG, SPLIT_TAG),
        )?;
        Ok(TuneDataset {
            train: tr.iter().map(|&i| samples[i].clone()).collect(),
            val: va.iter().map(|&i| samples[i].clone()).collect(),
        })
    }

    pub fn train_samples(&self) -> &[LabeledImage] {
        &self.train
    }

    pub fn val_samples(&self) -> &[LabeledImage] {
        &self.val
    }
}

/// The training seed an agent in `slot` receives at `iteration`. The mid-box
/// default comparison trains with `training_seed(master, 0, 0)` so it runs
/// under exactly the conditions of an initial-population agent.
pub fn training_seed(master_seed: u64, iteration: usize, slot: usize) -> u64 {
    derive_seed(master_seed, iteration as u64, slot as u64)
}

/// 1 − best validation accuracy of `config` trained with `seed`; training
/// failures yield `+∞` together with the cause.
pub fn fitness(config: &ModelConfig, data: &TuneDataset, seed: u64) -> (f64, Option<String>) {
    match train(config, &data.train, &data.val, seed) {
        Ok(result) => (1.0 - result.best_val_accuracy, None),
        Err(e) => (f64::INFINITY, Some(e.to_string())),
    }
}

/// One requested evaluation. `cached` marks rows served from the config
/// cache; their seed is the one that produced the cached fitness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub iteration: usize,
    pub agent: usize,
    pub config: ModelConfig,
    pub fitness: f64,
    pub seed: u64,
    pub cached: bool,
    /// True when the optimizer handed decode an out-of-box coordinate.
    pub clamped: bool,
}

/// Full tuning output: the winning config plus the complete audit trail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub algorithm: Algorithm,
    pub best_config: ModelConfig,
    /// Minimum fitness over the whole evaluation log.
    pub best_fitness: f64,
    /// Per-iteration (best-so-far, population mean) records.
    pub history: Vec<IterationRecord>,
    /// Every requested evaluation, in request order (cache hits included).
    pub log: Vec<EvalRecord>,
    pub evaluations: usize,
    pub cache_hits: usize,
    /// Human-readable causes of training failures (fitness +∞ rows).
    pub failures: Vec<String>,
    pub seed: u64,
}

struct CacheEntry {
    fitness: f64,
    seed: u64,
}

struct Job {
    config: ModelConfig,
    key: String,
    seed: u64,
    owner_slot: usize,
}

struct TuneObjective<'a> {
    space: &'a HyperSpace,
    data: &'a TuneDataset,
    master_seed: u64,
    cache: HashMap<String, CacheEntry>,
    log: Vec<EvalRecord>,
    cache_hits: usize,
    failures: Vec<String>,
}

enum Plan {
    /// Served from the cross-batch cache.
    Hit { config: ModelConfig, clamped: bool },
    /// Waits for `jobs[index]`; `owner` marks the slot that requested it.
    Pending { job: usize, clamped: bool },
}

impl BatchObjective for TuneObjective<'_> {
    fn evaluate_batch(&mut self, iteration: usize, positions: &[Position]) -> Vec<f64> {
        // Sequential planning pass in slot order: decode, consult the cache,
        // and deduplicate within the batch, so the set of training runs (and
        // therefore every result) is independent of rayon's worker count.
        let mut plans = Vec::with_capacity(positions.len());
        let mut jobs: Vec<Job> = Vec::new();
        let mut batch_keys: HashMap<String, usize> = HashMap::new();
        for (slot, position) in positions.iter().enumerate() {
            let decoded = self
                .space
                .decode(&position.coords)
                .expect("optimizer positions are finite and 8-dimensional");
            let key = decoded.config.canonical_key();
            if self.cache.contains_key(&key) {
                plans.push(Plan::Hit {
                    config: decoded.config,
                    clamped: decoded.clamped,
                });
            } else if let Some(&job) = batch_keys.get(&key) {
                plans.push(Plan::Pending {
                    job,
                    clamped: decoded.clamped,
                });
            } else {
                batch_keys.insert(key.clone(), jobs.len());
                plans.push(Plan::Pending {
                    job: jobs.len(),
                    clamped: decoded.clamped,
                });
                jobs.push(Job {
                    key,
                    seed: training_seed(self.master_seed, iteration, slot),
                    owner_slot: slot,
                    config: decoded.config,
                });
            }
        }

        // Parallel phase: one training per distinct new config.
        let results: Vec<(f64, Option<String>)> = jobs
            .par_iter()
            .map(|job| fitness(&job.config, self.data, job.seed))
            .collect();

        // Sequential finish: fill the cache, record failures, write the log.
        for (job, (value, cause)) in jobs.iter().zip(&results) {
            self.cache.insert(
                job.key.clone(),
                CacheEntry {
                    fitness: *value,
                    seed: job.seed,
                },
            );
            if let Some(cause) = cause {
                self.failures.push(format!(
                    "iteration {iteration} agent {}: {cause}",
                    job.owner_slot
                ));
            }
        }
        let mut out = Vec::with_capacity(positions.len());
        for (slot, plan) in plans.into_iter().enumerate() {
            let (config, value, seed, cached, clamped) = match plan {
                Plan::Hit { config, clamped } => {
                    let entry = &self.cache[&config.canonical_key()];
                    (config, entry.fitness, entry.seed, true, clamped)
                }
                Plan::Pending { job, clamped } => {
                    let j = &jobs[job];
                    let cached = j.owner_slot != slot;
                    (j.config.clone(), results[job].0, j.seed, cached, clamped)
                }
            };
            if cached {
                self.cache_hits += 1;
            }
            self.log.push(EvalRecord {
                iteration,
                agent: slot,
                config,
                fitness: value,
                seed,
                cached,
                clamped,
            });
            out.push(value);
        }
        out
    }
}

/// Drive `algorithm` over the hyperparameter box, training one model per
/// distinct evaluated config on the 85/15 split of `samples`.
pub fn tune(
    algorithm: Algorithm,
    samples: &[LabeledImage],
    space: &HyperSpace,
    budget: &Budget,
    master_seed: u64,
) -> Result<TuneReport> {
    let data = TuneDataset::split(samples, master_seed)?;
    let mut objective = TuneObjective {
        space,
        data: &data,
        master_seed,
        cache: HashMap::new(),
        log: Vec::new(),
        cache_hits: 0,
        failures: Vec::new(),
    };
    let result = optimize_batch(
        algorithm,
        &mut objective,
        &space.encode_space(),
        budget,
        master_seed,
    )?;

    let TuneObjective {
        log,
        cache_hits,
        failures,
        ..
    } = objective;
    let best = log
        .iter()
        .min_by(|a, b| a.fitness.total_cmp(&b.fitness))
        .ok_or_else(|| Error::numerical("tuning produced an empty evaluation log"))?;
    if best.fitness != result.best_fitness {
        return Err(Error::numerical(format!(
            "optimizer best {} disagrees with evaluation-log minimum {}",
            result.best_fitness, best.fitness
        )));
    }
    if log.len() != result.evaluations {
        return Err(Error::numerical(format!(
            "evaluation log has {} rows but the optimizer reports {} evaluations",
            log.len(),
            result.evaluations
        )));
    }
    Ok(TuneReport {
        algorithm,
        best_config: best.config.clone(),
        best_fitness: best.fitness,
        history: result.history,
        evaluations: result.evaluations,
        cache_hits,
        failures,
        log,
        seed: master_seed,
    })
}

/// Surrogate mode: the quadratic bowl Σ(x−0.5)² over the unit box, optimum
/// at the center with value 0. Exercises the whole search plumbing without
/// any training runs.
pub fn tune_surrogate(algorithm: Algorithm, budget: &Budget, seed: u64) -> Result<OptResult> {
    let space = SearchSpace::cube(DIMS, 0.0, 1.0)?;
    let bowl = |x: &[f64]| x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>();
    optimize(algorithm, &bowl, &space, budget, seed)
}

/// Write the evaluation log as CSV with the fixed column order
/// `iteration,agent,filters,kernel,lr,l2,l1,batch,epochs,att_reg,fitness,seed`.
///
/// Floats use Rust's shortest round-trip formatting; `+∞` fitness values
/// (failed trainings) appear as `inf`.
pub fn write_eval_log_csv<W: Write>(log: &[EvalRecord], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let map_err = |e: csv::Error| Error::data(format!("evaluation-log csv: {e}"));
    csv.write_record(EVAL_LOG_HEADER).map_err(map_err)?;
    for r in log {
        let c = &r.config;
        csv.write_record([
            r.iteration.to_string(),
            r.agent.to_string(),
            c.filters_size.to_string(),
            c.kernel_size.to_string(),
            c.lr.to_string(),
            c.l2_reg.to_string(),
            c.l1_reg.to_string(),
            c.batch_size.to_string(),
            c.epochs.to_string(),
            c.att_reg_weight.to_string(),
            r.fitness.to_string(),
            r.seed.to_string(),
        ])
        .map_err(map_err)?;
    }
    csv.flush().map_err(|e| Error::data(format!("evaluation-log csv: {e}")))?;
    Ok(())
}
