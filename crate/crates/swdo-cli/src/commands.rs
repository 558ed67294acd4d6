//! The six subcommands. Every command resolves its inputs in the same
//! order — CLI flag, then config-file key, then default (`SWDO_SEED` backs
//! the seed) — runs entirely under its `--out` directory, and embeds the
//! resolved configuration and seed in its JSON report. Wall-clock time goes
//! to a `timing.json` sidecar so the data-bearing artifacts stay
//! byte-reproducible.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use swdo::accept;
use swdo::core::benchmarks::{benchmark, benchmark_space};
use swdo::core::{derive_seed, Budget, IterationRecord, OptResult};
use swdo::dataset::{
    generate_synthetic_sized, kfold_split, load_manifest, pnm, resize_bilinear, train_val_split,
    Image, LabeledImage,
};
use swdo::evalstats::{
    accuracy, comparison_matrix, confusion, f_measure, fixtures, precision, recall, FoldTable,
};
use swdo::minimodel::{self, Batch, ModelConfig};
use swdo::optimizers::{optimize, Algorithm};
use swdo::tuner::{self, write_eval_log_csv, HyperSpace, TuneReport};
use swdo::wavelet::{dwt2_forward, Plane};
use swdo::{Error, Result};

use crate::kv::Kv;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn required<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| {
        Error::config(format!(
            "missing required value: pass --{key} or set {key}= in the config file"
        ))
    })
}

/// Seed resolution: `--seed` flag, then `seed=` config key, then the
/// `SWDO_SEED` environment variable, then 42.
fn resolve_seed(flag: Option<u64>, kv: &mut Kv) -> Result<u64> {
    if let Some(seed) = flag.or(kv.take_parsed("seed")?) {
        return Ok(seed);
    }
    match std::env::var("SWDO_SEED") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Error::config(format!(
                "SWDO_SEED must be an unsigned 64-bit integer, got '{raw}'"
            ))
        }),
        Err(_) => Ok(42),
    }
}

fn ensure_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::data(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

/// Wall-clock sidecar, deliberately separate from the reproducible outputs.
fn write_timing(out: &Path, started: Instant) -> Result<()> {
    #[derive(Serialize)]
    struct Timing {
        wall_seconds: f64,
    }
    write_json(
        &out.join("timing.json"),
        &Timing {
            wall_seconds: started.elapsed().as_secs_f64(),
        },
    )
}

fn csv_error(what: &str) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::data(format!("{what}: {e}"))
}

/// Synthetic generation or manifest loading, resized to `side`×`side`.
fn load_samples(
    synthetic: Option<usize>,
    manifest: Option<&Path>,
    side: usize,
    seed: u64,
) -> Result<Vec<LabeledImage>> {
    match (synthetic, manifest) {
        (Some(n), None) => generate_synthetic_sized(n, side, seed),
        (None, Some(path)) => load_manifest(path)?
            .into_iter()
            .map(|s| {
                Ok(LabeledImage {
                    image: resize_bilinear(&s.image, side, side)?,
                    label: s.label,
                    source_id: s.source_id,
                })
            })
            .collect(),
        (Some(_), Some(_)) => Err(Error::config(
            "provide either --synthetic or --manifest, not both",
        )),
        (None, None) => Err(Error::config(
            "no dataset: provide --synthetic <n> or --manifest <csv>",
        )),
    }
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct BenchArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Optimizer: fox, gwo, igwo, or mgto.
    #[arg(long)]
    pub algo: Option<String>,
    /// Benchmark function: sphere, rastrigin, rosenbrock, or ackley.
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// Search-space dimensionality [default: 10].
    #[arg(long)]
    pub dims: Option<usize>,
    /// Population size [default: 30].
    #[arg(long)]
    pub pop: Option<usize>,
    /// Iteration count [default: 500].
    #[arg(long)]
    pub iters: Option<usize>,
    /// Master seed [default: SWDO_SEED, then 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for history.csv, report.json, timing.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn history_csv(history: &[IterationRecord]) -> Result<Vec<u8>> {
    let err = csv_error("history.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "best", "mean"]).map_err(&err)?;
    for (i, record) in history.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            record.best_so_far.to_string(),
            record.mean_fitness.to_string(),
        ])
        .map_err(&err)?;
    }
    w.into_inner()
        .map_err(|e| Error::data(format!("history.csv: {e}")))
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let started = Instant::now();
    let mut kv = Kv::load(args.config.as_deref())?;
    let algo: Algorithm = required(args.algo.or(kv.take("algo")), "algo")?.parse()?;
    let function = required(args.function.or(kv.take("fn")), "fn")?;
    let dims = args.dims.or(kv.take_parsed("dims")?).unwrap_or(10);
    let pop = args.pop.or(kv.take_parsed("pop")?).unwrap_or(30);
    let iters = args.iters.or(kv.take_parsed("iters")?).unwrap_or(500);
    let seed = resolve_seed(args.seed, &mut kv)?;
    kv.finish()?;

    let space = benchmark_space(&function, dims)?;
    let budget = Budget::new(pop, iters)?;
    let name = function.clone();
    let objective = move |x: &[f64]| benchmark(&name, x).expect("name validated by benchmark_space");
    let result = optimize(algo, &objective, &space, &budget, seed)?;

    #[derive(Serialize)]
    struct Config<'a> {
        algorithm: &'a str,
        function: &'a str,
        dims: usize,
        population: usize,
        iterations: usize,
        seed: u64,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        command: &'static str,
        config: Config<'a>,
        result: &'a OptResult,
    }
    ensure_out(&args.out)?;
    write_bytes(&args.out.join("history.csv"), &history_csv(&result.history)?)?;
    write_json(
        &args.out.join("report.json"),
        &Report {
            command: "bench",
            config: Config {
                algorithm: algo.name(),
                function: &function,
                dims,
                population: pop,
                iterations: iters,
                seed,
            },
            result: &result,
        },
    )?;
    write_timing(&args.out, started)?;
    println!(
        "bench {algo} on {function}: best fitness {:e} after {} evaluations",
        result.best_fitness, result.evaluations
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// dwt
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct DwtArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Grayscale PGM (P5) input with even width and height.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory for ll/lh/hl/hh.pgm, energies.json, timing.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Affine 8-bit rescale; returns the bytes plus the recorded (offset, scale)
/// such that a pixel value v maps to `round(255·(v − offset)/scale)`.
fn rescale_to_u8(plane: &Plane) -> (Vec<u8>, f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in plane.values() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let scale = hi - lo;
    let bytes = plane
        .values()
        .iter()
        .map(|&v| {
            if scale > 0.0 {
                ((v - lo) / scale * 255.0).round() as u8
            } else {
                0
            }
        })
        .collect();
    (bytes, lo, scale)
}

pub fn dwt(args: DwtArgs) -> Result<()> {
    let started = Instant::now();
    let mut kv = Kv::load(args.config.as_deref())?;
    let input = required(
        args.input.or(kv.take("input").map(PathBuf::from)),
        "input",
    )?;
    kv.finish()?;

    let raw = pnm::read_file(&input)?;
    if raw.channels != 1 {
        return Err(Error::data(format!(
            "{} has {} channels; provide a grayscale PGM",
            input.display(),
            raw.channels
        )));
    }
    let plane = Image::from_raw(&raw)?.channel_plane(0);
    let bands = dwt2_forward(&plane)?;

    #[derive(Serialize)]
    struct BandInfo {
        energy: f64,
        offset: f64,
        scale: f64,
    }
    ensure_out(&args.out)?;
    let mut infos = BTreeMap::new();
    for (name, band) in [
        ("ll", &bands.ll),
        ("lh", &bands.lh),
        ("hl", &bands.hl),
        ("hh", &bands.hh),
    ] {
        let (bytes, offset, scale) = rescale_to_u8(band);
        pnm::write_file(
            &args.out.join(format!("{name}.pgm")),
            &pnm::RawImage {
                channels: 1,
                height: band.height(),
                width: band.width(),
                data: bytes,
            },
        )?;
        infos.insert(
            name,
            BandInfo {
                energy: band.energy(),
                offset,
                scale,
            },
        );
    }
    #[derive(Serialize)]
    struct Energies<'a> {
        command: &'static str,
        input: String,
        input_energy: f64,
        band_energy_sum: f64,
        bands: BTreeMap<&'a str, BandInfo>,
    }
    write_json(
        &args.out.join("energies.json"),
        &Energies {
            command: "dwt",
            input: input.display().to_string(),
            input_energy: plane.energy(),
            band_energy_sum: bands.energy(),
            bands: infos,
        },
    )?;
    write_timing(&args.out, started)?;
    println!(
        "dwt: wrote four {}×{} sub-bands to {}",
        bands.ll.height(),
        bands.ll.width(),
        args.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct TrainArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Generate a synthetic dataset with this many samples.
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Square image side for generation / manifest resizing [default: 32].
    #[arg(long)]
    pub size: Option<usize>,
    /// CSV manifest (filename,label) of PGM/PPM images.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Cross-validate over k folds instead of one 15% holdout.
    #[arg(long)]
    pub kfold: Option<usize>,
    /// Master seed [default: SWDO_SEED, then 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Convolution filter count [default: desk mid-box].
    #[arg(long)]
    pub filters: Option<usize>,
    /// Odd convolution kernel size [default: desk mid-box].
    #[arg(long)]
    pub kernel: Option<usize>,
    /// Learning rate [default: desk mid-box].
    #[arg(long)]
    pub lr: Option<f64>,
    /// L2 regularization weight [default: desk mid-box].
    #[arg(long)]
    pub l2: Option<f64>,
    /// L1 regularization weight [default: desk mid-box].
    #[arg(long)]
    pub l1: Option<f64>,
    /// Minibatch size [default: desk mid-box].
    #[arg(long)]
    pub batch: Option<usize>,
    /// Epoch count [default: desk mid-box].
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Attention regularization weight [default: desk mid-box].
    #[arg(long)]
    pub att_reg: Option<f64>,
    /// Output directory for metrics.csv, report.json, timing.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct FoldRow {
    fold: String,
    accuracy: f64,
    precision: f64,
    recall: f64,
    f_measure: f64,
    best_epoch: usize,
    best_val_accuracy: f64,
}

/// Train on `train_idx`, then score the held-out samples with the
/// best-epoch weights.
fn run_fold(
    label: String,
    samples: &[LabeledImage],
    train_idx: &[usize],
    eval_idx: &[usize],
    config: &ModelConfig,
    seed: u64,
) -> Result<FoldRow> {
    let train_set: Vec<LabeledImage> = train_idx.iter().map(|&i| samples[i].clone()).collect();
    let eval_set: Vec<LabeledImage> = eval_idx.iter().map(|&i| samples[i].clone()).collect();
    let result = minimodel::train(config, &train_set, &eval_set, seed)?;
    let refs: Vec<&LabeledImage> = eval_set.iter().collect();
    let probs = minimodel::forward(&result.weights, &Batch::from_samples(&refs)?)?;
    let labels: Vec<u8> = eval_set.iter().map(|s| s.label).collect();
    let counts = confusion(&probs, &labels, 0.5)?;
    Ok(FoldRow {
        fold: label,
        accuracy: accuracy(&counts).value,
        precision: precision(&counts).value,
        recall: recall(&counts).value,
        f_measure: f_measure(&counts).value,
        best_epoch: result.best_epoch,
        best_val_accuracy: result.best_val_accuracy,
    })
}

pub fn train(args: TrainArgs) -> Result<()> {
    let started = Instant::now();
    let mut kv = Kv::load(args.config.as_deref())?;
    let synthetic = args.synthetic.or(kv.take_parsed("synthetic")?);
    let manifest = args.manifest.or(kv.take("manifest").map(PathBuf::from));
    let size = args.size.or(kv.take_parsed("size")?).unwrap_or(32);
    let kfold = args.kfold.or(kv.take_parsed("kfold")?);
    let seed = resolve_seed(args.seed, &mut kv)?;
    let defaults = HyperSpace::desk().mid_box_default();
    let config = ModelConfig {
        filters_size: args
            .filters
            .or(kv.take_parsed("filters")?)
            .unwrap_or(defaults.filters_size),
        kernel_size: args
            .kernel
            .or(kv.take_parsed("kernel")?)
            .unwrap_or(defaults.kernel_size),
        lr: args.lr.or(kv.take_parsed("lr")?).unwrap_or(defaults.lr),
        l2_reg: args.l2.or(kv.take_parsed("l2")?).unwrap_or(defaults.l2_reg),
        l1_reg: args.l1.or(kv.take_parsed("l1")?).unwrap_or(defaults.l1_reg),
        batch_size: args
            .batch
            .or(kv.take_parsed("batch")?)
            .unwrap_or(defaults.batch_size),
        epochs: args
            .epochs
            .or(kv.take_parsed("epochs")?)
            .unwrap_or(defaults.epochs),
        att_reg_weight: args
            .att_reg
            .or(kv.take_parsed("att_reg")?)
            .unwrap_or(defaults.att_reg_weight),
    };
    kv.finish()?;
    let samples = load_samples(synthetic, manifest.as_deref(), size, seed)?;

    let mut rows = Vec::new();
    match kfold {
        None => {
            let indices: Vec<usize> = (0..samples.len()).collect();
            let (train_idx, val_idx) = train_val_split(&indices, 0.15, seed)?;
            rows.push(run_fold(
                "holdout".to_string(),
                &samples,
                &train_idx,
                &val_idx,
                &config,
                seed,
            )?);
        }
        Some(k) => {
            let plan = kfold_split(samples.len(), k, seed)?;
            for fold in 0..k {
                rows.push(run_fold(
                    fold.to_string(),
                    &samples,
                    &plan.train_indices(fold),
                    &plan.fold_indices(fold),
                    &config,
                    derive_seed(seed, fold as u64, 1),
                )?);
            }
        }
    }

    let err = csv_error("metrics.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["fold", "accuracy", "precision", "recall", "f_measure"])
        .map_err(&err)?;
    for row in &rows {
        w.write_record([
            row.fold.clone(),
            row.accuracy.to_string(),
            row.precision.to_string(),
            row.recall.to_string(),
            row.f_measure.to_string(),
        ])
        .map_err(&err)?;
    }
    let metrics = w
        .into_inner()
        .map_err(|e| Error::data(format!("metrics.csv: {e}")))?;

    #[derive(Serialize)]
    struct DataConfig {
        synthetic: Option<usize>,
        manifest: Option<String>,
        size: usize,
        kfold: Option<usize>,
        seed: u64,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        command: &'static str,
        config: DataConfig,
        model: &'a ModelConfig,
        folds: &'a [FoldRow],
    }
    ensure_out(&args.out)?;
    write_bytes(&args.out.join("metrics.csv"), &metrics)?;
    write_json(
        &args.out.join("report.json"),
        &Report {
            command: "train",
            config: DataConfig {
                synthetic,
                manifest: manifest.map(|p| p.display().to_string()),
                size,
                kfold,
                seed,
            },
            model: &config,
            folds: &rows,
        },
    )?;
    write_timing(&args.out, started)?;
    let mean_acc = rows.iter().map(|r| r.accuracy).sum::<f64>() / rows.len() as f64;
    println!(
        "train: {} fold(s), mean held-out accuracy {mean_acc:.4}",
        rows.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct TuneArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Optimizer: fox, gwo, igwo, or mgto.
    #[arg(long)]
    pub algo: Option<String>,
    /// Generate a synthetic dataset with this many samples.
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Square image side for generation / manifest resizing [default: 32].
    #[arg(long)]
    pub size: Option<usize>,
    /// CSV manifest (filename,label) of PGM/PPM images.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Population size [default: 6].
    #[arg(long)]
    pub pop: Option<usize>,
    /// Iteration count [default: 8].
    #[arg(long)]
    pub iters: Option<usize>,
    /// Master seed [default: SWDO_SEED, then 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Hyperparameter bounds: desk (small models) or table (full-scale).
    #[arg(long)]
    pub space: Option<String>,
    /// Output directory for evaluations.csv, tune_report.json, timing.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn tune(args: TuneArgs) -> Result<()> {
    let started = Instant::now();
    let mut kv = Kv::load(args.config.as_deref())?;
    let algo: Algorithm = required(args.algo.or(kv.take("algo")), "algo")?.parse()?;
    let synthetic = args.synthetic.or(kv.take_parsed("synthetic")?);
    let manifest = args.manifest.or(kv.take("manifest").map(PathBuf::from));
    let size = args.size.or(kv.take_parsed("size")?).unwrap_or(32);
    let pop = args.pop.or(kv.take_parsed("pop")?).unwrap_or(6);
    let iters = args.iters.or(kv.take_parsed("iters")?).unwrap_or(8);
    let space_name = args
        .space
        .or(kv.take("space"))
        .unwrap_or_else(|| "desk".to_string());
    let seed = resolve_seed(args.seed, &mut kv)?;
    kv.finish()?;

    let space = match space_name.as_str() {
        "desk" => HyperSpace::desk(),
        "table" => HyperSpace::table(),
        other => {
            return Err(Error::config(format!(
                "unknown search space '{other}' (want desk or table)"
            )))
        }
    };
    let samples = load_samples(synthetic, manifest.as_deref(), size, seed)?;
    let budget = Budget::new(pop, iters)?;
    let report = tuner::tune(algo, &samples, &space, &budget, seed)?;

    let mut log_csv = Vec::new();
    write_eval_log_csv(&report.log, &mut log_csv)?;

    #[derive(Serialize)]
    struct Config {
        algorithm: String,
        synthetic: Option<usize>,
        manifest: Option<String>,
        size: usize,
        population: usize,
        iterations: usize,
        space: String,
        seed: u64,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        command: &'static str,
        config: Config,
        result: &'a TuneReport,
    }
    ensure_out(&args.out)?;
    write_bytes(&args.out.join("evaluations.csv"), &log_csv)?;
    write_json(
        &args.out.join("tune_report.json"),
        &Report {
            command: "tune",
            config: Config {
                algorithm: algo.name().to_string(),
                synthetic,
                manifest: manifest.map(|p| p.display().to_string()),
                size,
                population: pop,
                iterations: iters,
                space: space_name,
                seed,
            },
            result: &report,
        },
    )?;
    write_timing(&args.out, started)?;
    println!(
        "tune {algo}: best validation accuracy {:.4} ({} evaluations, {} cache hits, {} failures)",
        1.0 - report.best_fitness,
        report.evaluations,
        report.cache_hits,
        report.failures.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct StatsArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Bundled fold table: isic2016 or isic2017.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Fold-table CSV (model,fold1..foldK) to analyze instead of a fixture.
    #[arg(long)]
    pub folds: Option<PathBuf>,
    /// Output directory for ttests.csv, report.json, timing.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn stats(args: StatsArgs) -> Result<()> {
    let started = Instant::now();
    let mut kv = Kv::load(args.config.as_deref())?;
    let fixture = args.fixture.or(kv.take("fixture"));
    let folds = args.folds.or(kv.take("folds").map(PathBuf::from));
    kv.finish()?;

    let (table, source) = match (fixture, folds) {
        (Some(name), None) => match name.as_str() {
            "isic2016" => (fixtures::isic2016_folds(), "fixture:isic2016".to_string()),
            "isic2017" => (fixtures::isic2017_folds(), "fixture:isic2017".to_string()),
            other => {
                return Err(Error::config(format!(
                    "unknown fixture '{other}' (want isic2016 or isic2017)"
                )))
            }
        },
        (None, Some(path)) => (
            FoldTable::from_csv_path(&path)?,
            path.display().to_string(),
        ),
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "provide either --fixture or --folds, not both",
            ))
        }
        (None, None) => {
            return Err(Error::config(
                "no fold table: provide --fixture <name> or --folds <csv>",
            ))
        }
    };
    let matrix = comparison_matrix(&table)?;
    let models = table.models();

    let err = csv_error("ttests.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model_a", "model_b", "statistic", "p_value"])
        .map_err(&err)?;
    for (i, row) in matrix.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            w.write_record([
                models[i].clone(),
                models[j].clone(),
                cell.statistic.to_string(),
                cell.p_value.to_string(),
            ])
            .map_err(&err)?;
        }
    }
    let csv_bytes = w
        .into_inner()
        .map_err(|e| Error::data(format!("ttests.csv: {e}")))?;

    #[derive(Serialize)]
    struct Config {
        source: String,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        command: &'static str,
        config: Config,
        models: &'a [String],
        fold_count: usize,
    }
    ensure_out(&args.out)?;
    write_bytes(&args.out.join("ttests.csv"), &csv_bytes)?;
    write_json(
        &args.out.join("report.json"),
        &Report {
            command: "stats",
            config: Config { source },
            models,
            fold_count: table.fold_count(),
        },
    )?;
    write_timing(&args.out, started)?;
    println!(
        "stats: wrote the {n}×{n} pairwise matrix to {}",
        args.out.display(),
        n = models.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct ReproduceArgs {
    /// Emit a machine-readable JSON object instead of the table.
    #[arg(long)]
    pub json: bool,
}

/// Run the full release gate; exit code 0 only when every criterion passes.
pub fn reproduce(args: ReproduceArgs) -> Result<i32> {
    let reports = accept::run_all();
    let passed = reports.iter().filter(|r| r.passed).count();
    if args.json {
        #[derive(Serialize)]
        struct Out<'a> {
            criteria: &'a [accept::CriterionReport],
            passed: usize,
            total: usize,
        }
        let text = serde_json::to_string_pretty(&Out {
            criteria: &reports,
            passed,
            total: reports.len(),
        })
        .map_err(|e| Error::data(format!("serializing results: {e}")))?;
        println!("{text}");
    } else {
        for report in &reports {
            println!("{}", report.summary_line());
        }
        println!("{passed}/{} criteria passed", reports.len());
    }
    Ok(if passed == reports.len() { 0 } else { 3 })
}
