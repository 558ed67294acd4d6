//! A small, from-scratch trainable classifier with exact analytic gradients:
//! valid convolution → ReLU → single-level sub-band layer → single-head
//! scaled dot-product attention over spatial tokens → dense sigmoid head.
//!
//! Layer semantics:
//! - the convolution output is cropped (top-left, at most one row/column) to
//!   even dimensions before the sub-band transform;
//! - every spatial position of the concatenated sub-band stack is one token
//!   of dimension 4·filters;
//! - probabilities are ε-clipped to [1e-7, 1−1e-7], so the loss never sees
//!   log 0 and clipped outputs propagate a zero gradient;
//! - L2/L1 penalties apply to convolution kernels and dense weights (never
//!   biases); the attention projections carry their own squared penalty
//!   weighted by `att_reg_weight`;
//! - training is plain mini-batch gradient descent under an exponential
//!   learning-rate decay, deterministic from its seed, returning the weights
//!   of the best-validation-accuracy epoch (earliest on ties).

pub mod mat;
pub mod snapshot;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::core::rng::RngStream;
use crate::dataset::{Image, LabeledImage};
use crate::error::{Error, Result};
use crate::wavelet::{dwt2_inverse, subband_concat, Plane, SubbandSet};
use mat::{matmul, matmul_at, matmul_bt, Mat};

const PH_INIT: u64 = 1;
const PH_SHUFFLE: u64 = 2;

/// Probability clipping margin: outputs live in [CLIP, 1−CLIP].
pub const PROB_CLIP: f64 = 1e-7;

/// The eight tuned hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub filters_size: usize,
    pub kernel_size: usize,
    pub lr: f64,
    pub l2_reg: f64,
    pub l1_reg: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub att_reg_weight: f64,
}

impl ModelConfig {
    /// Round the kernel up to the next odd integer (3 stays 3, 4 becomes 5).
    pub fn with_odd_kernel(mut self) -> Self {
        if self.kernel_size % 2 == 0 {
            self.kernel_size += 1;
        }
        self
    }

    /// Structural sanity independent of any bounds table.
    pub fn validate_structure(&self) -> Result<()> {
        if self.filters_size == 0 {
            return Err(Error::config("filters_size must be positive".to_string()));
        }
        if self.kernel_size == 0 || self.kernel_size % 2 == 0 {
            return Err(Error::config(format!(
                "kernel_size must be a positive odd integer, got {}",
                self.kernel_size
            )));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::config(format!("lr must be positive, got {}", self.lr)));
        }
        for (name, v) in [
            ("l2_reg", self.l2_reg),
            ("l1_reg", self.l1_reg),
            ("att_reg_weight", self.att_reg_weight),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be positive".to_string()));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs must be positive".to_string()));
        }
        Ok(())
    }

    /// Validate against a bounds table (full-scale or desk-scale).
    pub fn validate(&self, bounds: &ConfigBounds) -> Result<()> {
        self.validate_structure()?;
        bounds.check_int("filters_size", self.filters_size, bounds.filters)?;
        bounds.check_int("kernel_size", self.kernel_size, bounds.kernel)?;
        bounds.check_real("lr", self.lr, bounds.lr)?;
        bounds.check_real("l2_reg", self.l2_reg, bounds.l2)?;
        bounds.check_real("l1_reg", self.l1_reg, bounds.l1)?;
        bounds.check_int("batch_size", self.batch_size, bounds.batch)?;
        bounds.check_int("epochs", self.epochs, bounds.epochs)?;
        bounds.check_real("att_reg_weight", self.att_reg_weight, bounds.att_reg)?;
        Ok(())
    }

    /// A canonical text key: two configs decode equal iff their keys match.
    pub fn canonical_key(&self) -> String {
        format!(
            "f={};k={};lr={};l2={};l1={};b={};e={};ar={}",
            self.filters_size,
            self.kernel_size,
            self.lr,
            self.l2_reg,
            self.l1_reg,
            self.batch_size,
            self.epochs,
            self.att_reg_weight
        )
    }
}

/// Hyperparameter bounds. `full_scale` carries the published tuning ranges;
/// `desk_scale` relaxes them so the whole pipeline runs in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigBounds {
    pub filters: (usize, usize),
    pub kernel: (usize, usize),
    pub lr: (f64, f64),
    pub l2: (f64, f64),
    pub l1: (f64, f64),
    pub batch: (usize, usize),
    pub epochs: (usize, usize),
    pub att_reg: (f64, f64),
}

impl ConfigBounds {
    /// The published tuning ranges.
    pub fn full_scale() -> Self {
        ConfigBounds {
            filters: (64, 256),
            kernel: (3, 9),
            lr: (1e-5, 1e-2),
            l2: (1e-5, 1e-2),
            l1: (1e-5, 1e-2),
            batch: (16, 128),
            epochs: (10, 100),
            att_reg: (1e-5, 1e-3),
        }
    }

    /// Permissive ranges for desk-scale work (small models, few epochs).
    pub fn desk_scale() -> Self {
        ConfigBounds {
            filters: (1, 256),
            kernel: (1, 31),
            lr: (1e-7, 1.0),
            l2: (0.0, 1.0),
            l1: (0.0, 1.0),
            batch: (1, 1024),
            epochs: (1, 1000),
            att_reg: (0.0, 1.0),
        }
    }

    fn check_int(&self, name: &str, v: usize, (lo, hi): (usize, usize)) -> Result<()> {
        if v < lo || v > hi {
            return Err(Error::config(format!(
                "{name} = {v} outside bounds [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    fn check_real(&self, name: &str, v: f64, (lo, hi): (f64, f64)) -> Result<()> {
        if !(lo..=hi).contains(&v) {
            return Err(Error::config(format!(
                "{name} = {v} outside bounds [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

/// A batch of same-shaped images in [0,1] with binary labels.
#[derive(Clone, Debug)]
pub struct Batch {
    images: Vec<Image>,
    labels: Vec<u8>,
}

impl Batch {
    pub fn new(images: Vec<Image>, labels: Vec<u8>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::config("batch must be nonempty".to_string()));
        }
        if images.len() != labels.len() {
            return Err(Error::shape(format!(
                "{} images but {} labels",
                images.len(),
                labels.len()
            )));
        }
        let dims = (images[0].channels(), images[0].height(), images[0].width());
        if dims.1 % 2 != 0 || dims.2 % 2 != 0 {
            return Err(Error::shape(format!(
                "batch images must have even dimensions, got {}x{}",
                dims.1, dims.2
            )));
        }
        for (i, image) in images.iter().enumerate() {
            if (image.channels(), image.height(), image.width()) != dims {
                return Err(Error::shape(format!(
                    "image {i} has shape {}x{}x{} but the batch is {}x{}x{}",
                    image.channels(),
                    image.height(),
                    image.width(),
                    dims.0,
                    dims.1,
                    dims.2
                )));
            }
            if image.pixels().iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::data(format!("image {i} has pixels outside [0,1]")));
            }
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(Error::data(format!(
                "label {i} must be 0 or 1, got {}",
                labels[i]
            )));
        }
        Ok(Batch { images, labels })
    }

    pub fn from_samples(samples: &[&LabeledImage]) -> Result<Self> {
        Batch::new(
            samples.iter().map(|s| s.image.clone()).collect(),
            samples.iter().map(|s| s.label).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[Image] {
        &self.images
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }
}

/// All derived layer dimensions for a (config, input shape) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDims {
    pub channels: usize,
    pub in_h: usize,
    pub in_w: usize,
    pub filters: usize,
    pub kernel: usize,
    /// Valid convolution output, before the even crop.
    pub conv_h: usize,
    pub conv_w: usize,
    /// After the top-left even crop.
    pub crop_h: usize,
    pub crop_w: usize,
    pub half_h: usize,
    pub half_w: usize,
    /// Token dimension (4·filters) and token count (half_h·half_w).
    pub d: usize,
    pub n_t: usize,
}

impl ModelDims {
    pub fn new(config: &ModelConfig, channels: usize, in_h: usize, in_w: usize) -> Result<Self> {
        let k = config.kernel_size;
        if k > in_h {
            return Err(Error::shape(format!(
                "kernel size {k} exceeds input height {in_h}"
            )));
        }
        if k > in_w {
            return Err(Error::shape(format!(
                "kernel size {k} exceeds input width {in_w}"
            )));
        }
        let conv_h = in_h - k + 1;
        let conv_w = in_w - k + 1;
        let crop_h = conv_h - conv_h % 2;
        let crop_w = conv_w - conv_w % 2;
        if crop_h == 0 || crop_w == 0 {
            return Err(Error::shape(format!(
                "convolution output {conv_h}x{conv_w} is too small for the sub-band layer"
            )));
        }
        let (half_h, half_w) = (crop_h / 2, crop_w / 2);
        let filters = config.filters_size;
        Ok(ModelDims {
            channels,
            in_h,
            in_w,
            filters,
            kernel: k,
            conv_h,
            conv_w,
            crop_h,
            crop_w,
            half_h,
            half_w,
            d: 4 * filters,
            n_t: half_h * half_w,
        })
    }
}

/// All trainable parameters; doubles as the gradient container.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelWeights {
    pub dims: ModelDims,
    /// (filters, channels, kernel, kernel), flattened row-major.
    pub conv_w: Vec<f64>,
    pub conv_b: Vec<f64>,
    pub wq: Mat,
    pub wk: Mat,
    pub wv: Mat,
    /// Length n_t·d, token-major.
    pub dense_w: Vec<f64>,
    pub dense_b: f64,
}

fn glorot_fill<R: Rng>(rng: &mut R, slice: &mut [f64], fan_in: usize, fan_out: usize) {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    for v in slice {
        *v = rng.gen_range(-limit..limit);
    }
}

impl ModelWeights {
    /// Seeded uniform ±√(6/(fan_in+fan_out)) initialization on weight
    /// matrices; biases start at zero.
    pub fn init(
        config: &ModelConfig,
        channels: usize,
        in_h: usize,
        in_w: usize,
        seed: u64,
    ) -> Result<Self> {
        let dims = ModelDims::new(config, channels, in_h, in_w)?;
        let mut rng = RngStream::for_phase(seed, 0, 0, PH_INIT).rng();
        let k = dims.kernel;
        let mut conv_w = vec![0.0; dims.filters * channels * k * k];
        glorot_fill(&mut rng, &mut conv_w, channels * k * k, dims.filters * k * k);
        let mut wq = Mat::zeros(dims.d, dims.d);
        let mut wk = Mat::zeros(dims.d, dims.d);
        let mut wv = Mat::zeros(dims.d, dims.d);
        for m in [&mut wq, &mut wk, &mut wv] {
            glorot_fill(&mut rng, m.data_mut(), dims.d, dims.d);
        }
        let mut dense_w = vec![0.0; dims.n_t * dims.d];
        glorot_fill(&mut rng, &mut dense_w, dims.n_t * dims.d, 1);
        Ok(ModelWeights {
            dims,
            conv_w,
            conv_b: vec![0.0; dims.filters],
            wq,
            wk,
            wv,
            dense_w,
            dense_b: 0.0,
        })
    }

    pub fn zeros_like(&self) -> Self {
        ModelWeights {
            dims: self.dims,
            conv_w: vec![0.0; self.conv_w.len()],
            conv_b: vec![0.0; self.conv_b.len()],
            wq: Mat::zeros(self.dims.d, self.dims.d),
            wk: Mat::zeros(self.dims.d, self.dims.d),
            wv: Mat::zeros(self.dims.d, self.dims.d),
            dense_w: vec![0.0; self.dense_w.len()],
            dense_b: 0.0,
        }
    }

    /// Named parameter groups, in serialization order.
    pub fn param_groups(&self) -> Vec<(&'static str, &[f64])> {
        vec![
            ("conv_w", self.conv_w.as_slice()),
            ("conv_b", self.conv_b.as_slice()),
            ("wq", self.wq.data()),
            ("wk", self.wk.data()),
            ("wv", self.wv.data()),
            ("dense_w", self.dense_w.as_slice()),
            ("dense_b", std::slice::from_ref(&self.dense_b)),
        ]
    }

    pub fn param_groups_mut(&mut self) -> Vec<(&'static str, &mut [f64])> {
        vec![
            ("conv_w", self.conv_w.as_mut_slice()),
            ("conv_b", self.conv_b.as_mut_slice()),
            ("wq", self.wq.data_mut()),
            ("wk", self.wk.data_mut()),
            ("wv", self.wv.data_mut()),
            ("dense_w", self.dense_w.as_mut_slice()),
            ("dense_b", std::slice::from_mut(&mut self.dense_b)),
        ]
    }

    pub fn ensure_finite(&self, context: &str) -> Result<()> {
        for (name, group) in self.param_groups() {
            if group.iter().any(|v| !v.is_finite()) {
                return Err(Error::numerical(format!(
                    "{context}: parameter group '{name}' became non-finite"
                )));
            }
        }
        Ok(())
    }

    /// self ← self − lr·grads.
    pub fn apply_update(&mut self, grads: &ModelWeights, lr: f64) {
        for ((_, w), (_, g)) in self.param_groups_mut().into_iter().zip(grads.param_groups())
        {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi -= lr * gi;
            }
        }
    }
}

/// Standard valid-mode cross-correlation plus bias over a channel-major
/// image; kernels are (filters, channels, k, k) flattened.
pub fn conv2d_valid(
    image: &Image,
    kernels: &[f64],
    biases: &[f64],
    filters: usize,
    kernel: usize,
) -> Result<Vec<Plane>> {
    let (c_in, h, w) = (image.channels(), image.height(), image.width());
    if kernel > h || kernel > w {
        return Err(Error::shape(format!(
            "kernel size {kernel} exceeds input {h}x{w}"
        )));
    }
    if kernels.len() != filters * c_in * kernel * kernel {
        return Err(Error::shape(format!(
            "{} kernel values for {filters} filters of {c_in}x{kernel}x{kernel}",
            kernels.len()
        )));
    }
    if biases.len() != filters {
        return Err(Error::shape(format!(
            "{} biases for {filters} filters",
            biases.len()
        )));
    }
    let out_h = h - kernel + 1;
    let out_w = w - kernel + 1;
    let mut planes = Vec::with_capacity(filters);
    for f in 0..filters {
        let mut values = vec![0.0; out_h * out_w];
        for c in 0..c_in {
            let base = (f * c_in + c) * kernel * kernel;
            // Accumulate one kernel tap at a time across whole output rows:
            // the inner loop has independent adds, so it vectorizes.
            for i in 0..kernel {
                for j in 0..kernel {
                    let wij = kernels[base + i * kernel + j];
                    for y in 0..out_h {
                        let src = &image.row(c, y + i)[j..j + out_w];
                        let dst = &mut values[y * out_w..(y + 1) * out_w];
                        for (d, &s) in dst.iter_mut().zip(src) {
                            *d += wij * s;
                        }
                    }
                }
            }
        }
        for v in &mut values {
            *v += biases[f];
        }
        planes.push(Plane::new(out_h, out_w, values)?);
    }
    Ok(planes)
}

/// Single-head scaled dot-product attention: softmax(QKᵀ/√d)·V with learned
/// square projections. Returns (output, attention matrix); attention rows
/// sum to 1.
pub fn attention_forward(tokens: &Mat, wq: &Mat, wk: &Mat, wv: &Mat) -> (Mat, Mat) {
    let d = tokens.cols();
    let q = matmul(tokens, wq);
    let k = matmul(tokens, wk);
    let v = matmul(tokens, wv);
    let mut scores = matmul_bt(&q, &k);
    scores.scale(1.0 / (d as f64).sqrt());
    let att = softmax_rows(&scores);
    let output = matmul(&att, &v);
    (output, att)
}

fn softmax_rows(scores: &Mat) -> Mat {
    let mut out = Mat::zeros(scores.rows(), scores.cols());
    for r in 0..scores.rows() {
        let row = scores.row(r);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let out_row = out.row_mut(r);
        let mut sum = 0.0;
        for (o, &s) in out_row.iter_mut().zip(row) {
            *o = (s - max).exp();
            sum += *o;
        }
        for o in out_row.iter_mut() {
            *o /= sum;
        }
    }
    out
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Everything the backward pass needs about one sample's forward run.
struct SampleTrace {
    /// Convolution pre-activation planes (for the ReLU mask).
    preact: Vec<Plane>,
    tokens: Mat,
    q: Mat,
    k: Mat,
    v: Mat,
    att: Mat,
    /// Attention output, flattened token-major.
    flat: Vec<f64>,
    prob: f64,
    clipped: bool,
}

fn check_finite(values: impl Iterator<Item = f64>, layer: &str) -> Result<()> {
    for v in values {
        if !v.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite activation in the {layer} layer"
            )));
        }
    }
    Ok(())
}

fn forward_sample(weights: &ModelWeights, image: &Image) -> Result<SampleTrace> {
    let dims = &weights.dims;
    let preact = conv2d_valid(
        image,
        &weights.conv_w,
        &weights.conv_b,
        dims.filters,
        dims.kernel,
    )?;
    check_finite(
        preact.iter().flat_map(|p| p.values().iter().copied()),
        "convolution",
    )?;

    // ReLU, then the deterministic top-left crop to even dimensions.
    let mut cropped_planes = Vec::with_capacity(dims.filters);
    for plane in &preact {
        let mut cropped = Plane::zeros(dims.crop_h, dims.crop_w)?;
        for y in 0..dims.crop_h {
            for x in 0..dims.crop_w {
                cropped.set(y, x, plane.at(y, x).max(0.0));
            }
        }
        cropped_planes.push(cropped);
    }
    let concat = subband_concat(&cropped_planes)?;

    // Each spatial position is one token of dimension 4·filters.
    let mut tokens = Mat::zeros(dims.n_t, dims.d);
    for (c, plane) in concat.iter().enumerate() {
        for y in 0..dims.half_h {
            for x in 0..dims.half_w {
                tokens.set(y * dims.half_w + x, c, plane.at(y, x));
            }
        }
    }

    let q = matmul(&tokens, &weights.wq);
    let k = matmul(&tokens, &weights.wk);
    let v = matmul(&tokens, &weights.wv);
    let mut scores = matmul_bt(&q, &k);
    scores.scale(1.0 / (dims.d as f64).sqrt());
    let att = softmax_rows(&scores);
    let out = matmul(&att, &v);
    check_finite(out.data().iter().copied(), "attention")?;

    let mut flat = vec![0.0; dims.n_t * dims.d];
    for t in 0..dims.n_t {
        flat[t * dims.d..(t + 1) * dims.d].copy_from_slice(out.row(t));
    }

    let z = weights
        .dense_w
        .iter()
        .zip(&flat)
        .map(|(w, f)| w * f)
        .sum::<f64>()
        + weights.dense_b;
    check_finite(std::iter::once(z), "dense head")?;
    let raw = sigmoid(z);
    let prob = raw.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
    Ok(SampleTrace {
        preact,
        tokens,
        q,
        k,
        v,
        att,
        flat,
        prob,
        clipped: raw != prob,
    })
}

/// Forward pass over a batch: probabilities strictly inside (0,1).
pub fn forward(weights: &ModelWeights, batch: &Batch) -> Result<Vec<f64>> {
    batch
        .images()
        .iter()
        .map(|image| forward_sample(weights, image).map(|t| t.prob))
        .collect()
}

fn regularizer_terms(config: &ModelConfig, weights: &ModelWeights) -> f64 {
    let l2_l1: f64 = weights
        .conv_w
        .iter()
        .chain(&weights.dense_w)
        .map(|&w| config.l2_reg * w * w + config.l1_reg * w.abs())
        .sum();
    let att: f64 = [&weights.wq, &weights.wk, &weights.wv]
        .iter()
        .flat_map(|m| m.data())
        .map(|&w| config.att_reg_weight * w * w)
        .sum();
    l2_l1 + att
}

/// Mean binary cross-entropy plus the three regularizers.
pub fn bce_loss(probs: &[f64], labels: &[u8], config: &ModelConfig, weights: &ModelWeights) -> f64 {
    let m = probs.len() as f64;
    let data: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / m;
    data + regularizer_terms(config, weights)
}

/// One full backward pass: loss, per-sample probabilities, and exact
/// analytic gradients (including all three regularizers).
pub struct BackwardPass {
    pub loss: f64,
    pub probs: Vec<f64>,
    pub grads: ModelWeights,
}

pub fn backward(config: &ModelConfig, weights: &ModelWeights, batch: &Batch) -> Result<BackwardPass> {
    let dims = weights.dims;
    let m = batch.len() as f64;
    let mut grads = weights.zeros_like();
    let mut probs = Vec::with_capacity(batch.len());
    let scale = 1.0 / (dims.d as f64).sqrt();

    for (image, &label) in batch.images().iter().zip(batch.labels()) {
        let trace = forward_sample(weights, image)?;
        probs.push(trace.prob);

        // Sigmoid + BCE collapse to (p − y); clipped outputs are constants,
        // so their entire data-term gradient vanishes and the sample can be
        // skipped outright.
        if trace.clipped {
            continue;
        }
        let dz = (trace.prob - label as f64) / m;

        grads.dense_b += dz;
        let mut dflat = vec![0.0; dims.n_t * dims.d];
        for i in 0..dims.n_t * dims.d {
            grads.dense_w[i] += dz * trace.flat[i];
            dflat[i] = dz * weights.dense_w[i];
        }

        let dout = Mat::from_vec(dims.n_t, dims.d, dflat)?;
        let datt = matmul_bt(&dout, &trace.v);
        let dv = matmul_at(&trace.att, &dout);

        // Softmax Jacobian per row: dS = (dA − ⟨dA, A⟩)⊙A.
        let mut dscores = Mat::zeros(dims.n_t, dims.n_t);
        for r in 0..dims.n_t {
            let a_row = trace.att.row(r);
            let da_row = datt.row(r);
            let dot: f64 = da_row.iter().zip(a_row).map(|(x, y)| x * y).sum();
            let ds_row = dscores.row_mut(r);
            for ((ds, &da), &a) in ds_row.iter_mut().zip(da_row).zip(a_row) {
                *ds = (da - dot) * a;
            }
        }

        let mut dq = matmul(&dscores, &trace.k);
        dq.scale(scale);
        let mut dk = matmul_at(&dscores, &trace.q);
        dk.scale(scale);

        grads.wq.add_assign(&matmul_at(&trace.tokens, &dq));
        grads.wk.add_assign(&matmul_at(&trace.tokens, &dk));
        grads.wv.add_assign(&matmul_at(&trace.tokens, &dv));

        let mut dtokens = matmul_bt(&dq, &weights.wq);
        dtokens.add_assign(&matmul_bt(&dk, &weights.wk));
        dtokens.add_assign(&matmul_bt(&dv, &weights.wv));

        // Tokens → sub-band planes; the transform is orthonormal, so its
        // adjoint is exactly the inverse transform.
        for f in 0..dims.filters {
            let mut band_grads = [
                Plane::zeros(dims.half_h, dims.half_w)?,
                Plane::zeros(dims.half_h, dims.half_w)?,
                Plane::zeros(dims.half_h, dims.half_w)?,
                Plane::zeros(dims.half_h, dims.half_w)?,
            ];
            for (b, grad_plane) in band_grads.iter_mut().enumerate() {
                let c = b * dims.filters + f;
                for y in 0..dims.half_h {
                    for x in 0..dims.half_w {
                        grad_plane.set(y, x, dtokens.at(y * dims.half_w + x, c));
                    }
                }
            }
            let [ll, lh, hl, hh] = band_grads;
            let dcrop = dwt2_inverse(&SubbandSet::new(ll, lh, hl, hh)?)?;

            // Crop backward is zero-padding; ReLU backward masks by the
            // pre-activation sign.
            let preact = &trace.preact[f];
            let mut dpre = Plane::zeros(dims.conv_h, dims.conv_w)?;
            for y in 0..dims.crop_h {
                for x in 0..dims.crop_w {
                    if preact.at(y, x) > 0.0 {
                        dpre.set(y, x, dcrop.at(y, x));
                    }
                }
            }

            let k = dims.kernel;
            let mut bias_acc = 0.0;
            for y in 0..dims.conv_h {
                for x in 0..dims.conv_w {
                    bias_acc += dpre.at(y, x);
                }
            }
            grads.conv_b[f] += bias_acc;
            // Scatter each surviving output gradient into the kernel taps it
            // touches; the inner loop over taps is a vectorizable axpy, and
            // masked-out positions are skipped entirely.
            for c in 0..dims.channels {
                let base = (f * dims.channels + c) * k * k;
                for y in 0..dims.conv_h {
                    for x in 0..dims.conv_w {
                        let g = dpre.at(y, x);
                        if g != 0.0 {
                            for i in 0..k {
                                let src = &image.row(c, y + i)[x..x + k];
                                let dst = &mut grads.conv_w[base + i * k..base + (i + 1) * k];
                                for (d, &s) in dst.iter_mut().zip(src) {
                                    *d += g * s;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // Regularizer gradients: 2·l2·w + l1·sign(w) on kernels and dense
    // weights, 2·att_reg·w on the projections; biases are unregularized.
    for (g, &w) in grads.conv_w.iter_mut().zip(&weights.conv_w) {
        *g += 2.0 * config.l2_reg * w + config.l1_reg * w.signum() * f64::from(w != 0.0);
    }
    for (g, &w) in grads.dense_w.iter_mut().zip(&weights.dense_w) {
        *g += 2.0 * config.l2_reg * w + config.l1_reg * w.signum() * f64::from(w != 0.0);
    }
    for (gm, wm) in [
        (&mut grads.wq, &weights.wq),
        (&mut grads.wk, &weights.wk),
        (&mut grads.wv, &weights.wv),
    ] {
        for (g, &w) in gm.data_mut().iter_mut().zip(wm.data()) {
            *g += 2.0 * config.att_reg_weight * w;
        }
    }

    let loss = bce_loss(&probs, batch.labels(), config, weights);
    Ok(BackwardPass { loss, probs, grads })
}

/// Exponential decay: base_lr · 0.95^epoch.
pub fn lr_schedule(epoch: usize, base_lr: f64) -> f64 {
    base_lr * 0.95f64.powi(epoch as i32)
}

/// Per-epoch training record. Train metrics average the mini-batch passes
/// (computed on pre-update weights); validation metrics come from a full
/// pass after the epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lr: f64,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    /// Weights of the best-validation-accuracy epoch (earliest on ties).
    pub weights: ModelWeights,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
}

fn count_correct(probs: &[f64], labels: &[u8]) -> usize {
    probs
        .iter()
        .zip(labels)
        .filter(|(&p, &y)| u8::from(p >= 0.5) == y)
        .count()
}

/// Loss and accuracy of `weights` on a sample set (chunked forward pass).
pub fn evaluate(
    weights: &ModelWeights,
    config: &ModelConfig,
    set: &[LabeledImage],
) -> Result<(f64, f64)> {
    if set.is_empty() {
        return Err(Error::config("evaluation set is empty".to_string()));
    }
    let mut probs = Vec::with_capacity(set.len());
    let mut labels = Vec::with_capacity(set.len());
    for chunk in set.chunks(256) {
        let batch = Batch::from_samples(&chunk.iter().collect::<Vec<_>>())?;
        probs.extend(forward(weights, &batch)?);
        labels.extend_from_slice(batch.labels());
    }
    let loss = bce_loss(&probs, &labels, config, weights);
    let acc = count_correct(&probs, &labels) as f64 / probs.len() as f64;
    Ok((loss, acc))
}

/// Mini-batch gradient descent, deterministic from `seed`.
pub fn train(
    config: &ModelConfig,
    train_set: &[LabeledImage],
    val_set: &[LabeledImage],
    seed: u64,
) -> Result<TrainResult> {
    config.validate_structure()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::config(format!(
            "training needs nonempty sets, got {} train and {} validation samples",
            train_set.len(),
            val_set.len()
        )));
    }
    let first = &train_set[0].image;
    let mut weights = ModelWeights::init(
        config,
        first.channels(),
        first.height(),
        first.width(),
        seed,
    )?;

    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(usize, f64, ModelWeights)> = None;
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    for epoch in 0..config.epochs {
        let lr = lr_schedule(epoch, config.lr);
        let mut rng = RngStream::for_phase(seed, epoch as u64, 0, PH_SHUFFLE).rng();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);

        let mut loss_sum = 0.0;
        let mut correct = 0;
        for chunk in order.chunks(config.batch_size) {
            let samples: Vec<&LabeledImage> = chunk.iter().map(|&i| &train_set[i]).collect();
            let batch = Batch::from_samples(&samples)?;
            let pass = backward(config, &weights, &batch)?;
            loss_sum += pass.loss * batch.len() as f64;
            correct += count_correct(&pass.probs, batch.labels());
            weights.apply_update(&pass.grads, lr);
            weights.ensure_finite(&format!("epoch {epoch}"))?;
        }
        let train_loss = loss_sum / train_set.len() as f64;
        let train_accuracy = correct as f64 / train_set.len() as f64;
        let (val_loss, val_accuracy) = evaluate(&weights, config, val_set)?;
        history.push(EpochRecord {
            epoch,
            lr,
            train_loss,
            train_accuracy,
            val_loss,
            val_accuracy,
        });
        let improved = match &best {
            None => true,
            Some((_, best_acc, _)) => val_accuracy > *best_acc,
        };
        if improved {
            best = Some((epoch, val_accuracy, weights.clone()));
        }
    }

    let (best_epoch, best_val_accuracy, best_weights) =
        best.expect("at least one epoch ran");
    Ok(TrainResult {
        weights: best_weights,
        history,
        best_epoch,
        best_val_accuracy,
    })
}

/// Per-group maximum relative error of analytic gradients against central
/// finite differences.
#[derive(Clone, Debug)]
pub struct FdReport {
    pub per_group: Vec<(String, f64)>,
    pub max_rel_err: f64,
}

/// Compare [`backward`] against central finite differences of the full loss
/// (step `step`, relative error |a−f|/max(|a|,|f|,1e-6)).
pub fn finite_difference_check(
    config: &ModelConfig,
    batch: &Batch,
    seed: u64,
    step: f64,
) -> Result<FdReport> {
    let image = &batch.images()[0];
    let weights = ModelWeights::init(
        config,
        image.channels(),
        image.height(),
        image.width(),
        seed,
    )?;
    let analytic = backward(config, &weights, batch)?.grads;

    let loss_at = |w: &ModelWeights| -> Result<f64> {
        let probs = forward(w, batch)?;
        Ok(bce_loss(&probs, batch.labels(), config, w))
    };

    let group_count = weights.param_groups().len();
    let mut per_group = Vec::with_capacity(group_count);
    let mut max_rel_err = 0.0f64;
    for gi in 0..group_count {
        let (name, len) = {
            let groups = weights.param_groups();
            (groups[gi].0.to_string(), groups[gi].1.len())
        };
        let mut group_max = 0.0f64;
        for i in 0..len {
            let mut plus = weights.clone();
            plus.param_groups_mut()[gi].1[i] += step;
            let mut minus = weights.clone();
            minus.param_groups_mut()[gi].1[i] -= step;
            let fd = (loss_at(&plus)? - loss_at(&minus)?) / (2.0 * step);
            let a = analytic.param_groups()[gi].1[i];
            let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-6);
            group_max = group_max.max(rel);
        }
        max_rel_err = max_rel_err.max(group_max);
        per_group.push((name, group_max));
    }
    Ok(FdReport {
        per_group,
        max_rel_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::rng::RngStream;
    use crate::dataset::{generate_synthetic, generate_synthetic_sized};
    use crate::wavelet::dwt2_forward;
    use approx::assert_abs_diff_eq;

    fn small_config() -> ModelConfig {
        ModelConfig {
            filters_size: 4,
            kernel_size: 3,
            lr: 1e-3,
            l2_reg: 1e-4,
            l1_reg: 1e-4,
            batch_size: 4,
            epochs: 3,
            att_reg_weight: 1e-4,
        }
    }

    fn random_image(h: usize, w: usize, seed: u64) -> Image {
        let mut rng = RngStream::for_phase(seed, 0, 0, 77).rng();
        let mut image = Image::zeros(1, h, w);
        for y in 0..h {
            for x in 0..w {
                image.set(0, y, x, rand::Rng::gen_range(&mut rng, 0.0..1.0));
            }
        }
        image
    }

    fn random_batch(n: usize, h: usize, w: usize, seed: u64) -> Batch {
        let images: Vec<Image> = (0..n).map(|i| random_image(h, w, seed + i as u64)).collect();
        let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        Batch::new(images, labels).unwrap()
    }

    #[test]
    fn conv_unit_kernel_is_identity() {
        let image = random_image(4, 4, 1);
        let planes = conv2d_valid(&image, &[1.0], &[0.0], 1, 1).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(planes[0].at(y, x), image.at(0, y, x));
            }
        }
    }

    #[test]
    fn conv_zero_kernel_annihilates() {
        let image = random_image(5, 5, 2);
        let planes = conv2d_valid(&image, &vec![0.0; 9], &[0.0], 1, 3).unwrap();
        assert!(planes[0].values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn conv_direct_substitution() {
        let image = Image::new(1, 2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let planes =
            conv2d_valid(&image, &[1.0, 0.0, 0.0, 1.0], &[0.0], 1, 2).unwrap();
        assert_eq!((planes[0].height(), planes[0].width()), (1, 1));
        assert_eq!(planes[0].at(0, 0), 5.0);
    }

    #[test]
    fn conv_rejects_oversized_kernel() {
        let image = random_image(4, 4, 3);
        assert!(conv2d_valid(&image, &vec![0.0; 25], &[0.0], 1, 5).is_err());
    }

    #[test]
    fn attention_zero_projections_give_uniform_rows() {
        let tokens = Mat::from_vec(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let zero = Mat::zeros(2, 2);
        let (output, att) = attention_forward(&tokens, &zero, &zero, &zero);
        for r in 0..3 {
            for c in 0..3 {
                assert_abs_diff_eq!(att.at(r, c), 1.0 / 3.0, epsilon = 1e-15);
            }
        }
        assert!(output.data().iter().all(|&v| v == 0.0)); // V = T·0
    }

    #[test]
    fn attention_uniform_rows_average_values() {
        // Zero query/key projections give uniform attention; an identity
        // value projection then returns the token column means in every row.
        let tokens = Mat::from_vec(2, 2, vec![1.0, 3.0, 5.0, 7.0]).unwrap();
        let zero = Mat::zeros(2, 2);
        let identity = Mat::from_vec(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let (output, _) = attention_forward(&tokens, &zero, &zero, &identity);
        for r in 0..2 {
            assert_abs_diff_eq!(output.at(r, 0), 3.0, epsilon = 1e-15);
            assert_abs_diff_eq!(output.at(r, 1), 5.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn attention_single_token_weight_is_one() {
        let tokens = Mat::from_vec(1, 2, vec![0.3, -0.7]).unwrap();
        let w = Mat::from_vec(2, 2, vec![0.5, -0.25, 0.1, 0.9]).unwrap();
        let (_, att) = attention_forward(&tokens, &w, &w, &w);
        assert_eq!(att.at(0, 0), 1.0);
    }

    #[test]
    fn attention_rows_sum_to_one() {
        let mut rng = RngStream::for_phase(9, 0, 0, 77).rng();
        let tokens = Mat::from_vec(
            5,
            4,
            (0..20)
                .map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0))
                .collect(),
        )
        .unwrap();
        let wq = Mat::from_vec(
            4,
            4,
            (0..16)
                .map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0))
                .collect(),
        )
        .unwrap();
        let (_, att) = attention_forward(&tokens, &wq, &wq, &wq);
        for r in 0..5 {
            let sum: f64 = att.row(r).iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn forward_zero_weights_give_half() {
        let batch = random_batch(3, 8, 8, 4);
        let weights = ModelWeights::init(&small_config(), 1, 8, 8, 5)
            .unwrap()
            .zeros_like();
        let probs = forward(&weights, &batch).unwrap();
        assert_eq!(probs.len(), 3);
        assert!(probs.iter().all(|&p| p == 0.5));
    }

    #[test]
    fn forward_probabilities_are_clipped() {
        let batch = random_batch(2, 8, 8, 6);
        let mut weights = ModelWeights::init(&small_config(), 1, 8, 8, 7).unwrap();
        weights.dense_b = 1e9; // saturate the sigmoid
        let probs = forward(&weights, &batch).unwrap();
        assert!(probs.iter().all(|&p| p == 1.0 - PROB_CLIP));
    }

    #[test]
    fn forward_names_the_failing_layer() {
        let batch = random_batch(1, 8, 8, 8);
        let mut weights = ModelWeights::init(&small_config(), 1, 8, 8, 9).unwrap();
        weights.conv_w[0] = f64::INFINITY;
        let err = forward(&weights, &batch).unwrap_err().to_string();
        assert!(err.contains("convolution"), "error was: {err}");
    }

    #[test]
    fn loss_direct_substitution() {
        let config = ModelConfig {
            l2_reg: 0.0,
            l1_reg: 0.0,
            att_reg_weight: 0.0,
            ..small_config()
        };
        let weights = ModelWeights::init(&config, 1, 8, 8, 1).unwrap().zeros_like();
        let ln2 = std::f64::consts::LN_2;
        assert_abs_diff_eq!(bce_loss(&[0.5], &[1], &config, &weights), ln2, epsilon = 1e-12);
        assert_abs_diff_eq!(
            bce_loss(&[1.0 - 1e-7], &[1], &config, &weights),
            1e-7,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            bce_loss(&[0.5, 0.5], &[0, 1], &config, &weights),
            ln2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn regularizer_gradient_is_exact() {
        // The difference between gradients with and without regularizers
        // isolates the penalty path: 2·l2·w + l1·sign(w) on kernels and
        // dense weights, 2·att_reg·w on projections.
        let batch = random_batch(2, 8, 8, 10);
        let with = ModelConfig {
            l2_reg: 3e-3,
            l1_reg: 2e-3,
            att_reg_weight: 4e-3,
            ..small_config()
        };
        let without = ModelConfig {
            l2_reg: 0.0,
            l1_reg: 0.0,
            att_reg_weight: 0.0,
            ..with.clone()
        };
        let weights = ModelWeights::init(&with, 1, 8, 8, 11).unwrap();
        let g_with = backward(&with, &weights, &batch).unwrap().grads;
        let g_without = backward(&without, &weights, &batch).unwrap().grads;
        for (g1, (g0, &w)) in g_with
            .conv_w
            .iter()
            .zip(g_without.conv_w.iter().zip(&weights.conv_w))
        {
            let expected = 2.0 * 3e-3 * w + 2e-3 * w.signum();
            assert_abs_diff_eq!(g1 - g0, expected, epsilon = 1e-14);
        }
        for ((g1, g0), &w) in g_with
            .wq
            .data()
            .iter()
            .zip(g_without.wq.data())
            .zip(weights.wq.data())
        {
            assert_abs_diff_eq!(g1 - g0, 2.0 * 4e-3 * w, epsilon = 1e-14);
        }
        // Biases are unregularized.
        assert_eq!(g_with.conv_b, g_without.conv_b);
        assert_eq!(g_with.dense_b, g_without.dense_b);
    }

    #[test]
    fn dense_bias_gradient_direct_substitution() {
        // Zero inputs, zero labels, zero weights: p = 0.5 for every sample,
        // so the dense-bias gradient is the mean of (0.5 − 0).
        let images = vec![Image::zeros(1, 8, 8), Image::zeros(1, 8, 8)];
        let batch = Batch::new(images, vec![0, 0]).unwrap();
        let weights = ModelWeights::init(&small_config(), 1, 8, 8, 1)
            .unwrap()
            .zeros_like();
        let pass = backward(&small_config(), &weights, &batch).unwrap();
        assert_abs_diff_eq!(pass.grads.dense_b, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let config = small_config();
        let batch = random_batch(3, 8, 8, 12);
        let report = finite_difference_check(&config, &batch, 13, 1e-5).unwrap();
        assert!(
            report.max_rel_err < 1e-4,
            "max relative error {} (per group: {:?})",
            report.max_rel_err,
            report.per_group
        );
    }

    #[test]
    fn subband_layer_backward_is_the_adjoint() {
        // ⟨forward(x), y⟩ = ⟨x, inverse(y)⟩ for the orthonormal transform.
        let mut rng = RngStream::for_phase(21, 0, 0, 77).rng();
        let mut x = Plane::zeros(6, 8).unwrap();
        for y in 0..6 {
            for xx in 0..8 {
                x.set(y, xx, rand::Rng::gen_range(&mut rng, -1.0..1.0));
            }
        }
        let mut bands = [
            Plane::zeros(3, 4).unwrap(),
            Plane::zeros(3, 4).unwrap(),
            Plane::zeros(3, 4).unwrap(),
            Plane::zeros(3, 4).unwrap(),
        ];
        for b in &mut bands {
            for y in 0..3 {
                for xx in 0..4 {
                    b.set(y, xx, rand::Rng::gen_range(&mut rng, -1.0..1.0));
                }
            }
        }
        let [ll, lh, hl, hh] = bands;
        let y_set = SubbandSet::new(ll, lh, hl, hh).unwrap();
        let fx = dwt2_forward(&x).unwrap();
        let lhs: f64 = fx.ll.values().iter().zip(y_set.ll.values()).map(|(a, b)| a * b).sum::<f64>()
            + fx.lh.values().iter().zip(y_set.lh.values()).map(|(a, b)| a * b).sum::<f64>()
            + fx.hl.values().iter().zip(y_set.hl.values()).map(|(a, b)| a * b).sum::<f64>()
            + fx.hh.values().iter().zip(y_set.hh.values()).map(|(a, b)| a * b).sum::<f64>();
        let inv = dwt2_inverse(&y_set).unwrap();
        let rhs: f64 = x
            .values()
            .iter()
            .zip(inv.values())
            .map(|(a, b)| a * b)
            .sum();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn lr_schedule_decays_exponentially() {
        assert_eq!(lr_schedule(0, 1e-3), 1e-3);
        assert_abs_diff_eq!(lr_schedule(10, 1e-3), 5.987369392383789e-4, epsilon = 1e-12);
        for e in 0..20 {
            assert!(lr_schedule(e + 1, 1e-3) < lr_schedule(e, 1e-3));
        }
    }

    #[test]
    fn config_bounds_and_kernel_rounding() {
        let config = small_config();
        assert!(config.validate(&ConfigBounds::full_scale()).is_err()); // 4 filters
        assert!(config.validate(&ConfigBounds::desk_scale()).is_ok());
        let rounded = ModelConfig {
            kernel_size: 4,
            ..small_config()
        }
        .with_odd_kernel();
        assert_eq!(rounded.kernel_size, 5);
        assert!(ModelConfig {
            kernel_size: 4,
            ..small_config()
        }
        .validate_structure()
        .is_err());
    }

    #[test]
    fn batch_validation() {
        assert!(Batch::new(vec![], vec![]).is_err());
        let odd = Image::zeros(1, 5, 8);
        assert!(Batch::new(vec![odd], vec![0]).is_err());
        let ok = Image::zeros(1, 8, 8);
        assert!(Batch::new(vec![ok.clone()], vec![2]).is_err());
        assert!(Batch::new(vec![ok.clone(), Image::zeros(1, 8, 10)], vec![0, 1]).is_err());
        assert!(Batch::new(vec![ok], vec![1]).is_ok());
    }

    #[test]
    fn train_is_deterministic_and_counts_epochs() {
        let set = generate_synthetic_sized(24, 12, 31).unwrap();
        let (train_set, val_set) = set.split_at(18);
        let config = ModelConfig {
            filters_size: 2,
            kernel_size: 3,
            epochs: 3,
            batch_size: 6,
            lr: 0.05,
            ..small_config()
        };
        let a = train(&config, train_set, val_set, 17).unwrap();
        let b = train(&config, train_set, val_set, 17).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.history.len(), 3);
        assert_eq!(a.best_epoch, a.history[a.best_epoch].epoch);
        let c = train(&config, train_set, val_set, 18).unwrap();
        assert_ne!(a.history, c.history);
    }

    #[test]
    fn train_improves_on_separable_data() {
        // Full-size images: the class textures are calibrated for 32×32, so
        // this is the scale where a healthy run separates the classes.
        let set = generate_synthetic(400, 41).unwrap();
        let indices: Vec<usize> = (0..set.len()).collect();
        let (tr, va) = crate::dataset::train_val_split(&indices, 0.15, 7).unwrap();
        let train_set: Vec<_> = tr.iter().map(|&i| set[i].clone()).collect();
        let val_set: Vec<_> = va.iter().map(|&i| set[i].clone()).collect();
        let config = ModelConfig {
            filters_size: 2,
            kernel_size: 9,
            lr: 0.05,
            l2_reg: 1e-6,
            l1_reg: 1e-6,
            batch_size: 16,
            epochs: 4,
            att_reg_weight: 1e-6,
        };
        let result = train(&config, &train_set, &val_set, 2).unwrap();
        let first = &result.history[0];
        let last = result.history.last().unwrap();
        assert!(
            last.train_loss < first.train_loss,
            "loss {} → {} did not decrease",
            first.train_loss,
            last.train_loss
        );
        assert!(
            result.best_val_accuracy >= 0.95,
            "validation accuracy only reached {}",
            result.best_val_accuracy
        );
    }

    #[test]
    fn train_rejects_empty_sets() {
        let set = generate_synthetic_sized(4, 12, 0).unwrap();
        assert!(train(&small_config(), &[], &set, 0).is_err());
        assert!(train(&small_config(), &set, &[], 0).is_err());
    }
}
