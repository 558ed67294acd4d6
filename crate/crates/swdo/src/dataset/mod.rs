//! Synthetic lesion-like data generation, PGM/PPM ingestion, preprocessing
//! ([0,1] normalization, bilinear resize), augmentation, and deterministic
//! fold splitting.
//!
//! The synthetic generator is a desk-scale stand-in for dermoscopy imagery:
//! class 0 is a smooth ellipse, class 1 an irregular, high-frequency-textured
//! blob, so the class signal lives exactly where the wavelet detail bands
//! look. Everything is deterministic from an explicit seed.

pub mod pnm;

use std::path::Path;

use rand::Rng;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::core::rng::{RngStream, ITER_INIT};
use crate::error::{Error, Result};
use crate::wavelet::Plane;

/// RNG phase tags for this module's streams.
const PH_GENERATE: u64 = 1;
const PH_KFOLD: u64 = 2;
const PH_TRAIN_VAL: u64 = 3;

/// A real-valued image, channel-major `(channels, height, width)`, pixels in
/// [0,1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Image {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::shape(format!(
                "degenerate image shape {channels}x{height}x{width}"
            )));
        }
        if data.len() != channels * height * width {
            return Err(Error::shape(format!(
                "{} pixels for shape {channels}x{height}x{width}",
                data.len()
            )));
        }
        Ok(Image {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Image {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn at(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    /// One row of one channel as a contiguous slice.
    #[inline]
    pub fn row(&self, c: usize, y: usize) -> &[f64] {
        let start = (c * self.height + y) * self.width;
        &self.data[start..start + self.width]
    }

    pub fn set(&mut self, c: usize, y: usize, x: usize, value: f64) {
        self.data[(c * self.height + y) * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    /// One channel as a wavelet [`Plane`].
    pub fn channel_plane(&self, c: usize) -> Plane {
        let start = c * self.height * self.width;
        Plane::new(
            self.height,
            self.width,
            self.data[start..start + self.height * self.width].to_vec(),
        )
        .expect("channel slice has the right length")
    }

    /// Convert a decoded 8-bit image to real pixels via value/255.
    pub fn from_raw(raw: &pnm::RawImage) -> Result<Self> {
        Image::new(
            raw.channels,
            raw.height,
            raw.width,
            raw.data.iter().map(|&v| normalize_u8(v)).collect(),
        )
    }
}

/// 8-bit sample to real pixel: value/255.
pub fn normalize_u8(value: u8) -> f64 {
    value as f64 / 255.0
}

/// An image with its binary label (1 = disease-positive) and provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledImage {
    pub image: Image,
    pub label: u8,
    pub source_id: String,
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Generate `n` balanced synthetic images at the desk-scale default of
/// 32x32 grayscale. Even indices are class 0, odd are class 1.
pub fn generate_synthetic(n: usize, seed: u64) -> Result<Vec<LabeledImage>> {
    generate_synthetic_sized(n, 32, seed)
}

/// Generate at an explicit square resolution (e.g. 200 for full scale).
pub fn generate_synthetic_sized(n: usize, side: usize, seed: u64) -> Result<Vec<LabeledImage>> {
    if n < 2 {
        return Err(Error::config(format!(
            "synthetic generation needs n >= 2, got {n}"
        )));
    }
    if side < 4 {
        return Err(Error::config(format!(
            "synthetic image side must be at least 4, got {side}"
        )));
    }
    (0..n)
        .map(|index| {
            let label = (index % 2) as u8;
            let mut rng =
                RngStream::for_phase(seed, ITER_INIT, index as u64, PH_GENERATE).rng();
            let image = if label == 0 {
                smooth_ellipse(side, &mut rng)
            } else {
                irregular_blob(side, &mut rng)
            };
            Ok(LabeledImage {
                image,
                label,
                source_id: format!("synthetic-{index}"),
            })
        })
        .collect()
}

/// Parameters both classes share, drawn from deliberately narrow ranges so
/// overall brightness, lesion size, and placement carry no class signal —
/// the classes differ only in boundary regularity and interior texture.
struct LesionBase {
    bg: f64,
    cx: f64,
    cy: f64,
    r0: f64,
    base: f64,
}

fn lesion_base<R: Rng>(side: usize, rng: &mut R) -> LesionBase {
    let s = side as f64;
    LesionBase {
        bg: rng.gen_range(0.10..0.16),
        cx: s * rng.gen_range(0.42..0.58),
        cy: s * rng.gen_range(0.42..0.58),
        r0: s * rng.gen_range(0.26..0.34),
        base: rng.gen_range(0.55..0.65),
    }
}

/// Class 0: a smooth near-circular lesion with a wide soft rim — almost all
/// of its wavelet energy sits in the approximation band.
fn smooth_ellipse<R: Rng>(side: usize, rng: &mut R) -> Image {
    let shared = lesion_base(side, rng);
    let eccentricity: f64 = rng.gen_range(0.8..1.25);
    let angle = rng.gen_range(0.0..std::f64::consts::PI);
    let semi_a = shared.r0 * eccentricity.sqrt();
    let semi_b = shared.r0 / eccentricity.sqrt();
    let (sin_a, cos_a) = angle.sin_cos();
    let edge = 0.25; // halfwidth in normalized radial units: a wide, smooth rim

    let mut image = Image::zeros(1, side, side);
    for y in 0..side {
        for x in 0..side {
            let dx = x as f64 - shared.cx;
            let dy = y as f64 - shared.cy;
            let u = (dx * cos_a + dy * sin_a) / semi_a;
            let v = (-dx * sin_a + dy * cos_a) / semi_b;
            let d = (u * u + v * v).sqrt();
            let alpha = smoothstep((1.0 + edge - d) / (2.0 * edge));
            let value = shared.bg + (shared.base - shared.bg) * alpha;
            image.set(0, y, x, value.clamp(0.0, 1.0));
        }
    }
    image
}

/// Class 1: the same lesion geometry but with an irregular boundary
/// (harmonics 3..=6 of the polar angle), a strong sinusoidal texture, and
/// uniform speckle — the detail bands carry the signal.
fn irregular_blob<R: Rng>(side: usize, rng: &mut R) -> Image {
    let shared = lesion_base(side, rng);
    let mut amps = [0.0; 4];
    let mut phases = [0.0; 4];
    for h in 0..4 {
        amps[h] = rng.gen_range(0.25..1.0);
        phases[h] = rng.gen_range(0.0..std::f64::consts::TAU);
    }
    let amp_sum: f64 = amps.iter().sum();
    for a in &mut amps {
        *a /= amp_sum; // |boundary perturbation| <= 0.25 by construction
    }
    let fx = rng.gen_range(0.12..0.28);
    let fy = rng.gen_range(0.12..0.28);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let psi = rng.gen_range(0.0..std::f64::consts::TAU);

    let mut image = Image::zeros(1, side, side);
    for y in 0..side {
        for x in 0..side {
            let speckle = rng.gen_range(-0.20..0.20);
            let dx = x as f64 - shared.cx;
            let dy = y as f64 - shared.cy;
            let dist = (dx * dx + dy * dy).sqrt();
            let theta = dy.atan2(dx);
            let mut wobble = 0.0;
            for h in 0..4 {
                wobble += amps[h] * ((h as f64 + 3.0) * theta + phases[h]).sin();
            }
            let radius = shared.r0 * (1.0 + 0.25 * wobble);
            let d = dist / radius;
            let edge = 1.2 / radius; // ~1-pixel rim: a sharp boundary
            let alpha = smoothstep((1.0 + edge - d) / (2.0 * edge));
            let texture = 1.0
                + 0.50
                    * (std::f64::consts::TAU * fx * x as f64 + phi).sin()
                    * (std::f64::consts::TAU * fy * y as f64 + psi).sin();
            let inside = (shared.base * texture + speckle).clamp(0.0, 1.0);
            let value = shared.bg + (inside - shared.bg) * alpha;
            image.set(0, y, x, value.clamp(0.0, 1.0));
        }
    }
    image
}

fn parse_label(raw: &str, row: usize) -> Result<u8> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "melanoma" | "1" => Ok(1),
        "benign" | "0" => Ok(0),
        other => Err(Error::data(format!(
            "row {row}: unknown label '{other}' (want melanoma, benign, 0, or 1)"
        ))),
    }
}

/// Load a `filename,label` CSV manifest; image paths are resolved relative
/// to the manifest's directory. Errors cite the 1-based data row.
pub fn load_manifest(manifest_path: &Path) -> Result<Vec<LabeledImage>> {
    let content = std::fs::read_to_string(manifest_path)
        .map_err(|e| Error::io(manifest_path.display().to_string(), e))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(content.as_bytes());
    let mut images = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::data(format!("row {row}: {e}")))?;
        if record.len() != 2 {
            return Err(Error::data(format!(
                "row {row}: expected 2 fields (filename,label), got {}",
                record.len()
            )));
        }
        let filename = record[0].trim().to_string();
        let label = parse_label(&record[1], row)?;
        let path = base.join(&filename);
        let raw = pnm::read_file(&path)
            .map_err(|e| Error::data(format!("row {row}: {e}")))?;
        images.push(LabeledImage {
            image: Image::from_raw(&raw)?,
            label,
            source_id: filename,
        });
    }
    if images.is_empty() {
        return Err(Error::data(format!(
            "manifest {} has no data rows",
            manifest_path.display()
        )));
    }
    Ok(images)
}

/// Sample one channel at real coordinates with bilinear weights; neighbors
/// are clamped to the image, which is exactly edge replication.
fn sample_bilinear(image: &Image, c: usize, y: f64, x: f64) -> f64 {
    let clamp_y = |v: i64| v.clamp(0, image.height as i64 - 1) as usize;
    let clamp_x = |v: i64| v.clamp(0, image.width as i64 - 1) as usize;
    let y0 = y.floor();
    let x0 = x.floor();
    let ty = y - y0;
    let tx = x - x0;
    let (y0, y1) = (clamp_y(y0 as i64), clamp_y(y0 as i64 + 1));
    let (x0, x1) = (clamp_x(x0 as i64), clamp_x(x0 as i64 + 1));
    let top = image.at(c, y0, x0) * (1.0 - tx) + image.at(c, y0, x1) * tx;
    let bottom = image.at(c, y1, x0) * (1.0 - tx) + image.at(c, y1, x1) * tx;
    top * (1.0 - ty) + bottom * ty
}

/// Corner-aligned bilinear resize: output corners sample input corners, so
/// constant images stay constant and identity sizes copy pixels exactly.
pub fn resize_bilinear(image: &Image, out_h: usize, out_w: usize) -> Result<Image> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::config(format!(
            "resize target {out_h}x{out_w} must be at least 1x1"
        )));
    }
    let scale_y = if out_h > 1 {
        (image.height - 1) as f64 / (out_h - 1) as f64
    } else {
        0.0
    };
    let scale_x = if out_w > 1 {
        (image.width - 1) as f64 / (out_w - 1) as f64
    } else {
        0.0
    };
    let mut out = Image::zeros(image.channels, out_h, out_w);
    for c in 0..image.channels {
        for y in 0..out_h {
            for x in 0..out_w {
                let sy = if out_h > 1 {
                    y as f64 * scale_y
                } else {
                    (image.height - 1) as f64 / 2.0
                };
                let sx = if out_w > 1 {
                    x as f64 * scale_x
                } else {
                    (image.width - 1) as f64 / 2.0
                };
                out.set(c, y, x, sample_bilinear(image, c, sy, sx));
            }
        }
    }
    Ok(out)
}

/// One augmentation operation. Flips and quarter-turns are exact pixel
/// permutations; rotation and zoom resample bilinearly with edge
/// replication; translation shifts by whole pixels with edge replication.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Augment {
    HFlip,
    VFlip,
    Rot90,
    Rot180,
    Rot270,
    Rotate { degrees: f64 },
    Zoom { factor: f64 },
    Translate { dy: i64, dx: i64 },
}

/// Magnitude ranges for randomly sampled augmentations. The defaults are
/// configuration values, not claims about any particular dataset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub max_rotate_degrees: f64,
    pub zoom_lo: f64,
    pub zoom_hi: f64,
    pub max_shift_fraction: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            max_rotate_degrees: 20.0,
            zoom_lo: 0.9,
            zoom_hi: 1.1,
            max_shift_fraction: 0.1,
        }
    }
}

fn permute<F>(image: &Image, out_h: usize, out_w: usize, src: F) -> Image
where
    F: Fn(usize, usize) -> (usize, usize),
{
    let mut out = Image::zeros(image.channels, out_h, out_w);
    for c in 0..image.channels {
        for y in 0..out_h {
            for x in 0..out_w {
                let (sy, sx) = src(y, x);
                out.set(c, y, x, image.at(c, sy, sx));
            }
        }
    }
    out
}

fn warp<F>(image: &Image, src: F) -> Image
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let mut out = Image::zeros(image.channels, image.height, image.width);
    for c in 0..image.channels {
        for y in 0..image.height {
            for x in 0..image.width {
                let (sy, sx) = src(y as f64, x as f64);
                out.set(c, y, x, sample_bilinear(image, c, sy, sx));
            }
        }
    }
    out
}

/// Apply one augmentation. Quarter-turns of non-square images swap the
/// output dimensions.
pub fn augment(image: &Image, op: Augment) -> Result<Image> {
    let (h, w) = (image.height, image.width);
    Ok(match op {
        Augment::HFlip => permute(image, h, w, |y, x| (y, w - 1 - x)),
        Augment::VFlip => permute(image, h, w, |y, x| (h - 1 - y, x)),
        // Clockwise quarter-turn: output row y comes from input column y
        // read bottom-to-top.
        Augment::Rot90 => permute(image, w, h, |y, x| (h - 1 - x, y)),
        Augment::Rot180 => permute(image, h, w, |y, x| (h - 1 - y, w - 1 - x)),
        Augment::Rot270 => permute(image, w, h, |y, x| (x, w - 1 - y)),
        Augment::Rotate { degrees } => {
            let radians = degrees.to_radians();
            let (sin_t, cos_t) = radians.sin_cos();
            let cy = (h - 1) as f64 / 2.0;
            let cx = (w - 1) as f64 / 2.0;
            warp(image, |y, x| {
                let dy = y - cy;
                let dx = x - cx;
                // Inverse rotation maps each output pixel to its source.
                (
                    cy + dy * cos_t - dx * sin_t,
                    cx + dy * sin_t + dx * cos_t,
                )
            })
        }
        Augment::Zoom { factor } => {
            if factor <= 0.0 {
                return Err(Error::config(format!(
                    "zoom factor must be positive, got {factor}"
                )));
            }
            let cy = (h - 1) as f64 / 2.0;
            let cx = (w - 1) as f64 / 2.0;
            warp(image, |y, x| {
                (cy + (y - cy) / factor, cx + (x - cx) / factor)
            })
        }
        Augment::Translate { dy, dx } => permute(image, h, w, |y, x| {
            let sy = (y as i64 - dy).clamp(0, h as i64 - 1) as usize;
            let sx = (x as i64 - dx).clamp(0, w as i64 - 1) as usize;
            (sy, sx)
        }),
    })
}

/// Draw a random augmentation (uniform over the six op kinds) with
/// magnitudes from the config.
pub fn sample_augment<R: Rng>(
    rng: &mut R,
    config: &AugmentConfig,
    height: usize,
    width: usize,
) -> Augment {
    match rng.gen_range(0..6u32) {
        0 => Augment::HFlip,
        1 => Augment::VFlip,
        2 => *[Augment::Rot90, Augment::Rot180, Augment::Rot270]
            .choose(rng)
            .expect("non-empty"),
        3 => Augment::Rotate {
            degrees: rng.gen_range(-config.max_rotate_degrees..=config.max_rotate_degrees),
        },
        4 => Augment::Zoom {
            factor: rng.gen_range(config.zoom_lo..=config.zoom_hi),
        },
        _ => {
            let max_dy = ((height as f64 * config.max_shift_fraction).round() as i64).max(1);
            let max_dx = ((width as f64 * config.max_shift_fraction).round() as i64).max(1);
            Augment::Translate {
                dy: rng.gen_range(-max_dy..=max_dy),
                dx: rng.gen_range(-max_dx..=max_dx),
            }
        }
    }
}

/// Deterministic assignment of `n` samples to `k` folds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Indices held out for fold `f`, ascending.
    pub fn fold_indices(&self, f: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a == f)
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices trained on when fold `f` is held out, ascending.
    pub fn train_indices(&self, f: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a != f)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Seeded shuffle then round-robin fold assignment; fold sizes differ by at
/// most one.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::config(format!(
            "k-fold split needs 2 <= k <= n, got k={k}, n={n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = RngStream::for_phase(seed, ITER_INIT, 0, PH_KFOLD).rng();
    order.shuffle(&mut rng);
    let mut assignments = vec![0; n];
    for (position, &index) in order.iter().enumerate() {
        assignments[index] = position % k;
    }
    Ok(FoldPlan { k, assignments })
}

/// Seeded shuffle into (train, validation); the validation size is
/// `round(fraction * n)` clamped to [1, n-1].
pub fn train_val_split(
    indices: &[usize],
    val_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = indices.len();
    if n < 2 {
        return Err(Error::config(format!(
            "train/validation split needs at least 2 samples, got {n}"
        )));
    }
    if !(0.0..1.0).contains(&val_fraction) || val_fraction == 0.0 {
        return Err(Error::config(format!(
            "validation fraction must be in (0,1), got {val_fraction}"
        )));
    }
    let mut shuffled = indices.to_vec();
    let mut rng = RngStream::for_phase(seed, ITER_INIT, 0, PH_TRAIN_VAL).rng();
    shuffled.shuffle(&mut rng);
    let val_size = ((val_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let train = shuffled[..n - val_size].to_vec();
    let val = shuffled[n - val_size..].to_vec();
    Ok((train, val))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::dwt2_forward;
    use approx::assert_abs_diff_eq;

    fn gradient_image(h: usize, w: usize) -> Image {
        let mut image = Image::zeros(1, h, w);
        for y in 0..h {
            for x in 0..w {
                image.set(0, y, x, (y * w + x) as f64 / (h * w) as f64);
            }
        }
        image
    }

    fn detail_energy(image: &Image) -> f64 {
        let bands = dwt2_forward(&image.channel_plane(0)).unwrap();
        bands.lh.energy() + bands.hl.energy() + bands.hh.energy()
    }

    #[test]
    fn synthetic_is_balanced_and_in_range() {
        let set = generate_synthetic(10, 3).unwrap();
        assert_eq!(set.len(), 10);
        let positives = set.iter().filter(|s| s.label == 1).count();
        assert_eq!(positives, 5);
        for sample in &set {
            assert_eq!(
                (
                    sample.image.channels(),
                    sample.image.height(),
                    sample.image.width()
                ),
                (1, 32, 32)
            );
            assert!(sample
                .image
                .pixels()
                .iter()
                .all(|&p| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn synthetic_is_deterministic_per_seed() {
        let a = generate_synthetic(6, 11).unwrap();
        let b = generate_synthetic(6, 11).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(6, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn synthetic_rejects_tiny_requests() {
        assert!(generate_synthetic(1, 0).is_err());
        assert!(generate_synthetic_sized(4, 2, 0).is_err());
    }

    #[test]
    fn class_one_has_higher_detail_energy_on_average() {
        let set = generate_synthetic(100, 7).unwrap();
        let mean_of = |label: u8| {
            let energies: Vec<f64> = set
                .iter()
                .filter(|s| s.label == label)
                .map(|s| detail_energy(&s.image))
                .collect();
            energies.iter().sum::<f64>() / energies.len() as f64
        };
        let smooth = mean_of(0);
        let textured = mean_of(1);
        assert!(
            textured > smooth,
            "textured-class mean detail energy {textured} not above smooth-class {smooth}"
        );
    }

    #[test]
    fn normalization_endpoints_and_interior() {
        assert_eq!(normalize_u8(255), 1.0);
        assert_eq!(normalize_u8(0), 0.0);
        assert_eq!(normalize_u8(51), 0.2);
    }

    #[test]
    fn resize_preserves_constants_and_identity() {
        let mut image = Image::zeros(1, 3, 5);
        for y in 0..3 {
            for x in 0..5 {
                image.set(0, y, x, 0.7);
            }
        }
        let resized = resize_bilinear(&image, 4, 9).unwrap();
        assert!(resized.pixels().iter().all(|&p| (p - 0.7).abs() < 1e-12));

        let gradient = gradient_image(6, 4);
        let same = resize_bilinear(&gradient, 6, 4).unwrap();
        assert_eq!(same, gradient);
    }

    #[test]
    fn resize_interpolates_linearly_between_corners() {
        let image = Image::new(1, 2, 2, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let wide = resize_bilinear(&image, 2, 4).unwrap();
        for y in 0..2 {
            assert_abs_diff_eq!(wide.at(0, y, 0), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(wide.at(0, y, 1), 1.0 / 3.0, epsilon = 1e-15);
            assert_abs_diff_eq!(wide.at(0, y, 2), 2.0 / 3.0, epsilon = 1e-15);
            assert_abs_diff_eq!(wide.at(0, y, 3), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn flips_and_quarter_turns_are_exact_cycles() {
        let image = gradient_image(4, 6);
        let hh = augment(&augment(&image, Augment::HFlip).unwrap(), Augment::HFlip).unwrap();
        assert_eq!(hh, image);
        let vv = augment(&augment(&image, Augment::VFlip).unwrap(), Augment::VFlip).unwrap();
        assert_eq!(vv, image);
        let mut turned = image.clone();
        for _ in 0..4 {
            turned = augment(&turned, Augment::Rot90).unwrap();
        }
        assert_eq!(turned, image);
        // Two quarter-turns equal a half-turn.
        let quarter_twice =
            augment(&augment(&image, Augment::Rot90).unwrap(), Augment::Rot90).unwrap();
        assert_eq!(quarter_twice, augment(&image, Augment::Rot180).unwrap());
    }

    #[test]
    fn zoom_identity_and_validation() {
        let image = gradient_image(5, 5);
        assert_eq!(augment(&image, Augment::Zoom { factor: 1.0 }).unwrap(), image);
        assert!(augment(&image, Augment::Zoom { factor: 0.0 }).is_err());
        assert!(augment(&image, Augment::Zoom { factor: -1.5 }).is_err());
    }

    #[test]
    fn translate_shifts_with_edge_replication() {
        let image = gradient_image(3, 3);
        let shifted = augment(&image, Augment::Translate { dy: 0, dx: 1 }).unwrap();
        for y in 0..3 {
            assert_eq!(shifted.at(0, y, 1), image.at(0, y, 0));
            assert_eq!(shifted.at(0, y, 2), image.at(0, y, 1));
            assert_eq!(shifted.at(0, y, 0), image.at(0, y, 0)); // replicated edge
        }
    }

    #[test]
    fn rotation_preserves_constant_images() {
        let mut image = Image::zeros(1, 8, 8);
        for y in 0..8 {
            for x in 0..8 {
                image.set(0, y, x, 0.4);
            }
        }
        let rotated = augment(&image, Augment::Rotate { degrees: 17.0 }).unwrap();
        assert!(rotated.pixels().iter().all(|&p| (p - 0.4).abs() < 1e-12));
    }

    #[test]
    fn sampled_augments_follow_config_ranges() {
        let config = AugmentConfig::default();
        let mut rng = RngStream::for_phase(5, ITER_INIT, 0, 99).rng();
        for _ in 0..200 {
            match sample_augment(&mut rng, &config, 32, 32) {
                Augment::Rotate { degrees } => assert!(degrees.abs() <= 20.0),
                Augment::Zoom { factor } => assert!((0.9..=1.1).contains(&factor)),
                Augment::Translate { dy, dx } => {
                    assert!(dy.abs() <= 3 && dx.abs() <= 3);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn kfold_partitions_exactly() {
        let plan = kfold_split(10, 5, 42).unwrap();
        assert_eq!(plan.fold_sizes(), vec![2; 5]);
        let plan = kfold_split(11, 5, 42).unwrap();
        let mut sizes = plan.fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
        // Partition: every index in exactly one fold.
        let mut seen = vec![false; 11];
        for f in 0..5 {
            for i in plan.fold_indices(f) {
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        // Train/held-out complement.
        let train = plan.train_indices(0);
        let held = plan.fold_indices(0);
        assert_eq!(train.len() + held.len(), 11);
    }

    #[test]
    fn kfold_validates_and_is_seeded() {
        assert!(kfold_split(4, 5, 0).is_err());
        assert!(kfold_split(10, 1, 0).is_err());
        assert_eq!(kfold_split(20, 5, 9).unwrap(), kfold_split(20, 5, 9).unwrap());
        assert_ne!(
            kfold_split(20, 5, 9).unwrap(),
            kfold_split(20, 5, 10).unwrap()
        );
    }

    #[test]
    fn train_val_split_sizes_and_determinism() {
        let indices: Vec<usize> = (0..100).collect();
        let (train, val) = train_val_split(&indices, 0.15, 1).unwrap();
        assert_eq!((train.len(), val.len()), (85, 15));
        let seven: Vec<usize> = (0..7).collect();
        let (train, val) = train_val_split(&seven, 0.15, 1).unwrap();
        assert_eq!((train.len(), val.len()), (6, 1));
        let again = train_val_split(&indices, 0.15, 1).unwrap();
        assert_eq!(again.0, {
            let (t, _) = train_val_split(&indices, 0.15, 1).unwrap();
            t
        });
        // Disjoint and exhaustive.
        let (train, val) = train_val_split(&indices, 0.15, 2).unwrap();
        let mut all: Vec<usize> = train.iter().chain(val.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, indices);
    }

    #[test]
    fn train_val_split_validates() {
        assert!(train_val_split(&[0], 0.15, 0).is_err());
        assert!(train_val_split(&[0, 1], 0.0, 0).is_err());
        assert!(train_val_split(&[0, 1], 1.0, 0).is_err());
        // Tiny n with large fraction still leaves one training sample.
        let (train, val) = train_val_split(&[0, 1], 0.9, 0).unwrap();
        assert_eq!((train.len(), val.len()), (1, 1));
    }

    #[test]
    fn manifest_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let pgm = pnm::RawImage {
            channels: 1,
            height: 2,
            width: 2,
            data: vec![0, 51, 102, 255],
        };
        pnm::write_file(&dir.path().join("a.pgm"), &pgm).unwrap();
        pnm::write_file(&dir.path().join("b.pgm"), &pgm).unwrap();
        let manifest = dir.path().join("manifest.csv");
        std::fs::write(&manifest, "filename,label\na.pgm,melanoma\nb.pgm,BENIGN\n").unwrap();
        let images = load_manifest(&manifest).unwrap();
        assert_eq!(images.len(), 2);
        assert_eq!(images[0].label, 1);
        assert_eq!(images[1].label, 0); // case-insensitive
        assert_eq!(images[0].image.at(0, 0, 1), 0.2);
        assert_eq!(images[0].source_id, "a.pgm");

        std::fs::write(&manifest, "filename,label\na.pgm,1\nmissing.pgm,0\n").unwrap();
        let err = load_manifest(&manifest).unwrap_err().to_string();
        assert!(err.contains("row 2"), "error was: {err}");

        std::fs::write(&manifest, "filename,label\na.pgm,suspicious\n").unwrap();
        let err = load_manifest(&manifest).unwrap_err().to_string();
        assert!(err.contains("row 1") && err.contains("suspicious"), "error was: {err}");
    }
}
