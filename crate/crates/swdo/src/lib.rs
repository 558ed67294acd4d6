//! swdo — swarm-optimizer toolkit with a wavelet sub-band feature layer,
//! a small trainable image classifier, and reproducible evaluation
//! statistics.
//!
//! The crate is organized bottom-up:
//! - [`core`]: search spaces, populations, deterministic RNG streams,
//!   benchmark objectives;
//! - [`optimizers`]: FOX, GWO/IGWO, and MGTO population optimizers;
//! - [`wavelet`]: single-level orthonormal 2-D Haar analysis/synthesis;
//! - [`dataset`]: synthetic lesion-style image generation, preprocessing,
//!   augmentation, and fold splitting;
//! - [`minimodel`]: a small conv → sub-band → attention → dense classifier
//!   trained with exact analytic gradients;
//! - [`evalstats`]: confusion metrics, two-sample t-tests, and the bundled
//!   five-fold reference tables;
//! - [`tuner`]: 8-hyperparameter search driving the optimizers over the
//!   minimodel;
//! - [`accept`]: the executable acceptance checklist used by the test suite
//!   and by `swdo reproduce`.

pub mod accept;
pub mod core;
pub mod dataset;
pub mod error;
pub mod evalstats;
pub mod minimodel;
pub mod optimizers;
pub mod tuner;
pub mod wavelet;

pub use error::{Error, Result};
