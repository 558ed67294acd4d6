//! Standard benchmark objectives used to verify optimizer behaviour.
//!
//! All four are minimization problems with known optima:
//! sphere and rastrigin at the origin (value 0), rosenbrock at the all-ones
//! point (value 0), ackley at the origin (value 0 up to floating-point
//! residue). Domains follow the usual textbook boxes.

use std::f64::consts::{E, PI};

use crate::core::SearchSpace;
use crate::error::{Error, Result};

/// Σ xᵢ²
pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// 10·D + Σ (xᵢ² − 10·cos(2π xᵢ))
pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

/// Σ 100·(xᵢ₊₁ − xᵢ²)² + (1 − xᵢ)²  — requires at least two dimensions.
pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

/// −20·exp(−0.2·√(Σx²/D)) − exp(Σcos(2πx)/D) + 20 + e
pub fn ackley(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sum_sq: f64 = x.iter().map(|v| v * v).sum();
    let sum_cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
    -20.0 * (-0.2 * (sum_sq / d).sqrt()).exp() - (sum_cos / d).exp() + 20.0 + E
}

/// Names accepted by [`benchmark`] and [`benchmark_space`].
pub const BENCHMARK_NAMES: [&str; 4] = ["sphere", "rastrigin", "rosenbrock", "ackley"];

/// Evaluate a benchmark by name.
pub fn benchmark(name: &str, x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::config("benchmark input needs at least one dimension"));
    }
    match name {
        "sphere" => Ok(sphere(x)),
        "rastrigin" => Ok(rastrigin(x)),
        "rosenbrock" => {
            if x.len() < 2 {
                Err(Error::config("rosenbrock requires at least 2 dimensions"))
            } else {
                Ok(rosenbrock(x))
            }
        }
        "ackley" => Ok(ackley(x)),
        other => Err(Error::config(format!(
            "unknown benchmark '{other}' (expected one of {BENCHMARK_NAMES:?})"
        ))),
    }
}

/// Standard search box for a named benchmark.
pub fn benchmark_space(name: &str, dims: usize) -> Result<SearchSpace> {
    match name {
        "sphere" | "rastrigin" => SearchSpace::cube(dims, -5.12, 5.12),
        "rosenbrock" => {
            if dims < 2 {
                Err(Error::config("rosenbrock requires at least 2 dimensions"))
            } else {
                SearchSpace::cube(dims, -5.0, 10.0)
            }
        }
        "ackley" => SearchSpace::cube(dims, -32.768, 32.768),
        other => Err(Error::config(format!(
            "unknown benchmark '{other}' (expected one of {BENCHMARK_NAMES:?})"
        ))),
    }
}
