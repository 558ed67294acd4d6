//! Single-level 2-D orthonormal Haar transform: analysis into the four
//! LL/LH/HL/HH sub-bands, exact synthesis, and the sub-band concatenation
//! layer used inside the model.
//!
//! The transform operates on independent 2×2 blocks `[[a,b],[c,d]]`
//! (row-major, `a` top-left) with orthonormal scaling (factor 1/2):
//!
//! ```text
//! ll = (a+b+c+d)/2    lh = (a−b+c−d)/2
//! hl = (a+b−c−d)/2    hh = (a−b−c+d)/2
//! ```
//!
//! The block matrix is orthogonal, so the inverse is its transpose (the same
//! formulas read backwards), reconstruction is exact, and energy is conserved
//! (Parseval). Odd dimensions are rejected rather than padded — silent
//! padding would corrupt the energy invariant the rest of the system relies
//! on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One real-valued image plane (row-major storage).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl Plane {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::config(format!(
                "plane dimensions must be positive, got {height}×{width}"
            )));
        }
        if values.len() != height * width {
            return Err(Error::shape(format!(
                "plane {height}×{width} needs {} values, got {}",
                height * width,
                values.len()
            )));
        }
        Ok(Plane {
            height,
            width,
            values,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Result<Self> {
        Plane::new(height, width, vec![0.0; height * width])
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Result<Self> {
        Plane::new(height, width, vec![value; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.values[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.height && col < self.width);
        self.values[row * self.width + col] = value;
    }

    /// Σ v² over the plane.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// The four half-resolution sub-bands of one analysis level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubbandSet {
    pub ll: Plane,
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
}

impl SubbandSet {
    pub fn new(ll: Plane, lh: Plane, hl: Plane, hh: Plane) -> Result<Self> {
        let shape = (ll.height, ll.width);
        for (name, p) in [("lh", &lh), ("hl", &hl), ("hh", &hh)] {
            if (p.height, p.width) != shape {
                return Err(Error::shape(format!(
                    "sub-band {name} is {}×{} but ll is {}×{}",
                    p.height, p.width, shape.0, shape.1
                )));
            }
        }
        Ok(SubbandSet { ll, lh, hl, hh })
    }

    /// Σ over all four bands of Σ v².
    pub fn energy(&self) -> f64 {
        self.ll.energy() + self.lh.energy() + self.hl.energy() + self.hh.energy()
    }
}

fn require_even(p: &Plane) -> Result<()> {
    if p.height % 2 != 0 {
        return Err(Error::shape(format!(
            "dwt2 requires even dimensions: height {} is odd",
            p.height
        )));
    }
    if p.width % 2 != 0 {
        return Err(Error::shape(format!(
            "dwt2 requires even dimensions: width {} is odd",
            p.width
        )));
    }
    Ok(())
}

/// Analyze a plane into its four sub-bands.
pub fn dwt2_forward(p: &Plane) -> Result<SubbandSet> {
    require_even(p)?;
    let (hh2, ww2) = (p.height / 2, p.width / 2);
    let mut ll = Plane::zeros(hh2, ww2)?;
    let mut lh = Plane::zeros(hh2, ww2)?;
    let mut hl = Plane::zeros(hh2, ww2)?;
    let mut hh = Plane::zeros(hh2, ww2)?;
    for i in 0..hh2 {
        for j in 0..ww2 {
            let a = p.at(2 * i, 2 * j);
            let b = p.at(2 * i, 2 * j + 1);
            let c = p.at(2 * i + 1, 2 * j);
            let d = p.at(2 * i + 1, 2 * j + 1);
            ll.set(i, j, (a + b + c + d) / 2.0);
            lh.set(i, j, (a - b + c - d) / 2.0);
            hl.set(i, j, (a + b - c - d) / 2.0);
            hh.set(i, j, (a - b - c + d) / 2.0);
        }
    }
    SubbandSet::new(ll, lh, hl, hh)
}

/// Synthesize a plane from its four sub-bands — the exact algebraic inverse
/// (and, because the transform is orthonormal, also its adjoint).
pub fn dwt2_inverse(s: &SubbandSet) -> Result<Plane> {
    // SubbandSet construction already guarantees matching shapes.
    let (hh2, ww2) = (s.ll.height, s.ll.width);
    let mut out = Plane::zeros(hh2 * 2, ww2 * 2)?;
    for i in 0..hh2 {
        for j in 0..ww2 {
            let ll = s.ll.at(i, j);
            let lh = s.lh.at(i, j);
            let hl = s.hl.at(i, j);
            let hh = s.hh.at(i, j);
            out.set(2 * i, 2 * j, (ll + lh + hl + hh) / 2.0);
            out.set(2 * i, 2 * j + 1, (ll - lh + hl - hh) / 2.0);
            out.set(2 * i + 1, 2 * j, (ll + lh - hl - hh) / 2.0);
            out.set(2 * i + 1, 2 * j + 1, (ll - lh - hl + hh) / 2.0);
        }
    }
    Ok(out)
}

/// Analyze a channel stack and concatenate the sub-bands band-major:
/// `[ll(ch0..chN), lh(ch0..chN), hl(ch0..chN), hh(ch0..chN)]` — 4× the
/// channels, each half the spatial size. All input planes must share one
/// even-dimensioned shape.
pub fn subband_concat(stack: &[Plane]) -> Result<Vec<Plane>> {
    let Some(first) = stack.first() else {
        return Ok(Vec::new());
    };
    for (c, p) in stack.iter().enumerate() {
        if (p.height, p.width) != (first.height, first.width) {
            return Err(Error::shape(format!(
                "channel {c} is {}×{} but channel 0 is {}×{}",
                p.height, p.width, first.height, first.width
            )));
        }
    }
    let sets: Vec<SubbandSet> = stack.iter().map(dwt2_forward).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(4 * stack.len());
    out.extend(sets.iter().map(|s| s.ll.clone()));
    out.extend(sets.iter().map(|s| s.lh.clone()));
    out.extend(sets.iter().map(|s| s.hl.clone()));
    out.extend(sets.into_iter().map(|s| s.hh));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_plane(h: usize, w: usize, seed: u64) -> Plane {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Plane::new(h, w, (0..h * w).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
    }

    #[test]
    fn single_block_direct_substitution() {
        let p = Plane::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let s = dwt2_forward(&p).unwrap();
        assert_eq!(s.ll.values(), &[5.0]);
        assert_eq!(s.lh.values(), &[-1.0]);
        assert_eq!(s.hl.values(), &[-2.0]);
        assert_eq!(s.hh.values(), &[0.0]);
    }

    #[test]
    fn constant_plane_concentrates_in_ll() {
        let c = 0.7;
        let s = dwt2_forward(&Plane::constant(4, 4, c).unwrap()).unwrap();
        for &v in s.ll.values() {
            assert_abs_diff_eq!(v, 2.0 * c, epsilon = 1e-15);
        }
        for band in [&s.lh, &s.hl, &s.hh] {
            for &v in band.values() {
                assert_abs_diff_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn energy_is_conserved_on_random_plane() {
        let p = random_plane(8, 8, 11);
        let s = dwt2_forward(&p).unwrap();
        let rel = (s.energy() - p.energy()).abs() / p.energy();
        assert!(rel < 1e-9, "relative energy error {rel}");
    }

    #[test]
    fn odd_dimensions_are_rejected_naming_the_axis() {
        let odd_h = Plane::zeros(5, 4).unwrap();
        let err = dwt2_forward(&odd_h).unwrap_err().to_string();
        assert!(err.contains("height 5 is odd"), "got: {err}");
        let odd_w = Plane::zeros(4, 7).unwrap();
        let err = dwt2_forward(&odd_w).unwrap_err().to_string();
        assert!(err.contains("width 7 is odd"), "got: {err}");
    }

    #[test]
    fn inverse_reconstructs_single_block() {
        let p = Plane::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let back = dwt2_inverse(&dwt2_forward(&p).unwrap()).unwrap();
        for (a, b) in back.values().iter().zip(p.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn inverse_of_constant_ll_is_constant_plane() {
        let c = 1.3;
        let s = SubbandSet::new(
            Plane::constant(3, 3, 2.0 * c).unwrap(),
            Plane::zeros(3, 3).unwrap(),
            Plane::zeros(3, 3).unwrap(),
            Plane::zeros(3, 3).unwrap(),
        )
        .unwrap();
        let p = dwt2_inverse(&s).unwrap();
        assert_eq!((p.height(), p.width()), (6, 6));
        for &v in p.values() {
            assert_abs_diff_eq!(v, c, epsilon = 1e-15);
        }
    }

    #[test]
    fn large_round_trip_below_1e10() {
        let p = random_plane(64, 64, 99);
        let back = dwt2_inverse(&dwt2_forward(&p).unwrap()).unwrap();
        let max_err = back
            .values()
            .iter()
            .zip(p.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-10, "max reconstruction error {max_err}");
    }

    #[test]
    fn subband_set_rejects_mismatched_shapes() {
        let err = SubbandSet::new(
            Plane::zeros(2, 2).unwrap(),
            Plane::zeros(2, 3).unwrap(),
            Plane::zeros(2, 2).unwrap(),
            Plane::zeros(2, 2).unwrap(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("lh"));
    }

    #[test]
    fn concat_shapes_and_order() {
        let stack: Vec<Plane> = (0..3).map(|i| random_plane(8, 8, i)).collect();
        let out = subband_concat(&stack).unwrap();
        assert_eq!(out.len(), 12);
        for p in &out {
            assert_eq!((p.height(), p.width()), (4, 4));
        }
        // Band-major: channel c's ll sits at index c, its lh at 3 + c, etc.
        for (c, plane) in stack.iter().enumerate() {
            let s = dwt2_forward(plane).unwrap();
            assert_eq!(out[c], s.ll);
            assert_eq!(out[3 + c], s.lh);
            assert_eq!(out[6 + c], s.hl);
            assert_eq!(out[9 + c], s.hh);
        }
    }

    #[test]
    fn concat_constant_channel() {
        let out = subband_concat(&[Plane::constant(4, 4, 0.25).unwrap()]).unwrap();
        assert_eq!(out.len(), 4);
        for &v in out[0].values() {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
        }
        for band in &out[1..] {
            for &v in band.values() {
                assert_abs_diff_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn concat_empty_stack_is_empty() {
        assert!(subband_concat(&[]).unwrap().is_empty());
    }

    #[test]
    fn linearity_of_forward() {
        let x = random_plane(6, 6, 1);
        let y = random_plane(6, 6, 2);
        let (alpha, beta) = (1.7, -0.4);
        let combined = Plane::new(
            6,
            6,
            x.values()
                .iter()
                .zip(y.values())
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
        .unwrap();
        let sc = dwt2_forward(&combined).unwrap();
        let sx = dwt2_forward(&x).unwrap();
        let sy = dwt2_forward(&y).unwrap();
        for (band_c, (band_x, band_y)) in [
            (&sc.ll, (&sx.ll, &sy.ll)),
            (&sc.lh, (&sx.lh, &sy.lh)),
            (&sc.hl, (&sx.hl, &sy.hl)),
            (&sc.hh, (&sx.hh, &sy.hh)),
        ] {
            for ((c, a), b) in band_c
                .values()
                .iter()
                .zip(band_x.values())
                .zip(band_y.values())
            {
                assert_abs_diff_eq!(*c, alpha * a + beta * b, epsilon = 1e-12);
            }
        }
    }

    proptest! {
        /// Perfect reconstruction and energy conservation on arbitrary
        /// even-sized planes.
        #[test]
        fn round_trip_and_parseval(
            half_h in 1usize..8,
            half_w in 1usize..8,
            seed in 0u64..1000,
        ) {
            let p = random_plane(2 * half_h, 2 * half_w, seed);
            let s = dwt2_forward(&p).unwrap();
            let back = dwt2_inverse(&s).unwrap();
            for (a, b) in back.values().iter().zip(p.values()) {
                prop_assert!((a - b).abs() < 1e-10);
            }
            let energy = p.energy();
            if energy > 1e-12 {
                prop_assert!(((s.energy() - energy) / energy).abs() < 1e-9);
            }
        }
    }
}
