//! The canonical product with the dyadic zero set.
//!
//! Grouping the zeros circle by circle gives
//! `f(z) = ∏_{k≥1} (1 - (z/2^k)^{2^k})`, which is what [`ProductEvaluator::eval_log_f`]
//! evaluates. [`ProductEvaluator::eval_log_f_direct`] multiplies the genus-0
//! factors `1 - z/a` one zero at a time and serves as an independent check.

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ZeroLattice;
use crate::numerics::{compensated_sum_real, LogComplex};

/// Offset of the angular grid used for maximum-modulus sampling. Any dyadic
/// fraction of a turn would land on lattice zeros.
pub const ANGLE_OFFSET: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductEvaluator {
    lattice: ZeroLattice,
    tail_margin: u32,
}

impl Default for ProductEvaluator {
    fn default() -> Self {
        Self::new(ZeroLattice::default())
    }
}

impl ProductEvaluator {
    pub fn new(lattice: ZeroLattice) -> Self {
        Self::with_tail_margin(lattice, 6)
    }

    pub fn with_tail_margin(lattice: ZeroLattice, tail_margin: u32) -> Self {
        Self {
            lattice,
            tail_margin,
        }
    }

    pub fn lattice(&self) -> &ZeroLattice {
        &self.lattice
    }

    pub fn tail_margin(&self) -> u32 {
        self.tail_margin
    }

    /// Number of circle factors used at `z`: `2^K >= 4·max(|z|, 1)` plus the
    /// tail margin. Omitted factors differ from 1 by at most `2^{-2^K}`.
    pub fn cutoff(&self, z: Complex64) -> u32 {
        let r = z.norm().max(1.0);
        r.log2().ceil() as u32 + 2 + self.tail_margin
    }

    fn unrotate(&self, z: Complex64) -> Complex64 {
        let rot = self.lattice.rotation();
        if rot == 0.0 {
            z
        } else {
            z * Complex64::from_polar(1.0, -rot)
        }
    }

    /// `f(z)` in log form.
    pub fn eval_log_f(&self, z: Complex64) -> LogComplex {
        let k_cut = self.cutoff(z);
        self.eval_log_f_partial(z, k_cut)
    }

    /// Closed-form product over the circles `k = 1..=k_cut`.
    pub fn eval_log_f_partial(&self, z: Complex64, k_cut: u32) -> LogComplex {
        let z = self.unrotate(z);
        if z.re == 0.0 && z.im == 0.0 {
            return LogComplex::ONE;
        }
        // Work with z² so that f(z) and f(-z) see identical inputs.
        let sq = z * z;
        let (sq_abs, sq_arg) = if sq.re.is_finite() && sq.im.is_finite() {
            (Some(sq.norm()), sq.arg())
        } else {
            (None, 2.0 * z.arg())
        };
        let ln_abs_z = z.norm().ln();

        let mut acc = LogComplex::ONE;
        for k in 1..=k_cut {
            let half = (k as f64 - 1.0).exp2();
            // ln|z²/4^k|; the power-of-two scaling is exact.
            let ln_ratio = match sq_abs {
                Some(a) if a > 0.0 => (a * (-2.0 * k as f64).exp2()).ln(),
                _ => 2.0 * ln_abs_z - 2.0 * k as f64 * LN_2,
            };
            let w = LogComplex::new(half * ln_ratio, half * sq_arg);
            let factor = LogComplex::ONE.lc_add(-w);
            if factor.log_mag < snap_threshold(k, ln_ratio).ln() {
                return LogComplex::ZERO;
            }
            acc = acc.lc_mul(factor);
        }
        acc
    }

    /// Genus-0 product `∏ (1 - z/a)` over every zero with `|a| <= 2^k_cut`,
    /// taken one zero at a time.
    pub fn eval_log_f_direct(&self, z: Complex64, k_cut: u32) -> Result<LogComplex> {
        if k_cut > self.lattice.k_max() {
            return Err(Error::LatticeExhausted {
                radius: (k_cut as f64).exp2(),
                k_max: self.lattice.k_max(),
            });
        }
        let mut logs = Vec::with_capacity(self.lattice.len() as usize);
        let mut args = Vec::with_capacity(logs.capacity());
        for p in self.lattice.points(k_cut) {
            let factor = Complex64::new(1.0, 0.0) - z / p.value;
            if factor.re == 0.0 && factor.im == 0.0 {
                return Ok(LogComplex::ZERO);
            }
            logs.push(factor.norm().ln());
            args.push(factor.arg());
        }
        Ok(LogComplex::new(
            compensated_sum_real(logs),
            compensated_sum_real(args),
        ))
    }

    pub fn log_abs_f(&self, z: Complex64) -> f64 {
        self.eval_log_f(z).log_mag
    }

    /// `log|f(re^{iθ})|/r` on a geometric grid from `r_min` to `r_max`.
    pub fn growth_profile(
        &self,
        theta: f64,
        r_min: f64,
        r_max: f64,
        samples: usize,
    ) -> Result<GrowthProfile> {
        let radii = geometric_grid(r_min, r_max, samples)?;
        GrowthProfile::sample("f", theta, radii, |z| self.eval_log_f(z))
    }

    /// Estimate `log M_f(r)/r` as the maximum over `n_theta` equally spaced
    /// angles. Always a lower bound of the true value.
    pub fn max_modulus(&self, r: f64, n_theta: usize) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "radius must be > 0, got {r}"
            )));
        }
        if n_theta < 8 {
            return Err(Error::InvalidArgument(format!(
                "n_theta must be at least 8, got {n_theta}"
            )));
        }
        Ok(angle_grid(n_theta)
            .map(|t| self.log_abs_f(Complex64::from_polar(r, t)))
            .fold(f64::NEG_INFINITY, f64::max)
            / r)
    }
}

/// Smallest resolvable `|1 - w|` for the factor of circle `k`: the rounding in
/// `w = (z²/4^k)^{2^{k-1}}` grows with `2^k`.
fn snap_threshold(k: u32, ln_ratio: f64) -> f64 {
    8.0 * (k as f64).exp2() * f64::EPSILON * (4.0 + ln_ratio.abs() + 2.0 * k as f64 * LN_2)
}

/// `ANGLE_OFFSET + 2πj/n` for `j = 0..n`.
pub fn angle_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| ANGLE_OFFSET + TAU * j as f64 / n as f64)
}

/// `samples` radii spaced evenly in `log2 r`, endpoints included.
pub fn geometric_grid(r_min: f64, r_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let (l0, l1) = (r_min.log2(), r_max.log2());
    let step = (l1 - l0) / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| {
            if i == 0 {
                r_min
            } else if i == samples - 1 {
                r_max
            } else {
                (l0 + step * i as f64).exp2()
            }
        })
        .collect())
}

/// `per_window` radii `2^{k + i/per_window}` in each window `[2^k, 2^{k+1})`
/// for `k_lo <= k < k_hi`.
pub fn dyadic_grid(k_lo: i32, k_hi: i32, per_window: usize) -> Result<Vec<f64>> {
    if k_hi <= k_lo || per_window == 0 {
        return Err(Error::InvalidArgument(format!(
            "need k_lo < k_hi and per_window > 0, got {k_lo}, {k_hi}, {per_window}"
        )));
    }
    Ok((k_lo..k_hi)
        .flat_map(|k| {
            (0..per_window).map(move |i| (k as f64 + i as f64 / per_window as f64).exp2())
        })
        .collect())
}

/// Samples of `log|φ(re^{iθ})|/r` along one ray.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub function_id: String,
    pub theta: f64,
    pub radii: Vec<f64>,
    /// `-inf` at exact zeros.
    pub values: Vec<f64>,
}

impl GrowthProfile {
    pub fn new(function_id: &str, theta: f64, radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} radii but {} values",
                radii.len(),
                values.len()
            )));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) || radii.first().is_some_and(|r| !(*r > 0.0)) {
            return Err(Error::InvalidArgument(
                "radii must be positive and strictly increasing".into(),
            ));
        }
        Ok(Self {
            function_id: function_id.to_string(),
            theta,
            radii,
            values,
        })
    }

    /// Evaluate `eval` along the ray in parallel; output order follows `radii`.
    pub fn sample<F>(function_id: &str, theta: f64, radii: Vec<f64>, eval: F) -> Result<Self>
    where
        F: Fn(Complex64) -> LogComplex + Sync,
    {
        let values = radii
            .par_iter()
            .map(|&r| eval(Complex64::from_polar(r, theta)).log_mag / r)
            .collect();
        Self::new(function_id, theta, radii, values)
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Reference functions with known growth, used as controls.
pub mod controls {
    use super::*;

    /// `e^{2z}`: indicator `2cos θ`, regular growth.
    pub fn exp_2z(z: Complex64) -> LogComplex {
        LogComplex::exp(2.0 * z)
    }

    /// `sin(2z) = (e^{2iz} - e^{-2iz}) / 2i`: indicator `2|sin θ|`.
    pub fn sin_2z(z: Complex64) -> LogComplex {
        let i = Complex64::new(0.0, 1.0);
        let diff = LogComplex::exp(2.0 * i * z).lc_sub(LogComplex::exp(-2.0 * i * z));
        diff.lc_mul(LogComplex::from_complex(Complex64::new(0.0, -0.5)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ev() -> ProductEvaluator {
        ProductEvaluator::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Plain complex product over circles, no log domain. Only for small |z|.
    fn naive_closed_form(z: Complex64, k_cut: u32) -> Complex64 {
        (1..=k_cut).fold(c(1.0, 0.0), |acc, k| {
            let base = z / (k as f64).exp2();
            acc * (c(1.0, 0.0) - base.powu(1 << k))
        })
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ev().eval_log_f(c(0.0, 0.0)), LogComplex::ONE);
        assert!(ev().eval_log_f(c(2.0, 0.0)).is_zero());

        // 0.747070267971139401156934711303 (mpmath, 50 digits)
        let f1 = ev().eval_log_f(c(1.0, 0.0)).to_complex();
        assert!((f1.re - 0.747_070_267_971_139_4).abs() < 1e-14);
        assert!(f1.im.abs() < 1e-15);

        // f(10) = -4528.92783188059419903 (mpmath)
        let f10 = ev().eval_log_f(c(10.0, 0.0));
        assert!((f10.log_mag - 8.418_240_508_759_482).abs() < 1e-12);
        assert_eq!(f10.arg, PI);
        assert!((f10.to_complex().re + 4_528.927_831_880_594).abs() < 1e-8);
    }

    #[test]
    fn truncated_product_matches_naive_arithmetic() {
        for z in [c(1.0, 0.0), c(0.3, 1.7), c(-3.1, 2.2), c(5.5, -0.25)] {
            let a = ev().eval_log_f_partial(z, 5).to_complex();
            let b = naive_closed_form(z, 5);
            assert!((a - b).norm() <= 1e-12 * b.norm(), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn direct_product_examples() {
        let e = ev();
        let closed = e.eval_log_f_partial(c(1.0, 0.0), 3);
        let direct = e.eval_log_f_direct(c(1.0, 0.0), 3).unwrap();
        assert!((closed.to_complex() - direct.to_complex()).norm() <= 1e-12 * closed.abs());

        for k in 1..=5 {
            assert!(e.eval_log_f_direct(c(-2.0, 0.0), k).unwrap().is_zero());
        }
        assert!(e.eval_log_f_direct(c(0.0, 4.0), 2).unwrap().is_zero());
        assert!(e
            .eval_log_f_direct(c(0.0, 4.0), 1)
            .unwrap()
            .log_mag
            .is_finite());
        assert!(matches!(
            e.eval_log_f_direct(c(1.0, 0.0), 21),
            Err(Error::LatticeExhausted { .. })
        ));
    }

    #[test]
    fn every_lattice_point_is_an_exact_zero() {
        let e = ProductEvaluator::new(ZeroLattice::new(10).unwrap());
        for p in e.lattice().points(10) {
            assert!(
                e.eval_log_f(p.value).is_zero(),
                "k={} j={} z={}",
                p.k,
                p.j,
                p.value
            );
        }
    }

    #[test]
    fn rotated_lattice_moves_the_zeros() {
        let lat = ZeroLattice::with_rotation(12, 0.3).unwrap();
        let e = ProductEvaluator::new(lat);
        for p in lat.points(6) {
            assert!(e.eval_log_f(p.value).is_zero());
        }
        assert!(!e.eval_log_f(c(2.0, 0.0)).is_zero());
        let z = c(3.3, -1.2);
        let d = e.eval_log_f_direct(z, e.cutoff(z)).unwrap();
        let f = e.eval_log_f(z);
        assert!((d.to_complex() - f.to_complex()).norm() <= 1e-10 * f.abs());
    }

    #[test]
    fn cutoff_invariant() {
        for r in [0.0, 0.5, 1.0, 3.0, 4.0, 1000.0, 1e6] {
            let z = c(r, 0.0);
            let k = ev().cutoff(z);
            assert!((k as f64).exp2() >= 4.0 * r.max(1.0));
        }
    }

    #[test]
    fn profile_hits_zeros_on_dyadic_radii() {
        let p = ev().growth_profile(0.0, 256.0, 4096.0, 4 * 64 + 1).unwrap();
        for (r, v) in p.radii.iter().zip(&p.values) {
            if r.log2().fract() == 0.0 {
                assert_eq!(*v, f64::NEG_INFINITY, "r = {r}");
            } else {
                assert!(v.is_finite());
            }
        }
    }

    #[test]
    fn profile_value_near_asymptote() {
        // r = 1.5·2^11: (2/1.5)·ln 3 = 1.46482; exact value 1.45914 (mpmath).
        let r = 0.75 * 4096.0;
        let v = ev().log_abs_f(c(r, 0.0)) / r;
        assert!((v - (2.0 / 1.5) * 3f64.ln()).abs() < 0.02);
        assert!((v - 1.459_137_197_724_955_7).abs() < 1e-9);
    }

    #[test]
    fn profile_is_nearly_angle_independent() {
        // mpmath: 1.37997045649589605 and 1.37997045925788864
        let r = 1000.3;
        let a = ev().log_abs_f(c(r, 0.0)) / r;
        let b = ev().log_abs_f(Complex64::from_polar(r, PI / 5.0)) / r;
        assert!((a - b).abs() < 0.01);
        assert!((a - 1.379_970_456_495_896).abs() < 1e-10);
        assert!((b - 1.379_970_459_257_888_6).abs() < 1e-10);
    }

    #[test]
    fn max_modulus_examples() {
        let e = ev();
        let peak = e
            .max_modulus(4096.0 * std::f64::consts::E / 2.0, 64)
            .unwrap();
        assert!((peak - 4.0 / std::f64::consts::E).abs() < 0.01);
        let trough = e.max_modulus(4096.0, 64).unwrap();
        assert!((trough - 2.0 * LN_2).abs() < 0.01);
        for r in [7.0, 100.0, 3000.0] {
            assert!(e.max_modulus(r, 8).unwrap() <= e.max_modulus(r, 64).unwrap());
        }
        assert!(e.max_modulus(10.0, 4).is_err());
        assert!(e.max_modulus(0.0, 8).is_err());
    }

    #[test]
    fn grids() {
        let g = geometric_grid(256.0, 1024.0, 129).unwrap();
        assert_eq!(g[0], 256.0);
        assert_eq!(g[64], 512.0);
        assert_eq!(g[128], 1024.0);
        assert!(geometric_grid(2.0, 1.0, 10).is_err());
        assert!(geometric_grid(1.0, 2.0, 1).is_err());
        let d = dyadic_grid(3, 5, 4).unwrap();
        assert_eq!(d.len(), 8);
        assert_eq!(d[0], 8.0);
        assert_eq!(d[4], 16.0);
        assert!(GrowthProfile::new("x", 0.0, vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(GrowthProfile::new("x", 0.0, vec![1.0], vec![]).is_err());
    }

    #[test]
    fn controls_match_ordinary_arithmetic() {
        for z in [c(0.7, 0.2), c(-1.5, 3.0), c(2.0, -4.0)] {
            let e = controls::exp_2z(z).to_complex();
            assert!((e - (2.0 * z).exp()).norm() <= 1e-13 * e.norm());
            let s = controls::sin_2z(z).to_complex();
            assert!((s - (2.0 * z).sin()).norm() <= 1e-13 * s.norm());
        }
        assert_eq!(controls::exp_2z(c(300.0, 0.0)).log_mag / 300.0, 2.0);
        let far = controls::sin_2z(c(0.0, 800.0)).log_mag;
        assert!((far - (1600.0 - LN_2)).abs() < 1e-10);
    }

    fn annulus_point() -> impl Strategy<Value = Complex64> {
        (1.0f64..50.0, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn even_function(z in annulus_point()) {
            let a = ev().eval_log_f(z);
            let b = ev().eval_log_f(-z);
            prop_assert!((a.to_complex() - b.to_complex()).norm() <= 1e-12 * a.abs());
        }

        #[test]
        fn conjugation_is_exact(z in annulus_point()) {
            let a = ev().eval_log_f(z);
            let b = ev().eval_log_f(z.conj());
            prop_assert_eq!(a.log_mag, b.log_mag);
            if a.arg != PI {
                prop_assert_eq!(a.arg, -b.arg);
            }
        }

        #[test]
        fn closed_form_agrees_with_direct_product(z in annulus_point()) {
            let e = ev();
            let a = e.eval_log_f(z);
            let b = e.eval_log_f_direct(z, e.cutoff(z)).unwrap();
            prop_assert!((a.to_complex() - b.to_complex()).norm() <= 1e-10 * a.abs());
        }

        #[test]
        fn type_upper_bound(l in 0.0f64..14.0) {
            let r = l.exp2();
            prop_assert!(ev().max_modulus(r, 16).unwrap() <= 2.0 + 0.01);
        }
    }
}
