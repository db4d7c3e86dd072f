//! Log-domain complex arithmetic, compensated summation and tolerance checks.
//!
//! Every modulus handled by the crate (products with thousands of factors,
//! exponentials `e^{zs}` on contours) is kept as a natural-log magnitude plus an
//! argument so that values spanning `e^{±3000}` never overflow binary64.

use std::f64::consts::{PI, TAU};
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Reduce an angle to `(-π, π]`.
///
/// `normalize_angle(-x) == -normalize_angle(x)` bit-for-bit except at the
/// branch cut, where both sides map to `π`.
#[inline]
pub fn normalize_angle(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let mut y = if x.abs() <= PI {
        x
    } else {
        x - (x / TAU).round() * TAU
    };
    if y <= -PI {
        y += TAU;
    } else if y > PI {
        y -= TAU;
    }
    y
}

/// Complex value stored as `(ln |w|, arg w)`.
///
/// `log_mag == -inf` encodes an exact zero (with `arg == 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_mag: f64,
    pub arg: f64,
}

impl LogComplex {
    pub const ZERO: Self = Self {
        log_mag: f64::NEG_INFINITY,
        arg: 0.0,
    };
    pub const ONE: Self = Self {
        log_mag: 0.0,
        arg: 0.0,
    };

    /// Build from parts, normalizing the argument.
    pub fn new(log_mag: f64, arg: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                log_mag,
                arg: normalize_angle(arg),
            }
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        Self {
            log_mag: z.re.hypot(z.im).ln(),
            arg: z.im.atan2(z.re),
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// `e^w` for an ordinary complex exponent.
    pub fn exp(w: Complex64) -> Self {
        Self::new(w.re, w.im)
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let m = self.log_mag.exp();
        let (c, s) = cos_sin(self.arg);
        Complex64::new(m * c, m * s)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    /// `|w|` (may overflow to `inf`; use `log_mag` when that matters).
    pub fn abs(self) -> f64 {
        self.log_mag.exp()
    }

    pub fn conj(self) -> Self {
        Self::new(self.log_mag, -self.arg)
    }

    pub fn recip(self) -> Self {
        if self.is_zero() {
            return Self {
                log_mag: f64::INFINITY,
                arg: 0.0,
            };
        }
        Self::new(-self.log_mag, -self.arg)
    }

    /// `w^p` for real `p`, principal branch.
    pub fn powf(self, p: f64) -> Self {
        if self.is_zero() {
            return if p == 0.0 { Self::ONE } else { Self::ZERO };
        }
        Self::new(p * self.log_mag, p * self.arg)
    }

    /// Product: log magnitudes add, arguments add. Zero absorbs.
    pub fn lc_mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_mag + other.log_mag, self.arg + other.arg)
    }

    /// Sum, formed by rescaling with the larger operand.
    ///
    /// The pivot is chosen by a total order on `(log_mag, arg)`, so the result
    /// does not depend on operand order.
    pub fn lc_add(self, other: Self) -> Self {
        let (big, small) = if pivot_first(self, other) {
            (self, other)
        } else {
            (other, self)
        };
        if small.is_zero() {
            return big;
        }
        let ratio = (small.log_mag - big.log_mag).exp();
        let phase = small.arg - big.arg;
        let (cos, sin) = cos_sin(phase);
        let re = 1.0 + ratio * cos;
        let im = ratio * sin;
        if re == 0.0 && im == 0.0 {
            return Self::ZERO;
        }
        let rel = 0.5 * (re * re + im * im).ln();
        // ln|1+t| loses digits through `re*re + im*im` when t is tiny.
        let rel = if ratio < 1e-3 {
            ln_abs_one_plus(ratio, phase)
        } else {
            rel
        };
        Self::new(big.log_mag + rel, big.arg + im.atan2(re))
    }

    pub fn lc_sub(self, other: Self) -> Self {
        self.lc_add(-other)
    }
}

/// `(cos x, sin x)`, exact at multiples of a quarter turn.
#[inline]
pub(crate) fn cos_sin(x: f64) -> (f64, f64) {
    const HALF_PI: f64 = PI / 2.0;
    if x == 0.0 {
        (1.0, 0.0)
    } else if x == PI || x == -PI {
        (-1.0, 0.0)
    } else if x == HALF_PI {
        (0.0, 1.0)
    } else if x == -HALF_PI {
        (0.0, -1.0)
    } else {
        (x.cos(), x.sin())
    }
}

fn pivot_first(a: LogComplex, b: LogComplex) -> bool {
    match a.log_mag.partial_cmp(&b.log_mag) {
        Some(std::cmp::Ordering::Greater) => true,
        Some(std::cmp::Ordering::Less) => false,
        _ => a.arg >= b.arg,
    }
}

/// `ln |1 + ρ e^{iφ}|` for small `ρ`.
fn ln_abs_one_plus(rho: f64, phi: f64) -> f64 {
    // |1+t|^2 = 1 + 2ρcosφ + ρ²
    0.5 * (rho * (2.0 * phi.cos() + rho)).ln_1p()
}

impl Mul for LogComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.lc_mul(rhs)
    }
}

impl Neg for LogComplex {
    type Output = Self;
    fn neg(self) -> Self {
        if self.is_zero() {
            return self;
        }
        // Shift toward zero so that -conj(w) == conj(-w) bit-for-bit.
        let arg = if self.arg > 0.0 {
            self.arg - PI
        } else {
            self.arg + PI
        };
        Self {
            log_mag: self.log_mag,
            arg,
        }
    }
}

impl From<Complex64> for LogComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

/// Absolute-plus-relative closeness test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    pub const fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol }
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }

    pub fn close_complex(&self, a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= self.abs_tol + self.rel_tol * a.norm().max(b.norm())
    }
}

/// Neumaier-compensated accumulator over complex terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

#[inline]
fn neumaier_step((s, c): (f64, f64), x: f64) -> (f64, f64) {
    let t = s + x;
    let c = if s.abs() >= x.abs() {
        c + ((s - t) + x)
    } else {
        c + ((x - t) + s)
    };
    (t, c)
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re = neumaier_step(self.re, z.re);
        self.im = neumaier_step(self.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Compensated left-to-right sum of complex terms.
pub fn compensated_sum<I>(terms: I) -> Complex64
where
    I: IntoIterator<Item = Complex64>,
{
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Compensated sum of real terms.
pub fn compensated_sum_real<I>(terms: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut acc = (0.0, 0.0);
    for t in terms {
        acc = neumaier_step(acc, t);
    }
    acc.0 + acc.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_examples() {
        let p = LogComplex::new(LN_2, 0.0).lc_mul(LogComplex::new(3f64.ln(), PI));
        assert!((p.log_mag - 6f64.ln()).abs() < 1e-15);
        assert_eq!(p.arg, PI);

        let z = LogComplex::ZERO.lc_mul(LogComplex::new(5.0, 1.0));
        assert_eq!(z, LogComplex::ZERO);

        let m = LogComplex::new(0.0, PI / 2.0).lc_mul(LogComplex::new(0.0, PI / 2.0));
        assert_eq!(m.log_mag, 0.0);
        assert_eq!(m.arg, PI);
    }

    #[test]
    fn add_examples() {
        let s = LogComplex::new(3f64.ln(), 0.0).lc_add(LogComplex::new(0.0, PI));
        assert!((s.log_mag - LN_2).abs() < 1e-15);
        assert_eq!(s.arg, 0.0);

        let z = LogComplex::ONE.lc_add(LogComplex::new(0.0, PI));
        assert!(z.is_zero());
        assert_eq!(z.arg, 0.0);

        // ln(1 + e^-10) = 4.539889921686464677e-5 (mpmath, 30 digits)
        let big = LogComplex::new(700.0, 0.0).lc_add(LogComplex::new(690.0, 0.0));
        assert!((big.log_mag - (700.0 + 4.539_889_921_686_465e-5)).abs() < 1e-12);
        assert_eq!(big.arg, 0.0);
    }

    #[test]
    fn add_of_zero_is_identity() {
        let a = LogComplex::new(2.0, -1.0);
        assert_eq!(a.lc_add(LogComplex::ZERO), a);
        assert_eq!(LogComplex::ZERO.lc_add(a), a);
    }

    #[test]
    fn normalization_keeps_pi_and_rejects_minus_pi() {
        assert_eq!(normalize_angle(-PI), PI);
        assert_eq!(normalize_angle(PI), PI);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-15);
        assert!((normalize_angle(1000.0) - (1000.0 - 159.0 * TAU)).abs() < 1e-12);
        assert_eq!(normalize_angle(-2.5), -normalize_angle(2.5));
    }

    #[test]
    fn compensated_examples() {
        assert_eq!(
            compensated_sum([c(1e16, 0.0), c(1.0, 0.0), c(-1e16, 0.0)]),
            c(1.0, 0.0)
        );
        assert_eq!(compensated_sum(std::iter::empty()), c(0.0, 0.0));
        let s = compensated_sum(std::iter::repeat_n(c(0.1, -0.1), 1_000_000));
        assert!((s.re - 100_000.0).abs() < 1e-6);
        assert!((s.im + 100_000.0).abs() < 1e-6);
        assert_eq!(compensated_sum_real([1e16, 1.0, -1e16]), 1.0);
    }

    #[test]
    fn tolerance_rule() {
        let t = Tolerance::new(1e-3, 1e-2);
        assert!(t.close(100.0, 101.0));
        assert!(!t.close(100.0, 101.1));
        assert!(t.close(0.0, 1e-3));
    }

    fn finite_complex() -> impl Strategy<Value = Complex64> {
        (-690.0f64..690.0, -PI..PI).prop_map(|(l, a)| Complex64::from_polar(l.exp(), a))
    }

    fn log_complex() -> impl Strategy<Value = LogComplex> {
        (-50.0f64..50.0, -PI..PI).prop_map(|(l, a)| LogComplex::new(l, a))
    }

    proptest! {
        #[test]
        fn mul_commutes_and_associates(a in log_complex(), b in log_complex(), d in log_complex()) {
            let ab = a.lc_mul(b);
            let ba = b.lc_mul(a);
            prop_assert_eq!(ab, ba);
            let l = ab.lc_mul(d);
            let r = a.lc_mul(b.lc_mul(d));
            let ulp8 = 8.0 * f64::EPSILON;
            let scale = a.log_mag.abs().max(b.log_mag.abs()).max(d.log_mag.abs()).max(1.0);
            prop_assert!((l.log_mag - r.log_mag).abs() <= ulp8 * scale);
            let darg = normalize_angle(l.arg - r.arg).abs();
            prop_assert!(darg <= ulp8 * PI);
        }

        #[test]
        fn add_is_symmetric_bitwise(a in log_complex(), b in log_complex()) {
            let x = a.lc_add(b);
            let y = b.lc_add(a);
            prop_assert_eq!(x.log_mag.to_bits(), y.log_mag.to_bits());
            prop_assert_eq!(x.arg.to_bits(), y.arg.to_bits());
        }

        #[test]
        fn add_matches_ordinary_arithmetic(x in finite_complex(), y in finite_complex()) {
            let s = LogComplex::from(x).lc_add(LogComplex::from(y));
            // Scale out the common magnitude before comparing so x+y itself cannot overflow.
            let scale = x.norm().max(y.norm());
            let exact = x / scale + y / scale;
            let got = LogComplex::new(s.log_mag - scale.ln(), s.arg).to_complex();
            let bound = 1e-13 * (x.norm() + y.norm()) / scale;
            prop_assert!((got - exact).norm() <= bound, "err {} bound {}", (got - exact).norm(), bound);
        }

        #[test]
        fn round_trip_is_faithful(x in finite_complex()) {
            let back = LogComplex::from(x).to_complex();
            let lm = x.norm().ln().abs();
            // ln|x| carries half an ulp of its own magnitude, which exp() turns
            // into a relative error of that size.
            let bound = 4.0 * f64::EPSILON * (1.0 + lm) * x.norm();
            prop_assert!((back - x).norm() <= bound);
        }

        #[test]
        fn round_trip_within_4_ulp_near_unit_modulus(
            l in -1.0f64..1.0, a in -PI..PI
        ) {
            let x = Complex64::from_polar(l.exp(), a);
            let back = LogComplex::from(x).to_complex();
            prop_assert!((back - x).norm() <= 4.0 * f64::EPSILON * x.norm());
        }

        #[test]
        fn conj_is_exact(a in log_complex()) {
            let c = a.conj();
            prop_assert_eq!(c.log_mag, a.log_mag);
            if a.arg != PI {
                prop_assert_eq!(c.arg, -a.arg);
            }
        }
    }
}
