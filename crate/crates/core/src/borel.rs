//! Taylor coefficients of the canonical product and its Borel transform.
//!
//! Expanding `∏_{k≥1} (1 - z^{2^k}/2^{k·2^k})` picks at most one term from each
//! factor, so the coefficient of `z^m` is nonzero exactly when `m` is even, and
//! then equals `∏_{k∈S} (-2^{-k·2^k})` where `S` is the set of bits of `m`.

use std::f64::consts::{E, LN_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{CompensatedSum, LogComplex};

/// A dyadic rational `sign · 2^{log2_abs}`; `sign == 0` is an exact zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicCoefficient {
    pub sign: i8,
    pub log2_abs: i64,
}

impl DyadicCoefficient {
    pub const ZERO: Self = Self {
        sign: 0,
        log2_abs: 0,
    };

    /// `log2 |a|`, `-inf` for zero.
    pub fn log2_abs_f64(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.log2_abs as f64
        }
    }

    pub fn value(&self) -> f64 {
        self.sign as f64 * (self.log2_abs as f64).exp2()
    }
}

/// A real number stored as `sign · e^{ln_abs}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub fn value(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * self.ln_abs.exp()
        }
    }
}

/// Closed-form indexer over the Taylor coefficients `a_m` of `f`
/// (`f(z) = Σ a_m z^m`) and the Borel-weighted `c_m = m!·a_m`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientStream;

impl CoefficientStream {
    /// Coefficient of `z^m`, exact in sign and binary exponent.
    pub fn taylor_coefficient(&self, m: u64) -> DyadicCoefficient {
        if m & 1 == 1 {
            return DyadicCoefficient::ZERO;
        }
        let mut sign = 1i8;
        let mut exponent = 0i128;
        let mut bits = m;
        while bits != 0 {
            let k = bits.trailing_zeros() as i128;
            sign = -sign;
            exponent -= k << k;
            bits &= bits - 1;
        }
        DyadicCoefficient {
            sign,
            // Saturates only for m >= 2^58, far past any usable index.
            log2_abs: exponent.max(i64::MIN as i128) as i64,
        }
    }

    /// `c_m = m!·a_m` with the factorial taken through `ln Γ(m+1)`.
    pub fn borel_coefficient(&self, m: u64) -> SignedLog {
        let a = self.taylor_coefficient(m);
        if a.sign == 0 {
            return SignedLog {
                sign: 0,
                ln_abs: f64::NEG_INFINITY,
            };
        }
        SignedLog {
            sign: a.sign,
            ln_abs: ln_factorial(m) + a.log2_abs as f64 * LN_2,
        }
    }
}

fn ln_factorial(m: u64) -> f64 {
    if m < 2 {
        0.0
    } else {
        libm::lgamma(m as f64 + 1.0)
    }
}

/// Upper bound on `|c_m| / |s|^m`:
/// `√(2πm)·(4/(e|s|))^m·e^{1/(12m)}`, valid for every `m >= 1`.
pub fn term_envelope(m: u64, s_abs: f64) -> f64 {
    ln_term_envelope(m, s_abs).exp()
}

pub fn ln_term_envelope(m: u64, s_abs: f64) -> f64 {
    let m = m as f64;
    0.5 * (TAU * m).ln() + m * (4.0 / (E * s_abs)).ln() + 1.0 / (12.0 * m)
}

/// Bound on `Σ_{m' >= m} envelope(m')`, or `None` while the envelope still grows.
fn tail_bound(m: u64, s_abs: f64) -> Option<f64> {
    let rho = 4.0 / (E * s_abs);
    let mf = m as f64;
    // Ratio of consecutive envelopes is at most ρ·√((m+1)/m) from here on.
    let q = rho * ((mf + 1.0) / mf).sqrt();
    if q >= 1.0 {
        None
    } else {
        Some(term_envelope(m, s_abs) / (1.0 - q))
    }
}

/// Hard cap on series length; only reachable through misuse of `term_floor`.
const MAX_TERMS: u64 = 1 << 20;

/// Evaluates `g(s) = Σ c_m / s^{m+1}` for `|s| >= min_modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelEvaluator {
    pub stream: CoefficientStream,
    min_modulus: f64,
    term_floor: f64,
}

impl Default for BorelEvaluator {
    fn default() -> Self {
        Self {
            stream: CoefficientStream,
            min_modulus: 2.5,
            term_floor: 1e-18,
        }
    }
}

/// Series value plus the bookkeeping of the stopping rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BorelValue {
    pub value: Complex64,
    /// Index of the last term added.
    pub last_m: u64,
    /// Bound on the omitted tail.
    pub tail_bound: f64,
}

impl BorelEvaluator {
    pub fn new(min_modulus: f64, term_floor: f64) -> Result<Self> {
        if !(min_modulus > 2.0) || !min_modulus.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "min_modulus must exceed 2, got {min_modulus}"
            )));
        }
        if !(term_floor > 0.0 && term_floor < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "term_floor must lie in (0, 1), got {term_floor}"
            )));
        }
        Ok(Self {
            stream: CoefficientStream,
            min_modulus,
            term_floor,
        })
    }

    pub fn min_modulus(&self) -> f64 {
        self.min_modulus
    }

    pub fn term_floor(&self) -> f64 {
        self.term_floor
    }

    pub fn borel_eval(&self, s: Complex64) -> Result<Complex64> {
        self.borel_eval_detailed(s).map(|v| v.value)
    }

    /// Sum terms until the analytic tail bound drops below
    /// `term_floor·|partial sum|`. Zero coefficients never stop the loop.
    pub fn borel_eval_detailed(&self, s: Complex64) -> Result<BorelValue> {
        let s_abs = s.norm();
        // A few ulps of slack so nodes placed on the boundary circle are accepted.
        if !(s_abs >= self.min_modulus * (1.0 - 4.0 * f64::EPSILON)) || !s_abs.is_finite() {
            return Err(Error::Domain(format!(
                "|s| = {s_abs} is inside the refused disc of radius {}",
                self.min_modulus
            )));
        }
        // Only even powers occur: g(s) = s^{-1} Σ c_m (s²)^{-m/2}, which makes
        // g(-s) = -g(s) and g(conj s) = conj g(s) hold exactly.
        let sq = s * s;
        let log_sq = if sq.re.is_finite() && sq.im.is_finite() {
            LogComplex::from(sq)
        } else {
            LogComplex::from(s).powf(2.0)
        };
        let inv_s = s.inv();
        let mut acc = CompensatedSum::new();
        let mut m = 0u64;
        loop {
            let c = self.stream.borel_coefficient(m);
            if c.sign != 0 {
                let half = (m / 2) as f64;
                let term = LogComplex::new(c.ln_abs - half * log_sq.log_mag, -half * log_sq.arg);
                acc.add(term.to_complex() * c.sign as f64);
            }
            let next = m + 1;
            if let Some(tail) = tail_bound(next, s_abs) {
                if tail <= self.term_floor * acc.value().norm() {
                    return Ok(BorelValue {
                        value: acc.value() * inv_s,
                        last_m: m,
                        tail_bound: tail * inv_s.norm(),
                    });
                }
            }
            if next >= MAX_TERMS {
                return Err(Error::Domain(format!(
                    "series at s = {s} did not reach the term floor within {MAX_TERMS} terms"
                )));
            }
            m = next;
        }
    }
}
