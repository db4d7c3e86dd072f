//! The dyadic zero set: on the circle of radius `2^k` sit the `2^k`-th roots of
//! unity scaled by `2^k`, for `k = 1, 2, …, k_max`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, CompensatedSum};

/// Largest supported circle index; keeps `2^k` and the counts exact.
pub const MAX_K: u32 = 52;

/// A single lattice point with its circle and position indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticePoint {
    pub k: u32,
    pub j: u64,
    pub value: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroLattice {
    k_max: u32,
    rotation: f64,
}

impl Default for ZeroLattice {
    fn default() -> Self {
        Self {
            k_max: 20,
            rotation: 0.0,
        }
    }
}

/// `e^{2πi j/n}` with exact values at quarter turns and exact `±` symmetry.
pub fn root_of_unity(j: u64, n: u64) -> Complex64 {
    debug_assert!(n > 0);
    let j = j % n;
    // Quarter-turn index and the remaining offset inside that quarter.
    let (quarter, rem, denom) = if n.is_multiple_of(4) {
        let q = n / 4;
        (j / q, j % q, n)
    } else if n == 2 {
        (2 * j, 0, n)
    } else {
        (0, j, n)
    };
    let base = if rem == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        let angle = TAU * rem as f64 / denom as f64;
        Complex64::new(angle.cos(), angle.sin())
    };
    match quarter % 4 {
        0 => base,
        1 => Complex64::new(-base.im, base.re),
        2 => Complex64::new(-base.re, -base.im),
        _ => Complex64::new(base.im, -base.re),
    }
}

impl ZeroLattice {
    pub fn new(k_max: u32) -> Result<Self> {
        Self::with_rotation(k_max, 0.0)
    }

    /// Lattice with every zero rotated by `e^{i·rotation}`.
    pub fn with_rotation(k_max: u32, rotation: f64) -> Result<Self> {
        if k_max == 0 || k_max > MAX_K {
            return Err(Error::InvalidArgument(format!(
                "k_max must lie in 1..={MAX_K}, got {k_max}"
            )));
        }
        if !rotation.is_finite() {
            return Err(Error::InvalidArgument("rotation must be finite".into()));
        }
        Ok(Self { k_max, rotation })
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    /// Radius of the outermost circle, `2^k_max`.
    pub fn max_radius(&self) -> f64 {
        (self.k_max as f64).exp2()
    }

    /// Total number of zeros, `2^{k_max+1} - 2`.
    pub fn len(&self) -> u64 {
        (1u64 << (self.k_max + 1)) - 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "radius must be >= 0, got {r}"
            )));
        }
        if r > self.max_radius() {
            return Err(Error::LatticeExhausted {
                radius: r,
                k_max: self.k_max,
            });
        }
        Ok(())
    }

    /// Index of the largest circle inside the closed disc of radius `r`
    /// (0 when `r < 2`).
    fn top_circle(&self, r: f64) -> u32 {
        let mut k = 0;
        while k < self.k_max && ((k + 1) as f64).exp2() <= r {
            k += 1;
        }
        k
    }

    /// The `j`-th zero on circle `k`.
    pub fn zero(&self, k: u32, j: u64) -> Complex64 {
        let n = 1u64 << k;
        let w = root_of_unity(j, n) * (k as f64).exp2();
        if self.rotation == 0.0 {
            w
        } else {
            w * Complex64::from_polar(1.0, self.rotation)
        }
    }

    /// All zeros on circle `k`, ordered by `j`.
    pub fn circle(&self, k: u32) -> impl Iterator<Item = LatticePoint> + '_ {
        (0..(1u64 << k)).map(move |j| LatticePoint {
            k,
            j,
            value: self.zero(k, j),
        })
    }

    /// Zeros on circles `1..=k_last`, ordered by `(k, j)`.
    pub fn points(&self, k_last: u32) -> impl Iterator<Item = LatticePoint> + '_ {
        (1..=k_last.min(self.k_max)).flat_map(move |k| self.circle(k))
    }

    /// All zeros with `|a| <= r`, ordered by `(k, angle index)`.
    pub fn zeros_up_to(&self, r: f64) -> Result<Vec<Complex64>> {
        self.check_radius(r)?;
        Ok(self.points(self.top_circle(r)).map(|p| p.value).collect())
    }

    /// `n(r) = #{a : |a| <= r}`.
    pub fn counting(&self, r: f64) -> Result<u64> {
        self.check_radius(r)?;
        let k = self.top_circle(r);
        Ok(if k == 0 { 0 } else { (1u64 << (k + 1)) - 2 })
    }

    /// `n(r) / r`.
    pub fn normalized_count(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "radius must be > 0, got {r}"
            )));
        }
        Ok(self.counting(r)? as f64 / r)
    }

    /// `Σ_{|a| <= r} 1/a`, summed with compensation in lattice order.
    pub fn reciprocal_sum(&self, r: f64) -> Result<Complex64> {
        self.check_radius(r)?;
        let k = self.top_circle(r);
        Ok(compensated_sum(self.points(k).map(|p| p.value.inv())))
    }

    /// Check the counting and reciprocal-sum conditions for exponential type.
    ///
    /// Both quantities are step functions that only change at `r = 2^k`, so the
    /// dyadic radii cover every `r <= 2^k_max`.
    pub fn verify_z1_z2(&self) -> Z1Z2Report {
        let mut sup = 0.0f64;
        let mut sup_k = 1;
        let mut acc = CompensatedSum::new();
        let mut max_recip = 0.0f64;
        for k in 1..=self.k_max {
            let n = ((1u64 << (k + 1)) - 2) as f64;
            let ratio = n / (k as f64).exp2();
            if ratio > sup {
                sup = ratio;
                sup_k = k;
            }
            for p in self.circle(k) {
                acc.add(p.value.inv());
            }
            max_recip = max_recip.max(acc.value().norm());
        }
        Z1Z2Report {
            k_max: self.k_max,
            sup_normalized_count: sup,
            sup_at_k: sup_k,
            max_reciprocal_abs: max_recip,
            z1_ok: sup <= 2.0,
            z2_ok: max_recip <= Z2_BOUND,
        }
    }
}

/// Bound on the partial reciprocal sums accepted as "bounded" (they vanish
/// identically for this lattice).
pub const Z2_BOUND: f64 = 1e-10;

/// The two conditions on zeros of a function of exponential type, measured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Z1Z2Report {
    pub k_max: u32,
    /// `max_k n(2^k)/2^k`.
    pub sup_normalized_count: f64,
    pub sup_at_k: u32,
    /// `max_r |Σ_{|a|<=r} 1/a|`.
    pub max_reciprocal_abs: f64,
    pub z1_ok: bool,
    pub z2_ok: bool,
}

/// The radius window `[1.5·2^{k-1}, 2^k)` on which `n(r)/r <= 4/3`.
pub fn sparse_window(k: u32) -> (f64, f64) {
    let top = (k as f64).exp2();
    (0.75 * top, top)
}
