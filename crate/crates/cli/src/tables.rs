//! Builders for every CSV artifact.

use std::f64::consts::FRAC_PI_2;

use laplace_growth::borel::CoefficientStream;
use laplace_growth::contour::LaplaceSplit;
use laplace_growth::diagnostics::WindowStats;
use laplace_growth::lattice::{sparse_window, ZeroLattice};
use laplace_growth::numerics::LogComplex;
use laplace_growth::product::{controls, GrowthProfile, ProductEvaluator};
use laplace_growth::Complex64;

use crate::error::{CliError, CliResult};
use crate::output::{num, Table};

/// Functions whose growth can be profiled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FunctionId {
    /// The canonical product.
    #[value(name = "f")]
    Product,
    /// The Laplace transform over γ, as `f - u`.
    #[value(name = "F")]
    Laplace,
    /// The integral over `I`.
    #[value(name = "u")]
    Interval,
    #[value(name = "exp_2z")]
    Exp2z,
    #[value(name = "sin_2z")]
    Sin2z,
}

impl FunctionId {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionId::Product => "f",
            FunctionId::Laplace => "F",
            FunctionId::Interval => "u",
            FunctionId::Exp2z => "exp_2z",
            FunctionId::Sin2z => "sin_2z",
        }
    }

    /// `φ(z)` in log form.
    pub fn eval(
        &self,
        z: Complex64,
        product: &ProductEvaluator,
        split: &LaplaceSplit,
    ) -> CliResult<LogComplex> {
        Ok(match self {
            FunctionId::Product => product.eval_log_f(z),
            FunctionId::Laplace => split.big_f_via_identity(product, z)?,
            FunctionId::Interval => LogComplex::from(split.u(z)?.value),
            FunctionId::Exp2z => controls::exp_2z(z),
            FunctionId::Sin2z => controls::sin_2z(z),
        })
    }
}

/// `log|φ(re^{iθ})|/r` along one ray; rows keep the order of `radii`.
pub fn profile(
    function: FunctionId,
    theta: f64,
    radii: Vec<f64>,
    product: &ProductEvaluator,
    split: &LaplaceSplit,
) -> CliResult<GrowthProfile> {
    use rayon::prelude::*;
    let values = radii
        .par_iter()
        .map(|&r| {
            function
                .eval(Complex64::from_polar(r, theta), product, split)
                .map(|v| v.log_mag / r)
        })
        .collect::<CliResult<Vec<f64>>>()?;
    Ok(GrowthProfile::new(function.name(), theta, radii, values)?)
}

pub fn zeros_table(lattice: &ZeroLattice, k_export: u32) -> Table {
    let mut t = Table::new(&["k", "j", "re", "im"]);
    for p in lattice.points(k_export.min(lattice.k_max())) {
        t.push(vec![
            p.k.to_string(),
            p.j.to_string(),
            num(p.value.re),
            num(p.value.im),
        ]);
    }
    t
}

/// `n(r)/r` at every `2^k` and at `per_window` radii across each sparse
/// window `[0.75·2^k, 2^k)` (flagged 1).
pub fn counting_table(lattice: &ZeroLattice, per_window: usize) -> CliResult<Table> {
    let mut t = Table::new(&["r", "n", "n_over_r", "sparse_window"]);
    for k in 1..=lattice.k_max() {
        let (lo, hi) = sparse_window(k);
        let step = (hi - lo) / per_window as f64;
        let radii = (0..per_window)
            .map(|i| (lo + step * i as f64, 1))
            .chain([(hi, 0)]);
        for (r, flag) in radii {
            let n = lattice.counting(r)?;
            t.push(vec![
                num(r),
                n.to_string(),
                num(n as f64 / r),
                flag.to_string(),
            ]);
        }
    }
    Ok(t)
}

/// Coefficients up to `m_max`; odd (zero) rows only up to `m = 64`.
pub fn coeffs_table(m_max: u64) -> Table {
    let stream = CoefficientStream;
    let mut t = Table::new(&["m", "sign", "log2_abs_a", "log_abs_c"]);
    for m in 0..=m_max {
        let a = stream.taylor_coefficient(m);
        if a.sign == 0 && m > 64 {
            continue;
        }
        let c = stream.borel_coefficient(m);
        t.push(vec![
            m.to_string(),
            a.sign.to_string(),
            num(a.log2_abs_f64()),
            num(c.ln_abs),
        ]);
    }
    t
}

pub fn profile_table(profiles: &[GrowthProfile]) -> Table {
    let mut t = Table::new(&["function_id", "theta", "r", "value"]);
    for p in profiles {
        for (r, v) in p.radii.iter().zip(&p.values) {
            t.push(vec![p.function_id.clone(), num(p.theta), num(*r), num(*v)]);
        }
    }
    t
}

pub fn windows_table(rows: &[(String, f64, Vec<WindowStats>)]) -> Table {
    let mut t = Table::new(&[
        "function_id",
        "theta",
        "k",
        "r_lo",
        "r_hi",
        "inf",
        "q_low",
        "q_high",
        "sup",
    ]);
    for (id, theta, stats) in rows {
        for w in stats {
            t.push(vec![
                id.clone(),
                num(*theta),
                w.k.to_string(),
                num(w.r_lo),
                num(w.r_hi),
                num(w.inf),
                num(w.q_low),
                num(w.q_high),
                num(w.sup),
            ]);
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityRow {
    pub z: Complex64,
    pub f: Complex64,
    pub u: Complex64,
    pub big_f: Complex64,
}

impl IdentityRow {
    pub fn compute(
        z: Complex64,
        product: &ProductEvaluator,
        split: &LaplaceSplit,
    ) -> CliResult<Self> {
        Ok(Self {
            z,
            f: product.eval_log_f(z).to_complex(),
            u: split.u(z)?.value,
            big_f: split.big_f(z)?.value,
        })
    }

    pub fn residual(&self) -> f64 {
        (self.big_f + self.u - self.f).norm()
    }

    /// Residual over `1 + |f|`.
    pub fn scaled_residual(&self) -> f64 {
        self.residual() / (1.0 + self.f.norm())
    }
}

pub fn identity_table(rows: &[IdentityRow]) -> Table {
    let mut t = Table::new(&[
        "z_re",
        "z_im",
        "f_re",
        "f_im",
        "u_re",
        "u_im",
        "F_re",
        "F_im",
        "residual_abs",
    ]);
    for r in rows {
        t.push(vec![
            num(r.z.re),
            num(r.z.im),
            num(r.f.re),
            num(r.f.im),
            num(r.u.re),
            num(r.u.im),
            num(r.big_f.re),
            num(r.big_f.im),
            num(r.residual()),
        ]);
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InversionRow {
    pub z: Complex64,
    pub direct: Complex64,
    pub contour: Complex64,
}

impl InversionRow {
    pub fn abs_err(&self) -> f64 {
        (self.contour - self.direct).norm()
    }

    /// Error over `1 + |f|`.
    pub fn rel_err(&self) -> f64 {
        self.abs_err() / (1.0 + self.direct.norm())
    }
}

pub fn borel_check_table(rows: &[InversionRow]) -> Table {
    let mut t = Table::new(&[
        "z_re",
        "z_im",
        "direct_re",
        "direct_im",
        "contour_re",
        "contour_im",
        "abs_err",
        "rel_err",
    ]);
    for r in rows {
        t.push(vec![
            num(r.z.re),
            num(r.z.im),
            num(r.direct.re),
            num(r.direct.im),
            num(r.contour.re),
            num(r.contour.im),
            num(r.abs_err()),
            num(r.rel_err()),
        ]);
    }
    t
}

/// Controls and their reference direction.
pub const CONTROLS: [(FunctionId, f64); 2] =
    [(FunctionId::Exp2z, 0.0), (FunctionId::Sin2z, FRAC_PI_2)];

pub fn usage_if(cond: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if cond {
        Err(CliError::Usage(msg()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_rows() {
        let t = counting_table(&ZeroLattice::default(), 8).unwrap();
        assert!(t
            .rows
            .iter()
            .any(|r| r[0] == num(16.0) && r[1] == "30" && r[2] == num(1.875)));
        for row in t.rows.iter().filter(|r| r[3] == "1") {
            assert!(row[2].parse::<f64>().unwrap() <= 4.0 / 3.0);
        }
    }

    #[test]
    fn tiny_lattice_exports_two_zeros() {
        let lat = ZeroLattice::new(1).unwrap();
        let t = zeros_table(&lat, 10);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0], vec!["1", "0", &num(2.0), &num(0.0)]);
    }

    #[test]
    fn coefficient_rows() {
        let t = coeffs_table(200);
        // 65 rows up to m = 64, then only even m.
        assert_eq!(t.rows.len(), 65 + 68);
        assert_eq!(
            t.rows[2],
            vec!["2", "-1", &num(-2.0), &num(2f64.ln() - 2.0 * 2f64.ln())]
        );
        assert!(t.rows.iter().skip(65).all(|r| r[1] != "0"));
    }
}
