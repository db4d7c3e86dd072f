//! Run configuration: a flat TOML file whose keys can all be overridden on
//! the command line.

use std::path::{Path, PathBuf};

use laplace_growth::diagnostics::{MIN_WINDOWS, MIN_WINDOW_SAMPLES};
use laplace_growth::lattice::MAX_K;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::Format;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub k_max: u32,
    /// Direction of the growth profile of `f`.
    pub theta: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples_per_window: usize,
    /// Circle radius for Borel inversion.
    pub contour_radius: f64,
    /// Second radius for the deformation check.
    pub deformation_radius: f64,
    pub q: f64,
    pub gap_tol: f64,
    pub drift_tol: f64,
    /// Tolerance of the inversion and splitting identities, scaled by `1 + |f|`.
    pub tol: f64,
    pub deformation_tol: f64,
    pub product_tol: f64,
    pub reciprocal_tol: f64,
    /// Seed of the random test points.
    pub seed: u64,
    pub test_points: usize,
    /// Directions used for the maximum modulus.
    pub n_theta: usize,
    /// Circles exported to zeros.csv.
    pub zeros_export_k: u32,
    pub cancellation_cap: f64,
    /// Where artifacts go; `reproduce` and `lattice` fall back to `out`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub emit_svg: bool,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k_max: 20,
            theta: 0.0,
            r_min: 256.0,
            r_max: 16384.0,
            samples_per_window: 256,
            contour_radius: 3.0,
            deformation_radius: 5.0,
            q: 0.1,
            gap_tol: 0.02,
            drift_tol: 0.02,
            tol: 1e-7,
            deformation_tol: 1e-8,
            product_tol: 1e-10,
            reciprocal_tol: 1e-12,
            seed: 1,
            test_points: 50,
            n_theta: 64,
            zeros_export_k: 10,
            cancellation_cap: laplace_growth::contour::DEFAULT_CANCELLATION_CAP,
            out_dir: None,
            emit_svg: false,
            format: Format::Csv,
        }
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

impl RunConfig {
    pub fn artifact_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks needed by every command.
    pub fn validate_basic(&self) -> CliResult<()> {
        if !(1..=MAX_K).contains(&self.k_max) {
            return Err(usage(format!(
                "k_max must lie in 1..={MAX_K}, got {}",
                self.k_max
            )));
        }
        let positive = [
            ("tol", self.tol),
            ("deformation_tol", self.deformation_tol),
            ("product_tol", self.product_tol),
            ("reciprocal_tol", self.reciprocal_tol),
            ("gap_tol", self.gap_tol),
            ("drift_tol", self.drift_tol),
            ("cancellation_cap", self.cancellation_cap),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(usage(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.q > 0.0 && self.q < 0.5) {
            return Err(usage(format!("q must lie in (0, 0.5), got {}", self.q)));
        }
        for (name, r) in [
            ("contour_radius", self.contour_radius),
            ("deformation_radius", self.deformation_radius),
        ] {
            if !(2.5..=8.0).contains(&r) {
                return Err(usage(format!("{name} must lie in [2.5, 8], got {r}")));
            }
        }
        if !self.theta.is_finite() {
            return Err(usage("theta must be finite".into()));
        }
        if self.n_theta < 8 {
            return Err(usage(format!(
                "n_theta must be at least 8, got {}",
                self.n_theta
            )));
        }
        Ok(())
    }

    /// The windows `k_lo..k_hi` lying inside `[r_min, r_max]`.
    pub fn window_range(&self) -> CliResult<(i32, i32)> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(usage(format!(
                "need 0 < r_min < r_max, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        let lattice_radius = (self.k_max as f64).exp2();
        let k_lo = self.r_min.log2().ceil() as i32;
        let k_hi = self.r_max.min(lattice_radius).log2().floor() as i32;
        let windows = (k_hi - k_lo).max(0) as usize;
        if self.r_max > lattice_radius || windows < MIN_WINDOWS {
            return Err(usage(format!(
                "window statistics need at least {MIN_WINDOWS} dyadic windows inside both \
                 [r_min, r_max] = [{}, {}] and the lattice radius 2^{} = {}; found {windows}",
                self.r_min, self.r_max, self.k_max, lattice_radius
            )));
        }
        if self.samples_per_window < MIN_WINDOW_SAMPLES {
            return Err(usage(format!(
                "samples_per_window must be at least {MIN_WINDOW_SAMPLES}, got {}",
                self.samples_per_window
            )));
        }
        Ok((k_lo, k_hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate_basic().unwrap();
        assert_eq!(c.window_range().unwrap(), (8, 14));
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig {
            k_max: 14,
            emit_svg: true,
            format: Format::Json,
            out_dir: Some(PathBuf::from("/tmp/x")),
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::from_toml("k_max = 16\ntheta = 0.5\n").unwrap();
        assert_eq!(c.k_max, 16);
        assert_eq!(c.theta, 0.5);
        assert_eq!(c.r_min, 256.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::from_toml("kmax = 3\n"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn tiny_lattice_has_no_windows() {
        let c = RunConfig {
            k_max: 1,
            ..RunConfig::default()
        };
        c.validate_basic().unwrap();
        let err = c.window_range().unwrap_err();
        assert!(err.to_string().contains("window statistics"));
        assert_eq!(err.exit_code(), 1);
    }
}
