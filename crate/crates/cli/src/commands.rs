//! Argument parsing and the thin command wrappers.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use laplace_growth::borel::BorelEvaluator;
use laplace_growth::contour::{LaplaceConfig, LaplaceSplit};
use laplace_growth::diagnostics::{classify_stats, window_stats, ClassifyParams};
use laplace_growth::lattice::ZeroLattice;
use laplace_growth::product::{geometric_grid, ProductEvaluator};
use laplace_growth::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, json_num, num, write_file, Format, Table};
use crate::points::parse_complex;
use crate::reproduce;
use crate::tables::{self, FunctionId, IdentityRow, InversionRow};

#[derive(Debug, Parser)]
#[command(
    name = "lapgrowth",
    version,
    about = "An entire function of exponential type whose Laplace representation grows irregularly"
)]
pub struct Cli {
    /// Flat TOML file with run settings; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for artifacts.
    #[arg(long, global = true, value_name = "PATH")]
    pub out_dir: Option<PathBuf>,
    /// Number of zero circles in the lattice.
    #[arg(long, global = true, value_name = "N")]
    pub k_max: Option<u32>,
    /// Tolerance of the inversion and splitting checks, scaled by 1 + |f|.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Output format on stdout.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export the zero lattice and the counting function.
    Lattice {
        /// Last circle written to zeros.csv.
        #[arg(long)]
        export_k: Option<u32>,
        /// Radii per sparse window in counting.csv.
        #[arg(long, default_value_t = 8)]
        per_window: usize,
    },
    /// Evaluate a function at points.
    Eval {
        #[arg(long, required = true, allow_hyphen_values = true, action = clap::ArgAction::Append)]
        z: Vec<String>,
        #[arg(long, value_enum, default_value = "f")]
        function: FunctionId,
    },
    /// Sample log|φ(re^{iθ})|/r along a ray.
    Profile(ProfileArgs),
    /// Taylor coefficients, the Borel transform and its inversion.
    Borel(BorelArgs),
    /// Contour integrals: the splitting identity and inversion.
    Contour {
        #[command(subcommand)]
        command: ContourCommand,
    },
    /// Window statistics and the growth verdict of one ray.
    Diagnose {
        #[command(flatten)]
        ray: ProfileArgs,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        gap_tol: Option<f64>,
        #[arg(long)]
        drift_tol: Option<f64>,
    },
    /// Run every check and write all artifacts and the report.
    Reproduce,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, value_enum, default_value = "f")]
    pub function: FunctionId,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub samples_per_window: Option<usize>,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct BorelArgs {
    #[command(subcommand)]
    pub command: Option<BorelCommand>,
    /// Shorthand for `borel eval --s`.
    #[arg(long, allow_hyphen_values = true, action = clap::ArgAction::Append)]
    pub s: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum BorelCommand {
    /// Taylor coefficients `a_m` and `c_m = m!·a_m`.
    Coeffs {
        #[arg(long, default_value_t = 256)]
        m_max: u64,
    },
    /// `g(s)` for `|s| >= 2.5`.
    Eval {
        #[arg(long, required = true, allow_hyphen_values = true, action = clap::ArgAction::Append)]
        s: Vec<String>,
    },
    /// Recover `f(z)` from `g` on a circle.
    Invert {
        #[arg(long, required = true, allow_hyphen_values = true, action = clap::ArgAction::Append)]
        z: Vec<String>,
        #[arg(long)]
        radius: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InversionPath {
    Circle,
    Gamma,
}

#[derive(Debug, Subcommand)]
pub enum ContourCommand {
    /// `f`, `u`, `F` and the residual of `F + u = f`.
    Identity {
        #[arg(long, required = true, allow_hyphen_values = true, action = clap::ArgAction::Append)]
        z: Vec<String>,
    },
    /// Recover `f(z)` on a circle or on the closed contour `γ ∪ I`.
    Invert {
        #[arg(long, required = true, allow_hyphen_values = true, action = clap::ArgAction::Append)]
        z: Vec<String>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_enum, default_value = "circle")]
        path: InversionPath,
    },
}

impl Cli {
    /// The file config, if any, with flags applied on top.
    pub fn run_config(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = Some(dir.clone());
        }
        if let Some(k) = self.k_max {
            cfg.k_max = k;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if self.svg {
            cfg.emit_svg = true;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        match &self.command {
            Command::Profile(ray) => ray.apply(&mut cfg),
            Command::Diagnose {
                ray,
                q,
                gap_tol,
                drift_tol,
            } => {
                ray.apply(&mut cfg);
                cfg.q = q.unwrap_or(cfg.q);
                cfg.gap_tol = gap_tol.unwrap_or(cfg.gap_tol);
                cfg.drift_tol = drift_tol.unwrap_or(cfg.drift_tol);
            }
            _ => {}
        }
        cfg.validate_basic()?;
        Ok(cfg)
    }
}

impl ProfileArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.theta = self.theta.unwrap_or(cfg.theta);
        cfg.r_min = self.r_min.unwrap_or(cfg.r_min);
        cfg.r_max = self.r_max.unwrap_or(cfg.r_max);
        cfg.samples_per_window = self.samples_per_window.unwrap_or(cfg.samples_per_window);
    }
}

/// Runs one command, printing its table or summary to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let cfg = cli.run_config()?;
    let text = match &cli.command {
        Command::Lattice {
            export_k,
            per_window,
        } => cmd_lattice(&cfg, export_k.unwrap_or(cfg.zeros_export_k), *per_window)?,
        Command::Eval { z, function } => cmd_eval(&cfg, *function, &parse_all(z, "z")?)?,
        Command::Profile(ray) => cmd_profile(&cfg, ray.function)?,
        Command::Borel(args) => match &args.command {
            Some(BorelCommand::Coeffs { m_max }) => {
                emit(&cfg, "coeffs.csv", &tables::coeffs_table(*m_max))?
            }
            Some(BorelCommand::Eval { s }) => cmd_borel_eval(&cfg, &parse_all(s, "s")?)?,
            Some(BorelCommand::Invert { z, radius }) => cmd_invert(
                &cfg,
                &parse_all(z, "z")?,
                radius.unwrap_or(cfg.contour_radius),
                InversionPath::Circle,
            )?,
            None if !args.s.is_empty() => cmd_borel_eval(&cfg, &parse_all(&args.s, "s")?)?,
            None => {
                return Err(CliError::Usage(
                    "borel needs a subcommand (coeffs, eval, invert) or --s".into(),
                ))
            }
        },
        Command::Contour { command } => match command {
            ContourCommand::Identity { z } => cmd_identity(&cfg, &parse_all(z, "z")?)?,
            ContourCommand::Invert { z, radius, path } => cmd_invert(
                &cfg,
                &parse_all(z, "z")?,
                radius.unwrap_or(cfg.contour_radius),
                *path,
            )?,
        },
        Command::Diagnose { ray, .. } => cmd_diagnose(&cfg, ray.function)?,
        Command::Reproduce => return cmd_reproduce(&cfg, out),
    };
    write_out(out, &text)
}

fn write_out(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

fn parse_all(values: &[String], name: &str) -> CliResult<Vec<Complex64>> {
    values
        .iter()
        .map(|v| parse_complex(v).map_err(|e| CliError::Usage(format!("--{name}: {e}"))))
        .collect()
}

/// The table in the chosen format, also written to `out_dir` when one is set.
fn emit(cfg: &RunConfig, name: &str, table: &Table) -> CliResult<String> {
    if let Some(dir) = &cfg.out_dir {
        write_file(dir, name, &table.to_csv())?;
    }
    Ok(table.render(cfg.format))
}

fn split(cfg: &RunConfig, radius: f64) -> CliResult<LaplaceSplit> {
    Ok(LaplaceSplit::new(LaplaceConfig {
        circle_radius: radius,
        cancellation_cap: cfg.cancellation_cap,
        ..LaplaceConfig::default()
    })?)
}

fn product(cfg: &RunConfig) -> CliResult<ProductEvaluator> {
    Ok(ProductEvaluator::new(ZeroLattice::new(cfg.k_max)?))
}

fn cmd_lattice(cfg: &RunConfig, export_k: u32, per_window: usize) -> CliResult<String> {
    tables::usage_if(per_window == 0, || "per_window must be positive".into())?;
    let lattice = ZeroLattice::new(cfg.k_max)?;
    let dir = cfg.artifact_dir();
    let files = [
        ("zeros.csv", tables::zeros_table(&lattice, export_k)),
        (
            "counting.csv",
            tables::counting_table(&lattice, per_window)?,
        ),
    ];
    let mut listing = Table::new(&["file", "rows"]);
    for (name, table) in &files {
        write_file(&dir, name, &table.to_csv())?;
        listing.push(vec![display(&dir.join(name)), table.rows.len().to_string()]);
    }
    Ok(listing.render(cfg.format))
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn cmd_eval(cfg: &RunConfig, function: FunctionId, zs: &[Complex64]) -> CliResult<String> {
    let product = product(cfg)?;
    let split = split(cfg, cfg.contour_radius)?;
    let mut t = Table::new(&["function_id", "z_re", "z_im", "re", "im", "log_abs"]);
    for &z in zs {
        let v = function.eval(z, &product, &split)?;
        let c = v.to_complex();
        t.push(vec![
            function.name().into(),
            num(z.re),
            num(z.im),
            num(c.re),
            num(c.im),
            num(v.log_mag),
        ]);
    }
    emit(cfg, "eval.csv", &t)
}

fn ray_radii(cfg: &RunConfig) -> CliResult<Vec<f64>> {
    let octaves = (cfg.r_max / cfg.r_min).log2();
    tables::usage_if(!(octaves > 0.0) || !octaves.is_finite(), || {
        format!("need 0 < r_min < r_max, got [{}, {}]", cfg.r_min, cfg.r_max)
    })?;
    let samples = (octaves * cfg.samples_per_window as f64).round() as usize + 1;
    Ok(geometric_grid(cfg.r_min, cfg.r_max, samples.max(2))?)
}

fn cmd_profile(cfg: &RunConfig, function: FunctionId) -> CliResult<String> {
    let radii = ray_radii(cfg)?;
    let p = tables::profile(
        function,
        cfg.theta,
        radii,
        &product(cfg)?,
        &split(cfg, cfg.contour_radius)?,
    )?;
    emit(cfg, "profile.csv", &tables::profile_table(&[p]))
}

fn cmd_borel_eval(cfg: &RunConfig, ss: &[Complex64]) -> CliResult<String> {
    let borel = BorelEvaluator::default();
    let mut t = Table::new(&["s_re", "s_im", "g_re", "g_im", "terms", "tail_bound"]);
    for &s in ss {
        let v = borel.borel_eval_detailed(s)?;
        t.push(vec![
            num(s.re),
            num(s.im),
            num(v.value.re),
            num(v.value.im),
            (v.last_m + 1).to_string(),
            num(v.tail_bound),
        ]);
    }
    emit(cfg, "borel.csv", &t)
}

fn cmd_invert(
    cfg: &RunConfig,
    zs: &[Complex64],
    radius: f64,
    path: InversionPath,
) -> CliResult<String> {
    let product = product(cfg)?;
    let split = split(cfg, radius)?;
    let rows = zs
        .par_iter()
        .map(|&z| {
            let contour = match path {
                InversionPath::Circle => split.inversion(z)?,
                InversionPath::Gamma => split.closed_contour(z)?,
            };
            Ok(InversionRow {
                z,
                direct: product.eval_log_f(z).to_complex(),
                contour: contour.value,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let text = emit(cfg, "borel_check.csv", &tables::borel_check_table(&rows))?;
    verify(
        rows.iter().map(InversionRow::rel_err),
        cfg.tol,
        "inversion error |err|/(1+|f|)",
    )?;
    Ok(text)
}

fn cmd_identity(cfg: &RunConfig, zs: &[Complex64]) -> CliResult<String> {
    let product = product(cfg)?;
    let split = split(cfg, cfg.contour_radius)?;
    let rows = zs
        .par_iter()
        .map(|&z| IdentityRow::compute(z, &product, &split))
        .collect::<CliResult<Vec<_>>>()?;
    let text = emit(cfg, "identity.csv", &tables::identity_table(&rows))?;
    verify(
        rows.iter().map(IdentityRow::scaled_residual),
        cfg.tol,
        "splitting residual |F+u-f|/(1+|f|)",
    )?;
    Ok(text)
}

fn verify(errors: impl Iterator<Item = f64>, tol: f64, what: &str) -> CliResult<()> {
    let worst = errors.fold(0.0f64, |a, e| if e.is_nan() { f64::NAN } else { a.max(e) });
    if worst <= tol {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{what} = {} exceeds {}",
            num(worst),
            num(tol)
        )))
    }
}

fn cmd_diagnose(cfg: &RunConfig, function: FunctionId) -> CliResult<String> {
    let (k_lo, k_hi) = cfg.window_range()?;
    let radii = laplace_growth::product::dyadic_grid(k_lo, k_hi, cfg.samples_per_window)?;
    let p = tables::profile(
        function,
        cfg.theta,
        radii,
        &product(cfg)?,
        &split(cfg, cfg.contour_radius)?,
    )?;
    let stats = window_stats(&p, cfg.q)?;
    let params = ClassifyParams {
        q: cfg.q,
        gap_tol: cfg.gap_tol,
        drift_tol: cfg.drift_tol,
        ..ClassifyParams::default()
    };
    let v = classify_stats(&p.function_id, p.theta, &stats, &params)?;
    let record = json!({
        "function_id": v.function_id,
        "theta": json_num(v.theta),
        "verdict": v.verdict.as_str(),
        "limit_or_gap": json_num(v.limit_or_gap),
        "windows": v.windows,
        "q": json_num(v.q),
        "gap_tol": json_num(v.gap_tol),
        "drift_tol": json_num(v.drift_tol),
    });
    let windows = tables::windows_table(&[(p.function_id.clone(), p.theta, stats)]);
    if let Some(dir) = &cfg.out_dir {
        ensure_dir(dir)?;
        write_file(dir, "profile.csv", &tables::profile_table(&[p]).to_csv())?;
        write_file(dir, "windows.csv", &windows.to_csv())?;
        write_file(
            dir,
            "verdicts.json",
            &(serde_json::to_string_pretty(&[&record]).expect("json") + "\n"),
        )?;
    }
    Ok(match cfg.format {
        Format::Json => record.to_string() + "\n",
        Format::Csv => windows.to_csv(),
    })
}

fn cmd_reproduce(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let outcome = reproduce::run(cfg)?;
    let mut t = Table::new(&["check", "status", "measured", "threshold"]);
    for c in &outcome.checks {
        t.push(vec![
            c.id.into(),
            if c.passed { "PASS" } else { "FAIL" }.into(),
            c.measured.clone(),
            c.threshold.clone(),
        ]);
    }
    write_out(out, &t.render(cfg.format))?;
    let failed: Vec<&str> = outcome
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.id)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} of {} checks failed: {}; see {}",
            failed.len(),
            outcome.checks.len(),
            failed.join(", "),
            display(&cfg.artifact_dir().join("report.md"))
        )))
    }
}
