//! The end-to-end run: every check, every artifact, and the report.

use std::f64::consts::{E, LN_2};
use std::fmt::Write as _;
use std::path::Path;

use laplace_growth::borel::{BorelEvaluator, CoefficientStream};
use laplace_growth::contour::{u_decay_constant, LaplaceConfig, LaplaceSplit};
use laplace_growth::diagnostics::{
    classify_stats, type_estimate, window_stats, ClassifyParams, RegularityVerdict, Verdict,
    WindowStats,
};
use laplace_growth::lattice::{sparse_window, ZeroLattice};
use laplace_growth::product::{dyadic_grid, GrowthProfile, ProductEvaluator, ANGLE_OFFSET};
use laplace_growth::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{json_num, num, write_file, Table};
use crate::points;
use crate::svg::{Band, Plot, Scale, Series};
use crate::tables::{self, FunctionId, IdentityRow, InversionRow};

/// Radii per sparse window for the counting bound.
const SPARSE_GRID: usize = 10_000;
/// Largest radius of the reciprocal-sum check.
const RECIPROCAL_R_MAX: u32 = 4096;
const COEFF_M_MAX: u64 = 256;
/// `|u(x)| <= U_BOUND·e^{-3x}`.
const U_BOUND: f64 = 0.0502;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub measured: String,
    pub threshold: String,
}

#[derive(Debug)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub verdicts: Vec<RegularityVerdict>,
    pub files: Vec<String>,
}

impl Outcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    dir: &'a Path,
    lattice: ZeroLattice,
    product: ProductEvaluator,
    split: LaplaceSplit,
    checks: Vec<Check>,
    files: Vec<String>,
}

impl Ctx<'_> {
    fn check(
        &mut self,
        id: &'static str,
        title: &'static str,
        passed: bool,
        measured: String,
        threshold: String,
    ) {
        self.checks.push(Check {
            id,
            title,
            passed,
            measured,
            threshold,
        });
    }

    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        write_file(self.dir, name, contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_table(&mut self, name: &str, table: &Table) -> CliResult<()> {
        self.write(name, &table.to_csv())
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome> {
    cfg.validate_basic()?;
    let (k_lo, k_hi) = cfg.window_range()?;
    let dir = cfg.artifact_dir();
    let lattice = ZeroLattice::new(cfg.k_max)?;
    let split = LaplaceSplit::new(LaplaceConfig {
        circle_radius: cfg.contour_radius,
        cancellation_cap: cfg.cancellation_cap,
        ..LaplaceConfig::default()
    })?;
    let mut ctx = Ctx {
        cfg,
        dir: &dir,
        lattice,
        product: ProductEvaluator::new(lattice),
        split,
        checks: Vec::new(),
        files: Vec::new(),
    };
    lattice_checks(&mut ctx)?;
    product_checks(&mut ctx)?;
    coefficient_checks(&mut ctx)?;
    inversion_checks(&mut ctx)?;
    splitting_checks(&mut ctx)?;
    u_checks(&mut ctx)?;
    let verdicts = regularity_checks(&mut ctx, k_lo, k_hi)?;
    type_checks(&mut ctx, k_lo, k_hi)?;

    let outcome = Outcome {
        checks: ctx.checks,
        verdicts,
        files: ctx.files,
    };
    let report = render_report(cfg, &outcome, k_lo, k_hi);
    write_file(&dir, "report.md", &report)?;
    Ok(outcome)
}

fn lattice_checks(ctx: &mut Ctx) -> CliResult<()> {
    let lat = ctx.lattice;
    ctx.write_table(
        "zeros.csv",
        &tables::zeros_table(&lat, ctx.cfg.zeros_export_k),
    )?;
    ctx.write_table("counting.csv", &tables::counting_table(&lat, 8)?)?;

    // n(2^k)/2^k = 2 - 2^{1-k}, exactly.
    let mut exact = true;
    let mut prev = 0.0;
    let mut sup = 0.0f64;
    for k in 1..=lat.k_max() {
        let r = (k as f64).exp2();
        let n = lat.counting(r)?;
        exact &= n == (1u64 << (k + 1)) - 2;
        let ratio = n as f64 / r;
        exact &= ratio == 2.0 - (1.0 - k as f64).exp2() && ratio > prev;
        prev = ratio;
        sup = sup.max(ratio);
    }
    ctx.check(
        "counting",
        "n(2^k)/2^k = 2 - 2^(1-k) exactly, increasing, sup <= 2",
        exact && sup <= 2.0,
        format!("sup {} over k = 1..{}", num(sup), lat.k_max()),
        "exact; <= 2".into(),
    );

    let worst = (2..=lat.k_max())
        .into_par_iter()
        .map(|k| {
            let (lo, hi) = sparse_window(k);
            let step = (hi - lo) / SPARSE_GRID as f64;
            (0..SPARSE_GRID).try_fold(0.0f64, |acc, i| {
                let r = lo + step * i as f64;
                Ok::<_, CliError>(acc.max(lat.counting(r)? as f64 / r))
            })
        })
        .collect::<CliResult<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    ctx.check(
        "counting-sparse",
        "n(r)/r <= 4/3 on [1.5*2^(k-1), 2^k), 10^4 radii per window",
        worst <= 4.0 / 3.0,
        num(worst),
        "<= 4/3".into(),
    );

    let r_top = RECIPROCAL_R_MAX.min(1 << lat.k_max().min(31));
    let max_recip = (2..=r_top)
        .into_par_iter()
        .map(|r| lat.reciprocal_sum(r as f64).map(|s| s.norm()))
        .collect::<Result<Vec<f64>, _>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    ctx.check(
        "reciprocal-sums",
        "|sum_{|a|<=r} 1/a| for r = 2, 3, ..., 4096",
        max_recip <= ctx.cfg.reciprocal_tol,
        num(max_recip),
        format!("<= {}", num(ctx.cfg.reciprocal_tol)),
    );
    Ok(())
}

fn product_checks(ctx: &mut Ctx) -> CliResult<()> {
    let pts = points::annulus(ctx.cfg.seed, points::STREAM_PRODUCT, 100, 1.0, 50.0);
    let product = ctx.product;
    let k_max = ctx.lattice.k_max();
    let worst = pts
        .par_iter()
        .map(|&z| {
            let k_cut = product.cutoff(z).min(k_max);
            let closed = product.eval_log_f_partial(z, k_cut).to_complex();
            let direct = product.eval_log_f_direct(z, k_cut)?.to_complex();
            Ok((closed - direct).norm() / closed.norm())
        })
        .collect::<CliResult<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    ctx.check(
        "product-oracle",
        "closed form vs zero-by-zero product, 100 random z with 1 <= |z| <= 50",
        worst <= ctx.cfg.product_tol,
        num(worst),
        format!("<= {} relative", num(ctx.cfg.product_tol)),
    );
    Ok(())
}

fn coefficient_checks(ctx: &mut Ctx) -> CliResult<()> {
    ctx.write_table("coeffs.csv", &tables::coeffs_table(COEFF_M_MAX))?;
    // Expand ∏_{k=1}^{6} (1 - z^{2^k}/2^{k·2^k}) exactly (every coefficient is a
    // single signed power of two) and compare with the stream up to z^126.
    let mut poly = vec![0.0f64; 127];
    poly[0] = 1.0;
    for k in 1..=6u32 {
        let step = 1usize << k;
        let c = (-((k as i32) << k) as f64).exp2();
        for m in (step..poly.len()).rev() {
            poly[m] -= c * poly[m - step];
        }
    }
    let stream = CoefficientStream;
    let mismatches = poly
        .iter()
        .enumerate()
        .filter(|&(m, &want)| stream.taylor_coefficient(m as u64).value() != want)
        .count();
    ctx.check(
        "coefficients",
        "Taylor coefficients match the expanded product exactly for m <= 126",
        mismatches == 0,
        format!("{mismatches} mismatches"),
        "0".into(),
    );
    Ok(())
}

fn inversion_checks(ctx: &mut Ctx) -> CliResult<()> {
    let cfg = ctx.cfg;
    let g4 = BorelEvaluator::default().borel_eval(Complex64::new(4.0, 0.0))?;
    ctx.check(
        "borel-g4",
        "g(4) from the coefficient series",
        (g4.re - 0.242_138_863_270_169_76).abs() <= 1e-12 && g4.im == 0.0,
        num(g4.re),
        "0.24213886327016976 +- 1e-12".into(),
    );

    let pts = points::disk(cfg.seed, points::STREAM_INVERSION, cfg.test_points, 4.0);
    let product = ctx.product;
    let deformed = LaplaceSplit::new(LaplaceConfig {
        circle_radius: cfg.deformation_radius,
        ..LaplaceConfig::default()
    })?;
    let split = &ctx.split;
    let rows = pts
        .par_iter()
        .map(|&z| {
            let row = InversionRow {
                z,
                direct: product.eval_log_f(z).to_complex(),
                contour: split.inversion(z)?.value,
            };
            let other = deformed.inversion(z)?.value;
            let scale = 1f64.max(row.contour.norm()).max(other.norm());
            Ok((row, (row.contour - other).norm() / scale))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let worst = rows.iter().map(|r| r.0.rel_err()).fold(0.0f64, f64::max);
    let worst_deform = rows.iter().map(|r| r.1).fold(0.0f64, f64::max);
    let inversion: Vec<InversionRow> = rows.into_iter().map(|r| r.0).collect();
    ctx.write_table("borel_check.csv", &tables::borel_check_table(&inversion))?;
    ctx.check(
        "borel-inversion",
        "circle inversion of g reproduces f, random |z| <= 4",
        worst <= cfg.tol,
        format!("max |err|/(1+|f|) = {}", num(worst)),
        format!("<= {}", num(cfg.tol)),
    );
    ctx.check(
        "deformation",
        "inversion radius independence",
        worst_deform <= cfg.deformation_tol,
        format!(
            "max relative difference {} (radius {} vs {})",
            num(worst_deform),
            cfg.contour_radius,
            cfg.deformation_radius
        ),
        format!("<= {}", num(cfg.deformation_tol)),
    );
    Ok(())
}

fn splitting_checks(ctx: &mut Ctx) -> CliResult<()> {
    let cfg = ctx.cfg;
    let pts = points::disk(cfg.seed, points::STREAM_SPLITTING, cfg.test_points, 8.0);
    let product = ctx.product;
    let split = &ctx.split;
    let rows = pts
        .par_iter()
        .map(|&z| IdentityRow::compute(z, &product, split))
        .collect::<CliResult<Vec<_>>>()?;
    ctx.write_table("identity.csv", &tables::identity_table(&rows))?;
    let failing = rows
        .iter()
        .filter(|r| r.scaled_residual() > cfg.tol)
        .count();
    let worst = rows
        .iter()
        .map(IdentityRow::scaled_residual)
        .fold(0.0f64, f64::max);
    ctx.check(
        "splitting",
        "F + u = f, random |z| <= 8",
        failing == 0,
        format!(
            "max |F+u-f|/(1+|f|) = {} ({failing} of {} points above tolerance)",
            num(worst),
            rows.len()
        ),
        format!("<= {}", num(cfg.tol)),
    );
    Ok(())
}

fn u_checks(ctx: &mut Ctx) -> CliResult<()> {
    let constant = u_decay_constant(&BorelEvaluator::default())?;
    let xs: Vec<f64> = (0..=10).map(f64::from).collect();
    let mut t = Table::new(&["x", "u_abs", "bound"]);
    let mut ok = constant <= U_BOUND;
    let mut worst = 0.0f64;
    let mut u0 = 0.0;
    for &x in &xs {
        let u = ctx.split.u(Complex64::new(x, 0.0))?.value.norm();
        let bound = U_BOUND * (-3.0 * x).exp();
        ok &= u <= bound * (1.0 + 1e-6);
        worst = worst.max(u / bound);
        if x == 0.0 {
            u0 = u;
        }
        t.push(vec![num(x), num(u), num(bound)]);
    }
    ctx.write_table("u_decay.csv", &t)?;
    ctx.check(
        "u-decay",
        "|u(x)| <= 0.0502 e^(-3x) for x = 0..10",
        ok,
        format!(
            "max |u(x)|/bound = {}; (1/2pi) max_I |g| |I| = {}",
            num(worst),
            num(constant)
        ),
        "<= 1 + 1e-6".into(),
    );
    ctx.check(
        "u-origin",
        "|u(0)|",
        (u0 - 0.0438).abs() <= 1e-3,
        num(u0),
        "0.0438 +- 0.001".into(),
    );
    if ctx.cfg.emit_svg {
        let plot = Plot {
            title: "|u(x)| against the decay bound".into(),
            x_label: "x".into(),
            y_label: "|u(x)|".into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Log(10.0),
            series: vec![
                Series {
                    label: "|u(x)|".into(),
                    color: "#1f77b4",
                    dashed: false,
                    points: t
                        .rows
                        .iter()
                        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
                        .collect(),
                },
                Series {
                    label: "0.0502 e^(-3x)".into(),
                    color: "#d62728",
                    dashed: true,
                    points: t
                        .rows
                        .iter()
                        .map(|r| (r[0].parse().unwrap(), r[2].parse().unwrap()))
                        .collect(),
                },
            ],
            bands: Vec::new(),
            hlines: Vec::new(),
        };
        ctx.write("u_decay.svg", &plot.render())?;
    }
    Ok(())
}

fn regularity_checks(ctx: &mut Ctx, k_lo: i32, k_hi: i32) -> CliResult<Vec<RegularityVerdict>> {
    let cfg = ctx.cfg;
    let radii = dyadic_grid(k_lo, k_hi, cfg.samples_per_window)?;
    let params = ClassifyParams {
        q: cfg.q,
        gap_tol: cfg.gap_tol,
        drift_tol: cfg.drift_tol,
        ..ClassifyParams::default()
    };
    let mut runs = vec![
        (FunctionId::Product, cfg.theta),
        (FunctionId::Laplace, cfg.theta),
    ];
    runs.extend(tables::CONTROLS);
    let mut profiles = Vec::new();
    let mut stats = Vec::new();
    let mut verdicts = Vec::new();
    for (function, theta) in runs {
        let p = tables::profile(function, theta, radii.clone(), &ctx.product, &ctx.split)?;
        let w = window_stats(&p, cfg.q)?;
        verdicts.push(classify_stats(&p.function_id, theta, &w, &params)?);
        stats.push((p.function_id.clone(), theta, w));
        profiles.push(p);
    }
    ctx.write_table("profile.csv", &tables::profile_table(&profiles))?;
    ctx.write_table("windows.csv", &tables::windows_table(&stats))?;
    let records: Vec<_> = verdicts
        .iter()
        .map(|v| {
            json!({
                "function_id": v.function_id,
                "theta": json_num(v.theta),
                "verdict": v.verdict.as_str(),
                "limit_or_gap": json_num(v.limit_or_gap),
                "windows": v.windows,
                "q": json_num(v.q),
                "gap_tol": json_num(v.gap_tol),
                "drift_tol": json_num(v.drift_tol),
            })
        })
        .collect();
    ctx.write(
        "verdicts.json",
        &(serde_json::to_string_pretty(&records).expect("json") + "\n"),
    )?;

    let f_stats = &stats[0].2;
    let min_width = f_stats
        .iter()
        .map(WindowStats::width)
        .fold(f64::INFINITY, f64::min);
    if cfg.theta == 0.0 {
        ctx.check(
            "f-irregular",
            "f on the positive axis: irregular, every window gap >= 2 gap_tol",
            verdicts[0].verdict == Verdict::Irregular && min_width >= 2.0 * cfg.gap_tol,
            format!(
                "verdict {}, smallest window gap {} over k = {}..{}",
                verdicts[0].verdict,
                num(min_width),
                k_lo,
                k_hi - 1
            ),
            format!("irregular; >= {}", num(2.0 * cfg.gap_tol)),
        );
    }
    let drift = stats[0]
        .2
        .iter()
        .zip(&stats[1].2)
        .map(|(a, b)| (a.q_low - b.q_low).abs().max((a.q_high - b.q_high).abs()))
        .fold(0.0f64, f64::max);
    ctx.check(
        "F-matches-f",
        "F = f - u has the verdict and window statistics of f",
        verdicts[1].verdict == verdicts[0].verdict && drift <= 1e-12,
        format!(
            "verdict {}, max quantile difference {}",
            verdicts[1].verdict,
            num(drift)
        ),
        "same verdict; <= 1e-12".into(),
    );
    for (v, id) in verdicts[2..]
        .iter()
        .zip(["exp_2z-regular", "sin_2z-regular"])
    {
        ctx.check(
            id,
            "control of regular growth: regular with limit 2",
            v.verdict == Verdict::Regular && (v.limit_or_gap - 2.0).abs() <= 0.01,
            format!(
                "verdict {} at theta = {}, limit {}",
                v.verdict,
                num(v.theta),
                num(v.limit_or_gap)
            ),
            "regular; 2 +- 0.01".into(),
        );
    }

    if cfg.emit_svg {
        let p = &profiles[0];
        let plot = Plot {
            title: format!(
                "log|f(re^(i{}))|/r with trimmed window quantiles",
                cfg.theta
            ),
            x_label: "r".into(),
            y_label: "log|f|/r".into(),
            x_scale: Scale::Log(2.0),
            y_scale: Scale::Linear,
            series: vec![Series {
                label: "f".into(),
                color: "#1f77b4",
                dashed: false,
                points: p
                    .radii
                    .iter()
                    .copied()
                    .zip(p.values.iter().copied())
                    .collect(),
            }],
            bands: f_stats
                .iter()
                .map(|w| Band {
                    x0: w.r_lo,
                    x1: w.r_hi,
                    y0: w.q_low,
                    y1: w.q_high,
                })
                .collect(),
            hlines: vec![(4.0 / E, "4/e".into()), (2.0 * LN_2, "2 log 2".into())],
        };
        ctx.write("profile.svg", &plot.render())?;

        let counting = tables::counting_table(&ctx.lattice, 8)?;
        let plot = Plot {
            title: "n(r)/r".into(),
            x_label: "r".into(),
            y_label: "n(r)/r".into(),
            x_scale: Scale::Log(2.0),
            y_scale: Scale::Linear,
            series: vec![Series {
                label: "n(r)/r".into(),
                color: "#1f77b4",
                dashed: false,
                points: counting
                    .rows
                    .iter()
                    .map(|r| (r[0].parse().unwrap(), r[2].parse().unwrap()))
                    .collect(),
            }],
            bands: Vec::new(),
            hlines: vec![(2.0, "2".into()), (4.0 / 3.0, "4/3".into())],
        };
        ctx.write("counting.svg", &plot.render())?;
    }
    Ok(verdicts)
}

fn type_checks(ctx: &mut Ctx, k_lo: i32, k_hi: i32) -> CliResult<()> {
    let cfg = ctx.cfg;
    let radii = dyadic_grid(k_lo, k_hi, cfg.samples_per_window)?;
    let n = cfg.n_theta;
    let product = ctx.product;
    let profiles = (0..n)
        .into_par_iter()
        .map(|j| {
            let theta = ANGLE_OFFSET + std::f64::consts::TAU * j as f64 / n as f64;
            GrowthProfile::sample("f", theta, radii.clone(), |z| product.eval_log_f(z))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let log_m: Vec<f64> = (0..radii.len())
        .map(|i| {
            profiles
                .iter()
                .map(|p| p.values[i])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let mut t = Table::new(&["r", "log_m_over_r"]);
    for (r, v) in radii.iter().zip(&log_m) {
        t.push(vec![num(*r), num(*v)]);
    }
    ctx.write_table("max_modulus.csv", &t)?;

    let sup = log_m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let estimate = type_estimate(&profiles)?;
    ctx.check(
        "type-bound",
        "sup log M(r)/r <= 2",
        sup <= 2.0,
        format!("{} over r <= {}", num(sup), num(radii[radii.len() - 1])),
        "<= 2".into(),
    );
    ctx.check(
        "type-limsup",
        "sup log M(r)/r near the derived limsup 4/e",
        (sup - 4.0 / E).abs() <= 0.01,
        format!(
            "{} (top-window estimate {} at theta {})",
            num(sup),
            num(estimate.value),
            num(estimate.theta)
        ),
        format!("{} +- 0.01", num(4.0 / E)),
    );
    let m_profile = GrowthProfile::new("M", 0.0, radii, log_m)?;
    let windows = window_stats(&m_profile, cfg.q)?;
    let minima: Vec<f64> = windows.iter().map(|w| w.inf).collect();
    let worst = minima
        .iter()
        .map(|m| (m - 2.0 * LN_2).abs())
        .fold(0.0f64, f64::max);
    ctx.check(
        "type-liminf",
        "window minima of log M(r)/r near the derived 2 log 2",
        worst <= 0.01,
        format!(
            "minima {} for k = {}..{}",
            minima
                .iter()
                .map(|m| format!("{m:.5}"))
                .collect::<Vec<_>>()
                .join(", "),
            k_lo,
            k_hi - 1
        ),
        format!("{} +- 0.01", num(2.0 * LN_2)),
    );
    Ok(())
}

fn render_report(cfg: &RunConfig, outcome: &Outcome, k_lo: i32, k_hi: i32) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# Irregular growth of a Laplace transform: reproduction report\n"
    );
    let passed = outcome.checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(
        s,
        "Overall: **{}** ({passed} of {} checks passed)\n",
        if outcome.all_passed() { "PASS" } else { "FAIL" },
        outcome.checks.len()
    );
    let _ = writeln!(s, "## Configuration\n");
    // The output location is left out so the report does not depend on it.
    let settings = RunConfig {
        out_dir: None,
        ..cfg.clone()
    };
    let _ = writeln!(s, "```toml\n{}```\n", settings.to_toml());
    let _ = writeln!(s, "## Checks\n");
    let _ = writeln!(s, "| check | status | measured | threshold | description |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for c in &outcome.checks {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.measured,
            c.threshold,
            c.title
        );
    }
    let _ = writeln!(
        s,
        "\n## Growth verdicts (windows k = {}..{})\n",
        k_lo,
        k_hi - 1
    );
    let _ = writeln!(
        s,
        "| function | theta | verdict | limit or gap | trailing windows |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|");
    for v in &outcome.verdicts {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {:?} |",
            v.function_id,
            num(v.theta),
            v.verdict,
            num(v.limit_or_gap),
            v.windows
        );
    }
    let f = &outcome.verdicts[0];
    let _ = writeln!(
        s,
        "\nVerdict for f at theta = {}: **{}**.",
        num(f.theta),
        f.verdict
    );
    let identity = outcome.checks.iter().find(|c| c.id == "splitting");
    if let Some(c) = identity {
        let _ = writeln!(
            s,
            "The identity F + u = f is {} on the sampled points.",
            if c.passed { "verified" } else { "NOT verified" }
        );
    }
    let _ = writeln!(s, "\n## Artifacts\n");
    for f in &outcome.files {
        let _ = writeln!(s, "- `{f}`");
    }
    s
}
