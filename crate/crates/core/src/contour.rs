//! Contours, quadrature and the three contour-Laplace integrals.
//!
//! All integrals carry the `1/(2πi)` normalization, so that integrating the
//! Borel transform `g` against `e^{zs}` over a positively oriented circle
//! reproduces `f(z)`:
//!
//! * [`borel_inversion`]: the full circle.
//! * [`u_eval`]: the segment `I` from `-3` to `-4`.
//! * [`big_f_eval`]: the arc `γ` from `-4` once around the origin to `-3`.
//!
//! `γ ∪ I` is a closed contour, hence `F + u = f`.

use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::borel::BorelEvaluator;
use crate::error::{Error, Result};
use crate::numerics::{cos_sin, normalize_angle, CompensatedSum, LogComplex};
use crate::product::ProductEvaluator;

/// Every contour stays at least this far from the origin, inside the region
/// where the Borel series is evaluated.
pub const MIN_PATH_MODULUS: f64 = 2.5;

/// Radius of the circular part of [`Contour::gamma_tight`].
pub const TIGHT_RADIUS: f64 = 2.55;

/// Angular length of each spiral leg of [`Contour::gamma_tight`].
const TIGHT_LEG: f64 = 0.6;

/// Largest `|z|` accepted by [`big_f_eval`] by default. Along the real axis
/// the integrand reaches `e^{2.55 r}` while `F(r)` grows like `e^{1.4 r}`, so
/// about `0.5 r` decimal digits cancel.
pub const DEFAULT_CANCELLATION_CAP: f64 = 16.0;

/// Points sampled per segment when validating a contour.
const VALIDATION_SAMPLES: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathSegment {
    /// `center + radius·e^{2πi·turns·t}`; positive turns run counterclockwise.
    Circle {
        center: Complex64,
        radius: f64,
        turns: i32,
    },
    /// `(r_start + (r_end - r_start)t)·e^{i(angle_start + (angle_end - angle_start)t)}`.
    SpiralArc {
        r_start: f64,
        r_end: f64,
        angle_start: f64,
        angle_end: f64,
    },
    LineSegment {
        a: Complex64,
        b: Complex64,
    },
}

fn cis(angle: f64) -> Complex64 {
    let (c, s) = cos_sin(angle);
    Complex64::new(c, s)
}

/// `e^{2πix}`. The reduction to the nearest quarter turn is exact, so the
/// angle passed to `sin_cos` stays within `π/4` and keeps its full precision.
fn cis_turns(x: f64) -> Complex64 {
    let q = (4.0 * x).round();
    let (s, c) = (TAU * (x - 0.25 * q)).sin_cos();
    match q.rem_euclid(4.0) as u8 {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// `e^{i(start + (end - start)t)}` and `start + (end - start)t`, both measured
/// from the nearer endpoint. A node close to an endpoint then sits at the
/// right distance from it even when the endpoint angle (such as `±π`) is not
/// representable.
fn interpolate(start: f64, end: f64, t: f64) -> f64 {
    if t <= 0.5 {
        start + (end - start) * t
    } else {
        end - (end - start) * (1.0 - t)
    }
}

fn cis_between(start: f64, end: f64, t: f64) -> Complex64 {
    if t <= 0.5 {
        cis(start) * cis((end - start) * t)
    } else {
        cis(end) * cis(-(end - start) * (1.0 - t))
    }
}

impl PathSegment {
    /// Position at parameter `t ∈ [0, 1]`.
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            PathSegment::Circle {
                center,
                radius,
                turns,
            } => center + radius * cis_turns(turns as f64 * t),
            PathSegment::SpiralArc {
                r_start,
                r_end,
                angle_start,
                angle_end,
            } => interpolate(r_start, r_end, t) * cis_between(angle_start, angle_end, t),
            PathSegment::LineSegment { a, b } => {
                Complex64::new(interpolate(a.re, b.re, t), interpolate(a.im, b.im, t))
            }
        }
    }

    /// `ds/dt` at `t`.
    pub fn velocity(&self, t: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        match *self {
            PathSegment::Circle { radius, turns, .. } => {
                i * (TAU * turns as f64) * radius * cis_turns(turns as f64 * t)
            }
            PathSegment::SpiralArc {
                r_start,
                r_end,
                angle_start,
                angle_end,
            } => {
                let r = interpolate(r_start, r_end, t);
                let dphi = angle_end - angle_start;
                (Complex64::new(r_end - r_start, 0.0) + i * r * dphi)
                    * cis_between(angle_start, angle_end, t)
            }
            PathSegment::LineSegment { a, b } => b - a,
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, PathSegment::Circle { .. })
    }
}

/// An ordered chain of segments, optionally closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    segments: Vec<PathSegment>,
    closed: bool,
}

impl Contour {
    /// Validates that every point keeps `|s| >= 2.5`, that consecutive
    /// segments join, and for closed contours that the winding number about
    /// the origin is `+1`.
    pub fn new(segments: Vec<PathSegment>, closed: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("contour has no segments".into()));
        }
        for seg in &segments {
            let min = (0..=VALIDATION_SAMPLES)
                .map(|i| seg.point(i as f64 / VALIDATION_SAMPLES as f64).norm())
                .fold(f64::INFINITY, f64::min);
            if !(min >= MIN_PATH_MODULUS * (1.0 - 1e-12)) {
                return Err(Error::Domain(format!(
                    "segment {seg:?} comes within {min} of the origin (minimum {MIN_PATH_MODULUS})"
                )));
            }
        }
        for pair in segments.windows(2) {
            let gap = (pair[0].end() - pair[1].start()).norm();
            if gap > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "segments do not join (gap {gap:e})"
                )));
            }
        }
        let contour = Self { segments, closed };
        if closed {
            let gap = (contour.end() - contour.start()).norm();
            if gap > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "closed contour does not close (gap {gap:e})"
                )));
            }
            let w = contour.winding_number(Complex64::new(0.0, 0.0));
            if (w - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!(
                    "closed contour winds {w} times about 0, expected 1"
                )));
            }
        }
        Ok(contour)
    }

    /// Positively oriented circle `|s| = radius`.
    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(
            vec![PathSegment::Circle {
                center: Complex64::new(0.0, 0.0),
                radius,
                turns: 1,
            }],
            true,
        )
    }

    /// The arc `γ(t) = (3.5 - t/2)e^{iπt}`, `t ∈ [-1, 1]`: from `-4` once
    /// counterclockwise around the origin to `-3`.
    pub fn gamma_spiral() -> Self {
        Self::new(
            vec![PathSegment::SpiralArc {
                r_start: 4.0,
                r_end: 3.0,
                angle_start: -PI,
                angle_end: PI,
            }],
            false,
        )
        .expect("the spiral arc is a valid contour")
    }

    /// An arc with the same endpoints and winding as [`Contour::gamma_spiral`]
    /// that hugs the circle `|s| = 2.55`. Both give the same integral; this one
    /// keeps `|e^{zs}|` smaller and so loses fewer digits to cancellation.
    pub fn gamma_tight() -> Self {
        let r = TIGHT_RADIUS;
        Self::new(
            vec![
                PathSegment::SpiralArc {
                    r_start: 4.0,
                    r_end: r,
                    angle_start: -PI,
                    angle_end: -PI + TIGHT_LEG,
                },
                PathSegment::SpiralArc {
                    r_start: r,
                    r_end: r,
                    angle_start: -PI + TIGHT_LEG,
                    angle_end: PI - TIGHT_LEG,
                },
                PathSegment::SpiralArc {
                    r_start: r,
                    r_end: 3.0,
                    angle_start: PI - TIGHT_LEG,
                    angle_end: PI,
                },
            ],
            false,
        )
        .expect("the tight arc is a valid contour")
    }

    /// The segment `I` traversed from `-3` to `-4`.
    pub fn interval() -> Self {
        Self::new(
            vec![PathSegment::LineSegment {
                a: Complex64::new(-3.0, 0.0),
                b: Complex64::new(-4.0, 0.0),
            }],
            false,
        )
        .expect("the interval is a valid contour")
    }

    /// `γ` followed by `I`: a closed contour around `|s| <= 2`.
    pub fn closed_gamma(arc: GammaShape) -> Self {
        let mut segments = arc.contour().segments;
        segments.extend(Self::interval().segments);
        Self::new(segments, true).expect("γ ∪ I is a valid closed contour")
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex64 {
        self.segments[self.segments.len() - 1].end()
    }

    /// Total change of `arg(s - about)` along the contour, in turns.
    pub fn winding_number(&self, about: Complex64) -> f64 {
        let mut total = 0.0;
        for seg in &self.segments {
            let mut prev = (seg.start() - about).arg();
            for i in 1..=VALIDATION_SAMPLES {
                let a = (seg.point(i as f64 / VALIDATION_SAMPLES as f64) - about).arg();
                total += normalize_angle(a - prev);
                prev = a;
            }
        }
        total / TAU
    }
}

/// Which path represents the arc `γ` in the integrals for `F`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaShape {
    /// The radius 4 → 3 spiral.
    Spiral,
    /// The homotopic arc hugging `|s| = 2.55`.
    #[default]
    Tight,
}

impl GammaShape {
    pub fn contour(self) -> Contour {
        match self {
            GammaShape::Spiral => Contour::gamma_spiral(),
            GammaShape::Tight => Contour::gamma_tight(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Equispaced trapezoid on circles; open segments fall back to 16-point
    /// Gauss panels.
    TrapezoidPeriodic,
    GaussPanels {
        points_per_panel: usize,
    },
}

/// Points per panel used for open segments under the trapezoid rule, and the
/// trapezoid node multiplier on circles.
const DEFAULT_PANEL_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    pub initial_panels: usize,
    pub target_rel_tol: f64,
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: QuadratureRule::TrapezoidPeriodic,
            initial_panels: 8,
            target_rel_tol: 1e-12,
            max_refinements: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_rel_tol >= 1e-13) {
            return Err(Error::InvalidArgument(format!(
                "target_rel_tol must be at least 1e-13, got {}",
                self.target_rel_tol
            )));
        }
        if self.initial_panels == 0 {
            return Err(Error::InvalidArgument(
                "initial_panels must be positive".into(),
            ));
        }
        if let QuadratureRule::GaussPanels { points_per_panel } = self.rule {
            if !(2..=64).contains(&points_per_panel) {
                return Err(Error::InvalidArgument(format!(
                    "points_per_panel must lie in 2..=64, got {points_per_panel}"
                )));
            }
        }
        if self.max_refinements > 16 {
            return Err(Error::InvalidArgument(
                "max_refinements must be at most 16".into(),
            ));
        }
        Ok(())
    }

    fn panel_points(&self) -> usize {
        match self.rule {
            QuadratureRule::TrapezoidPeriodic => DEFAULT_PANEL_POINTS,
            QuadratureRule::GaussPanels { points_per_panel } => points_per_panel,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Three-term recurrence for P_n and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Outcome of an adaptive contour integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: Complex64,
    /// `max(|I_n - I_{n/2}|, rounding floor)`.
    pub error_estimate: f64,
    /// Rounding floor: `4ε·Σ|terms|`.
    pub rounding_floor: f64,
    pub nodes: usize,
    pub refinements: u32,
}

/// A node with `weight = ds/(2πi)` already applied and the integrand factor
/// `g(s)` cached; `g` does not depend on `z`.
#[derive(Clone, Copy, Debug)]
struct Node {
    s: Complex64,
    weight: Complex64,
    g: Complex64,
}

type GFn = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// Adaptive `(1/2πi)∫ g(s) e^{zs} ds` over a fixed contour with node values of
/// `g` cached across calls, so that many `z` share the cost of evaluating `g`.
pub struct ContourIntegrator {
    g: Arc<GFn>,
    path: Contour,
    spec: QuadratureSpec,
    levels: Vec<OnceLock<Result<Arc<Vec<Node>>>>>,
}

impl std::fmt::Debug for ContourIntegrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContourIntegrator")
            .field("path", &self.path)
            .field("spec", &self.spec)
            .finish_non_exhaustive()
    }
}

impl ContourIntegrator {
    pub fn new<G>(g: G, path: Contour, spec: QuadratureSpec) -> Result<Self>
    where
        G: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        spec.validate()?;
        let levels = (0..=spec.max_refinements)
            .map(|_| OnceLock::new())
            .collect();
        Ok(Self {
            g: Arc::new(g),
            path,
            spec,
            levels,
        })
    }

    pub fn path(&self) -> &Contour {
        &self.path
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    fn level(&self, level: u32) -> Result<Arc<Vec<Node>>> {
        self.levels[level as usize]
            .get_or_init(|| self.build_level(level).map(Arc::new))
            .clone()
    }

    fn build_level(&self, level: u32) -> Result<Vec<Node>> {
        let resolution = self.spec.initial_panels << level;
        let p = self.spec.panel_points();
        let (gx, gw) = gauss_legendre(p);
        let norm = Complex64::new(0.0, TAU).inv();
        let mut raw: Vec<(Complex64, Complex64)> = Vec::new();
        for seg in self.path.segments() {
            let trapezoid =
                seg.is_periodic() && matches!(self.spec.rule, QuadratureRule::TrapezoidPeriodic);
            if trapezoid {
                let n = resolution * p;
                let h = 1.0 / n as f64;
                for j in 0..n {
                    let t = j as f64 * h;
                    raw.push((seg.point(t), seg.velocity(t) * h * norm));
                }
            } else {
                let h = 1.0 / resolution as f64;
                for panel in 0..resolution {
                    let a = panel as f64 * h;
                    for (x, w) in gx.iter().zip(&gw) {
                        let t = a + 0.5 * h * (x + 1.0);
                        raw.push((seg.point(t), seg.velocity(t) * (0.5 * h * w) * norm));
                    }
                }
            }
        }
        raw.into_par_iter()
            .map(|(s, weight)| {
                Ok(Node {
                    s,
                    weight,
                    g: (self.g)(s)?,
                })
            })
            .collect()
    }

    /// Double the resolution until two successive sums agree to
    /// `target_rel_tol·|I|` or to the rounding floor.
    pub fn integrate(&self, z: Complex64) -> Result<Quadrature> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("z must be finite, got {z}")));
        }
        let mut previous: Option<Complex64> = None;
        for level in 0..=self.spec.max_refinements {
            let nodes = self.level(level)?;
            let mut acc = CompensatedSum::new();
            let mut mass = 0.0;
            for node in nodes.iter() {
                let term = exp_product(z, node.s);
                let term = node.g * node.weight * term;
                acc.add(term);
                mass += term.norm();
            }
            let value = acc.value();
            if !(value.re.is_finite() && value.im.is_finite()) {
                return Err(Error::Domain(format!(
                    "integrand overflows binary64 at z = {z}"
                )));
            }
            let floor = 4.0 * f64::EPSILON * mass;
            if let Some(prev) = previous {
                let diff = (value - prev).norm();
                if diff <= (self.spec.target_rel_tol * value.norm()).max(floor) {
                    return Ok(Quadrature {
                        value,
                        error_estimate: diff.max(floor),
                        rounding_floor: floor,
                        nodes: nodes.len(),
                        refinements: level,
                    });
                }
                if level == self.spec.max_refinements {
                    return Err(Error::NonConvergence {
                        refinements: level,
                        last: value,
                        previous: prev,
                        estimate: diff,
                    });
                }
            }
            previous = Some(value);
        }
        Err(Error::NonConvergence {
            refinements: self.spec.max_refinements,
            last: previous.unwrap_or_default(),
            previous: Complex64::default(),
            estimate: f64::INFINITY,
        })
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `e^{zs}` with the rounding error of the product `zs` carried into the
/// exponential as a first-order correction.
fn exp_product(z: Complex64, s: Complex64) -> Complex64 {
    let prod = |a: f64, b: f64, c: f64, d: f64| {
        let p = a * b;
        let ep = a.mul_add(b, -p);
        let q = c * d;
        let eq = c.mul_add(d, -q);
        let (hi, e) = two_sum(p, q);
        (hi, ep + eq + e)
    };
    let (re, re_lo) = prod(z.re, s.re, -z.im, s.im);
    let (im, im_lo) = prod(z.re, s.im, z.im, s.re);
    let zs = Complex64::new(re, im);
    zs.exp() * Complex64::new(1.0 + re_lo, im_lo)
}

/// One-shot `(1/2πi)∫_path g(s) e^{zs} ds`.
pub fn integrate<G>(g: G, path: &Contour, z: Complex64, spec: &QuadratureSpec) -> Result<Quadrature>
where
    G: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
{
    ContourIntegrator::new(g, path.clone(), *spec)?.integrate(z)
}

fn borel_fn(borel: BorelEvaluator) -> impl Fn(Complex64) -> Result<Complex64> + Send + Sync {
    move |s| borel.borel_eval(s)
}

fn check_inversion_radius(radius: f64) -> Result<()> {
    if !(2.5..=8.0).contains(&radius) {
        return Err(Error::InvalidArgument(format!(
            "inversion radius must lie in [2.5, 8], got {radius}"
        )));
    }
    Ok(())
}

/// `f(z)` recovered from the Borel transform on the circle `|s| = radius`.
pub fn borel_inversion(z: Complex64, radius: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    check_inversion_radius(radius)?;
    integrate(
        borel_fn(BorelEvaluator::default()),
        &Contour::circle(radius)?,
        z,
        spec,
    )
}

/// `u(z) = (1/2πi)∫_I g(s)e^{zs} ds`, `I` from `-3` to `-4`.
pub fn u_eval(z: Complex64, spec: &QuadratureSpec) -> Result<Quadrature> {
    integrate(
        borel_fn(BorelEvaluator::default()),
        &Contour::interval(),
        z,
        spec,
    )
}

/// `F(z) = (1/2πi)∫_γ g(s)e^{zs} ds` for `|z| <= DEFAULT_CANCELLATION_CAP`.
pub fn big_f_eval(z: Complex64, spec: &QuadratureSpec) -> Result<Quadrature> {
    LaplaceSplit::new(LaplaceConfig {
        spec: *spec,
        ..LaplaceConfig::default()
    })?
    .big_f(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceConfig {
    pub borel: BorelEvaluator,
    pub spec: QuadratureSpec,
    pub circle_radius: f64,
    pub gamma: GammaShape,
    pub cancellation_cap: f64,
}

impl Default for LaplaceConfig {
    fn default() -> Self {
        Self {
            borel: BorelEvaluator::default(),
            spec: QuadratureSpec::default(),
            circle_radius: 3.0,
            gamma: GammaShape::Tight,
            cancellation_cap: DEFAULT_CANCELLATION_CAP,
        }
    }
}

/// The Laplace representation of `f` split along `Γ = γ ∪ I`, with `g`
/// cached on every contour for batch evaluation.
#[derive(Debug)]
pub struct LaplaceSplit {
    config: LaplaceConfig,
    circle: ContourIntegrator,
    gamma: ContourIntegrator,
    interval: ContourIntegrator,
    closed: ContourIntegrator,
}

impl LaplaceSplit {
    pub fn new(config: LaplaceConfig) -> Result<Self> {
        check_inversion_radius(config.circle_radius)?;
        if !(config.cancellation_cap > 0.0) {
            return Err(Error::InvalidArgument(
                "cancellation_cap must be positive".into(),
            ));
        }
        let g = || borel_fn(config.borel);
        Ok(Self {
            circle: ContourIntegrator::new(
                g(),
                Contour::circle(config.circle_radius)?,
                config.spec,
            )?,
            gamma: ContourIntegrator::new(g(), config.gamma.contour(), config.spec)?,
            interval: ContourIntegrator::new(g(), Contour::interval(), config.spec)?,
            closed: ContourIntegrator::new(g(), Contour::closed_gamma(config.gamma), config.spec)?,
            config,
        })
    }

    pub fn config(&self) -> &LaplaceConfig {
        &self.config
    }

    /// Borel inversion on the configured circle.
    pub fn inversion(&self, z: Complex64) -> Result<Quadrature> {
        self.circle.integrate(z)
    }

    pub fn u(&self, z: Complex64) -> Result<Quadrature> {
        self.interval.integrate(z)
    }

    /// `F(z)`, refused beyond the cancellation cap.
    pub fn big_f(&self, z: Complex64) -> Result<Quadrature> {
        if z.norm() > self.config.cancellation_cap {
            return Err(Error::Domain(format!(
                "|z| = {} exceeds the cancellation cap {}",
                z.norm(),
                self.config.cancellation_cap
            )));
        }
        self.gamma.integrate(z)
    }

    /// The integral over the closed contour `γ ∪ I`.
    pub fn closed_contour(&self, z: Complex64) -> Result<Quadrature> {
        self.closed.integrate(z)
    }

    /// `F = f - u` with `f` from the product and `u` by quadrature; usable
    /// far beyond the cancellation cap along rays where `u` stays small.
    pub fn big_f_via_identity(
        &self,
        product: &ProductEvaluator,
        z: Complex64,
    ) -> Result<LogComplex> {
        let u = self.u(z)?.value;
        Ok(product.eval_log_f(z).lc_sub(LogComplex::from(u)))
    }
}

/// `(1/2π)·max_I |g|·|I|`: with `|e^{xs}| <= e^{-3x}` on `I` for `x >= 0`,
/// `|u(x)| <= U_DECAY_CONSTANT·e^{-3x}`.
pub fn u_decay_constant(borel: &BorelEvaluator) -> Result<f64> {
    // |g| is largest at the end nearest the singular disc.
    let samples = 64;
    let mut max = 0.0f64;
    for i in 0..=samples {
        let s = Complex64::new(-3.0 - i as f64 / samples as f64, 0.0);
        max = max.max(borel.borel_eval(s)?.norm());
    }
    Ok(max / TAU)
}
