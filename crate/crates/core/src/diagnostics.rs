//! Growth regularity diagnostics on sampled profiles `log|φ(re^{iθ})|/r`.
//!
//! The limit outside an exceptional set of zero relative measure is
//! replaced by trimmed quantiles over dyadic windows `[2^k, 2^{k+1})`: a set
//! occupying less than a fraction `q` of a window cannot move the quantiles
//! past the values on the rest of the window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::compensated_sum_real;
use crate::product::GrowthProfile;

/// Minimum finite samples per window.
pub const MIN_WINDOW_SAMPLES: usize = 64;

/// Minimum number of windows a profile has to span.
pub const MIN_WINDOWS: usize = 3;

pub const DEFAULT_QUANTILE: f64 = 0.1;
pub const DEFAULT_GAP_TOL: f64 = 0.02;
pub const DEFAULT_DRIFT_TOL: f64 = 0.02;
pub const DEFAULT_TRAILING_WINDOWS: usize = 4;

/// A finite union of disjoint open intervals in `(0, ∞)`, sorted by `lo`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Sorts the intervals and merges any that overlap or touch.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo >= 0.0 && lo < hi) || lo.is_nan() || hi.is_nan() {
                return Err(Error::InvalidArgument(format!(
                    "interval ({lo}, {hi}) is not a nonempty subset of (0, inf)"
                )));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.1 <= x);
        self.intervals.get(i).is_some_and(|&(lo, _)| lo < x)
    }

    /// `λ(E ∩ (0, r))`.
    pub fn measure_below(&self, r: f64) -> f64 {
        compensated_sum_real(
            self.intervals
                .iter()
                .take_while(|iv| iv.0 < r)
                .map(|&(lo, hi)| hi.min(r) - lo),
        )
    }

    /// `λ(E ∩ (0, r)) / r`; NaN unless `r > 0`.
    pub fn relative_measure(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return f64::NAN;
        }
        if r.is_infinite() {
            return if self.intervals.last().is_some_and(|iv| iv.1.is_infinite()) {
                1.0
            } else {
                0.0
            };
        }
        self.measure_below(r) / r
    }
}

/// `λ(E ∩ (0, r)) / r`.
pub fn relative_measure(set: &IntervalSet, r: f64) -> f64 {
    set.relative_measure(r)
}

/// The `k` with `2^k <= r < 2^{k+1}`, read off the binary exponent.
pub fn window_index(r: f64) -> Option<i32> {
    if !(r > 0.0 && r.is_finite()) {
        return None;
    }
    if r.is_normal() {
        Some(((r.to_bits() >> 52) & 0x7ff) as i32 - 1023)
    } else {
        Some(r.log2().floor() as i32)
    }
}

/// Sample quantile by linear interpolation between order statistics.
/// `sorted` must be nonempty and ascending.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub k: i32,
    pub r_lo: f64,
    pub r_hi: f64,
    pub inf: f64,
    pub q_low: f64,
    pub q_high: f64,
    pub sup: f64,
    /// Finite samples used.
    pub samples: usize,
    /// Samples at exact zeros, left out of the statistics.
    pub excluded: usize,
}

impl WindowStats {
    pub fn width(&self) -> f64 {
        self.q_high - self.q_low
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.q_low + self.q_high)
    }
}

fn check_quantile(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "quantile q must lie in (0, 0.5), got {q}"
        )));
    }
    Ok(())
}

/// Per-window trimmed statistics. Edge windows holding fewer than
/// [`MIN_WINDOW_SAMPLES`] finite samples are dropped; sparse interior windows
/// and profiles spanning fewer than [`MIN_WINDOWS`] windows are errors.
pub fn window_stats(profile: &GrowthProfile, q: f64) -> Result<Vec<WindowStats>> {
    check_quantile(q)?;
    let mut groups: Vec<(i32, Vec<f64>, usize)> = Vec::new();
    for (&r, &v) in profile.radii.iter().zip(&profile.values) {
        let k = window_index(r).ok_or_else(|| {
            Error::InvalidArgument(format!("radius {r} is not positive and finite"))
        })?;
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::InvalidArgument(format!(
                "profile value {v} at r = {r} is not a growth rate"
            )));
        }
        if groups.last().is_none_or(|g| g.0 != k) {
            groups.push((k, Vec::new(), 0));
        }
        let group = groups.last_mut().expect("just pushed");
        if v == f64::NEG_INFINITY {
            group.2 += 1;
        } else {
            group.1.push(v);
        }
    }
    while groups
        .first()
        .is_some_and(|g| g.1.len() < MIN_WINDOW_SAMPLES)
    {
        groups.remove(0);
    }
    while groups
        .last()
        .is_some_and(|g| g.1.len() < MIN_WINDOW_SAMPLES)
    {
        groups.pop();
    }
    if let Some(g) = groups.iter().find(|g| g.1.len() < MIN_WINDOW_SAMPLES) {
        return Err(Error::InsufficientSamples(format!(
            "window k = {} has {} finite samples, need {MIN_WINDOW_SAMPLES}",
            g.0,
            g.1.len()
        )));
    }
    if groups.len() < MIN_WINDOWS {
        return Err(Error::InsufficientSamples(format!(
            "profile '{}' spans {} dyadic windows with {MIN_WINDOW_SAMPLES}+ samples, need {MIN_WINDOWS}",
            profile.function_id,
            groups.len()
        )));
    }
    Ok(groups
        .into_iter()
        .map(|(k, mut values, excluded)| {
            values.sort_by(f64::total_cmp);
            WindowStats {
                k,
                r_lo: (k as f64).exp2(),
                r_hi: (k as f64 + 1.0).exp2(),
                inf: values[0],
                q_low: quantile(&values, q),
                q_high: quantile(&values, 1.0 - q),
                sup: values[values.len() - 1],
                samples: values.len(),
                excluded,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Regular,
    Irregular,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Regular => "regular",
            Verdict::Irregular => "irregular",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub q: f64,
    pub gap_tol: f64,
    pub drift_tol: f64,
    pub trailing: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            q: DEFAULT_QUANTILE,
            gap_tol: DEFAULT_GAP_TOL,
            drift_tol: DEFAULT_DRIFT_TOL,
            trailing: DEFAULT_TRAILING_WINDOWS,
        }
    }
}

/// Serializes to the verdict record
/// `{function_id, theta, verdict, limit_or_gap, windows, q, gap_tol, drift_tol}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub function_id: String,
    pub theta: f64,
    pub verdict: Verdict,
    /// Regular: midpoint of the last window. Otherwise the smallest trailing
    /// window width.
    pub limit_or_gap: f64,
    /// Window indices `k` the verdict was based on.
    pub windows: Vec<i32>,
    pub q: f64,
    pub gap_tol: f64,
    pub drift_tol: f64,
}

/// Classify with the default number of trailing windows.
pub fn classify(
    profile: &GrowthProfile,
    q: f64,
    gap_tol: f64,
    drift_tol: f64,
) -> Result<RegularityVerdict> {
    classify_with(
        profile,
        &ClassifyParams {
            q,
            gap_tol,
            drift_tol,
            trailing: DEFAULT_TRAILING_WINDOWS,
        },
    )
}

pub fn classify_with(
    profile: &GrowthProfile,
    params: &ClassifyParams,
) -> Result<RegularityVerdict> {
    let stats = window_stats(profile, params.q)?;
    classify_stats(&profile.function_id, profile.theta, &stats, params)
}

/// The verdict for precomputed window statistics.
pub fn classify_stats(
    function_id: &str,
    theta: f64,
    stats: &[WindowStats],
    params: &ClassifyParams,
) -> Result<RegularityVerdict> {
    check_quantile(params.q)?;
    if !(params.gap_tol > 0.0 && params.drift_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerances must be positive, got gap_tol = {}, drift_tol = {}",
            params.gap_tol, params.drift_tol
        )));
    }
    if params.trailing < 2 {
        return Err(Error::InvalidArgument(
            "need at least 2 trailing windows".into(),
        ));
    }
    if stats.len() < MIN_WINDOWS {
        return Err(Error::InsufficientSamples(format!(
            "{} windows, need {MIN_WINDOWS}",
            stats.len()
        )));
    }
    let tail = &stats[stats.len().saturating_sub(params.trailing)..];
    let min_width = tail
        .iter()
        .map(WindowStats::width)
        .fold(f64::INFINITY, f64::min);
    let narrow = tail.iter().all(|w| w.width() <= params.gap_tol);
    let steady = tail
        .windows(2)
        .all(|p| (p[1].midpoint() - p[0].midpoint()).abs() <= params.drift_tol);
    let (verdict, limit_or_gap) = if narrow && steady {
        (Verdict::Regular, tail[tail.len() - 1].midpoint())
    } else if min_width >= 2.0 * params.gap_tol {
        (Verdict::Irregular, min_width)
    } else {
        (Verdict::Inconclusive, min_width)
    };
    Ok(RegularityVerdict {
        function_id: function_id.to_string(),
        theta,
        verdict,
        limit_or_gap,
        windows: tail.iter().map(|w| w.k).collect(),
        q: params.q,
        gap_tol: params.gap_tol,
        drift_tol: params.drift_tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeEstimate {
    /// Largest top-window sup over all directions.
    pub value: f64,
    /// Direction attaining it.
    pub theta: f64,
    /// Largest radius sampled in that window.
    pub r_max: f64,
}

/// Lower estimate of the type: the largest top-window sup over the sampled
/// directions.
pub fn type_estimate(profiles: &[GrowthProfile]) -> Result<TypeEstimate> {
    let mut thetas: Vec<f64> = profiles.iter().map(|p| p.theta).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    if thetas.len() < 8 {
        return Err(Error::InsufficientSamples(format!(
            "{} distinct directions, need 8",
            thetas.len()
        )));
    }
    let mut best: Option<TypeEstimate> = None;
    for p in profiles {
        let stats = window_stats(p, DEFAULT_QUANTILE)?;
        if stats.len() < 4 {
            return Err(Error::InsufficientSamples(format!(
                "profile at θ = {} spans {} windows, need 4",
                p.theta,
                stats.len()
            )));
        }
        let top = stats[stats.len() - 1];
        if best.is_none_or(|b| top.sup > b.value) {
            let r_max = p
                .radii
                .iter()
                .copied()
                .filter(|&r| window_index(r) == Some(top.k))
                .fold(0.0, f64::max);
            best = Some(TypeEstimate {
                value: top.sup,
                theta: p.theta,
                r_max,
            });
        }
    }
    Ok(best.expect("at least 8 profiles"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::{controls, dyadic_grid, ProductEvaluator};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn constant(value: f64, k_lo: i32, k_hi: i32) -> GrowthProfile {
        let radii = dyadic_grid(k_lo, k_hi, 128).unwrap();
        let values = vec![value; radii.len()];
        GrowthProfile::new("const", 0.0, radii, values).unwrap()
    }

    #[test]
    fn relative_measure_examples() {
        let all = IntervalSet::new(vec![(0.0, f64::INFINITY)]).unwrap();
        assert_eq!(relative_measure(&all, 7.0), 1.0);

        let bumps: Vec<_> = (1..=20)
            .map(|k| ((k as f64).exp2(), (k as f64).exp2() + 1.0))
            .collect();
        let e = IntervalSet::new(bumps).unwrap();
        assert_eq!(relative_measure(&e, 1048576.0), 19.0 / 1048576.0);

        assert_eq!(relative_measure(&IntervalSet::empty(), 3.0), 0.0);
        assert!(relative_measure(&all, 0.0).is_nan());
    }

    #[test]
    fn interval_set_normalizes() {
        let e = IntervalSet::new(vec![(5.0, 6.0), (1.0, 2.0), (1.5, 3.0), (3.0, 4.0)]).unwrap();
        assert_eq!(e.intervals(), &[(1.0, 4.0), (5.0, 6.0)]);
        assert!(e.contains(2.0) && !e.contains(4.5) && !e.contains(1.0));
        assert!(IntervalSet::new(vec![(2.0, 1.0)]).is_err());
        assert!(IntervalSet::new(vec![(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn window_index_is_exact() {
        assert_eq!(window_index(1.0), Some(0));
        assert_eq!(window_index(2.0), Some(1));
        assert_eq!(window_index(2.0f64.next_down()), Some(0));
        assert_eq!(window_index(1024.0), Some(10));
        assert_eq!(window_index(0.75), Some(-1));
        assert_eq!(window_index(0.0), None);
        assert_eq!(window_index(f64::INFINITY), None);
    }

    #[test]
    fn quantile_interpolates() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 0.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.5), 2.0);
        assert!((quantile(&v, 0.1) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn exp_2z_is_regular() {
        let radii = dyadic_grid(8, 14, 128).unwrap();
        let p = GrowthProfile::sample("exp_2z", 0.0, radii, controls::exp_2z).unwrap();
        for w in window_stats(&p, 0.1).unwrap() {
            assert_eq!((w.q_low, w.q_high), (2.0, 2.0));
        }
        let v = classify(&p, 0.1, 0.02, 0.02).unwrap();
        assert_eq!(v.verdict, Verdict::Regular);
        assert_eq!(v.limit_or_gap, 2.0);
        assert_eq!(v.windows, vec![10, 11, 12, 13]);
    }

    #[test]
    fn sin_2z_profiles() {
        let radii = dyadic_grid(8, 14, 256).unwrap();
        let real = GrowthProfile::sample("sin_2z", 0.0, radii.clone(), controls::sin_2z).unwrap();
        for w in window_stats(&real, 0.1).unwrap() {
            assert!(w.q_low.abs() < 0.02 && w.q_high.abs() < 0.02, "{w:?}");
        }
        let imag = GrowthProfile::sample("sin_2z", FRAC_PI_2, radii, controls::sin_2z).unwrap();
        let v = classify(&imag, 0.1, 0.02, 0.02).unwrap();
        assert_eq!(v.verdict, Verdict::Regular);
        assert!((v.limit_or_gap - 2.0).abs() < 0.01);
    }

    #[test]
    fn f_is_irregular_on_the_positive_axis() {
        let f = ProductEvaluator::default();
        let radii = dyadic_grid(8, 14, 256).unwrap();
        let p = GrowthProfile::sample("f", 0.0, radii, |z| f.eval_log_f(z)).unwrap();
        let stats = window_stats(&p, 0.1).unwrap();
        assert_eq!(
            stats.iter().map(|w| w.k).collect::<Vec<_>>(),
            (8..14).collect::<Vec<_>>()
        );
        for w in &stats {
            assert!(w.width() >= 0.04, "{w:?}");
        }
        for gap_tol in [0.005, 0.01, 0.02] {
            let v = classify(&p, 0.1, gap_tol, 0.02).unwrap();
            assert_eq!(v.verdict, Verdict::Irregular, "gap_tol = {gap_tol}");
        }
    }

    #[test]
    fn zeros_are_excluded() {
        let mut p = constant(1.5, 4, 8);
        for i in (0..p.values.len()).step_by(10) {
            p.values[i] = f64::NEG_INFINITY;
        }
        let stats = window_stats(&p, 0.1).unwrap();
        assert!(stats.iter().all(|w| w.inf == 1.5 && w.excluded > 0));
    }

    #[test]
    fn insufficient_samples() {
        let p = constant(1.0, 4, 6);
        assert!(matches!(
            window_stats(&p, 0.1),
            Err(Error::InsufficientSamples(_))
        ));
        let sparse = GrowthProfile::new(
            "sparse",
            0.0,
            dyadic_grid(4, 10, 16).unwrap(),
            vec![1.0; 96],
        )
        .unwrap();
        assert!(matches!(
            window_stats(&sparse, 0.1),
            Err(Error::InsufficientSamples(_))
        ));
        assert!(window_stats(&constant(1.0, 4, 8), 0.5).is_err());
    }

    #[test]
    fn sparse_edge_windows_are_dropped() {
        let mut radii = dyadic_grid(4, 8, 128).unwrap();
        radii.push(256.0);
        let values = vec![0.5; radii.len()];
        let p = GrowthProfile::new("edge", 0.0, radii, values).unwrap();
        let stats = window_stats(&p, 0.1).unwrap();
        assert_eq!(stats.last().unwrap().k, 7);
    }

    #[test]
    fn type_estimates() {
        let thetas: Vec<f64> = (0..8).map(|j| j as f64 * PI / 4.0).collect();
        let radii = dyadic_grid(4, 9, 64).unwrap();
        let exp: Vec<_> = thetas
            .iter()
            .map(|&t| GrowthProfile::sample("exp_2z", t, radii.clone(), controls::exp_2z).unwrap())
            .collect();
        let est = type_estimate(&exp).unwrap();
        assert_eq!(est.value, 2.0);
        assert_eq!(est.theta, 0.0);

        let sin: Vec<_> = thetas
            .iter()
            .map(|&t| GrowthProfile::sample("sin_2z", t, radii.clone(), controls::sin_2z).unwrap())
            .collect();
        assert!((type_estimate(&sin).unwrap().value - 2.0).abs() < 0.01);
        assert!(type_estimate(&sin[..7]).is_err());
    }

    proptest! {
        #[test]
        fn constant_profiles_are_regular(
            c in -10.0f64..10.0,
            q in 0.01f64..0.49,
            gap_tol in 1e-6f64..1.0,
            drift_tol in 1e-6f64..1.0,
        ) {
            let v = classify(&constant(c, 3, 9), q, gap_tol, drift_tol).unwrap();
            prop_assert_eq!(v.verdict, Verdict::Regular);
            prop_assert_eq!(v.limit_or_gap, c);
        }

        #[test]
        fn relative_measure_is_monotone(
            raw in prop::collection::vec((0.0f64..100.0, 0.01f64..10.0), 0..12),
            extra in prop::collection::vec((0.0f64..100.0, 0.01f64..10.0), 0..6),
            r in 0.1f64..200.0,
        ) {
            let small: Vec<_> = raw.iter().map(|&(lo, len)| (lo, lo + len)).collect();
            let mut big = small.clone();
            big.extend(extra.iter().map(|&(lo, len)| (lo, lo + len)));
            let a = IntervalSet::new(small).unwrap().relative_measure(r);
            let b = IntervalSet::new(big).unwrap().relative_measure(r);
            prop_assert!(a <= b * (1.0 + 1e-15) + 1e-15);
            prop_assert!((0.0..=1.0 + 1e-15).contains(&a));
        }

        #[test]
        fn verdict_survives_small_exceptional_sets(
            seed_starts in prop::collection::vec(0.0f64..1.0, 6),
            frac in 0.0f64..0.05,
        ) {
            // Delete one interval of relative length < q/2 from every window.
            let f = ProductEvaluator::default();
            let radii = dyadic_grid(8, 14, 256).unwrap();
            let p = GrowthProfile::sample("f", 0.0, radii, |z| f.eval_log_f(z)).unwrap();
            let base = classify(&p, 0.1, 0.02, 0.02).unwrap();
            let holes: Vec<_> = (8..14)
                .zip(&seed_starts)
                .map(|(k, s)| {
                    let lo = (k as f64).exp2() * (1.0 + s * (1.0 - frac));
                    (lo, lo + (k as f64).exp2() * frac)
                })
                .collect();
            let e = IntervalSet::new(holes).unwrap();
            let keep: Vec<usize> = (0..p.len()).filter(|&i| !e.contains(p.radii[i])).collect();
            let cut = GrowthProfile::new(
                "f",
                0.0,
                keep.iter().map(|&i| p.radii[i]).collect(),
                keep.iter().map(|&i| p.values[i]).collect(),
            )
            .unwrap();
            let v = classify(&cut, 0.1, 0.02, 0.02).unwrap();
            prop_assert_eq!(v.verdict, base.verdict);
        }
    }
}
