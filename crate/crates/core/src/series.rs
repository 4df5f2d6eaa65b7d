//! Partial sums of the Poincaré series in log space, and two estimators of
//! the exponent of convergence: the root of the per-length pressure and the
//! growth rate of orbit counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::QuotientHom;
use crate::kleinian::MarkedGroup;

/// Running `log(sum exp(x_i))`. Merging is exact up to rounding and does
/// not depend on how the terms were split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSum {
    max: f64,
    acc: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum::EMPTY
    }
}

impl LogSum {
    pub const EMPTY: LogSum = LogSum { max: f64::NEG_INFINITY, acc: 0.0 };

    pub fn add(&mut self, x: f64) {
        if x <= self.max {
            self.acc += (x - self.max).exp();
        } else {
            self.acc = self.acc * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn merge(self, other: LogSum) -> LogSum {
        if other.max == f64::NEG_INFINITY {
            return self;
        }
        if self.max == f64::NEG_INFINITY {
            return other;
        }
        let max = self.max.max(other.max);
        LogSum {
            max,
            acc: self.acc * (self.max - max).exp() + other.acc * (other.max - max).exp(),
        }
    }

    /// `log` of the sum; `-inf` when empty.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.acc.ln()
        }
    }
}

pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = LogSum::EMPTY;
    for x in xs {
        s.add(x);
    }
    s.value()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEstimate {
    pub s: f64,
    pub cutoff: usize,
    pub log_sum: f64,
    /// `log` of the partial sum over words of each length `0..=cutoff`.
    pub per_length: Vec<f64>,
}

impl SeriesEstimate {
    /// `log` of the partial sum over words of length `<= l`, for each `l`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = LogSum::EMPTY;
        self.per_length
            .iter()
            .map(|&x| {
                acc.add(x);
                acc.value()
            })
            .collect()
    }
}

/// Partial Poincaré series over `(word length, displacement)` pairs.
pub fn poincare_partial(entries: impl IntoIterator<Item = (usize, f64)>, s: f64) -> Result<SeriesEstimate> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("exponent must be nonnegative, got {s}")));
    }
    let mut layers: Vec<LogSum> = Vec::new();
    for (len, d) in entries {
        if layers.len() <= len {
            layers.resize(len + 1, LogSum::EMPTY);
        }
        layers[len].add(-s * d);
    }
    Ok(series_from_layers(s, &layers))
}

fn series_from_layers(s: f64, layers: &[LogSum]) -> SeriesEstimate {
    let total = layers.iter().fold(LogSum::EMPTY, |a, b| a.merge(*b));
    SeriesEstimate {
        s,
        cutoff: layers.len().saturating_sub(1),
        log_sum: total.value(),
        per_length: layers.iter().map(LogSum::value).collect(),
    }
}

/// Partial series of the whole group over words of length `<= max_len`.
pub fn group_partial(group: &MarkedGroup, s: f64, max_len: usize, workers: usize) -> Result<SeriesEstimate> {
    kernel_partial(group, None, s, max_len, workers)
}

/// Partial series restricted to the kernel of `hom` (or the whole group).
pub fn kernel_partial(group: &MarkedGroup, hom: Option<&QuotientHom>, s: f64, max_len: usize, workers: usize) -> Result<SeriesEstimate> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("exponent must be nonnegative, got {s}")));
    }
    let layers = group.orbit_fold(
        max_len,
        workers,
        || vec![LogSum::EMPTY; max_len + 1],
        |acc, ls, m| {
            if hom.is_none_or(|h| h.kernel_contains(ls)) {
                acc[ls.len()].add(-s * m.displacement());
            }
        },
        |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
    );
    Ok(series_from_layers(s, &layers))
}

/// Displacements of every word of one length, cached so the pressure can be
/// evaluated at many exponents.
#[derive(Clone, Debug)]
pub struct Layer {
    len: usize,
    displacements: Vec<f64>,
}

impl Layer {
    pub fn new(group: &MarkedGroup, len: usize, workers: usize) -> Self {
        Layer {
            len,
            displacements: group.sphere_displacements(len, workers),
        }
    }

    pub fn from_displacements(len: usize, displacements: Vec<f64>) -> Self {
        Layer { len, displacements }
    }

    /// Word length of the layer.
    pub fn word_length(&self) -> usize {
        self.len
    }

    pub fn displacements(&self) -> &[f64] {
        &self.displacements
    }

    /// `(1/L) log sum_{|w| = L} exp(-s d(w))`.
    pub fn pressure(&self, s: f64) -> f64 {
        log_sum_exp(self.displacements.iter().map(|d| -s * d)) / self.len.max(1) as f64
    }
}

pub fn pressure(group: &MarkedGroup, s: f64, len: usize, workers: usize) -> f64 {
    Layer::new(group, len, workers).pressure(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMethod {
    PressureRoot,
    CountingRegression,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub value: f64,
    pub method: DeltaMethod,
    /// Word-length cutoff of the data, when known.
    pub cutoff: Option<usize>,
    /// Pressure at the returned root, or RMS of the regression.
    pub residual: f64,
    /// Final bisection bracket, or the radius window of the regression.
    pub bracket: [f64; 2],
    pub diagnostics: BTreeMap<String, f64>,
}

pub const DEFAULT_ROOT_TOL: f64 = 1e-4;

/// Grid scanned for the first exponent with negative pressure.
pub const PRESSURE_GRID: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

pub fn delta_via_pressure(group: &MarkedGroup, len: usize, tol: f64, workers: usize) -> Result<DeltaEstimate> {
    pressure_root(&Layer::new(group, len, workers), tol)
}

/// Bisection for the zero of the pressure of a cached layer.
pub fn pressure_root(layer: &Layer, tol: f64) -> Result<DeltaEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let p0 = layer.pressure(0.0);
    if !(p0 > 0.0) {
        return Err(Error::NoSignChange { s_hi: 0.0, value: p0 });
    }
    let mut evaluations = 1u32;
    let mut lo = (0.0, p0);
    let mut hi = None;
    for &s in &PRESSURE_GRID {
        let p = layer.pressure(s);
        evaluations += 1;
        if p < 0.0 {
            hi = Some((s, p));
            break;
        }
        lo = (s, p);
    }
    let Some(mut hi) = hi else {
        return Err(Error::NoSignChange { s_hi: lo.0, value: lo.1 });
    };
    let s_hi = hi.0;
    while hi.0 - lo.0 > tol {
        let mid = 0.5 * (lo.0 + hi.0);
        let p = layer.pressure(mid);
        evaluations += 1;
        if p >= 0.0 {
            lo = (mid, p);
        } else {
            hi = (mid, p);
        }
    }
    let value = 0.5 * (lo.0 + hi.0);
    let residual = layer.pressure(value);
    let diagnostics = BTreeMap::from([
        ("pressure_at_zero".to_string(), p0),
        ("pressure_lo".to_string(), lo.1),
        ("pressure_hi".to_string(), hi.1),
        ("grid_s_hi".to_string(), s_hi),
        ("evaluations".to_string(), f64::from(evaluations + 1)),
    ]);
    Ok(DeltaEstimate {
        value,
        method: DeltaMethod::PressureRoot,
        cutoff: Some(layer.len),
        residual,
        bracket: [lo.0, hi.0],
        diagnostics,
    })
}

/// Least-squares line through `(radius, log count)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

pub fn fit_log_counts(radii: &[f64], counts: &[f64]) -> Result<CountFit> {
    if radii.len() != counts.len() || radii.len() < 2 {
        return Err(Error::InvalidArgument("need at least two (radius, count) pairs".into()));
    }
    if counts.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::InvalidArgument("counts must be positive".into()));
    }
    let n = radii.len() as f64;
    let ys: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
    let mx = radii.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = radii.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = radii.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = radii.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(CountFit {
        slope,
        intercept,
        residual_rms: (sse / n).sqrt(),
    })
}

pub const DEFAULT_BIN_WIDTH: f64 = 0.5;
pub const MIN_BINS: usize = 5;

/// Radii `r_lo, r_lo + w, ...` up to `r_hi`.
pub fn radius_grid(r_lo: f64, r_hi: f64, bin_width: f64) -> Result<Vec<f64>> {
    if !(r_hi > r_lo) || !(bin_width > 0.0) {
        return Err(Error::InvalidArgument(format!("bad radius window [{r_lo}, {r_hi}] with bin width {bin_width}")));
    }
    let n = ((r_hi - r_lo) / bin_width + 1e-9).floor() as usize;
    if n + 1 < MIN_BINS {
        return Err(Error::InvalidArgument(format!(
            "window [{r_lo}, {r_hi}] holds {} radii at width {bin_width}, need {MIN_BINS}",
            n + 1
        )));
    }
    Ok((0..=n).map(|i| r_lo + i as f64 * bin_width).collect())
}

/// Slope of `log N(R)` against `R`, where `N(R)` counts displacements
/// `<= R`, over the grid from [`radius_grid`].
pub fn delta_via_counting(displacements: impl IntoIterator<Item = f64>, r_lo: f64, r_hi: f64, bin_width: f64) -> Result<DeltaEstimate> {
    let radii = radius_grid(r_lo, r_hi, bin_width)?;
    let mut hist = vec![0u64; radii.len()];
    for d in displacements {
        if d <= r_lo {
            hist[0] += 1;
        } else {
            let i = ((d - r_lo) / bin_width).ceil() as usize;
            if i < radii.len() {
                // guard the rounding of boundary values
                let i = if d <= radii[i - 1] { i - 1 } else { i };
                hist[i] += 1;
            }
        }
    }
    let counts: Vec<f64> = hist
        .iter()
        .scan(0u64, |acc, &c| {
            *acc += c;
            Some(*acc as f64)
        })
        .collect();
    if counts[0] == 0.0 {
        return Err(Error::EmptyWindow { lo: r_lo, hi: r_hi });
    }
    let fit = fit_log_counts(&radii, &counts)?;
    let diagnostics = BTreeMap::from([
        ("intercept".to_string(), fit.intercept),
        ("bins".to_string(), radii.len() as f64),
        ("bin_width".to_string(), bin_width),
        ("count_lo".to_string(), counts[0]),
        ("count_hi".to_string(), *counts.last().unwrap()),
    ]);
    Ok(DeltaEstimate {
        value: fit.slope,
        method: DeltaMethod::CountingRegression,
        cutoff: None,
        residual: fit.residual_rms,
        bracket: [r_lo, r_hi],
        diagnostics,
    })
}

/// Largest radius below which the ball of word length `len` holds every
/// orbit point: the smallest displacement one layer further out. This
/// assumes the minimum displacement per length is nondecreasing, which holds
/// for the Schottky groups exercised here and is checked by
/// [`min_displacement_profile`].
pub fn complete_radius(group: &MarkedGroup, len: usize, workers: usize) -> f64 {
    group.min_sphere_displacement(len + 1, workers)
}

/// Smallest displacement at each length `1..=max_len`.
pub fn min_displacement_profile(group: &MarkedGroup, max_len: usize, workers: usize) -> Vec<f64> {
    group.orbit_fold(
        max_len,
        workers,
        || vec![f64::INFINITY; max_len + 1],
        |acc, ls, m| {
            let d = m.displacement();
            if d < acc[ls.len()] {
                acc[ls.len()] = d;
            }
        },
        |a, b| a.into_iter().zip(b).map(|(x, y)| x.min(y)).collect(),
    )[1..]
        .to_vec()
}

/// Default regression window for data complete up to `r_hi`: the upper half
/// of the complete range.
pub fn default_window(r_hi: f64) -> (f64, f64) {
    (0.5 * r_hi, r_hi)
}

/// Counting estimate for the whole group over words of length `<= len`,
/// on the default window.
pub fn delta_via_counting_group(group: &MarkedGroup, len: usize, workers: usize) -> Result<DeltaEstimate> {
    subgroup_delta(group, &QuotientHom::trivial(group.rank()), len, None, workers)
}

/// Counting estimate for the kernel of `hom`. With no window given the
/// default window on the complete radius of `len` is used.
pub fn subgroup_delta(group: &MarkedGroup, hom: &QuotientHom, len: usize, window: Option<(f64, f64)>, workers: usize) -> Result<DeltaEstimate> {
    if hom.rank() != group.rank() {
        return Err(Error::InvalidHom(format!("rank {} does not match the group rank {}", hom.rank(), group.rank())));
    }
    let (r_lo, r_hi) = match window {
        Some(w) => w,
        None => default_window(complete_radius(group, len, workers)),
    };
    let (members, nontrivial) = group.orbit_fold(
        len,
        workers,
        || (Vec::new(), 0u64),
        |acc: &mut (Vec<f64>, u64), ls, m| {
            if hom.kernel_contains(ls) {
                let d = m.displacement();
                if d <= r_hi {
                    acc.0.push(d);
                }
                acc.1 += u64::from(!ls.is_empty());
            }
        },
        |mut a, b| {
            a.0.extend(b.0);
            (a.0, a.1 + b.1)
        },
    );
    if nontrivial == 0 {
        return Err(Error::EmptyKernel(len));
    }
    let mut est = delta_via_counting(members, r_lo, r_hi, DEFAULT_BIN_WIDTH)?;
    est.cutoff = Some(len);
    est.diagnostics.insert("kernel_members".to_string(), (nontrivial + 1) as f64);
    Ok(est)
}

/// `C(s) = 4^s e^{2 s t} (1 + e^{-st}) / (1 - e^{-st})`, the closed form of
/// `2^{2s} sum_{n in Z} e^{-s (|n| - 2) t}`.
pub fn lemma1_constant(s: f64, t_h: f64) -> Result<f64> {
    Ok(lemma1_log_constant(s, t_h)?.exp())
}

pub fn lemma1_log_constant(s: f64, t_h: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("the constant needs s > 0, got {s}")));
    }
    if !(t_h > 0.0) {
        return Err(Error::InvalidArgument(format!("translation length must be positive, got {t_h}")));
    }
    let x = s * t_h;
    Ok(2.0 * s * 2f64.ln() + 2.0 * x + (-x).exp().ln_1p() - (-(-x).exp_m1()).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::sphere_size;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn group() -> MarkedGroup {
        MarkedGroup::schottky_symmetric(2, 3.0).unwrap()
    }

    #[test]
    fn partial_sum_examples() {
        let one = poincare_partial([(0, 0.0)], 0.7).unwrap();
        assert_eq!(one.log_sum, 0.0);
        let (s, t) = (0.4, 3.0);
        let two = poincare_partial([(0, 0.0), (1, t)], s).unwrap();
        assert!((two.log_sum - (-s * t).exp().ln_1p()).abs() < 1e-15);
        assert!(poincare_partial([(0, 0.0)], -1.0).is_err());
    }

    #[test]
    fn cumulative_sums_layers() {
        let est = poincare_partial([(0, 0.0), (1, 1.0), (1, 2.0), (2, 3.0)], 1.0).unwrap();
        let naive = [1.0, 1.0 + (-1f64).exp() + (-2f64).exp(), 1.0 + (-1f64).exp() + (-2f64).exp() + (-3f64).exp()];
        for (c, n) in est.cumulative().iter().zip(naive) {
            assert!((c - n.ln()).abs() < 1e-14);
        }
        assert_eq!(*est.cumulative().last().unwrap(), est.log_sum);
    }

    #[test]
    fn log_space_matches_naive_sum() {
        let mut r = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let s = r.gen::<f64>();
            let entries: Vec<(usize, f64)> = (0..1000).map(|_| (r.gen_range(0..6), 30.0 * r.gen::<f64>())).collect();
            let naive: f64 = entries.iter().map(|(_, d)| (-s * d).exp()).sum();
            let est = poincare_partial(entries.iter().copied(), s).unwrap();
            assert!((est.log_sum.exp() - naive).abs() <= 1e-12 * naive);
            let layers = log_sum_exp(est.per_length.iter().copied());
            assert!((layers - est.log_sum).abs() < 1e-12);
        }
    }

    #[test]
    fn huge_displacements_do_not_underflow() {
        let est = poincare_partial([(5, 1e4), (6, 1e4 + 1.0)], 1.0).unwrap();
        assert!((est.log_sum - (-1e4 + (-1f64).exp().ln_1p())).abs() < 1e-9);
    }

    #[test]
    fn merge_is_split_independent() {
        let xs: Vec<f64> = (0..100).map(|i| -(i as f64) * 0.37).collect();
        let whole = log_sum_exp(xs.iter().copied());
        let mut a = LogSum::EMPTY;
        let mut b = LogSum::EMPTY;
        for (i, x) in xs.iter().enumerate() {
            if i % 3 == 0 { a.add(*x) } else { b.add(*x) }
        }
        assert!((a.merge(b).value() - whole).abs() < 1e-13);
        assert_eq!(LogSum::EMPTY.merge(a), a);
    }

    #[test]
    fn pressure_examples() {
        let g = group();
        for s in [0.0, 0.3, 0.9] {
            assert!((pressure(&g, s, 1, 1) - (4f64.ln() - 3.0 * s)).abs() < 1e-12);
        }
        for len in [4, 8] {
            let expect = (sphere_size(2, len) as f64).ln() / len as f64;
            assert!((pressure(&g, 0.0, len, 1) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn pressure_is_decreasing_and_convex_on_grid() {
        let layer = Layer::new(&group(), 10, 1);
        let ps: Vec<f64> = (0..=10).map(|i| layer.pressure(i as f64 / 10.0)).collect();
        assert!(ps.windows(2).all(|p| p[1] < p[0]));
        assert!(ps.windows(3).all(|p| p[0] - 2.0 * p[1] + p[2] >= -1e-6));
    }

    #[test]
    fn pressure_root_contract() {
        let est = delta_via_pressure(&group(), 8, 1e-4, 1).unwrap();
        assert!(est.bracket[1] - est.bracket[0] <= 1e-4);
        assert!(est.bracket[0] <= est.value && est.value <= est.bracket[1]);
        assert!(est.value >= 3f64.ln() / 3.0);
        assert!(est.diagnostics["pressure_lo"] >= 0.0 && est.diagnostics["pressure_hi"] < 0.0);
    }

    #[test]
    fn no_sign_change_is_reported() {
        // pressure stays positive on the grid when every displacement is tiny
        let layer = Layer::from_displacements(2, vec![0.01; 12]);
        assert!(matches!(pressure_root(&layer, 1e-4), Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn synthetic_exponential_counts() {
        let radii: Vec<f64> = (5..=15).map(f64::from).collect();
        let counts: Vec<f64> = radii.iter().map(|r| (0.5 * r).exp()).collect();
        let fit = fit_log_counts(&radii, &counts).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-6);
        let doubled: Vec<f64> = counts.iter().map(|c| 2.0 * c).collect();
        let fit2 = fit_log_counts(&radii, &doubled).unwrap();
        assert!((fit2.slope - fit.slope).abs() < 1e-12);
        assert!((fit2.intercept - fit.intercept - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn counting_doubling_shifts_intercept() {
        let ds: Vec<f64> = group().orbit_displacements(7, 1).into_iter().map(|x| x.1).collect();
        let once = delta_via_counting(ds.iter().copied(), 6.0, 10.0, 0.5).unwrap();
        let twice = delta_via_counting(ds.iter().chain(&ds).copied(), 6.0, 10.0, 0.5).unwrap();
        assert!((once.value - twice.value).abs() < 1e-12);
        assert!((twice.diagnostics["intercept"] - once.diagnostics["intercept"] - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn counting_window_errors() {
        assert!(matches!(delta_via_counting([100.0], 1.0, 5.0, 0.5), Err(Error::EmptyWindow { .. })));
        assert!(delta_via_counting([1.0], 1.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn boundary_values_land_in_their_own_bin() {
        let est = delta_via_counting([1.0, 1.5, 2.0, 2.5, 3.0], 1.0, 3.0, 0.5).unwrap();
        assert_eq!(est.diagnostics["count_lo"], 1.0);
        assert_eq!(est.diagnostics["count_hi"], 5.0);
    }

    #[test]
    fn trivial_kernel_matches_full_count() {
        let g = group();
        let full: Vec<f64> = g.orbit_displacements(8, 1).into_iter().map(|x| x.1).collect();
        let r_hi = complete_radius(&g, 8, 1);
        let (lo, hi) = default_window(r_hi);
        let direct = delta_via_counting(full, lo, hi, DEFAULT_BIN_WIDTH).unwrap();
        let sub = subgroup_delta(&g, &QuotientHom::trivial(2), 8, None, 1).unwrap();
        assert_eq!(direct.value, sub.value);
    }

    #[test]
    fn empty_kernel_is_reported() {
        // Z/7 with a -> 1, b -> 2: nothing of length <= 2 but the identity
        let hom = QuotientHom::cyclic(2, 7, &[1, 2]).unwrap();
        assert!(matches!(subgroup_delta(&group(), &hom, 2, Some((0.0, 3.0)), 1), Err(Error::EmptyKernel(2))));
    }

    #[test]
    fn lemma1_constant_matches_truncated_sum() {
        let (s, t) = (0.5, 3.0);
        let direct: f64 = 4f64.powf(s) * (-200..=200).map(|n: i32| (-s * (n.abs() as f64 - 2.0) * t).exp()).sum::<f64>();
        let c = lemma1_constant(s, t).unwrap();
        assert!((c - direct).abs() <= 1e-10 * c);
    }

    #[test]
    fn lemma1_constant_shape() {
        // blow-up as s -> 0+; for larger s the factor 4^s e^{2st} takes over
        let cs: Vec<f64> = [0.1, 0.05, 0.02, 0.01, 0.001].iter().map(|&s| lemma1_constant(s, 3.0).unwrap()).collect();
        assert!(cs.windows(2).all(|p| p[1] > p[0]));
        // decreasing in the translation length once 4^s e^{2st} is dominated
        let ts: Vec<f64> = [2.0, 3.0, 4.0].iter().map(|&t| lemma1_constant(0.05, t).unwrap()).collect();
        assert!(ts.windows(2).all(|p| p[1] < p[0]), "{ts:?}");
        assert!(lemma1_constant(0.0, 3.0).is_err());
        assert!(lemma1_constant(-1.0, 3.0).is_err());
    }

    #[test]
    fn delta_json_shape() {
        let est = delta_via_pressure(&group(), 6, 1e-3, 1).unwrap();
        let v: serde_json::Value = serde_json::to_value(&est).unwrap();
        for key in ["value", "method", "cutoff", "residual", "bracket"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["method"], "pressure_root");
        let back: DeltaEstimate = serde_json::from_value(v).unwrap();
        assert_eq!(back, est);
    }
}
