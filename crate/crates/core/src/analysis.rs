//! Representativeness and coverage metrics.
//!
//! Missing values (undefined assortativity) are carried as `NaN` in value
//! slices and as `None` in reports.

use std::fmt;
use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::atlas::{load_atlas, round_sig12};
use crate::error::{Error, Result};
use crate::generators::{sample_batch, GeneratorConfig};
use crate::stats::{normalize, NormalizedStatVector, StatVector, Statistic};

pub const DEFAULT_KL_BINS: usize = 20;
pub const KL_SMOOTHING: f64 = 1e-9;
pub const TREND_TOLERANCE: f64 = 0.02;
pub const DEFAULT_COVERAGE_RUNS: usize = 10;

fn all_equal(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// Pearson product-moment coefficient with pairwise deletion of `NaN`
/// positions. `None` when fewer than two pairs remain or either side is
/// constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeError {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let (a, b): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| !x.is_nan() && !y.is_nan())
        .map(|(&x, &y)| (x, y))
        .unzip();
    Ok(pearson_complete(&a, &b))
}

fn pearson_complete(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() < 2 || all_equal(a) || all_equal(b) {
        return None;
    }
    let len = a.len() as f64;
    let ma = a.iter().sum::<f64>() / len;
    let mb = b.iter().sum::<f64>() / len;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub stat_names: Vec<String>,
    /// Row-major; `None` (JSON `null`) where undefined.
    pub values: Vec<Vec<Option<f64>>>,
    pub sample_size: usize,
    pub defined_counts: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.stat_names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i][j]
    }

    /// Element-wise mean over matrices of the same shape, averaging only
    /// the defined entries of each cell.
    pub fn mean(matrices: &[CorrelationMatrix]) -> Result<CorrelationMatrix> {
        let first = matrices.first().ok_or(Error::EmptyInput)?;
        let d = first.dim();
        if let Some(bad) = matrices.iter().find(|m| m.dim() != d) {
            return Err(Error::ShapeError {
                left: d,
                right: bad.dim(),
            });
        }
        let mut values = vec![vec![None; d]; d];
        let mut defined_counts = vec![vec![0; d]; d];
        for i in 0..d {
            for j in 0..d {
                let cell: Vec<f64> = matrices.iter().filter_map(|m| m.values[i][j]).collect();
                if !cell.is_empty() {
                    values[i][j] = Some(cell.iter().sum::<f64>() / cell.len() as f64);
                }
                defined_counts[i][j] = matrices.iter().map(|m| m.defined_counts[i][j]).sum();
            }
        }
        Ok(CorrelationMatrix {
            stat_names: first.stat_names.clone(),
            values,
            sample_size: matrices.iter().map(|m| m.sample_size).sum(),
            defined_counts,
        })
    }
}

fn columns(sample: &[NormalizedStatVector]) -> Vec<Vec<f64>> {
    let mut cols = vec![Vec::with_capacity(sample.len()); Statistic::SUMMARY.len()];
    for v in sample {
        for (col, x) in cols.iter_mut().zip(v.values()) {
            col.push(x.unwrap_or(f64::NAN));
        }
    }
    cols
}

/// Pairwise Pearson matrix over the ten summary statistics.
pub fn correlation_matrix(sample: &[NormalizedStatVector]) -> CorrelationMatrix {
    let cols = columns(sample);
    let d = cols.len();
    let mut values = vec![vec![None; d]; d];
    let mut defined_counts = vec![vec![0; d]; d];
    for i in 0..d {
        for j in i..d {
            let (a, b): (Vec<f64>, Vec<f64>) = cols[i]
                .iter()
                .zip(&cols[j])
                .filter(|(x, y)| !x.is_nan() && !y.is_nan())
                .map(|(&x, &y)| (x, y))
                .unzip();
            let r = if i == j {
                pearson_complete(&a, &b).map(|_| 1.0)
            } else {
                pearson_complete(&a, &b)
            };
            values[i][j] = r;
            values[j][i] = r;
            defined_counts[i][j] = a.len();
            defined_counts[j][i] = a.len();
        }
    }
    CorrelationMatrix {
        stat_names: Statistic::SUMMARY.iter().map(|s| s.name().to_string()).collect(),
        values,
        sample_size: sample.len(),
        defined_counts,
    }
}

/// Normalizes every vector of a sample against one reference APL.
pub fn normalize_all(stats: &[StatVector], apl_ref: f64) -> Result<Vec<NormalizedStatVector>> {
    stats.iter().map(|s| normalize(s, apl_ref)).collect()
}

/// Agreement between a sample's correlation matrix and the ground truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Representativeness {
    pub tolerance: f64,
    /// Off-diagonal pairs defined in both matrices.
    pub pairs_defined: usize,
    pub pairs_within: usize,
    pub fraction_within: f64,
    pub max_abs_diff: f64,
}

pub fn representativeness(
    truth: &CorrelationMatrix,
    sample: &CorrelationMatrix,
    tolerance: f64,
) -> Result<Representativeness> {
    if truth.dim() != sample.dim() {
        return Err(Error::ShapeError {
            left: truth.dim(),
            right: sample.dim(),
        });
    }
    let (mut defined, mut within, mut worst) = (0, 0, 0.0f64);
    for i in 0..truth.dim() {
        for j in i + 1..truth.dim() {
            if let (Some(a), Some(b)) = (truth.values[i][j], sample.values[i][j]) {
                let diff = (a - b).abs();
                defined += 1;
                within += usize::from(diff <= tolerance);
                worst = worst.max(diff);
            }
        }
    }
    Ok(Representativeness {
        tolerance,
        pairs_defined: defined,
        pairs_within: within,
        fraction_within: if defined == 0 { 0.0 } else { within as f64 / defined as f64 },
        max_abs_diff: worst,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionRange {
    pub stat: Statistic,
    pub truth_min: f64,
    pub truth_max: f64,
    /// `None` when the sample has no defined value for this statistic.
    pub sample_min: Option<f64>,
    pub sample_max: Option<f64>,
    /// False when the truth range is zero and the dimension is skipped.
    pub used: bool,
}

impl DimensionRange {
    pub fn sample_within_truth(&self) -> bool {
        match (self.sample_min, self.sample_max) {
            (Some(lo), Some(hi)) => lo >= self.truth_min && hi <= self.truth_max,
            _ => true,
        }
    }

    fn ratio(&self) -> f64 {
        match (self.sample_min, self.sample_max) {
            (Some(lo), Some(hi)) => (hi - lo) / (self.truth_max - self.truth_min),
            _ => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub dims: Vec<DimensionRange>,
    /// Mean over runs of the per-run bounding-box volume ratio.
    pub volume_ratio: f64,
    pub dims_used: usize,
    pub runs: usize,
    pub run_ratios: Vec<f64>,
}

impl CoverageReport {
    pub fn sample_within_truth(&self) -> bool {
        self.dims.iter().all(DimensionRange::sample_within_truth)
    }

    /// Combines repeated runs: the ratio is averaged, per-dimension sample
    /// ranges become the envelope across runs.
    pub fn average(reports: &[CoverageReport]) -> Result<CoverageReport> {
        let first = reports.first().ok_or(Error::EmptyInput)?;
        let mut dims = first.dims.clone();
        for r in &reports[1..] {
            for (d, other) in dims.iter_mut().zip(&r.dims) {
                d.sample_min = min_opt(d.sample_min, other.sample_min);
                d.sample_max = max_opt(d.sample_max, other.sample_max);
            }
        }
        let run_ratios: Vec<f64> = reports.iter().flat_map(|r| r.run_ratios.iter().copied()).collect();
        Ok(CoverageReport {
            dims,
            volume_ratio: run_ratios.iter().sum::<f64>() / run_ratios.len() as f64,
            dims_used: first.dims_used,
            runs: run_ratios.len(),
            run_ratios,
        })
    }
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) | (None, x) => x,
    }
}

fn range_of<'a, I: IntoIterator<Item = &'a StatVector>>(stats: I, stat: Statistic) -> Option<(f64, f64)> {
    stats
        .into_iter()
        .filter_map(|s| s.get(stat))
        .map(round_sig12)
        .fold(None, |acc, x| match acc {
            None => Some((x, x)),
            Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
        })
}

/// Ratio of the sample's bounding-box volume to the ground truth's over the
/// ten raw summary statistics. Values are compared at the atlas precision
/// (12 significant digits) so a complete atlas always contains the sample
/// box.
pub fn bounding_box_ratio(sample: &[StatVector], truth: &[StatVector]) -> Result<CoverageReport> {
    if sample.is_empty() || truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (sn, tn) = (sample[0].n, truth[0].n);
    if sn != tn {
        return Err(Error::BadParam(format!(
            "sample order {sn} differs from ground-truth order {tn}"
        )));
    }
    let mut dims = Vec::with_capacity(Statistic::SUMMARY.len());
    let mut ratio = 1.0;
    let mut used = 0;
    for stat in Statistic::SUMMARY {
        let Some((tlo, thi)) = range_of(truth, stat) else {
            continue;
        };
        let srange = range_of(sample, stat);
        let dim = DimensionRange {
            stat,
            truth_min: tlo,
            truth_max: thi,
            sample_min: srange.map(|r| r.0),
            sample_max: srange.map(|r| r.1),
            used: thi > tlo,
        };
        if dim.used {
            ratio *= dim.ratio();
            used += 1;
        }
        dims.push(dim);
    }
    Ok(CoverageReport {
        dims,
        volume_ratio: ratio,
        dims_used: used,
        runs: 1,
        run_ratios: vec![ratio],
    })
}

fn finite_sorted(xs: &[f64]) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov–Smirnov statistic: the largest gap between the
/// empirical distribution functions.
pub fn ks_statistic(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let (a, b) = (finite_sorted(xs)?, finite_sorted(ys)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Discrete KL divergence D(P || Q) of two samples binned into `bins`
/// equal-width bins over their joint range, each bin smoothed by
/// [`KL_SMOOTHING`] before normalization.
pub fn kl_divergence(p: &[f64], q: &[f64], bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(Error::BadBins(bins));
    }
    let (a, b) = (finite_sorted(p)?, finite_sorted(q)?);
    let lo = a[0].min(b[0]);
    let hi = a[a.len() - 1].max(b[b.len() - 1]);
    let histogram = |xs: &[f64]| {
        let mut h = vec![0.0; bins];
        for &x in xs {
            let k = if hi > lo {
                (((x - lo) / (hi - lo)) * bins as f64) as usize
            } else {
                0
            };
            h[k.min(bins - 1)] += 1.0;
        }
        let total: f64 = h.iter().map(|c| c / xs.len() as f64 + KL_SMOOTHING).sum();
        h.iter()
            .map(|c| (c / xs.len() as f64 + KL_SMOOTHING) / total)
            .collect::<Vec<f64>>()
    };
    let (hp, hq) = (histogram(&a), histogram(&b));
    let kl: f64 = hp.iter().zip(&hq).map(|(&x, &y)| x * (x / y).ln()).sum();
    Ok(kl.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrendPattern {
    Constant,
    Decreasing,
    Increasing,
    NonMonotonic,
    Undefined,
}

impl fmt::Display for TrendPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrendPattern::Constant => "CONSTANT",
            TrendPattern::Decreasing => "DECREASING",
            TrendPattern::Increasing => "INCREASING",
            TrendPattern::NonMonotonic => "NON_MONOTONIC",
            TrendPattern::Undefined => "UNDEFINED",
        })
    }
}

/// Classifies a series of correlations ordered by n.
///
/// Constant when the total variation stays below `eps` per step; otherwise
/// monotone when no step moves against the trend by more than `eps`.
pub fn classify_trend(values: &[f64], eps: f64) -> TrendPattern {
    if values.iter().any(|v| v.is_nan()) {
        return TrendPattern::Undefined;
    }
    if values.len() < 2 {
        return TrendPattern::Constant;
    }
    let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let variation: f64 = steps.iter().map(|d| d.abs()).sum();
    if variation < eps * steps.len() as f64 {
        TrendPattern::Constant
    } else if steps.iter().all(|&d| d <= eps) && values[values.len() - 1] < values[0] {
        TrendPattern::Decreasing
    } else if steps.iter().all(|&d| d >= -eps) && values[values.len() - 1] > values[0] {
        TrendPattern::Increasing
    } else {
        TrendPattern::NonMonotonic
    }
}

fn classify_points(points: &[(usize, Option<f64>)]) -> TrendPattern {
    let v: Vec<f64> = points.iter().map(|p| p.1.unwrap_or(f64::NAN)).collect();
    classify_trend(&v, TREND_TOLERANCE)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendSeries {
    pub pair: (Statistic, Statistic),
    pub truth: Vec<(usize, Option<f64>)>,
    pub generator: Vec<(usize, Option<f64>)>,
    pub truth_pattern: TrendPattern,
    pub generator_pattern: TrendPattern,
}

/// Builds one series per unordered statistic pair from per-order matrices.
pub fn trends_from_matrices(
    truth: &[(usize, CorrelationMatrix)],
    generator: &[(usize, CorrelationMatrix)],
) -> Vec<TrendSeries> {
    let stats = Statistic::SUMMARY;
    let mut out = Vec::new();
    for i in 0..stats.len() {
        for j in i + 1..stats.len() {
            let pick = |ms: &[(usize, CorrelationMatrix)]| -> Vec<(usize, Option<f64>)> {
                ms.iter().map(|(n, m)| (*n, m.values[i][j])).collect()
            };
            let (t, g) = (pick(truth), pick(generator));
            out.push(TrendSeries {
                pair: (stats[i], stats[j]),
                truth_pattern: classify_points(&t),
                generator_pattern: classify_points(&g),
                truth: t,
                generator: g,
            });
        }
    }
    out
}

/// Correlation-vs-order series for the ground truth (atlases in `dir`) and
/// for `template`'s model drawn `per_n_count` times at each order.
pub fn correlation_trends(
    dir: &Path,
    orders: RangeInclusive<usize>,
    template: &GeneratorConfig,
    per_n_count: usize,
) -> Result<Vec<TrendSeries>> {
    let mut truth = Vec::new();
    let mut generated = Vec::new();
    for n in orders {
        let atlas = load_atlas(dir, n)?;
        let stats: Vec<StatVector> = atlas.stats().cloned().collect();
        truth.push((n, correlation_matrix(&normalize_all(&stats, atlas.apl_ref)?)));
        let config = GeneratorConfig {
            n,
            count: per_n_count,
            ..template.clone()
        };
        let sample = sample_batch(&config, Some(&atlas.histogram))?;
        generated.push((n, correlation_matrix(&normalize_all(&sample.stats, atlas.apl_ref)?)));
    }
    Ok(trends_from_matrices(&truth, &generated))
}
