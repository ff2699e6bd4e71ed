use serde::Serialize;

use super::SUM_TOLERANCE;
use crate::error::{Error, Result};

/// Lower bound on the bandwidth, as a fraction of the domain width.
const MIN_BANDWIDTH_FRACTION: f64 = 1e-3;

/// A one-dimensional distribution over a single regime's domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Density {
    /// Kernel estimate evaluated on `points`, a uniform grid spanning
    /// `[lo, hi]`; `masses` sum to one.
    Gridded {
        lo: f64,
        hi: f64,
        points: Vec<f64>,
        masses: Vec<f64>,
    },
    Pmf {
        labels: Vec<String>,
        masses: Vec<f64>,
    },
    /// All mass on `⊥`.
    Degenerate,
}

impl Density {
    pub fn masses(&self) -> &[f64] {
        match self {
            Density::Gridded { masses, .. } | Density::Pmf { masses, .. } => masses,
            Density::Degenerate => &[1.0],
        }
    }
}

/// Scott's rule `σ̂ · n^(-1/5)` with the sample standard deviation, floored at
/// a thousandth of the domain width.
pub fn scott_bandwidth(samples: &[f64], lo: f64, hi: f64) -> f64 {
    let n = samples.len();
    let floor = (hi - lo) * MIN_BANDWIDTH_FRACTION;
    if n < 2 {
        return floor;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let h = var.sqrt() * (n as f64).powf(-0.2);
    if h.is_finite() && h > floor {
        h
    } else {
        floor
    }
}

/// Gaussian KDE on a uniform `grid_size`-point grid over `[lo, hi]`,
/// truncated to the domain and renormalised to unit mass.
pub fn fit_continuous_density(
    samples: &[f64],
    lo: f64,
    hi: f64,
    grid_size: usize,
) -> Result<Density> {
    if samples.is_empty() {
        return Err(Error::InvalidSample("no samples to fit a density".into()));
    }
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid size must be at least 2, got {grid_size}"
        )));
    }
    if let Some(s) = samples.iter().find(|s| !(lo <= **s && **s <= hi)) {
        return Err(Error::InvalidSample(format!(
            "sample {s} outside [{lo}, {hi}]"
        )));
    }
    // Sorting makes the estimate independent of sample order, bit for bit.
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = scott_bandwidth(&sorted, lo, hi);

    let step = (hi - lo) / (grid_size - 1) as f64;
    let points: Vec<f64> = (0..grid_size)
        .map(|j| {
            if j + 1 == grid_size {
                hi
            } else {
                lo + step * j as f64
            }
        })
        .collect();
    let mut masses: Vec<f64> = points
        .iter()
        .map(|x| {
            sorted
                .iter()
                .map(|s| {
                    let z = (x - s) / h;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
        })
        .collect();
    let mut total: f64 = masses.iter().sum();
    if total <= 0.0 {
        // Every kernel underflowed between grid points: bin to the nearest point.
        for s in &sorted {
            let j = (((s - lo) / step).round() as usize).min(grid_size - 1);
            masses[j] += 1.0;
        }
        total = sorted.len() as f64;
    }
    masses.iter_mut().for_each(|m| *m /= total);
    Ok(Density::Gridded {
        lo,
        hi,
        points,
        masses,
    })
}

/// Laplace-smoothed frequencies, `(count + 1) / (n + L)`.
pub fn fit_categorical_density<S: AsRef<str>>(samples: &[S], labels: &[String]) -> Result<Density> {
    fit_categorical_density_with(samples, labels, 1.0)
}

/// Frequencies with `pseudo_count` added to every label; zero gives the
/// exact empirical PMF.
pub fn fit_categorical_density_with<S: AsRef<str>>(
    samples: &[S],
    labels: &[String],
    pseudo_count: f64,
) -> Result<Density> {
    if samples.is_empty() {
        return Err(Error::InvalidSample("no samples to fit a density".into()));
    }
    if !pseudo_count.is_finite() || pseudo_count < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "pseudo count must be >= 0, got {pseudo_count}"
        )));
    }
    let mut counts = vec![0usize; labels.len()];
    for s in samples {
        let s = s.as_ref();
        let j = labels
            .iter()
            .position(|l| l == s)
            .ok_or_else(|| Error::InvalidSample(format!("unknown label `{s}`")))?;
        counts[j] += 1;
    }
    let denom = samples.len() as f64 + pseudo_count * labels.len() as f64;
    let masses = counts
        .iter()
        .map(|&c| (c as f64 + pseudo_count) / denom)
        .collect();
    Ok(Density::Pmf {
        labels: labels.to_vec(),
        masses,
    })
}

/// Exact empirical PMF of `samples` over `support` (every sample must be in
/// it). Used where the density of the wider top set defines the support.
pub fn empirical_pmf<S: AsRef<str>>(samples: &[S], support: &[String]) -> Result<Density> {
    fit_categorical_density_with(samples, support, 0.0)
}

pub(crate) fn check_masses(masses: &[f64]) -> Result<()> {
    let sum: f64 = masses.iter().sum();
    if masses.iter().any(|m| m.is_nan() || *m < 0.0) || (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::DensityMismatch(format!(
            "masses must be non-negative and sum to 1 (sum = {sum})"
        )));
    }
    Ok(())
}
