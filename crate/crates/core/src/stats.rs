//! Descriptive statistics for campaign datasets: empirical CDFs, box
//! statistics with 2.5 %/97.5 % whiskers, and the window margin.
//!
//! Quantiles interpolate linearly between the closest order statistics
//! (the usual "type 7" rule); with 50 repeats the whisker percentiles land
//! between order statistics, so the interpolation choice is part of the
//! contract.

use crate::scalar::Real;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("empty sample")]
    Empty,
    #[error("need at least two samples")]
    TooFew,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

/// Step CDF: sorted distinct values with cumulative probabilities, ties
/// collapsed to the highest rank, final probability exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfSeries<T> {
    points: Vec<(T, T)>,
}

impl<T: Real> CdfSeries<T> {
    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.points.iter().map(|&(v, _)| v)
    }

    /// P(X <= v) under the empirical distribution.
    pub fn probability_at(&self, v: T) -> T {
        let mut p = T::zero();
        for &(value, prob) in &self.points {
            if value <= v {
                p = prob;
            } else {
                break;
            }
        }
        p
    }
}

fn sorted_finite<T: Real>(samples: &[T]) -> Result<Vec<T>, StatsError> {
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
    Ok(sorted)
}

/// Empirical CDF with p_i = rank/n.
pub fn empirical_cdf<T: Real>(samples: &[T]) -> Result<CdfSeries<T>, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    let sorted = sorted_finite(samples)?;
    let n = T::of(sorted.len() as f64);
    let mut points: Vec<(T, T)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let p = T::of((i + 1) as f64) / n;
        match points.last_mut() {
            Some(last) if last.0 == v => last.1 = p,
            _ => points.push((v, p)),
        }
    }
    Ok(CdfSeries { points })
}

/// Type-7 quantile of an already sorted sample.
fn quantile_sorted<T: Real>(sorted: &[T], p: f64) -> T {
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = T::of(h - lo as f64);
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Box summary: quartiles, median, mean and 2.5 %/97.5 % whiskers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats<T> {
    pub w2_5: T,
    pub q25: T,
    pub median: T,
    pub q75: T,
    pub w97_5: T,
    pub mean: T,
}

pub fn box_stats<T: Real>(samples: &[T]) -> Result<BoxStats<T>, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    if samples.len() < 2 {
        return Err(StatsError::TooFew);
    }
    let sorted = sorted_finite(samples)?;
    let mean = sorted.iter().copied().sum::<T>() / T::of(sorted.len() as f64);
    Ok(BoxStats {
        w2_5: quantile_sorted(&sorted, 0.025),
        q25: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q75: quantile_sorted(&sorted, 0.75),
        w97_5: quantile_sorted(&sorted, 0.975),
        mean,
    })
}

pub fn median<T: Real>(samples: &[T]) -> Result<T, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    let sorted = sorted_finite(samples)?;
    Ok(quantile_sorted(&sorted, 0.5))
}

/// Window margin between the two states read at the same voltage:
/// the off/on resistance ratio, i.e. |median low-state current| over
/// |median high-state current|. A zero high-state median yields the
/// infinite-margin sentinel.
pub fn window_margin<T: Real>(
    lrs_currents: &[T],
    hrs_currents: &[T],
    _v_read: T,
) -> Result<T, StatsError> {
    let lrs = median(lrs_currents)?.abs();
    let hrs = median(hrs_currents)?.abs();
    if hrs == T::zero() {
        return Ok(T::infinity());
    }
    Ok(lrs / hrs)
}

/// Sample mean and standard deviation (n − 1 in the denominator).
pub fn mean_std<T: Real>(samples: &[T]) -> Result<(T, T), StatsError> {
    if samples.len() < 2 {
        return Err(StatsError::TooFew);
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let n = T::of(samples.len() as f64);
    let mean = samples.iter().copied().sum::<T>() / n;
    let var = samples
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<T>()
        / (n - T::one());
    Ok((mean, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_cdf() {
        let cdf = empirical_cdf(&[5e-6f64]).unwrap();
        assert_eq!(cdf.points(), &[(5e-6, 1.0)]);
    }

    #[test]
    fn small_cdf_sorts_and_ranks() {
        let cdf = empirical_cdf(&[3.0f64, 1.0, 2.0]).unwrap();
        assert_eq!(
            cdf.points(),
            &[(1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0), (3.0, 1.0)]
        );
    }

    #[test]
    fn ties_collapse_to_highest_rank() {
        let cdf = empirical_cdf(&[2.0f64, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(cdf.points(), &[(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]);
        assert_eq!(cdf.probability_at(2.0), 0.75);
        assert_eq!(cdf.probability_at(0.5), 0.0);
    }

    #[test]
    fn empty_cdf_is_an_error() {
        assert_eq!(empirical_cdf::<f64>(&[]).unwrap_err(), StatsError::Empty);
    }

    #[test]
    fn four_point_box() {
        let b = box_stats(&[1.0f64, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(b.median, 2.5);
        assert_eq!(b.q25, 1.75);
        assert_eq!(b.q75, 3.25);
        assert_eq!(b.mean, 2.5);
    }

    #[test]
    fn constant_sample_box_is_degenerate() {
        let b = box_stats(&[7.0f64; 9]).unwrap();
        for v in [b.w2_5, b.q25, b.median, b.q75, b.w97_5, b.mean] {
            assert_eq!(v, 7.0);
        }
        assert_eq!(box_stats(&[1.0f64]).unwrap_err(), StatsError::TooFew);
    }

    #[test]
    fn window_margin_examples() {
        let lrs = vec![80e-6f64; 5];
        let hrs = vec![5e-6f64; 5];
        let wm = window_margin(&lrs, &hrs, 0.2).unwrap();
        assert!((wm - 16.0).abs() < 1e-12);
        assert_eq!(window_margin(&lrs, &lrs, 0.2).unwrap(), 1.0);
        let zero = vec![0.0f64; 5];
        assert!(window_margin(&lrs, &zero, 0.2).unwrap().is_infinite());
    }

    #[test]
    fn margin_is_scale_invariant() {
        let lrs = vec![81e-6f64, 79e-6, 80e-6, 83e-6, 78e-6];
        let hrs = vec![5.2e-6f64, 4.9e-6, 5.0e-6, 5.1e-6, 4.8e-6];
        let base = window_margin(&lrs, &hrs, 0.2).unwrap();
        let scale = 3.7;
        let lrs2: Vec<f64> = lrs.iter().map(|v| v * scale).collect();
        let hrs2: Vec<f64> = hrs.iter().map(|v| v * scale).collect();
        let scaled = window_margin(&lrs2, &hrs2, 0.2).unwrap();
        assert!((base - scaled).abs() < 1e-12 * base);
    }
}
