//! Pearson chi-square tests, histograms, and mean/standard-error summaries.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Significance level used by every experiment.
pub const ALPHA: f64 = 1e-3;
/// Smallest expected count a chi-square cell may have.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    /// Upper `alpha` quantile of the chi-square distribution with `dof`
    /// degrees of freedom.
    pub critical: f64,
    pub alpha: f64,
    pub pass: bool,
}

impl ChiSquare {
    fn judge(statistic: f64, dof: usize, alpha: f64) -> Self {
        let critical = if dof == 0 {
            0.0
        } else {
            ChiSquared::new(dof as f64)
                .expect("positive degrees of freedom")
                .inverse_cdf(1.0 - alpha)
        };
        ChiSquare {
            statistic,
            dof,
            critical,
            alpha,
            pass: dof == 0 || statistic < critical,
        }
    }
}

/// Goodness of fit of `counts` to the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> Result<ChiSquare> {
    chi_square_uniform_at(counts, ALPHA)
}

pub fn chi_square_uniform_at(counts: &[u64], alpha: f64) -> Result<ChiSquare> {
    if counts.is_empty() {
        return Err(Error::TooFewSamples("no categories".into()));
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    if expected < MIN_EXPECTED {
        return Err(Error::TooFewSamples(format!(
            "expected count {expected} per category is below {MIN_EXPECTED}"
        )));
    }
    let statistic = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    Ok(ChiSquare::judge(statistic, counts.len() - 1, alpha))
}

/// Goodness of fit of `counts` to `probabilities` (same length, summing to
/// at most one; any remainder is an extra category with zero observations
/// expected beyond the last cell). Adjacent cells are pooled left to right
/// until each expected count reaches [`MIN_EXPECTED`].
pub fn chi_square_goodness(counts: &[u64], probabilities: &[f64], alpha: f64) -> Result<ChiSquare> {
    if counts.len() != probabilities.len() {
        return Err(Error::InvalidArgument(
            "counts and probabilities differ in length".into(),
        ));
    }
    let total: u64 = counts.iter().sum();
    let cells: Vec<(f64, f64)> = counts
        .iter()
        .zip(probabilities)
        .map(|(&c, &p)| (c as f64, p * total as f64))
        .collect();
    let pooled = pool(cells, |&(_, e)| e >= MIN_EXPECTED);
    if pooled.len() < 2 {
        if pooled.len() == 1 && pooled[0].1 >= MIN_EXPECTED {
            return Ok(ChiSquare::judge(0.0, 0, alpha));
        }
        return Err(Error::TooFewSamples("fewer than two usable cells".into()));
    }
    let statistic = pooled.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    Ok(ChiSquare::judge(statistic, pooled.len() - 1, alpha))
}

/// Homogeneity test of two samples over the same categories. Adjacent
/// categories are pooled until both expected counts in each reach
/// [`MIN_EXPECTED`].
pub fn chi_square_two_sample(a: &[u64], b: &[u64], alpha: f64) -> Result<ChiSquare> {
    let len = a.len().max(b.len());
    let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0) as f64;
    let na: f64 = a.iter().sum::<u64>() as f64;
    let nb: f64 = b.iter().sum::<u64>() as f64;
    if na == 0.0 || nb == 0.0 {
        return Err(Error::TooFewSamples("empty sample".into()));
    }
    let total = na + nb;
    let cells: Vec<(f64, f64)> = (0..len).map(|i| (at(a, i), at(b, i))).collect();
    let ok = |&(x, y): &(f64, f64)| {
        let col = x + y;
        col * na / total >= MIN_EXPECTED && col * nb / total >= MIN_EXPECTED
    };
    let pooled = pool(cells, ok);
    if pooled.len() < 2 {
        return Ok(ChiSquare::judge(0.0, 0, alpha));
    }
    let statistic = pooled
        .iter()
        .map(|&(x, y)| {
            let col = x + y;
            let ea = col * na / total;
            let eb = col * nb / total;
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum();
    Ok(ChiSquare::judge(statistic, pooled.len() - 1, alpha))
}

/// Merges adjacent cells left to right until `ok` holds; a short remainder
/// joins the last accepted cell.
fn pool<F>(cells: Vec<(f64, f64)>, ok: F) -> Vec<(f64, f64)>
where
    F: Fn(&(f64, f64)) -> bool,
{
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    let mut pending = false;
    for (x, y) in cells {
        acc = (acc.0 + x, acc.1 + y);
        pending = true;
        if ok(&acc) {
            out.push(acc);
            acc = (0.0, 0.0);
            pending = false;
        }
    }
    if pending {
        match out.last_mut() {
            Some(last) => *last = (last.0 + acc.0, last.1 + acc.1),
            None => out.push(acc),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSe {
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
}

pub fn mean_se<I: IntoIterator<Item = f64>>(values: I) -> MeanSe {
    let (mut n, mut mean, mut m2) = (0u64, 0.0, 0.0);
    for x in values {
        n += 1;
        let d = x - mean;
        mean += d / n as f64;
        m2 += d * (x - mean);
    }
    let std_error = if n > 1 {
        (m2 / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    MeanSe {
        samples: n,
        mean,
        std_error,
    }
}

/// Counts of non-negative integer observations in unit-width buckets
/// `0, 1, ..., max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub lower_bounds: Vec<u64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn of_integers<I: IntoIterator<Item = u64>>(values: I) -> Self {
        let mut counts: Vec<u64> = Vec::new();
        let mut total = 0;
        for v in values {
            let i = v as usize;
            if i >= counts.len() {
                counts.resize(i + 1, 0);
            }
            counts[i] += 1;
            total += 1;
        }
        Histogram {
            lower_bounds: (0..counts.len() as u64).collect(),
            counts,
            total,
        }
    }

    /// Two-column CSV: `bucket,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bucket,count\n");
        for (b, c) in self.lower_bounds.iter().zip(&self.counts) {
            s.push_str(&format!("{b},{c}\n"));
        }
        s
    }
}

/// Least-squares slope of `ln y` against `ln x`. `None` unless every
/// coordinate is positive and at least two distinct `x` are given.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_examples() {
        assert_eq!(chi_square_uniform(&[50, 50]).unwrap().statistic, 0.0);
        let r = chi_square_uniform(&[100, 0]).unwrap();
        assert_eq!(r.statistic, 100.0);
        assert!(!r.pass);
        let r = chi_square_uniform(&[30; 6]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 5);
        assert!(r.pass);
        assert!(matches!(chi_square_uniform(&[2, 3]), Err(Error::TooFewSamples(_))));
    }

    #[test]
    fn critical_values() {
        // upper 0.001 quantiles: 10.828 (1 dof), 20.515 (5 dof)
        let r = chi_square_uniform(&[50, 50]).unwrap();
        assert!((r.critical - 10.828).abs() < 1e-3);
        let r = chi_square_uniform(&[30; 6]).unwrap();
        assert!((r.critical - 20.515).abs() < 1e-3);
    }

    #[test]
    fn two_sample_identical_and_disjoint() {
        let r = chi_square_two_sample(&[100, 200, 50], &[100, 200, 50], ALPHA).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.pass);
        let r = chi_square_two_sample(&[500, 0], &[0, 500], ALPHA).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn pooling_merges_sparse_tail() {
        let pooled = pool(vec![(10.0, 10.0), (1.0, 1.0), (1.0, 2.0), (9.0, 9.0), (1.0, 1.0)], |c| c.1 >= 5.0);
        assert_eq!(pooled, vec![(10.0, 10.0), (12.0, 13.0)]);
    }

    #[test]
    fn goodness_of_fit() {
        let r = chi_square_goodness(&[250, 500, 250], &[0.25, 0.5, 0.25], ALPHA).unwrap();
        assert_eq!(r.statistic, 0.0);
        let r = chi_square_goodness(&[100, 0, 0], &[0.25, 0.5, 0.25], ALPHA).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn mean_and_se() {
        let m = mean_se([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        // sample sd sqrt(5/3), se = sd / 2
        assert!((m.std_error - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(mean_se([7.0]).std_error, 0.0);
    }

    #[test]
    fn histogram_and_slope() {
        let h = Histogram::of_integers([0, 2, 2, 5]);
        assert_eq!(h.counts, vec![1, 0, 2, 0, 0, 1]);
        assert_eq!(h.total, 4);
        assert!(h.to_csv().starts_with("bucket,count\n0,1\n1,0\n2,2\n"));
        let s = log_log_slope(&[(1.0, 3.0), (2.0, 12.0), (4.0, 48.0)]).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&[(1.0, 1.0)]), None);
        assert_eq!(log_log_slope(&[(1.0, 1.0), (2.0, 0.0)]), None);
    }
}
