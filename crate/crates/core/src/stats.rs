//! Seed-sweep summary statistics.

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("need at least two values, got {0}")]
    TooFewValues(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std: f64,
    /// Half-width of the two-sided 95% Student-t interval for the mean.
    pub ci95: f64,
    pub count: usize,
}

/// 0.975 quantile of Student's t with `df` degrees of freedom.
pub fn t_critical_975(df: usize) -> f64 {
    StudentsT::new(0.0, 1.0, df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

pub fn summarize(values: &[f64]) -> Result<Summary, StatsError> {
    let count = values.len();
    if count < 2 {
        return Err(StatsError::TooFewValues(count));
    }
    let n = count as f64;
    // shifted by the first value so constant input gives an exact mean and zero spread
    let origin = values[0];
    let mean = origin + values.iter().map(|v| v - origin).sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let std = var.sqrt();
    let ci95 = t_critical_975(count - 1) * std / n.sqrt();
    Ok(Summary { mean, std, ci95, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequences() {
        let s = summarize(&[1.0; 5]).unwrap();
        assert_eq!((s.mean, s.std, s.ci95), (1.0, 0.0, 0.0));
        let s = summarize(&[0.98; 5]).unwrap();
        assert_eq!(s.ci95, 0.0);
    }

    #[test]
    fn two_points() {
        let s = summarize(&[0.0, 1.0]).unwrap();
        assert_eq!(s.mean, 0.5);
        assert!((s.std - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn five_seed_critical_value() {
        assert!((t_critical_975(4) - 2.776).abs() < 5e-4);
        let s = summarize(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!((s.ci95 - t_critical_975(4) * 2.5f64.sqrt() / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn needs_two_values() {
        assert_eq!(summarize(&[0.3]), Err(StatsError::TooFewValues(1)));
        assert_eq!(summarize(&[]), Err(StatsError::TooFewValues(0)));
    }
}
