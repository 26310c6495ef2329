//! Sample summaries and the Welch two-sample comparison.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator).
    pub std_dev: f64,
    pub std_error: f64,
}

impl Summary {
    pub fn of(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return domain(format!("summary needs at least 2 samples, got {}", samples.len()));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let std_dev = var.sqrt();
        Ok(Self {
            count: samples.len(),
            mean,
            std_dev,
            std_error: std_dev / n.sqrt(),
        })
    }

    pub fn variance(&self) -> f64 {
        self.std_dev * self.std_dev
    }
}

/// Welch's unequal-variance comparison of two means, `a − b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchComparison {
    pub difference: f64,
    pub std_error: f64,
    pub degrees_of_freedom: f64,
    pub t_statistic: f64,
    /// Two-sided p-value for `H0: E[a] = E[b]`.
    pub p_value: f64,
    pub confidence: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn welch(a: &Summary, b: &Summary, confidence: f64) -> Result<WelchComparison> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return domain(format!("confidence {confidence} outside (0,1)"));
    }
    let va = a.variance() / a.count as f64;
    let vb = b.variance() / b.count as f64;
    let se = (va + vb).sqrt();
    let difference = a.mean - b.mean;

    if se == 0.0 {
        // Both samples constant: the difference is known exactly.
        let p_value = if difference == 0.0 { 1.0 } else { 0.0 };
        return Ok(WelchComparison {
            difference,
            std_error: 0.0,
            degrees_of_freedom: f64::INFINITY,
            t_statistic: if difference == 0.0 { 0.0 } else { difference.signum() * f64::INFINITY },
            p_value,
            confidence,
            ci_low: difference,
            ci_high: difference,
        });
    }

    let df = (va + vb).powi(2)
        / (va * va / (a.count as f64 - 1.0) + vb * vb / (b.count as f64 - 1.0));
    let t = difference / se;
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let quantile = dist.inverse_cdf(0.5 + confidence / 2.0);
    let p_value = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(WelchComparison {
        difference,
        std_error: se,
        degrees_of_freedom: df,
        t_statistic: t,
        p_value,
        confidence,
        ci_low: difference - quantile * se,
        ci_high: difference + quantile * se,
    })
}
