#![allow(dead_code)]

use stratdisc::samplers::RandomStream;

/// One-sample Kolmogorov–Smirnov statistic against Uniform(0,1).
pub fn ks_uniform(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &u)| ((i + 1) as f64 / n - u).max(u - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Stephens' approximation of the KS critical value at α = 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    let rn = (n as f64).sqrt();
    1.628 / (rn + 0.12 + 0.11 / rn)
}

/// Random corner in the open cube, rejecting grid-aligned coordinates.
pub fn generic_corner(stream: &mut RandomStream, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| loop {
            let x = stream.next_uniform();
            if x > 0.0 {
                break x;
            }
        })
        .collect()
}

/// Exact standard error of the sample variance of `reps` i.i.d. copies of a
/// sum of independent Bernoulli(p_i).
pub fn null_variance_se(probabilities: &[f64], reps: usize) -> f64 {
    let k2: f64 = probabilities.iter().map(|p| p * (1.0 - p)).sum();
    let k4: f64 = probabilities.iter().map(|p| p * (1.0 - p) * (1.0 - 6.0 * p * (1.0 - p))).sum();
    let mu4 = k4 + 3.0 * k2 * k2;
    let n = reps as f64;
    (mu4 / n - k2 * k2 * (n - 3.0) / (n * (n - 1.0))).max(0.0).sqrt()
}
