//! Closed-form variances of box counts and the tail bounds built on them.
//!
//! For a test box `R` and the grid partition `Ω`, the count `Σ 1_R(Y_n)` of a
//! jittered set is a sum of independent Bernoulli variables with
//! `p_i = N·|Ω_i ∩ R|`; for a simple random set it is Binomial(`N`, `|R|`).
//! Cauchy–Schwarz gives `Σ p_i² ≥ (Σ p_i)²/N`, so the stratified variance
//! never exceeds the binomial one.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{AnchoredBox, GridPartition};

const LN_2E: f64 = std::f64::consts::LN_2 + 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceComparison {
    pub var_stratified: f64,
    pub var_simple: f64,
    /// `var_simple − var_stratified`.
    pub gap: f64,
}

/// `Var(Σ 1_R(Y_n))` for the jittered set on `partition`, as `Σ p_i(1−p_i)`.
pub fn stratified_count_variance(partition: &GridPartition, bx: &AnchoredBox) -> Result<f64> {
    Ok(partition
        .covered_fractions(bx)?
        .into_iter()
        .map(|p| p * (1.0 - p))
        .sum())
}

/// The same variance in the form `N|R| − N² Σ |Ω_i ∩ R|²`.
pub fn stratified_count_variance_moment_form(partition: &GridPartition, bx: &AnchoredBox) -> Result<f64> {
    let nf = partition.cell_count() as f64;
    let squares: f64 = partition.intersection_volumes(bx)?.iter().map(|v| v * v).sum();
    Ok(nf * bx.volume() - nf * nf * squares)
}

/// Binomial count variance `N·|R|·(1 − |R|)` for `N` i.i.d. uniform points.
///
/// The closed form printed alongside the stratified one reads
/// `N|R| − N²|R|²`; that is not a variance (it goes negative for
/// `|R| > 1/N`), so the binomial form, which is the stratified formula at
/// equal cell overlaps `|R|/N`, is used instead.
pub fn simple_count_variance(n: usize, bx: &AnchoredBox) -> Result<f64> {
    if n == 0 {
        return domain("simple count variance needs N >= 1");
    }
    let v = bx.volume();
    Ok(n as f64 * v * (1.0 - v))
}

pub fn variance_comparison(partition: &GridPartition, bx: &AnchoredBox) -> Result<VarianceComparison> {
    let var_stratified = stratified_count_variance(partition, bx)?;
    let var_simple = simple_count_variance(partition.cell_count(), bx)?;
    Ok(VarianceComparison {
        var_stratified,
        var_simple,
        gap: var_simple - var_stratified,
    })
}

/// Bernstein's two-sided tail bound `2·exp(−λ² / (2Σ² + (2/3)·C·λ))` for a
/// centred sum of independent variables bounded by `C` with total variance
/// `Σ²`. Values above 1 are returned as computed.
pub fn bernstein_tail_bound(sigma_sq_sum: f64, c: f64, lambda: f64) -> Result<f64> {
    Ok(2.0 * bernstein_exponent(sigma_sq_sum, c, lambda)?.exp())
}

fn bernstein_exponent(sigma_sq_sum: f64, c: f64, lambda: f64) -> Result<f64> {
    if !(0.0..).contains(&sigma_sq_sum) || c.is_nan() || c <= 0.0 || !(0.0..).contains(&lambda) {
        return domain(format!(
            "Bernstein bound needs Σ² >= 0, C > 0, λ >= 0 (got {sigma_sq_sum}, {c}, {lambda})"
        ));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(-lambda * lambda / (2.0 * sigma_sq_sum + 2.0 * c * lambda / 3.0))
}

fn check_dn(d: usize, n: usize) -> Result<()> {
    if d == 0 || n == 0 {
        return domain(format!("bound needs d >= 1 and N >= 1 (got d={d}, N={n})"));
    }
    Ok(())
}

/// `d·ln(2e) + d·ln(N+1) − ln(2πd)/2`, the log of the δ-cover union factor at
/// `δ = 1/N` (with Bernstein's leading 2 folded in).
fn log_union_factor(d: usize, n: usize) -> f64 {
    let df = d as f64;
    df * LN_2E + df * ((n + 1) as f64).ln() - 0.5 * (2.0 * std::f64::consts::PI * df).ln()
}

/// Natural log of [`union_tail_bound`]; finite where the bound underflows.
pub fn union_tail_bound_ln(d: usize, n: usize, sigma_sq_sum: f64, lambda: f64) -> Result<f64> {
    check_dn(d, n)?;
    Ok(log_union_factor(d, n) + bernstein_exponent(sigma_sq_sum, 1.0, lambda)?)
}

/// Union bound over a `1/N`-cover:
/// `(2e)^d / √(2πd) · (N+1)^d · exp(−λ² / (2Σ² + 2λ/3))`, with `C = 1`.
pub fn union_tail_bound(d: usize, n: usize, sigma_sq_sum: f64, lambda: f64) -> Result<f64> {
    Ok(union_tail_bound_ln(d, n, sigma_sq_sum, lambda)?.exp())
}

/// `A(d,q,N) = d·ln(2e) + d·ln(N+1) − ln(2πd)/2 − ln(1−q)`.
pub fn bound_exponent_a(d: usize, q: f64, n: usize) -> Result<f64> {
    check_dn(d, n)?;
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q = {q} outside [0,1)"));
    }
    Ok(log_union_factor(d, n) - (-q).ln_1p())
}

/// High-probability star discrepancy bounds at confidence `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighProbBound {
    #[serde(rename = "A")]
    pub a: f64,
    /// `(√2·Σ₀ + 1)·A/N`.
    pub simplified: f64,
    /// `√(2Σ₀²A + A²/9)/N + (A+3)/(3N)`.
    pub sharp: f64,
}

fn check_sigma(sigma0: f64) -> Result<()> {
    if !(0.0..f64::INFINITY).contains(&sigma0) {
        return domain(format!("σ₀ = {sigma0} must be finite and >= 0"));
    }
    Ok(())
}

pub fn high_prob_discrepancy_bound(d: usize, q: f64, n: usize, sigma0: f64) -> Result<HighProbBound> {
    check_sigma(sigma0)?;
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q = {q} outside (0,1)"));
    }
    let a = bound_exponent_a(d, q, n)?;
    let nf = n as f64;
    let simplified = (std::f64::consts::SQRT_2 * sigma0 + 1.0) * a / nf;
    let sharp = (2.0 * sigma0 * sigma0 * a + a * a / 9.0).sqrt() / nf + (a + 3.0) / (3.0 * nf);
    Ok(HighProbBound { a, simplified, sharp })
}

/// The constants `C₀ = (√2·Σ₀ + 1)/N` and `C₁ = C₀·(d·ln(2e) + d·ln(N+1) − ln(2πd)/2)`,
/// so that the simplified bound equals `C₁ − C₀·ln(1−q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
}

impl BoundConstants {
    /// `C₁ − C₀·ln(1−q)`.
    pub fn threshold(&self, q: f64) -> f64 {
        self.c1 - self.c0 * (-q).ln_1p()
    }
}

pub fn bound_constants(d: usize, n: usize, sigma0: f64) -> Result<BoundConstants> {
    check_dn(d, n)?;
    check_sigma(sigma0)?;
    let c0 = (std::f64::consts::SQRT_2 * sigma0 + 1.0) / n as f64;
    Ok(BoundConstants {
        c0,
        c1: c0 * log_union_factor(d, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn grid(d: usize, m: usize) -> GridPartition {
        GridPartition::new(d, m).unwrap()
    }

    fn bx(c: &[f64]) -> AnchoredBox {
        AnchoredBox::new(c.to_vec()).unwrap()
    }

    #[test]
    fn stratified_variance_examples() {
        let g = grid(1, 2);
        assert!(close(stratified_count_variance(&g, &bx(&[0.75])).unwrap(), 0.25, 1e-15));
        assert!(close(stratified_count_variance_moment_form(&g, &bx(&[0.75])).unwrap(), 0.25, 1e-15));
        assert_eq!(stratified_count_variance(&g, &bx(&[0.5])).unwrap(), 0.0);
        assert_eq!(stratified_count_variance(&grid(3, 3), &AnchoredBox::unit(3)).unwrap(), 0.0);
    }

    #[test]
    fn simple_variance_examples() {
        assert_eq!(simple_count_variance(2, &bx(&[0.75])).unwrap(), 0.375);
        assert_eq!(simple_count_variance(7, &AnchoredBox::unit(2)).unwrap(), 0.0);
        assert_eq!(simple_count_variance(4, &bx(&[0.5])).unwrap(), 1.0);
        assert!(simple_count_variance(0, &bx(&[0.5])).is_err());
    }

    #[test]
    fn comparison_examples() {
        let c = variance_comparison(&grid(1, 2), &bx(&[0.75])).unwrap();
        assert!(close(c.gap, 0.125, 1e-15));
        let c = variance_comparison(&grid(2, 2), &AnchoredBox::unit(2)).unwrap();
        assert_eq!(c.gap, 0.0);
        let c = variance_comparison(&grid(2, 2), &bx(&[0.6, 0.6])).unwrap();
        // Overlaps (0.25, 0.05, 0.05, 0.01): gap = 16·(Σv² − 0.36²/4).
        let want = 16.0 * (0.0625 + 0.0025 + 0.0025 + 0.0001 - 0.1296 / 4.0);
        assert!(c.gap > 0.0 && close(c.gap, want, 1e-12));
    }

    #[test]
    fn bernstein_examples() {
        assert_eq!(bernstein_tail_bound(1.0, 1.0, 0.0).unwrap(), 2.0);
        assert_eq!(bernstein_tail_bound(0.0, 1.0, 0.0).unwrap(), 2.0);
        assert!(close(bernstein_tail_bound(1.0, 1.0, 3.0).unwrap(), 0.210_798_449_123_728_67, 1e-15));
        assert!(close(bernstein_tail_bound(0.0, 1.0, 3.0).unwrap(), 0.022_217_993_076_484_612, 1e-16));
        assert!(bernstein_tail_bound(-1.0, 1.0, 1.0).is_err());
        assert!(bernstein_tail_bound(1.0, 0.0, 1.0).is_err());
        assert!(bernstein_tail_bound(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn union_examples() {
        assert!(close(union_tail_bound(2, 4, 1.0, 5.0).unwrap(), 1.919_679_149_621_984_3, 1e-12));
        assert!(close(union_tail_bound(2, 4, 1.0, 0.0).unwrap(), 208.441_424_163_334_6, 1e-10));
        // Underflow is avoided in log space: ln ≈ −148.53.
        let ln = union_tail_bound_ln(1, 1, 0.0, 100.0).unwrap();
        assert!(close(ln, -148.532_644_172_084_8, 1e-10));
        assert!(union_tail_bound(1, 1, 0.0, 100.0).unwrap() < 1e-64);
        assert!(union_tail_bound(0, 1, 0.0, 1.0).is_err());
    }

    #[test]
    fn exponent_a_examples() {
        assert!(close(bound_exponent_a(2, 0.5, 4).unwrap(), 6.032_805_243_063_391, 1e-13));
        assert!(close(bound_exponent_a(2, 0.0, 4).unwrap(), 5.339_658_062_503_446, 1e-13));
        assert!(bound_exponent_a(2, 1.0 - 1e-15, 4).unwrap() > 30.0);
        assert!(bound_exponent_a(2, 1.0, 4).is_err());
        assert!(bound_exponent_a(2, -0.1, 4).is_err());
    }

    #[test]
    fn high_prob_examples() {
        let b = high_prob_discrepancy_bound(2, 0.5, 4, 0.0).unwrap();
        assert!(close(b.simplified, 1.508_201_310_765_847_8, 1e-13));
        assert!(close(b.sharp, 1.255_467_540_510_565_3, 1e-13));
        assert!(close(b.sharp, (2.0 * b.a + 3.0) / 12.0, 1e-14));
        assert!(b.sharp <= b.simplified);
        assert!(high_prob_discrepancy_bound(2, 0.0, 4, 0.0).is_err());
        assert!(high_prob_discrepancy_bound(2, 0.5, 4, -1.0).is_err());
    }

    #[test]
    fn constants_examples() {
        let c = bound_constants(2, 4, 0.0).unwrap();
        assert_eq!(c.c0, 0.25);
        assert!(close(c.c1, 1.334_914_515_625_861_5, 1e-13));
        assert!(close(c.threshold(0.5), 1.508_201_310_765_847_8, 1e-13));
        assert_eq!(bound_constants(2, 1_000_000, 0.0).unwrap().c0, 1e-6);
    }
}
