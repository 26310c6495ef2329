//! Star discrepancy: the local discrepancy function, an exact engine based on
//! critical-corner enumeration, and discretisation over grid δ-covers.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{AnchoredBox, MultiIndex};
use crate::samplers::PointSet;

/// Default cap on `N^d` for [`exact_star_discrepancy`].
pub const DEFAULT_EXACT_GUARD: f64 = 1e8;

/// Cap on the number of corners in a [`DeltaCover`] that
/// [`cover_discrepancy`] will evaluate.
pub const DEFAULT_COVER_GUARD: f64 = 6.7e7;

/// Whether the point count lies on the boundary of the test box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Count points with every coordinate `≤ x_j`.
    Closed,
    /// Count points with every coordinate `< x_j`.
    Open,
}

/// Which way the extremal local discrepancy points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `count/N > volume`, attained by the closed box at the witness.
    Over,
    /// `volume > count/N`, attained by the open box at the witness.
    Under,
}

impl Side {
    pub fn convention(self) -> Convention {
        match self {
            Side::Over => Convention::Closed,
            Side::Under => Convention::Open,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    pub value: f64,
    /// Corner at which the maximum is attained.
    pub witness: Vec<f64>,
    pub side: Side,
}

fn check_dims(points: &PointSet, d: usize) -> Result<()> {
    if points.dim() != d {
        return domain(format!("point set has dimension {}, box has {d}", points.dim()));
    }
    Ok(())
}

/// Number of points in `[0,x]` (closed) or `[0,x)` (open).
pub fn count_in_box(points: &PointSet, corner: &[f64], convention: Convention) -> usize {
    points
        .points()
        .filter(|p| match convention {
            Convention::Closed => p.iter().zip(corner).all(|(a, b)| a <= b),
            Convention::Open => p.iter().zip(corner).all(|(a, b)| a < b),
        })
        .count()
}

/// Signed local discrepancy `count/N − volume` of one anchored box.
pub fn local_discrepancy(points: &PointSet, bx: &AnchoredBox, convention: Convention) -> Result<f64> {
    check_dims(points, bx.dim())?;
    let count = count_in_box(points, bx.corner(), convention);
    Ok(count as f64 / points.len() as f64 - bx.volume())
}

/// Exact star discrepancy under the default guard.
pub fn exact_star_discrepancy(points: &PointSet) -> Result<DiscrepancyResult> {
    exact_star_discrepancy_with_guard(points, DEFAULT_EXACT_GUARD)
}

/// Exact star discrepancy, refusing inputs with `N^d > guard`.
///
/// The supremum over closed boxes is attained (as a limit from below for the
/// volume excess) at corners whose coordinates are point coordinates or 1.
/// For every such corner `y` both `count_closed(y)/N − vol(y)` and
/// `vol(y) − count_open(y)/N` are evaluated. The first `d−1` axes are
/// enumerated and the last axis is swept with two pointers over the points
/// sorted by their last coordinate, for `O((N+1)^{d−1} · N)` work.
///
/// Ties resolve to the first corner in lexicographic order, `Over` before
/// `Under`.
pub fn exact_star_discrepancy_with_guard(points: &PointSet, guard: f64) -> Result<DiscrepancyResult> {
    let n = points.len();
    let d = points.dim();
    let work = (n as f64).powi(d as i32);
    if work > guard {
        return Err(Error::Resource(format!(
            "exact star discrepancy needs N^d = {work:e} > {guard:e}; use cover_discrepancy instead"
        )));
    }
    let nf = n as f64;

    let candidates: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut c: Vec<f64> = points.points().map(|p| p[j]).collect();
            c.push(1.0);
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let last = d - 1;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points.point(a)[last].total_cmp(&points.point(b)[last]));

    let mut best = DiscrepancyResult {
        value: f64::NEG_INFINITY,
        witness: vec![1.0; d],
        side: Side::Over,
    };
    let mut closed_ok = vec![false; n];
    let mut open_ok = vec![false; n];
    let prefix_extents: Vec<usize> = candidates[..last].iter().map(Vec::len).collect();
    let mut prefix = vec![0.0; last];

    for idx in MultiIndex::new(prefix_extents) {
        for (j, &i) in idx.iter().enumerate() {
            prefix[j] = candidates[j][i];
        }
        let prefix_volume: f64 = prefix.iter().product();
        for (i, p) in points.points().enumerate() {
            closed_ok[i] = p[..last].iter().zip(&prefix).all(|(a, b)| a <= b);
            open_ok[i] = p[..last].iter().zip(&prefix).all(|(a, b)| a < b);
        }

        let (mut ci, mut oi) = (0, 0);
        let (mut closed, mut open) = (0usize, 0usize);
        for &c in &candidates[last] {
            while ci < n && points.point(order[ci])[last] <= c {
                closed += closed_ok[order[ci]] as usize;
                ci += 1;
            }
            while oi < n && points.point(order[oi])[last] < c {
                open += open_ok[order[oi]] as usize;
                oi += 1;
            }
            let volume = prefix_volume * c;
            let over = closed as f64 / nf - volume;
            let under = volume - open as f64 / nf;
            for (value, side) in [(over, Side::Over), (under, Side::Under)] {
                if value > best.value {
                    best.value = value;
                    best.witness.clear();
                    best.witness.extend_from_slice(&prefix);
                    best.witness.push(c);
                    best.side = side;
                }
            }
        }
    }
    Ok(best)
}

/// The uniform grid `Γ = {i/M : 1 ≤ i ≤ M}^d` with `M = ⌈d/δ⌉`.
///
/// For any `y`, rounding each coordinate down and up to the grid gives
/// brackets `x ≤ y ≤ z` in `Γ ∪ {0}` with
/// `vol(z) − vol(x) ≤ 1 − (1 − 1/M)^d ≤ d/M ≤ δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCover {
    d: usize,
    delta: f64,
    resolution: usize,
}

impl DeltaCover {
    pub fn new(d: usize, delta: f64) -> Result<Self> {
        if d == 0 {
            return domain("δ-cover needs d >= 1");
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return domain(format!("δ = {delta} outside (0,1]"));
        }
        let raw = d as f64 / delta;
        // d/δ is often an integer that division misses by an ulp (3/0.1).
        let nearest = raw.round();
        let m = if (raw - nearest).abs() <= 1e-9 * raw { nearest } else { raw.ceil() };
        if m > usize::MAX as f64 / 2.0 {
            return domain(format!("δ = {delta} is too small for a grid cover"));
        }
        Ok(Self { d, delta, resolution: m as usize })
    }

    /// Grid cover with an explicit per-axis resolution; `δ` is set to `d/M`.
    pub fn with_resolution(d: usize, resolution: usize) -> Result<Self> {
        if d == 0 || resolution == 0 {
            return domain("δ-cover needs d >= 1 and M >= 1");
        }
        let delta = d as f64 / resolution as f64;
        if delta > 1.0 {
            return domain(format!("resolution M = {resolution} < d = {d} gives δ > 1"));
        }
        Ok(Self { d, delta, resolution })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Points per axis, `M`.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `|Γ| = M^d` as a float (it overflows integers quickly).
    pub fn size(&self) -> f64 {
        (self.resolution as f64).powi(self.d as i32)
    }

    /// Coordinate `i/M` of grid layer `i`.
    #[inline]
    pub fn level(&self, i: usize) -> f64 {
        i as f64 / self.resolution as f64
    }

    /// All corners of `Γ` in lexicographic order.
    pub fn corners(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        MultiIndex::new(vec![self.resolution; self.d])
            .map(move |idx| idx.into_iter().map(|i| self.level(i + 1)).collect())
    }

    /// Smallest layer `i ≥ 1` with `x ≤ i/M`.
    fn ceil_level(&self, x: f64) -> usize {
        let m = self.resolution;
        let mut i = ((x * m as f64).ceil() as usize).clamp(1, m);
        while i > 1 && x <= self.level(i - 1) {
            i -= 1;
        }
        while i < m && x > self.level(i) {
            i += 1;
        }
        i
    }
}

/// Free-function constructor mirroring [`DeltaCover::new`].
pub fn build_delta_cover(d: usize, delta: f64) -> Result<DeltaCover> {
    DeltaCover::new(d, delta)
}

/// `D_Γ(P) = max_{y∈Γ} |count_closed(y)/N − vol(y)|`.
pub fn cover_discrepancy(points: &PointSet, cover: &DeltaCover) -> Result<f64> {
    Ok(cover_discrepancy_detailed(points, cover)?.value)
}

/// [`cover_discrepancy`] with its witness corner.
///
/// Points are binned by the smallest grid corner that contains them; a
/// `d`-dimensional prefix sum over the bins then yields closed-box counts for
/// every corner in `O(M^d · d + N · d)`.
pub fn cover_discrepancy_detailed(points: &PointSet, cover: &DeltaCover) -> Result<DiscrepancyResult> {
    check_dims(points, cover.dim())?;
    if cover.size() > DEFAULT_COVER_GUARD {
        return Err(Error::Resource(format!(
            "δ-cover has {:e} corners, above the {:e} guard",
            cover.size(),
            DEFAULT_COVER_GUARD
        )));
    }
    let d = cover.dim();
    let m = cover.resolution();
    let total = m.pow(d as u32);
    let mut counts = vec![0u32; total];
    for p in points.points() {
        let bin = p.iter().fold(0, |acc, &x| acc * m + cover.ceil_level(x) - 1);
        counts[bin] += 1;
    }
    // Prefix sums along each axis; axis j has stride m^(d-1-j).
    let mut stride = 1;
    for _ in 0..d {
        for id in 0..total {
            if (id / stride) % m != 0 {
                counts[id] += counts[id - stride];
            }
        }
        stride *= m;
    }

    let nf = points.len() as f64;
    let mut best = DiscrepancyResult {
        value: f64::NEG_INFINITY,
        witness: vec![1.0; d],
        side: Side::Over,
    };
    for (corner, &count) in cover.corners().zip(&counts) {
        let local = count as f64 / nf - corner.iter().product::<f64>();
        if local.abs() > best.value {
            best.value = local.abs();
            best.side = if local >= 0.0 { Side::Over } else { Side::Under };
            best.witness = corner;
        }
    }
    Ok(best)
}

/// Upper bound on the bracketing number,
/// `N(d,δ) ≤ 2^d · e^d / √(2πd) · (1/δ + 1)^d`.
pub fn cover_cardinality_bound(d: usize, delta: f64) -> Result<f64> {
    Ok(cover_cardinality_bound_ln(d, delta)?.exp())
}

/// Natural logarithm of [`cover_cardinality_bound`].
pub fn cover_cardinality_bound_ln(d: usize, delta: f64) -> Result<f64> {
    if d == 0 {
        return domain("bracketing bound needs d >= 1");
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return domain(format!("δ = {delta} outside (0,1]"));
    }
    let df = d as f64;
    Ok(df * (2.0f64.ln() + 1.0) - 0.5 * (2.0 * std::f64::consts::PI * df).ln() + df * (1.0 / delta + 1.0).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[&[f64]]) -> PointSet {
        PointSet::from_rows(rows).unwrap()
    }

    #[test]
    fn local_discrepancy_examples() {
        let p = pts(&[&[0.5, 0.5]]);
        let unit = AnchoredBox::unit(2);
        assert_eq!(local_discrepancy(&p, &unit, Convention::Closed).unwrap(), 0.0);
        let p = pts(&[&[0.5]]);
        let half = AnchoredBox::new(vec![0.5]).unwrap();
        assert_eq!(local_discrepancy(&p, &half, Convention::Closed).unwrap(), 0.5);
        assert_eq!(local_discrepancy(&p, &half, Convention::Open).unwrap(), -0.5);
        assert!(local_discrepancy(&p, &unit, Convention::Closed).is_err());
    }

    #[test]
    fn exact_examples() {
        let r = exact_star_discrepancy(&pts(&[&[0.25], &[0.75]])).unwrap();
        assert_eq!(r.value, 0.25);
        let r = exact_star_discrepancy(&pts(&[&[0.0]])).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!((r.witness.as_slice(), r.side), (&[0.0][..], Side::Over));
    }

    #[test]
    fn exact_guard_is_a_resource_error() {
        let p = pts(&[&[0.1, 0.2], &[0.3, 0.4], &[0.5, 0.6]]);
        let err = exact_star_discrepancy_with_guard(&p, 8.0).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        assert!(exact_star_discrepancy_with_guard(&p, 9.0).is_ok());
    }

    #[test]
    fn cover_examples() {
        let c = build_delta_cover(1, 0.5).unwrap();
        assert_eq!(c.resolution(), 2);
        assert_eq!(c.corners().collect::<Vec<_>>(), vec![vec![0.5], vec![1.0]]);
        let c2 = build_delta_cover(2, 0.5).unwrap();
        assert_eq!((c2.resolution(), c2.size()), (4, 16.0));
        let c1 = build_delta_cover(1, 1.0).unwrap();
        assert_eq!(c1.corners().collect::<Vec<_>>(), vec![vec![1.0]]);

        assert_eq!(cover_discrepancy(&pts(&[&[0.5]]), &c).unwrap(), 0.5);
        assert_eq!(cover_discrepancy(&pts(&[&[0.3], &[0.9]]), &c1).unwrap(), 0.0);
    }

    #[test]
    fn cover_resolution_absorbs_division_error() {
        assert_eq!(build_delta_cover(3, 0.1).unwrap().resolution(), 30);
        assert_eq!(build_delta_cover(2, 0.3).unwrap().resolution(), 7);
        assert!(build_delta_cover(2, 0.0).is_err());
        assert!(build_delta_cover(2, 1.5).is_err());
        assert!(build_delta_cover(0, 0.5).is_err());
    }

    #[test]
    fn cover_counts_match_direct_counting() {
        let p = pts(&[&[0.0, 0.25], &[0.5, 0.5], &[0.74, 1.0], &[1.0, 0.0]]);
        let c = DeltaCover::with_resolution(2, 4).unwrap();
        let mut brute: f64 = 0.0;
        for corner in c.corners() {
            let b = AnchoredBox::new(corner).unwrap();
            brute = brute.max(local_discrepancy(&p, &b, Convention::Closed).unwrap().abs());
        }
        assert_eq!(cover_discrepancy(&p, &c).unwrap(), brute);
    }

    #[test]
    fn cardinality_bound_values() {
        // Frozen from direct evaluation of 2^d e^d / sqrt(2 pi d) (1/δ + 1)^d.
        let cases = [
            (1, 1.0, 4.337_750_205_676_911),
            (1, 0.5, 6.506_625_308_515_366),
            (2, 0.5, 75.038_912_698_800_46),
        ];
        for (d, delta, want) in cases {
            let got = cover_cardinality_bound(d, delta).unwrap();
            assert!((got - want).abs() < 1e-10 * want, "d={d} δ={delta}: {got}");
        }
    }
}
