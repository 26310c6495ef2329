//! Grid partitions of the unit cube and anchored test boxes.
//!
//! Cells of the `m^d` grid are half-open boxes `∏ [k_j/m, (k_j+1)/m)` whose
//! faces on the upper boundary of the cube are closed, so the cells tile
//! `[0,1]^d` exactly. Cells are numbered row-major with the first axis most
//! significant.

use crate::error::{domain, Result};

/// The anchored box `[0, x)` with upper corner `x ∈ [0,1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchoredBox {
    corner: Vec<f64>,
}

impl AnchoredBox {
    pub fn new(corner: Vec<f64>) -> Result<Self> {
        if corner.is_empty() {
            return domain("anchored box needs at least one coordinate");
        }
        if let Some(bad) = corner.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return domain(format!("box corner coordinate {bad} outside [0,1]"));
        }
        Ok(Self { corner })
    }

    /// The box `[0,1]^d`.
    pub fn unit(d: usize) -> Self {
        Self { corner: vec![1.0; d] }
    }

    pub fn corner(&self) -> &[f64] {
        &self.corner
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn volume(&self) -> f64 {
        self.corner.iter().product()
    }
}

/// Which part of `∂[0,x]` a boundary-cell count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// The full topological boundary, including the faces lying in the
    /// coordinate hyperplanes `y_j = 0`.
    Full,
    /// Only the upper faces `{y ≤ x : y_j = x_j for some j}`.
    UpperFaces,
}

/// Split of the grid cells meeting a test box.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoxDecomposition {
    /// Cells lying entirely inside the box.
    pub contained: Vec<usize>,
    /// Cells whose intersection with the box is nonempty and proper.
    pub partial: Vec<usize>,
}

/// The equivolume grid partition of `[0,1]^d` into `m^d` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPartition {
    d: usize,
    m: usize,
    n: usize,
}

impl GridPartition {
    pub fn new(d: usize, m: usize) -> Result<Self> {
        if d == 0 || m == 0 {
            return domain(format!("grid partition needs d >= 1 and m >= 1 (got d={d}, m={m})"));
        }
        let n = u32::try_from(d)
            .ok()
            .and_then(|e| m.checked_pow(e))
            .ok_or_else(|| crate::Error::Domain(format!("m^d overflows for m={m}, d={d}")))?;
        Ok(Self { d, m, n })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Cells per axis.
    pub fn per_axis(&self) -> usize {
        self.m
    }

    /// Total number of cells, `N = m^d`.
    pub fn cell_count(&self) -> usize {
        self.n
    }

    pub fn cell_volume(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Lower edge of layer `k` along any axis.
    #[inline]
    pub(crate) fn edge(&self, k: usize) -> f64 {
        k as f64 / self.m as f64
    }

    /// Per-axis layer indices of a cell.
    pub fn cell_coords(&self, cell: usize) -> Result<Vec<usize>> {
        self.check_cell(cell)?;
        let mut coords = vec![0; self.d];
        let mut rest = cell;
        for slot in coords.iter_mut().rev() {
            *slot = rest % self.m;
            rest /= self.m;
        }
        Ok(coords)
    }

    pub fn cell_from_coords(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.d {
            return domain(format!("expected {} cell coordinates, got {}", self.d, coords.len()));
        }
        let mut id = 0;
        for &k in coords {
            if k >= self.m {
                return domain(format!("cell layer {k} out of range 0..{}", self.m));
            }
            id = id * self.m + k;
        }
        Ok(id)
    }

    /// Lower and upper corners of a cell.
    pub fn cell_bounds(&self, cell: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let coords = self.cell_coords(cell)?;
        let lower = coords.iter().map(|&k| self.edge(k)).collect();
        let upper = coords.iter().map(|&k| self.edge(k + 1)).collect();
        Ok((lower, upper))
    }

    /// Layer index of a coordinate along one axis, consistent with
    /// [`cell_bounds`](Self::cell_bounds) in floating point.
    pub(crate) fn layer_of(&self, x: f64) -> usize {
        let last = self.m - 1;
        let mut k = ((x * self.m as f64).floor() as usize).min(last);
        // floor(x*m) can land one layer off when x sits next to an edge.
        if k > 0 && x < self.edge(k) {
            k -= 1;
        } else if k < last && x >= self.edge(k + 1) {
            k += 1;
        }
        k
    }

    /// The unique cell containing `point`.
    pub fn cell_index(&self, point: &[f64]) -> Result<usize> {
        if point.len() != self.d {
            return domain(format!("point has dimension {}, partition has {}", point.len(), self.d));
        }
        let mut id = 0;
        for &x in point {
            if !(0.0..=1.0).contains(&x) {
                return domain(format!("coordinate {x} outside [0,1]"));
            }
            id = id * self.m + self.layer_of(x);
        }
        Ok(id)
    }

    /// `|Ω_cell ∩ [0,x)|`, a value in `[0, 1/N]`.
    pub fn cell_box_intersection_volume(&self, cell: usize, bx: &AnchoredBox) -> Result<f64> {
        self.check_box(bx)?;
        let coords = self.cell_coords(cell)?;
        Ok(coords
            .iter()
            .zip(bx.corner())
            .map(|(&k, &x)| self.axis_overlap(k, x))
            .product())
    }

    #[inline]
    fn axis_overlap(&self, k: usize, x: f64) -> f64 {
        let lo = self.edge(k);
        (self.edge(k + 1).min(x) - lo).max(0.0)
    }

    /// Intersection volumes of every cell with the box, indexed by cell id.
    pub fn intersection_volumes(&self, bx: &AnchoredBox) -> Result<Vec<f64>> {
        self.check_box(bx)?;
        let overlaps: Vec<Vec<f64>> = bx
            .corner()
            .iter()
            .map(|&x| (0..self.m).map(|k| self.axis_overlap(k, x)).collect())
            .collect();
        let mut out = Vec::with_capacity(self.n);
        for coords in MultiIndex::new(vec![self.m; self.d]) {
            out.push(coords.iter().enumerate().map(|(j, &k)| overlaps[j][k]).product());
        }
        Ok(out)
    }

    /// Fraction of each cell covered by the box, `|Ω_i ∩ [0,x)| / |Ω_i|`,
    /// indexed by cell id. Fully covered cells give exactly 1.
    pub fn covered_fractions(&self, bx: &AnchoredBox) -> Result<Vec<f64>> {
        self.check_box(bx)?;
        let mf = self.m as f64;
        let fractions: Vec<Vec<f64>> = bx
            .corner()
            .iter()
            .map(|&x| (0..self.m).map(|k| (x * mf - k as f64).clamp(0.0, 1.0)).collect())
            .collect();
        Ok(MultiIndex::new(vec![self.m; self.d])
            .map(|coords| coords.iter().enumerate().map(|(j, &k)| fractions[j][k]).product())
            .collect())
    }

    /// Splits the cells meeting `[0,x)` into fully contained and partial ones.
    ///
    /// A cell is contained when every axis of it lies below the corner; it is
    /// partial when every per-axis overlap is positive but at least one is
    /// short of `1/m`. Degenerate boxes meet no cell.
    pub fn decompose_box(&self, bx: &AnchoredBox) -> Result<BoxDecomposition> {
        self.check_box(bx)?;
        let mut out = BoxDecomposition::default();
        let reach = self.touched_layers(bx.corner(), false);
        if reach.contains(&0) {
            return Ok(out);
        }
        for coords in MultiIndex::new(reach) {
            let full = coords
                .iter()
                .zip(bx.corner())
                .all(|(&k, &x)| self.edge(k + 1) <= x);
            let id = self.cell_from_coords(&coords)?;
            if full {
                out.contained.push(id);
            } else {
                out.partial.push(id);
            }
        }
        Ok(out)
    }

    /// Number of cells whose closure meets the chosen part of `∂[0,x]`.
    pub fn boundary_cell_count(&self, bx: &AnchoredBox, which: Boundary) -> Result<usize> {
        Ok(self.boundary_cells(bx, which)?.len())
    }

    /// Ids of cells whose closure meets the chosen part of `∂[0,x]`.
    pub fn boundary_cells(&self, bx: &AnchoredBox, which: Boundary) -> Result<Vec<usize>> {
        self.check_box(bx)?;
        let x = bx.corner();
        let mut out = Vec::new();
        // Closed cells meeting the closed box: lower edge ≤ x_j on every axis.
        for coords in MultiIndex::new(self.touched_layers(x, true)) {
            let hits = coords.iter().zip(x).any(|(&k, &xj)| {
                let upper = xj <= self.edge(k + 1);
                match which {
                    Boundary::Full => upper || k == 0,
                    Boundary::UpperFaces => upper,
                }
            });
            if hits {
                out.push(self.cell_from_coords(&coords)?);
            }
        }
        Ok(out)
    }

    /// Per-axis count of layers meeting `[0, x_j]` (closed) or `[0, x_j)`.
    fn touched_layers(&self, x: &[f64], closed: bool) -> Vec<usize> {
        x.iter()
            .map(|&xj| {
                (0..self.m)
                    .take_while(|&k| if closed { self.edge(k) <= xj } else { self.edge(k) < xj })
                    .count()
            })
            .collect()
    }

    fn check_cell(&self, cell: usize) -> Result<()> {
        if cell >= self.n {
            return domain(format!("cell id {cell} out of range 0..{}", self.n));
        }
        Ok(())
    }

    fn check_box(&self, bx: &AnchoredBox) -> Result<()> {
        if bx.dim() != self.d {
            return domain(format!("box has dimension {}, partition has {}", bx.dim(), self.d));
        }
        Ok(())
    }
}

/// Row-major odometer over `∏ 0..extent_j`, first axis most significant.
#[derive(Debug, Clone)]
pub(crate) struct MultiIndex {
    extents: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl MultiIndex {
    pub(crate) fn new(extents: Vec<usize>) -> Self {
        let current = if extents.iter().all(|&e| e > 0) {
            Some(vec![0; extents.len()])
        } else {
            None
        };
        Self { extents, current }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut axis = cur.len();
        loop {
            if axis == 0 {
                self.current = None;
                break;
            }
            axis -= 1;
            cur[axis] += 1;
            if cur[axis] < self.extents[axis] {
                break;
            }
            cur[axis] = 0;
        }
        Some(out)
    }
}
