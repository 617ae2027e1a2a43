//! Piecewise-constant densities on a cell grid and their cumulative tables.
//!
//! A [`GridDensity`] stores `f` and the weight `w` of `dμ = w·dx` per cell.
//! [`CumulativeTable`] holds n-dimensional prefix sums of `f·w·vol` and
//! `w·vol` at the grid edges. Inside a cell the cumulative functions are
//! multilinear, so interpolating the table linearly along each axis gives the
//! exact value at any coordinate, on or off the grid.

use crate::error::{DensityError, GeometryError};
use crate::geometry::{Interval, Rect};
use crate::scalar::{Exact, Scalar};

/// `f` and `w` on a grid of cells covering `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity<S> {
    domain: Rect<S>,
    edges: Vec<Vec<S>>,
    f: Vec<S>,
    w: Vec<S>,
    strides: Vec<usize>,
}

impl<S: Scalar> GridDensity<S> {
    /// Build from explicit per-axis breakpoints. Values are row-major with the
    /// last axis fastest.
    pub fn new(domain: Rect<S>, edges: Vec<Vec<S>>, f: Vec<S>, w: Vec<S>) -> Result<Self, DensityError> {
        if edges.len() != domain.dim() {
            return Err(GeometryError::DimensionMismatch(edges.len(), domain.dim()).into());
        }
        for (axis, axis_edges) in edges.iter().enumerate() {
            let side = domain.side(axis);
            if axis_edges.len() < 2 {
                return Err(DensityError::NoCells);
            }
            let ends_ok = axis_edges[0] == *side.lo() && axis_edges[axis_edges.len() - 1] == *side.hi();
            if !ends_ok || axis_edges.windows(2).any(|p| p[0] >= p[1]) {
                return Err(DensityError::BadEdges(axis));
            }
        }
        let cells: Vec<usize> = edges.iter().map(|e| e.len() - 1).collect();
        let count: usize = cells.iter().product();
        if f.len() != count {
            return Err(DensityError::ValueCount { expected: count, got: f.len() });
        }
        if w.len() != count {
            return Err(DensityError::ValueCount { expected: count, got: w.len() });
        }
        if w.iter().any(|x| *x < S::zero()) {
            return Err(DensityError::NegativeWeight);
        }
        let strides = row_major_strides(&cells);
        Ok(GridDensity { domain, edges, f, w, strides })
    }

    /// Uniform cells; `w = None` means Lebesgue measure.
    pub fn uniform(domain: Rect<S>, cells: &[usize], f: Vec<S>, w: Option<Vec<S>>) -> Result<Self, DensityError> {
        if cells.len() != domain.dim() {
            return Err(GeometryError::DimensionMismatch(cells.len(), domain.dim()).into());
        }
        if cells.contains(&0) {
            return Err(DensityError::NoCells);
        }
        let edges = cells
            .iter()
            .zip(domain.sides())
            .map(|(&m, side)| uniform_edges(side, m))
            .collect();
        let count = cells.iter().product();
        let w = w.unwrap_or_else(|| vec![S::one(); count]);
        GridDensity::new(domain, edges, f, w)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Rect<S> {
        &self.domain
    }

    pub fn edges(&self, axis: usize) -> &[S] {
        &self.edges[axis]
    }

    pub fn cells_per_axis(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.len() - 1).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.f.len()
    }

    pub fn f_values(&self) -> &[S] {
        &self.f
    }

    pub fn w_values(&self) -> &[S] {
        &self.w
    }

    /// Multi-index of a flat cell index.
    pub fn cell_coords(&self, mut flat: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|&stride| {
                let c = flat / stride;
                flat %= stride;
                c
            })
            .collect()
    }

    pub fn cell_rect(&self, flat: usize) -> Rect<S> {
        let coords = self.cell_coords(flat);
        let sides = coords
            .iter()
            .enumerate()
            .map(|(axis, &c)| Interval::new(self.edges[axis][c].clone(), self.edges[axis][c + 1].clone()))
            .collect::<Result<Vec<_>, _>>()
            .expect("edges are strictly increasing");
        Rect::new(sides).expect("dimension >= 1")
    }

    /// `w·vol` of one cell.
    pub fn cell_mass(&self, flat: usize) -> S {
        self.w[flat].clone() * self.cell_rect(flat).volume()
    }

    /// `μ(I_0)`.
    pub fn total_mass(&self) -> S {
        (0..self.cell_count()).fold(S::zero(), |acc, i| acc + self.cell_mass(i))
    }

    /// Whether `w = 1` on every cell.
    pub fn is_lebesgue(&self) -> bool {
        self.w.iter().all(|w| *w == S::one())
    }

    /// Range of cells along `axis` whose interior meets `side`, as a
    /// half-open index range. Empty if the side is empty or outside.
    pub fn cell_range(&self, axis: usize, side: &Interval<S>) -> std::ops::Range<usize> {
        let edges = &self.edges[axis];
        if side.is_empty() {
            return 0..0;
        }
        // first cell whose upper edge exceeds lo
        let start = edges[1..].partition_point(|e| e <= side.lo());
        // cells whose lower edge is below hi
        let end = edges[..edges.len() - 1].partition_point(|e| e < side.hi());
        start..end.max(start)
    }

    /// μ-essential supremum of `f` over `r`: the largest `f` among cells that
    /// meet `r` in positive volume and carry positive weight.
    pub fn essential_sup_f(&self, r: &Rect<S>) -> Option<S> {
        let ranges: Vec<_> = (0..self.dim()).map(|axis| self.cell_range(axis, r.side(axis))).collect();
        let mut best: Option<S> = None;
        for_each_cell(&ranges, &self.strides, |flat| {
            if self.w[flat] > S::zero() && best.as_ref().is_none_or(|b| self.f[flat] > *b) {
                best = Some(self.f[flat].clone());
            }
        });
        best
    }

    /// Flat indices of the cells meeting `r` in positive volume, in row-major
    /// order.
    pub fn cells_meeting(&self, r: &Rect<S>) -> Vec<usize> {
        let ranges: Vec<_> = (0..self.dim()).map(|axis| self.cell_range(axis, r.side(axis))).collect();
        let mut out = Vec::new();
        for_each_cell(&ranges, &self.strides, |flat| out.push(flat));
        out
    }

    /// Minimum of `f` over cells carrying positive weight.
    pub fn min_f(&self) -> Option<S> {
        let mut best: Option<S> = None;
        for (f, w) in self.f.iter().zip(&self.w) {
            if *w > S::zero() && best.as_ref().is_none_or(|b| f < b) {
                best = Some(f.clone());
            }
        }
        best
    }

    /// Re-express every value in another scalar type.
    pub fn convert<T: Scalar>(&self) -> GridDensity<T> {
        let conv = |x: &S| T::from_exact(&x.to_exact());
        GridDensity {
            domain: self.domain.map(conv),
            edges: self.edges.iter().map(|e| e.iter().map(conv).collect()).collect(),
            f: self.f.iter().map(conv).collect(),
            w: self.w.iter().map(conv).collect(),
            strides: self.strides.clone(),
        }
    }

    pub fn to_exact(&self) -> GridDensity<Exact> {
        self.convert()
    }
}

fn uniform_edges<S: Scalar>(side: &Interval<S>, m: usize) -> Vec<S> {
    let step = side.length() / S::from_usize(m);
    let mut edges: Vec<S> = (0..m).map(|k| side.lo().clone() + step.clone() * S::from_usize(k)).collect();
    edges.push(side.hi().clone());
    edges
}

fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for axis in (0..shape.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * shape[axis + 1];
    }
    strides
}

/// Visit every flat index in the box `ranges` (one index range per axis).
fn for_each_cell(ranges: &[std::ops::Range<usize>], strides: &[usize], mut visit: impl FnMut(usize)) {
    if ranges.iter().any(|r| r.is_empty()) {
        return;
    }
    let n = ranges.len();
    let mut idx: Vec<usize> = ranges.iter().map(|r| r.start).collect();
    loop {
        let base: usize = idx[..n - 1].iter().zip(strides).map(|(i, s)| i * s).sum();
        for last in ranges[n - 1].clone() {
            visit(base + last * strides[n - 1]);
        }
        let mut axis = n - 1;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < ranges[axis].end {
                break;
            }
            idx[axis] = ranges[axis].start;
        }
    }
}

/// Prefix sums of `f·w·vol` and `w·vol` at the grid edges.
#[derive(Debug, Clone)]
pub struct CumulativeTable<'a, S> {
    density: &'a GridDensity<S>,
    f_table: Vec<S>,
    m_table: Vec<S>,
    strides: Vec<usize>,
}

/// A linear combination of table entries along one axis.
type AxisTerms<S> = Vec<(usize, S)>;

impl<'a, S: Scalar> CumulativeTable<'a, S> {
    pub fn build(density: &'a GridDensity<S>) -> Self {
        let shape: Vec<usize> = density.cells_per_axis().iter().map(|m| m + 1).collect();
        let strides = row_major_strides(&shape);
        let size: usize = shape.iter().product();
        let mut f_table = vec![S::zero(); size];
        let mut m_table = vec![S::zero(); size];
        for cell in 0..density.cell_count() {
            let coords = density.cell_coords(cell);
            let slot: usize = coords.iter().zip(&strides).map(|(c, s)| (c + 1) * s).sum();
            let mass = density.cell_mass(cell);
            f_table[slot] = density.f[cell].clone() * mass.clone();
            m_table[slot] = mass;
        }
        for axis in 0..shape.len() {
            let stride = strides[axis];
            for slot in 0..size {
                if (slot / stride).is_multiple_of(shape[axis]) {
                    continue;
                }
                let prev = slot - stride;
                f_table[slot] = f_table[slot].clone() + f_table[prev].clone();
                m_table[slot] = m_table[slot].clone() + m_table[prev].clone();
            }
        }
        CumulativeTable { density, f_table, m_table, strides }
    }

    pub fn density(&self) -> &'a GridDensity<S> {
        self.density
    }

    /// Raw `(F, M)` entries at an edge multi-index.
    pub fn entry(&self, edge_index: &[usize]) -> (&S, &S) {
        let slot: usize = edge_index.iter().zip(&self.strides).map(|(i, s)| i * s).sum();
        (&self.f_table[slot], &self.m_table[slot])
    }

    /// Edge indices and interpolation weights giving the cumulative value at
    /// coordinate `x` along `axis`.
    fn locate(&self, axis: usize, x: &S) -> AxisTerms<S> {
        let edges = self.density.edges(axis);
        let k = edges.partition_point(|e| e <= x);
        // edges[k-1] <= x < edges[k]
        if k == 0 {
            return vec![(0, S::one())];
        }
        let lo = k - 1;
        if edges[lo] == *x || k == edges.len() {
            return vec![(lo, S::one())];
        }
        let theta = (x.clone() - edges[lo].clone()) / (edges[k].clone() - edges[lo].clone());
        vec![(lo, S::one() - theta.clone()), (k, theta)]
    }

    fn side_terms(&self, axis: usize, side: &Interval<S>) -> AxisTerms<S> {
        let mut terms = self.locate(axis, side.hi());
        for (i, c) in self.locate(axis, side.lo()) {
            terms.push((i, -c));
        }
        terms
    }

    fn contract(&self, per_axis: &[AxisTerms<S>]) -> (S, S) {
        let mut acc: Vec<(usize, S)> = vec![(0, S::one())];
        for (axis, terms) in per_axis.iter().enumerate() {
            let stride = self.strides[axis];
            let mut next = Vec::with_capacity(acc.len() * terms.len());
            for (offset, coef) in &acc {
                for (i, c) in terms {
                    next.push((offset + i * stride, coef.clone() * c.clone()));
                }
            }
            acc = next;
        }
        let mut f = S::zero();
        let mut m = S::zero();
        for (slot, coef) in acc {
            f = f + coef.clone() * self.f_table[slot].clone();
            m = m + coef * self.m_table[slot].clone();
        }
        (f, m)
    }

    fn check_inside(&self, r: &Rect<S>) -> Result<(), DensityError> {
        if r.dim() != self.density.dim() {
            return Err(GeometryError::DimensionMismatch(r.dim(), self.density.dim()).into());
        }
        if !r.is_degenerate() && !r.is_subset_of(self.density.domain()) {
            return Err(DensityError::OutsideDomain(r.to_string()));
        }
        Ok(())
    }

    /// `(∫_r f dμ, μ(r))` in one pass over the `2^n` corners.
    pub fn masses(&self, r: &Rect<S>) -> Result<(S, S), DensityError> {
        self.check_inside(r)?;
        if r.is_degenerate() {
            return Ok((S::zero(), S::zero()));
        }
        let terms: Vec<_> = (0..r.dim()).map(|axis| self.side_terms(axis, r.side(axis))).collect();
        Ok(self.contract(&terms))
    }

    pub fn measure(&self, r: &Rect<S>) -> Result<S, DensityError> {
        Ok(self.masses(r)?.1)
    }

    pub fn integral_f(&self, r: &Rect<S>) -> Result<S, DensityError> {
        Ok(self.masses(r)?.0)
    }

    /// Mean of `f` over `r`, or `None` when `μ(r) = 0`.
    pub fn mean(&self, r: &Rect<S>) -> Result<Option<S>, DensityError> {
        let (f, m) = self.masses(r)?;
        Ok((m != S::zero()).then(|| f / m))
    }

    /// Cumulative masses of `r` along `axis` as a function of the cut position:
    /// the restriction of the table to the other sides of `r`, sampled at the
    /// edges of `axis` that bracket the side of `r`.
    pub fn axis_profile(&self, r: &Rect<S>, axis: usize) -> Result<AxisProfile<'_, 'a, S>, DensityError> {
        self.check_inside(r)?;
        let mut terms: Vec<_> = (0..r.dim())
            .map(|a| if a == axis { Vec::new() } else { self.side_terms(a, r.side(a)) })
            .collect();
        let edges = self.density.edges(axis);
        let side = r.side(axis);
        let first = edges.partition_point(|e| e <= side.lo()).saturating_sub(1);
        let last = edges.partition_point(|e| e < side.hi()).min(edges.len() - 1);
        let mut f = Vec::with_capacity(last + 1 - first);
        let mut m = Vec::with_capacity(last + 1 - first);
        for j in first..=last {
            terms[axis] = vec![(j, S::one())];
            let (fj, mj) = self.contract(&terms);
            f.push(fj);
            m.push(mj);
        }
        Ok(AxisProfile { table: self, axis, first, f, m })
    }

    /// `(∫ f dμ, μ)` of the whole domain.
    pub fn total(&self) -> (S, S) {
        let last = self.f_table.len() - 1;
        (self.f_table[last].clone(), self.m_table[last].clone())
    }
}

/// `(F, M)` of `{x_axis < t} ∩ r` sampled at each edge of one axis; see
/// [`CumulativeTable::axis_profile`].
#[derive(Debug, Clone)]
pub struct AxisProfile<'t, 'a, S> {
    table: &'t CumulativeTable<'a, S>,
    axis: usize,
    first: usize,
    f: Vec<S>,
    m: Vec<S>,
}

impl<S: Scalar> AxisProfile<'_, '_, S> {
    pub fn axis(&self) -> usize {
        self.axis
    }

    /// Cell edges of the profiled axis.
    pub fn table_edges(&self) -> &[S] {
        self.table.density.edges(self.axis)
    }

    /// Exact value at a coordinate inside the side the profile was built for.
    pub fn at(&self, t: &S) -> (S, S) {
        self.table.locate(self.axis, t).into_iter().fold((S::zero(), S::zero()), |(f, m), (j, c)| {
            let j = j - self.first;
            (f + c.clone() * self.f[j].clone(), m + c * self.m[j].clone())
        })
    }

    /// `(F, M)` of the slab `[a, b)` along the axis.
    pub fn between(&self, a: &S, b: &S) -> (S, S) {
        let (fa, ma) = self.at(a);
        let (fb, mb) = self.at(b);
        (fb - fa, mb - ma)
    }
}
