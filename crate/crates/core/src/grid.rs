//! Uniform-cell discretizations of bounded domains.
//!
//! A [`Grid`] is a lattice of identical square (or, in 1D, interval) cells
//! of width `h` covering a bounding box. Cells whose centers lie in the
//! domain are *active*; every other lattice cell, and everything outside the
//! bounding box, belongs to the exterior where functions vanish.
//!
//! Active cells are numbered in lattice order with the first axis varying
//! fastest. All [`CellFunction`]s are indexed by that numbering.

use crate::error::{invalid, parse_err, Error, Result};

/// Reflection hyperplane `x[axis] = center` used for Steiner symmetrization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteinerAxis {
    pub axis: usize,
    pub center: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainShape {
    Interval,
    Rectangle,
    Disk,
    Masked,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    cells_per_axis: [usize; 2],
    h: f64,
    origin: [f64; 2],
    mask: Vec<bool>,
    active: Vec<usize>,
    lattice_to_active: Vec<Option<usize>>,
    steiner: Option<SteinerAxis>,
    shape: DomainShape,
}

impl Grid {
    /// The interval `(a, b)` split into `n` cells.
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(invalid(format!("interval needs a < b, got ({a}, {b})")));
        }
        if n == 0 {
            return Err(invalid("interval needs at least one cell"));
        }
        let h = (b - a) / n as f64;
        let mut grid = Self::from_mask(1, [n, 1], h, [a, 0.0], vec![true; n], None)?;
        grid.steiner = Some(SteinerAxis {
            axis: 0,
            center: 0.5 * (a + b),
        });
        grid.shape = DomainShape::Interval;
        Ok(grid)
    }

    /// Axis-aligned rectangle of the given widths centered at the origin.
    ///
    /// Cells must be square: `widths[0] / n[0] == widths[1] / n[1]`.
    pub fn rectangle(widths: [f64; 2], n: [usize; 2]) -> Result<Self> {
        if widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) || n.contains(&0) {
            return Err(invalid("rectangle needs positive widths and cell counts"));
        }
        let hx = widths[0] / n[0] as f64;
        let hy = widths[1] / n[1] as f64;
        if (hx - hy).abs() > 1e-12 * hx.max(hy) {
            return Err(invalid(format!(
                "anisotropic cells {hx}x{hy}; cell widths must agree on both axes"
            )));
        }
        let origin = [-0.5 * widths[0], -0.5 * widths[1]];
        let mut grid = Self::from_mask(2, n, hx, origin, vec![true; n[0] * n[1]], None)?;
        grid.steiner = Some(SteinerAxis {
            axis: 0,
            center: 0.0,
        });
        grid.shape = DomainShape::Rectangle;
        Ok(grid)
    }

    /// Disk of the given radius centered at the origin, on an `n × n` lattice
    /// over the bounding box `[-r, r]²`. A cell is active when its center lies
    /// strictly inside the disk.
    pub fn disk(radius: f64, n: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(format!("disk radius must be positive, got {radius}")));
        }
        if n < 2 {
            return Err(invalid("disk needs at least 2 cells per axis"));
        }
        let h = 2.0 * radius / n as f64;
        // Center test in half-cell integer units keeps the mask exactly symmetric.
        let n_i = n as i64;
        let mut mask = vec![false; n * n];
        for j in 0..n {
            for i in 0..n {
                let dx = 2 * i as i64 + 1 - n_i;
                let dy = 2 * j as i64 + 1 - n_i;
                mask[i + n * j] = dx * dx + dy * dy < n_i * n_i;
            }
        }
        let mut grid = Self::from_mask(2, [n, n], h, [-radius, -radius], mask, None)?;
        grid.steiner = Some(SteinerAxis {
            axis: 0,
            center: 0.0,
        });
        grid.shape = DomainShape::Disk;
        Ok(grid)
    }

    /// General masked lattice. `mask` is indexed `i + cells[0] * j`.
    pub fn from_mask(
        dim: usize,
        cells_per_axis: [usize; 2],
        h: f64,
        origin: [f64; 2],
        mask: Vec<bool>,
        steiner: Option<SteinerAxis>,
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(invalid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if dim == 1 && cells_per_axis[1] != 1 {
            return Err(invalid("a 1D grid has exactly one row"));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid(format!("cell width must be positive, got {h}")));
        }
        if mask.len() != cells_per_axis[0] * cells_per_axis[1] {
            return Err(invalid("mask length does not match the lattice"));
        }
        let active: Vec<usize> = (0..mask.len()).filter(|&k| mask[k]).collect();
        if active.is_empty() {
            return Err(invalid("grid has no active cells"));
        }
        let mut lattice_to_active = vec![None; mask.len()];
        for (a, &k) in active.iter().enumerate() {
            lattice_to_active[k] = Some(a);
        }
        let grid = Self {
            dim,
            cells_per_axis,
            h,
            origin,
            mask,
            active,
            lattice_to_active,
            steiner,
            shape: DomainShape::Masked,
        };
        if let Some(axis) = steiner {
            if axis.axis >= dim {
                return Err(invalid(format!("steiner axis {} out of range", axis.axis)));
            }
            if !grid.mask_is_reflection_symmetric(axis) {
                return Err(invalid("mask is not symmetric about the steiner axis"));
            }
        }
        Ok(grid)
    }

    /// Parse `interval:a,b,n`, `rect:wx,wy,nx,ny` or `disk:r,n`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (kind, args) = spec
            .split_once(':')
            .ok_or_else(|| parse_err(spec, "expected `<kind>:<args>`"))?;
        let fields: Vec<&str> = args.split(',').map(str::trim).collect();
        let num = |k: usize| -> Result<f64> {
            fields[k]
                .parse::<f64>()
                .map_err(|_| parse_err(fields[k], "not a number"))
        };
        let count = |k: usize| -> Result<usize> {
            fields[k]
                .parse::<usize>()
                .map_err(|_| parse_err(fields[k], "not a cell count"))
        };
        let arity = |want: usize| -> Result<()> {
            if fields.len() == want {
                Ok(())
            } else {
                Err(parse_err(spec, format!("`{kind}` takes {want} values")))
            }
        };
        match kind.trim() {
            "interval" => {
                arity(3)?;
                Self::interval(num(0)?, num(1)?, count(2)?)
            }
            "rect" => {
                arity(4)?;
                Self::rectangle([num(0)?, num(1)?], [count(2)?, count(3)?])
            }
            "disk" => {
                arity(2)?;
                Self::disk(num(0)?, count(1)?)
            }
            other => Err(parse_err(other, "unknown domain kind")),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> [usize; 2] {
        self.cells_per_axis
    }

    pub fn cell_width(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn shape(&self) -> DomainShape {
        self.shape
    }

    /// Measure `h^dim` shared by every cell.
    pub fn cell_measure(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    /// `|Ω|`, the number of active cells times the cell measure.
    pub fn measure(&self) -> f64 {
        self.active.len() as f64 * self.cell_measure()
    }

    pub fn steiner_axis(&self) -> Option<SteinerAxis> {
        self.steiner
    }

    pub fn is_active(&self, lattice: [usize; 2]) -> bool {
        self.mask[lattice[0] + self.cells_per_axis[0] * lattice[1]]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Lattice coordinates of active cell `idx`.
    pub fn lattice_coords(&self, idx: usize) -> [usize; 2] {
        let k = self.active[idx];
        [k % self.cells_per_axis[0], k / self.cells_per_axis[0]]
    }

    pub fn active_index(&self, lattice: [usize; 2]) -> Option<usize> {
        if lattice[0] >= self.cells_per_axis[0] || lattice[1] >= self.cells_per_axis[1] {
            return None;
        }
        self.lattice_to_active[lattice[0] + self.cells_per_axis[0] * lattice[1]]
    }

    /// Cell center of active cell `idx`; the second entry is 0 in 1D.
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.lattice_coords(idx);
        let y = if self.dim == 2 {
            self.origin[1] + (j as f64 + 0.5) * self.h
        } else {
            0.0
        };
        [self.origin[0] + (i as f64 + 0.5) * self.h, y]
    }

    /// Active cell containing `point`, if any.
    pub fn locate(&self, point: [f64; 2]) -> Option<usize> {
        let i = ((point[0] - self.origin[0]) / self.h).floor();
        let j = if self.dim == 2 {
            ((point[1] - self.origin[1]) / self.h).floor()
        } else {
            0.0
        };
        if i < 0.0 || j < 0.0 {
            return None;
        }
        self.active_index([i as usize, j as usize])
    }

    /// Offset of the cell center from the bounding-box center in half-cell
    /// units. Exact integers, so equal distances compare equal.
    pub fn half_cell_offset(&self, idx: usize) -> [i64; 2] {
        let [i, j] = self.lattice_coords(idx);
        [
            2 * i as i64 + 1 - self.cells_per_axis[0] as i64,
            2 * j as i64 + 1 - self.cells_per_axis[1] as i64,
        ]
    }

    /// Active cells grouped into lattice lines parallel to the steiner axis,
    /// each sorted by coordinate along the axis.
    pub fn steiner_lines(&self) -> Result<Vec<Vec<usize>>> {
        let axis = self.steiner.ok_or(Error::NoSteinerAxis)?.axis;
        let [nx, ny] = self.cells_per_axis;
        let (len, count) = if axis == 0 { (nx, ny) } else { (ny, nx) };
        let mut lines = Vec::new();
        for line in 0..count {
            let cells: Vec<usize> = (0..len)
                .filter_map(|t| {
                    let lattice = if axis == 0 { [t, line] } else { [line, t] };
                    self.active_index(lattice)
                })
                .collect();
            if !cells.is_empty() {
                lines.push(cells);
            }
        }
        Ok(lines)
    }

    /// Image of active cell `idx` under reflection about the steiner axis.
    pub fn reflect(&self, idx: usize) -> Result<Option<usize>> {
        let axis = self.steiner.ok_or(Error::NoSteinerAxis)?;
        Ok(self.reflected_lattice(idx, axis).and_then(|l| self.active_index(l)))
    }

    fn reflected_lattice(&self, idx: usize, axis: SteinerAxis) -> Option<[usize; 2]> {
        let mut lattice = self.lattice_coords(idx);
        let a = axis.axis;
        let coord = self.origin[a] + (lattice[a] as f64 + 0.5) * self.h;
        let mirrored = 2.0 * axis.center - coord;
        let t = ((mirrored - self.origin[a]) / self.h - 0.5).round();
        if t < 0.0 || t as usize >= self.cells_per_axis[a] {
            return None;
        }
        lattice[a] = t as usize;
        Some(lattice)
    }

    fn mask_is_reflection_symmetric(&self, axis: SteinerAxis) -> bool {
        (0..self.active.len()).all(|idx| {
            self.reflected_lattice(idx, axis)
                .map(|l| self.is_active(l))
                .unwrap_or(false)
        })
    }

    pub(crate) fn check(&self, f: &CellFunction) -> Result<()> {
        if f.len() != self.active_count() {
            return Err(Error::GridMismatch {
                expected: self.active_count(),
                got: f.len(),
            });
        }
        Ok(())
    }
}

/// Real values on the active cells of a grid, together with the common cell
/// measure used for integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct CellFunction {
    values: Vec<f64>,
    cell_measure: f64,
}

impl CellFunction {
    pub fn new(values: Vec<f64>, cell_measure: f64) -> Self {
        Self {
            values,
            cell_measure,
        }
    }

    pub fn on(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        let f = Self::new(values, grid.cell_measure());
        grid.check(&f)?;
        Ok(f)
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self::new(vec![c; grid.active_count()], grid.cell_measure())
    }

    /// Sample `f` at the active cell centers.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        let values = (0..grid.active_count()).map(|i| f(grid.center(i))).collect();
        Self::new(values, grid.cell_measure())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_measure
    }

    /// `∫ f g dx`.
    pub fn inner(&self, other: &CellFunction) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.cell_measure)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.values.iter().map(|&v| f(v)).collect(), self.cell_measure)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &CellFunction, b: f64) -> Result<Self> {
        self.same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self::new(values, self.cell_measure))
    }

    pub fn max_abs_diff(&self, other: &CellFunction) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn same_shape(&self, other: &CellFunction) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(())
    }
}
