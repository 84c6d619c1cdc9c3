//! Discrete `H^s_0(Ω)` inner product.
//!
//! The assembled matrix `A` realizes
//!
//! ```text
//! a(u, v) = ½ Σ_{i≠j} W_ij (u_i − u_j)(v_i − v_j) + Σ_i E_i u_i v_i
//! ```
//!
//! with `A_ij = −W_ij` off the diagonal and `A_ii = Σ_j W_ij + E_i`. The
//! weights come from collocating `2 ∫ (u(x) − u(x+z)) |z|^{−N−2s} dz` at the
//! cell centers of the infinite lattice, with `u` extended by zero:
//!
//! * the kernel is integrated exactly over every lattice cell `C_k`, `k ≠ 0`
//!   (closed form in 1D, Gauss–Legendre in 2D);
//! * the singular self cell `C_0` is handled by a second-order Taylor
//!   expansion, which adds `½ m_N(s)` to each axis neighbor with
//!   `m_N(s) = (1/N) ∫_{[−½,½]^N} |z|^{2−N−2s} dz`;
//! * the exterior term `E_i` collects the weights of inactive lattice cells
//!   inside the bounding box plus the exact kernel mass beyond the box
//!   (`d^{−2s}/(2s)` per side in 1D, a one-dimensional angular integral per
//!   side in 2D).
//!
//! Every weight is `h^{N−2s}` times a dimensionless number, so the matrix obeys
//! an exact dilation law, and `A_ii` is the same full-lattice sum for every
//! cell regardless of the domain shape.

use std::io::{Read, Write};
use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::{CellFunction, Grid};
use crate::quadrature::Rule;

/// Fractional order `s ∈ (0, 1)` and spatial dimension. The normalization
/// constant of the kernel is fixed to 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    s: f64,
    dim: usize,
}

impl KernelParams {
    pub fn new(s: f64, dim: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(invalid(format!("fractional order must lie in (0, 1), got {s}")));
        }
        if dim != 1 && dim != 2 {
            return Err(invalid(format!("dimension must be 1 or 2, got {dim}")));
        }
        Ok(Self { s, dim })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normalization(&self) -> f64 {
        1.0
    }
}

/// Dimensionless lattice weights `c(k)` indexed by `(|k₁|, |k₂|)`.
struct LatticeKernel {
    dim: usize,
    s: f64,
    extent: [usize; 2],
    table: Vec<f64>,
    stencil: f64,
}

impl LatticeKernel {
    fn new(params: KernelParams, extent: [usize; 2]) -> Self {
        let s = params.s;
        let dim = params.dim;
        let stencil = 0.5 * second_moment(s, dim);
        let table: Vec<f64> = (0..extent[0] * extent[1])
            .into_par_iter()
            .map(|k| {
                let (a, b) = (k % extent[0], k / extent[0]);
                if a == 0 && b == 0 {
                    return 0.0;
                }
                let base = if dim == 1 {
                    cell_integral_1d(s, a)
                } else {
                    cell_integral_2d(s, a, b)
                };
                if a + b == 1 {
                    base + stencil
                } else {
                    base
                }
            })
            .collect();
        Self {
            dim,
            s,
            extent,
            table,
            stencil,
        }
    }

    fn weight(&self, a: usize, b: usize) -> f64 {
        self.table[a + self.extent[0] * b]
    }

    /// Kernel mass beyond the bounding box for the cell at `lattice`, plus the
    /// Taylor-stencil weight of axis neighbors that fall outside the box.
    fn beyond_box(&self, lattice: [usize; 2]) -> f64 {
        let s = self.s;
        let [nx, ny] = self.extent;
        let [i, j] = lattice;
        let mut stencil_hits = (i == 0) as usize + (i + 1 == nx) as usize;
        let xc = i as f64 + 0.5;
        if self.dim == 1 {
            let left = xc;
            let right = nx as f64 - xc;
            return (left.powf(-2.0 * s) + right.powf(-2.0 * s)) / (2.0 * s)
                + stencil_hits as f64 * self.stencil;
        }
        stencil_hits += (j == 0) as usize + (j + 1 == ny) as usize;
        let yc = j as f64 + 0.5;
        let rule = Rule::new(12);
        let side = |d: f64, lo: f64, hi: f64| {
            let f = |phi: f64| phi.cos().powf(2.0 * s);
            let angle = rule.adaptive(&f, lo.atan2(d), hi.atan2(d), 1e-15);
            d.powf(-2.0 * s) * angle / (2.0 * s)
        };
        side(nx as f64 - xc, -yc, ny as f64 - yc)
            + side(xc, -yc, ny as f64 - yc)
            + side(ny as f64 - yc, -xc, nx as f64 - xc)
            + side(yc, -xc, nx as f64 - xc)
            + stencil_hits as f64 * self.stencil
    }
}

/// `m_N(s) = (1/N) ∫_{[−½,½]^N} |z|^{2−N−2s} dz`.
fn second_moment(s: f64, dim: usize) -> f64 {
    let p = 2.0 - 2.0 * s;
    if dim == 1 {
        2.0 * 0.5f64.powf(p) / p
    } else {
        // polar coordinates over the unit square, eight symmetric sectors
        let rule = Rule::new(20);
        let f = |theta: f64| (2.0 * theta.cos()).powf(-p) / p;
        4.0 * rule.integrate(&f, 0.0, std::f64::consts::FRAC_PI_4)
    }
}

/// `∫_{k−½}^{k+½} |z|^{−1−2s} dz` for `k ≥ 1`.
fn cell_integral_1d(s: f64, k: usize) -> f64 {
    let lo = k as f64 - 0.5;
    -lo.powf(-2.0 * s) * (-2.0 * s * (1.0 / lo).ln_1p()).exp_m1() / (2.0 * s)
}

/// `∫∫_{[a−½,a+½]×[b−½,b+½]} |z|^{−2−2s} dz` for `(a, b) ≠ (0, 0)`.
fn cell_integral_2d(s: f64, a: usize, b: usize) -> f64 {
    let reach = a.max(b);
    let (points, sub) = match reach {
        0..=2 => (8, 8),
        3..=6 => (8, 3),
        _ => (8, 1),
    };
    let rule = Rule::new(points);
    let f = |x: f64, y: f64| (x * x + y * y).powf(-1.0 - s);
    let (a, b) = (a as f64, b as f64);
    rule.integrate_2d(&f, (a - 0.5, a + 0.5), (b - 0.5, b + 0.5), sub)
}

/// Symmetric positive-definite matrix of the discrete `H^s_0` inner product.
#[derive(Debug)]
pub struct StiffnessOperator {
    matrix: DMatrix<f64>,
    exterior: Vec<f64>,
    grid: Grid,
    params: KernelParams,
    factor: OnceLock<std::result::Result<DMatrix<f64>, String>>,
}

/// Build the stiffness operator for `grid`.
pub fn assemble(grid: &Grid, params: KernelParams) -> Result<StiffnessOperator> {
    if params.dim != grid.dim() {
        return Err(invalid(format!(
            "kernel dimension {} does not match grid dimension {}",
            params.dim,
            grid.dim()
        )));
    }
    let [nx, ny] = grid.cells_per_axis();
    let kernel = LatticeKernel::new(params, [nx, ny]);
    let n = grid.active_count();
    let scale = 2.0 * grid.cell_width().powf(grid.dim() as f64 - 2.0 * params.s);

    // Row i: off-diagonal weights over active cells, then exterior mass.
    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let [xi, yi] = grid.lattice_coords(i);
            let mut row = vec![0.0; n];
            let mut exterior = 0.0;
            for y in 0..ny {
                for x in 0..nx {
                    if x == xi && y == yi {
                        continue;
                    }
                    let w = kernel.weight(x.abs_diff(xi), y.abs_diff(yi));
                    match grid.active_index([x, y]) {
                        Some(j) => row[j] = w,
                        None => exterior += w,
                    }
                }
            }
            exterior += kernel.beyond_box([xi, yi]);
            (row, exterior)
        })
        .collect();

    let mut matrix = DMatrix::zeros(n, n);
    let mut exterior = vec![0.0; n];
    for (i, (row, ext)) in rows.into_iter().enumerate() {
        let interior: f64 = row.iter().sum();
        for (j, w) in row.into_iter().enumerate() {
            if j != i {
                matrix[(i, j)] = -scale * w;
            }
        }
        matrix[(i, i)] = scale * (interior + ext);
        exterior[i] = scale * ext;
    }
    let transpose = matrix.transpose();
    matrix = (matrix + transpose) * 0.5;

    Ok(StiffnessOperator {
        matrix,
        exterior,
        grid: grid.clone(),
        params,
        factor: OnceLock::new(),
    })
}

impl StiffnessOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> KernelParams {
        self.params
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// The exterior contributions `E_i`, already scaled.
    pub fn exterior_weights(&self) -> &[f64] {
        &self.exterior
    }

    /// `A u`.
    pub fn apply(&self, u: &CellFunction) -> Result<CellFunction> {
        self.grid.check(u)?;
        let x = DVector::from_column_slice(u.values());
        let y = &self.matrix * x;
        Ok(CellFunction::new(y.as_slice().to_vec(), u.cell_measure()))
    }

    /// `a(u, v) = uᵀ A v`.
    pub fn bilinear(&self, u: &CellFunction, v: &CellFunction) -> Result<f64> {
        self.grid.check(v)?;
        let au = self.apply(u)?;
        Ok(au.values().iter().zip(v.values()).map(|(a, b)| a * b).sum())
    }

    /// `‖u‖²_{H^s_0} ≈ uᵀ A u`.
    pub fn norm_sq(&self, u: &CellFunction) -> Result<f64> {
        self.bilinear(u, u)
    }

    /// Lower Cholesky factor `L` with `A = L Lᵀ`, computed once.
    pub(crate) fn cholesky_factor(&self) -> Result<&DMatrix<f64>> {
        self.factor
            .get_or_init(|| {
                Cholesky::new(self.matrix.clone())
                    .map(|c| c.unpack())
                    .ok_or_else(|| "stiffness matrix is not positive definite".to_string())
            })
            .as_ref()
            .map_err(|e| Error::Inconsistent(e.clone()))
    }

    pub fn dump(&self) -> MatrixDump {
        let n = self.size();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.matrix[(i, j)]);
            }
        }
        MatrixDump {
            n,
            s: self.params.s,
            data,
        }
    }
}

/// Binary matrix dump: `n` as little-endian `u64`, `s` as little-endian
/// `f64`, then the `n²` entries row-major as little-endian `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixDump {
    pub n: usize,
    pub s: f64,
    pub data: Vec<f64>,
}

impl MatrixDump {
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.s.to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> std::io::Result<Self> {
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let s = f64::from_le_bytes(word);
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            r.read_exact(&mut word)?;
            data.push(f64::from_le_bytes(word));
        }
        Ok(Self { n, s, data })
    }
}
