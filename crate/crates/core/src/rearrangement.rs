//! Rearrangement calculus on equal-measure cells.
//!
//! With identical cells a rearrangement is a permutation of cell values, so
//! the class `G(ρ₀)` is the finite set of permutations of a value multiset
//! and every operation here is exact.

use std::cmp::Ordering;

use crate::error::{invalid, parse_err, Error, Result};
use crate::grid::{CellFunction, Grid};

/// A rearrangement class: distinct values with cell multiplicities, values
/// strictly decreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightClass {
    entries: Vec<(f64, usize)>,
    total_cells: usize,
    cell_measure: f64,
}

impl WeightClass {
    /// Canonicalize `(value, count)` pairs: merge equal values, drop nothing,
    /// sort by decreasing value.
    pub fn from_counts(pairs: &[(f64, usize)], cell_measure: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(invalid("weight class needs at least one value"));
        }
        let mut entries: Vec<(f64, usize)> = Vec::with_capacity(pairs.len());
        let mut sorted = pairs.to_vec();
        if sorted.iter().any(|(v, c)| !v.is_finite() || *c == 0) {
            return Err(invalid("weight class values must be finite with positive counts"));
        }
        sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (v, c) in sorted {
            match entries.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => entries.push((v, c)),
            }
        }
        let total_cells = entries.iter().map(|e| e.1).sum();
        Ok(Self {
            entries,
            total_cells,
            cell_measure,
        })
    }

    /// The class of an existing cell function.
    pub fn of(f: &CellFunction) -> Self {
        let pairs: Vec<(f64, usize)> = f.values().iter().map(|&v| (v, 1)).collect();
        Self::from_counts(&pairs, f.cell_measure()).expect("non-empty finite cell function")
    }

    /// Convert `(value, fraction)` pairs to cell counts on `grid` by
    /// largest-remainder apportionment. Fractions must sum to 1 within 1e-9.
    pub fn from_fractions(pairs: &[(f64, f64)], grid: &Grid) -> Result<Self> {
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("fractions sum {total}")));
        }
        if pairs.iter().any(|p| !(p.1 > 0.0)) {
            return Err(invalid("fractions must be positive"));
        }
        let n = grid.active_count();
        let quotas: Vec<f64> = pairs.iter().map(|p| p.1 * n as f64).collect();
        let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        // largest remainder first, earlier entries win ties
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &k in order.iter().take(n.saturating_sub(assigned)) {
            counts[k] += 1;
        }
        if let Some(k) = counts.iter().position(|&c| c == 0) {
            return Err(invalid(format!(
                "value {} receives no cells on a grid of {n} cells",
                pairs[k].0
            )));
        }
        let with_counts: Vec<(f64, usize)> =
            pairs.iter().zip(counts).map(|(p, c)| (p.0, c)).collect();
        Self::from_counts(&with_counts, grid.cell_measure())
    }

    /// Parse `w:v1@f1,v2@f2,...` against `grid`.
    pub fn from_spec(spec: &str, grid: &Grid) -> Result<Self> {
        let body = spec
            .strip_prefix("w:")
            .ok_or_else(|| parse_err(spec, "weight class must start with `w:`"))?;
        let mut pairs = Vec::new();
        for item in body.split(',') {
            let item = item.trim();
            let (v, f) = item
                .split_once('@')
                .ok_or_else(|| parse_err(item, "expected `value@fraction`"))?;
            let v: f64 = v.trim().parse().map_err(|_| parse_err(v, "not a number"))?;
            let f: f64 = f.trim().parse().map_err(|_| parse_err(f, "not a number"))?;
            pairs.push((v, f));
        }
        Self::from_fractions(&pairs, grid)
    }

    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    pub fn total_cells(&self) -> usize {
        self.total_cells
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    /// Every cell value, largest first.
    pub fn values_desc(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|&(v, c)| std::iter::repeat_n(v, c))
            .collect()
    }

    /// `∫ ρ₀ dx`.
    pub fn mass(&self) -> f64 {
        self.entries.iter().map(|&(v, c)| v * c as f64).sum::<f64>() * self.cell_measure
    }

    pub fn max(&self) -> f64 {
        self.entries[0].0
    }

    pub fn min(&self) -> f64 {
        self.entries[self.entries.len() - 1].0
    }

    pub fn has_positive(&self) -> bool {
        self.max() > 0.0
    }

    pub fn is_constant(&self) -> bool {
        self.entries.len() == 1
    }

    /// `G(−ρ₀)`.
    pub fn negated(&self) -> Self {
        let pairs: Vec<(f64, usize)> = self.entries.iter().map(|&(v, c)| (-v, c)).collect();
        Self::from_counts(&pairs, self.cell_measure).expect("negation keeps a valid class")
    }

    /// Whether `f` belongs to this class.
    pub fn contains(&self, f: &CellFunction) -> bool {
        f.len() == self.total_cells && sorted_desc(f.values()) == self.values_desc()
    }

    fn check(&self, u: &CellFunction) -> Result<()> {
        if u.len() != self.total_cells {
            return Err(Error::GridMismatch {
                expected: self.total_cells,
                got: u.len(),
            });
        }
        Ok(())
    }
}

/// Right-continuous non-increasing step function on `(0, |Ω|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    /// `0 = b₀ < b₁ < … < b_K = |Ω|`.
    breakpoints: Vec<f64>,
    /// Value on `[b_k, b_{k+1})`.
    values: Vec<f64>,
}

impl StepFunction {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain_length(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = self.breakpoints[1..].partition_point(|&b| b <= t);
        self.values[k.min(self.values.len() - 1)]
    }

    /// `∫_0^t f*(σ) dσ`.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &v) in self.values.iter().enumerate() {
            let (a, b) = (self.breakpoints[k], self.breakpoints[k + 1]);
            if t <= a {
                break;
            }
            acc += v * (b.min(t) - a);
        }
        acc
    }

    /// `|{f* > t}|`.
    pub fn distribution(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > t {
                acc += self.breakpoints[k + 1] - self.breakpoints[k];
            }
        }
        acc
    }
}

fn sorted_desc(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `d_f(t) = |{f > t}|`.
pub fn distribution_function(f: &CellFunction, t: f64) -> f64 {
    f.values().iter().filter(|&&v| v > t).count() as f64 * f.cell_measure()
}

/// `f*`, the decreasing rearrangement, with equal adjacent steps merged.
pub fn decreasing_rearrangement(f: &CellFunction) -> StepFunction {
    let m = f.cell_measure();
    let sorted = sorted_desc(f.values());
    let mut breakpoints = vec![0.0];
    let mut values: Vec<f64> = Vec::new();
    for (k, v) in sorted.iter().enumerate() {
        let end = (k + 1) as f64 * m;
        if values.last() == Some(v) {
            *breakpoints.last_mut().unwrap() = end;
        } else {
            values.push(*v);
            breakpoints.push(end);
        }
    }
    StepFunction {
        breakpoints,
        values,
    }
}

/// `f ∼ g`: identical sorted value lists.
pub fn equimeasurable(f: &CellFunction, g: &CellFunction) -> Result<bool> {
    f.same_shape(g)?;
    Ok(sorted_desc(f.values()) == sorted_desc(g.values()))
}

/// Tests `g ≺ f`: prefix integrals of `g*` are dominated by those of `f*` and
/// the totals agree. Sums are compared to 1e-12, scaled by `∫|f|` when that
/// exceeds one.
pub fn majorizes(f: &CellFunction, g: &CellFunction) -> Result<bool> {
    f.same_shape(g)?;
    let m = f.cell_measure();
    let fs = sorted_desc(f.values());
    let gs = sorted_desc(g.values());
    let scale: f64 = fs.iter().map(|v| v.abs()).sum::<f64>() * m;
    let tol = 1e-12 * scale.max(1.0);
    let (mut pf, mut pg) = (0.0, 0.0);
    for (a, b) in fs.iter().zip(&gs) {
        pf += a * m;
        pg += b * m;
        if pg > pf + tol {
            return Ok(false);
        }
    }
    Ok((pf - pg).abs() <= tol)
}

/// Cell indices sorted by increasing `u`, ties by increasing index.
fn ascending_order(u: &CellFunction) -> Vec<usize> {
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| {
        u.values()[a]
            .partial_cmp(&u.values()[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Element of `G(ρ₀)` maximizing `∫ ρ u dx`: larger class values go to larger
/// `u`, ties in `u` broken by ascending cell index.
pub fn linear_maximize(class: &WeightClass, u: &CellFunction) -> Result<CellFunction> {
    class.check(u)?;
    let mut ascending = class.values_desc();
    ascending.reverse();
    let mut rho = vec![0.0; u.len()];
    for (rank, cell) in ascending_order(u).into_iter().enumerate() {
        rho[cell] = ascending[rank];
    }
    Ok(CellFunction::new(rho, u.cell_measure()))
}

/// Element of `G(ρ₀)` minimizing `∫ ρ u dx`: larger class values go to
/// smaller `u`, ties in `u` broken by ascending cell index.
pub fn linear_minimize(class: &WeightClass, u: &CellFunction) -> Result<CellFunction> {
    class.check(u)?;
    let descending = class.values_desc();
    let mut rho = vec![0.0; u.len()];
    for (rank, cell) in ascending_order(u).into_iter().enumerate() {
        rho[cell] = descending[rank];
    }
    Ok(CellFunction::new(rho, u.cell_measure()))
}

/// Steiner symmetrization about the grid's steiner axis.
///
/// On each lattice line parallel to the axis, positions are ranked by
/// distance from the reflection center (ties go to the positive side first)
/// and receive the line's values in decreasing order.
pub fn steiner_symmetrize(grid: &Grid, u: &CellFunction) -> Result<CellFunction> {
    grid.check(u)?;
    let axis = grid.steiner_axis().ok_or(Error::NoSteinerAxis)?;
    let mut out = vec![0.0; u.len()];
    for line in grid.steiner_lines()? {
        let mut slots: Vec<(f64, usize)> = line
            .iter()
            .map(|&c| (grid.center(c)[axis.axis] - axis.center, c))
            .collect();
        slots.sort_by(|a, b| {
            a.0.abs()
                .total_cmp(&b.0.abs())
                .then(b.0.total_cmp(&a.0))
        });
        let values = sorted_desc(&line.iter().map(|&c| u.values()[c]).collect::<Vec<_>>());
        for ((_, cell), v) in slots.into_iter().zip(values) {
            out[cell] = v;
        }
    }
    Ok(CellFunction::new(out, u.cell_measure()))
}

/// `max |u − u♯|`; zero exactly when `u` is Steiner symmetric.
pub fn symmetry_error(grid: &Grid, u: &CellFunction) -> Result<f64> {
    let sym = steiner_symmetrize(grid, u)?;
    u.max_abs_diff(&sym)
}
