//! Cell discretization of continuous spectra.
//!
//! Momentum (or position) space is tiled by cubic cells of edge ε centered at
//! ε n, with n ∈ [−N, N] per axis. Each cell carries the normalized state
//! |p, ε⟩ = ε^{−d/2} ∫_cell |p′⟩ dp′, so a wavefunction has cell amplitudes
//! ⟨p, ε|ψ⟩ = ε^{−d/2} ∫_cell ψ̃(p′) dp′. Cells are half-open,
//! [ε(n − ½), ε(n + ½)) per axis.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{Adaptive, GaussLegendre};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Momentum,
    Position,
}

pub type CellIndex = [i64; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellGrid {
    kind: CellKind,
    epsilon: f64,
    dims: usize,
    half_range: i64,
}

impl CellGrid {
    pub fn new(kind: CellKind, epsilon: f64, dims: usize, half_range: i64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter { name: "epsilon", value: epsilon });
        }
        if dims != 1 && dims != 3 {
            return Err(Error::InvalidParameter { name: "dims", value: dims as f64 });
        }
        if half_range < 0 {
            return Err(Error::InvalidParameter { name: "N", value: half_range as f64 });
        }
        Ok(Self { kind, epsilon, dims, half_range })
    }

    /// Smallest symmetric grid whose cells cover [−extent, extent] on every axis.
    pub fn covering(kind: CellKind, epsilon: f64, dims: usize, extent: f64) -> Result<Self> {
        if !(extent >= 0.0) {
            return Err(Error::InvalidParameter { name: "extent", value: extent });
        }
        let n = libm::ceil(extent / epsilon - 0.5).max(0.0) as i64;
        Self::new(kind, epsilon, dims, n)
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn half_range(&self) -> i64 {
        self.half_range
    }

    /// Covered interval per axis, ε(−N − ½) to ε(N + ½).
    pub fn extent(&self) -> (f64, f64) {
        let e = self.epsilon * (self.half_range as f64 + 0.5);
        (-e, e)
    }

    pub fn len(&self) -> usize {
        let side = (2 * self.half_range + 1) as usize;
        side.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell indices in lexicographic order; unused axes are 0.
    pub fn indices(&self) -> Vec<CellIndex> {
        let r = -self.half_range..=self.half_range;
        if self.dims == 1 {
            return r.map(|n| [n, 0, 0]).collect();
        }
        let mut out = Vec::with_capacity(self.len());
        for i in r.clone() {
            for j in r.clone() {
                for k in r.clone() {
                    out.push([i, j, k]);
                }
            }
        }
        out
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        let n = self.half_range;
        cell.iter().take(self.dims).all(|c| (-n..=n).contains(c)) && cell.iter().skip(self.dims).all(|&c| c == 0)
    }

    pub fn center(&self, cell: CellIndex) -> [f64; 3] {
        let mut c = [0.0; 3];
        for a in 0..self.dims {
            c[a] = self.epsilon * cell[a] as f64;
        }
        c
    }

    /// Lower and upper corners of the cell.
    pub fn bounds(&self, cell: CellIndex) -> ([f64; 3], [f64; 3]) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for a in 0..self.dims {
            lo[a] = self.epsilon * (cell[a] as f64 - 0.5);
            hi[a] = self.epsilon * (cell[a] as f64 + 0.5);
        }
        (lo, hi)
    }

    /// Cell containing the point under the half-open convention.
    pub fn cell_of(&self, point: &[f64]) -> Option<CellIndex> {
        let mut idx = [0i64; 3];
        for a in 0..self.dims {
            idx[a] = libm::floor(point[a] / self.epsilon + 0.5) as i64;
        }
        self.contains(idx).then_some(idx)
    }
}

/// Per-cell Gauss–Legendre rule with panel doubling until two levels agree.
#[derive(Clone, Debug)]
pub struct CellQuadrature {
    rule: GaussLegendre,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for CellQuadrature {
    fn default() -> Self {
        Self::new(8)
    }
}

impl CellQuadrature {
    pub fn new(order: usize) -> Self {
        Self { rule: GaussLegendre::new(order), abs_tol: 1e-14, rel_tol: 1e-12, max_panels: 64 }
    }

    fn box_integral<F: Fn(&[f64]) -> Complex64>(&self, f: &F, lo: &[f64; 3], hi: &[f64; 3], dims: usize, panels: usize) -> Complex64 {
        let nodes = self.rule.nodes();
        let weights = self.rule.weights();
        let m = nodes.len() * panels;
        let mut xs: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        let mut ws: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for a in 0..dims {
            let h = (hi[a] - lo[a]) / panels as f64;
            for p in 0..panels {
                let c = lo[a] + h * (p as f64 + 0.5);
                for (&x, &w) in nodes.iter().zip(weights) {
                    xs[a].push(c + 0.5 * h * x);
                    ws[a].push(0.5 * h * w);
                }
            }
        }
        if dims == 1 {
            let terms: Vec<Complex64> = (0..m).map(|i| f(&[xs[0][i]]) * ws[0][i]).collect();
            return crate::sum::pairwise_complex(&terms);
        }
        let mut terms = Vec::with_capacity(m * m * m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    terms.push(f(&[xs[0][i], xs[1][j], xs[2][k]]) * (ws[0][i] * ws[1][j] * ws[2][k]));
                }
            }
        }
        crate::sum::pairwise_complex(&terms)
    }

    /// ∫ over the box, refined until successive panel counts agree.
    pub fn integrate<F: Fn(&[f64]) -> Complex64>(&self, f: &F, lo: &[f64; 3], hi: &[f64; 3], dims: usize) -> Result<Complex64> {
        let mut panels = 1;
        let mut prev = self.box_integral(f, lo, hi, dims, panels);
        let limit = if dims == 1 { self.max_panels } else { self.max_panels.min(8) };
        while panels < limit {
            panels *= 2;
            let next = self.box_integral(f, lo, hi, dims, panels);
            if (next - prev).norm() <= self.abs_tol.max(self.rel_tol * next.norm()) {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::NoConvergence { what: "cell quadrature" })
    }
}

/// ⟨p, ε|ψ⟩ = ε^{−d/2} ∫_cell ψ̃.
pub fn cell_amplitude<F: Fn(&[f64]) -> Complex64>(psi: &F, grid: &CellGrid, cell: CellIndex) -> Result<Complex64> {
    cell_amplitude_with(psi, grid, cell, &CellQuadrature::default())
}

pub fn cell_amplitude_with<F: Fn(&[f64]) -> Complex64>(
    psi: &F,
    grid: &CellGrid,
    cell: CellIndex,
    quad: &CellQuadrature,
) -> Result<Complex64> {
    if !grid.contains(cell) {
        return Err(Error::IndexOutOfRange { index: cell[0].unsigned_abs() as usize, len: grid.len() });
    }
    let (lo, hi) = grid.bounds(cell);
    let integral = quad.integrate(psi, &lo, &hi, grid.dims)?;
    Ok(integral * libm::pow(grid.epsilon, -0.5 * grid.dims as f64))
}

/// Amplitudes of a state on every cell of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CellAmplitudes {
    grid: CellGrid,
    indices: Vec<CellIndex>,
    values: Vec<Complex64>,
}

impl CellAmplitudes {
    pub fn compute<F: Fn(&[f64]) -> Complex64>(psi: &F, grid: &CellGrid) -> Result<Self> {
        let quad = CellQuadrature::default();
        let indices = grid.indices();
        let values = indices.iter().map(|&c| cell_amplitude_with(psi, grid, c, &quad)).collect::<Result<_>>()?;
        Ok(Self { grid: *grid, indices, values })
    }

    pub fn from_values(grid: CellGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(Self { grid, indices: grid.indices(), values })
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn indices(&self) -> &[CellIndex] {
        &self.indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Σ |amplitude|².
    pub fn captured_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        crate::sum::pairwise(&sq)
    }
}

/// Normalized indicator of an axis-aligned box, used to probe tiling conventions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub dims: usize,
}

impl CellBox {
    fn volume(&self) -> f64 {
        (0..self.dims).map(|a| self.hi[a] - self.lo[a]).product()
    }
}

/// Max |⟨i|j⟩ − δ_ij| over normalized box indicators; overlap is vol(i ∩ j)/√(vol i · vol j).
pub fn gram_deviation_boxes(boxes: &[CellBox]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, a) in boxes.iter().enumerate() {
        for (j, b) in boxes.iter().enumerate().skip(i) {
            let mut inter = 1.0;
            for ax in 0..a.dims {
                let w = a.hi[ax].min(b.hi[ax]) - a.lo[ax].max(b.lo[ax]);
                inter *= w.max(0.0);
            }
            let overlap = inter / libm::sqrt(a.volume() * b.volume());
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((overlap - target).abs());
        }
    }
    dev
}

/// Max deviation of the cell-state Gram matrix from the identity.
///
/// Overlaps are evaluated in index units, where the cell edges are exact.
pub fn gram_deviation(grid: &CellGrid) -> f64 {
    let boxes: Vec<CellBox> = grid
        .indices()
        .into_iter()
        .map(|c| {
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for a in 0..grid.dims {
                lo[a] = c[a] as f64 - 0.5;
                hi[a] = c[a] as f64 + 0.5;
            }
            CellBox { lo, hi, dims: grid.dims }
        })
        .collect();
    gram_deviation_boxes(&boxes)
}

/// 1 − Σ_cells |⟨p, ε|ψ⟩|².
pub fn completeness_residual<F: Fn(&[f64]) -> Complex64>(psi: &F, grid: &CellGrid) -> Result<f64> {
    Ok(1.0 - CellAmplitudes::compute(psi, grid)?.captured_norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridOperator {
    Momentum,
    Position,
}

/// Σ center · |amplitude|² / Σ |amplitude|², one component per axis.
pub fn discrete_expectation(amps: &CellAmplitudes, which: GridOperator) -> Result<Vec<f64>> {
    let expected = match which {
        GridOperator::Momentum => CellKind::Momentum,
        GridOperator::Position => CellKind::Position,
    };
    if amps.grid.kind != expected {
        return Err(Error::InvalidParameter { name: "grid kind", value: 0.0 });
    }
    let total = amps.captured_norm();
    if !(total > 0.0) {
        return Err(Error::NotNormalized { what: "captured norm", value: total });
    }
    let dims = amps.grid.dims;
    Ok((0..dims)
        .map(|a| {
            let terms: Vec<f64> =
                amps.indices.iter().zip(&amps.values).map(|(&c, z)| amps.grid.center(c)[a] * z.norm_sqr()).collect();
            crate::sum::pairwise(&terms) / total
        })
        .collect())
}

/// Gaussian test function φ̃_ε(p, p′) = π^{−3/4} ε^{−3/2} exp(−|p − p′|²/2ε²).
pub fn gaussian_test_function(epsilon: f64, p: &[f64; 3], q: &[f64; 3]) -> f64 {
    let r2: f64 = (0..3).map(|a| (p[a] - q[a]) * (p[a] - q[a])).sum();
    libm::pow(core::f64::consts::PI, -0.75) * libm::pow(epsilon, -1.5) * libm::exp(-r2 / (2.0 * epsilon * epsilon))
}

/// (∫|φ̃_ε|², ∫φ̃_ε) by quadrature; the second is the weight of |p⟩ in the smeared ket.
pub fn gaussian_test_state_norm(epsilon: f64, p: &[f64; 3]) -> Result<(f64, f64)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter { name: "epsilon", value: epsilon });
    }
    // The function factorizes over axes, so each 3D integral is a cube of 1D ones.
    let q = Adaptive::default();
    let half = 12.0 * epsilon;
    let axis = |a: usize, power: i32| -> Result<f64> {
        let f = |x: f64| {
            let one_d = libm::pow(core::f64::consts::PI, -0.25)
                * libm::pow(epsilon, -0.5)
                * libm::exp(-(x - p[a]) * (x - p[a]) / (2.0 * epsilon * epsilon));
            libm::pow(one_d, power as f64)
        };
        q.integrate(p[a] - half, p[a] + half, f)
    };
    let mut norm = 1.0;
    let mut scale = 1.0;
    for a in 0..3 {
        norm *= axis(a, 2)?;
        scale *= axis(a, 1)?;
    }
    Ok((norm, scale))
}
