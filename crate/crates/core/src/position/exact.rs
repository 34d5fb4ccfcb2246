use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use super::GaussianPacket;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::rhs::{CellGrid, CellKind};
use crate::survival::{q_factor, SurvivalDistribution};

/// Momentum standard deviations the grid must cover on each side of p₀.
pub const COVERAGE_WIDTHS: f64 = 6.0;

/// Survival-averaged position density of a Gaussian packet on a momentum grid.
///
/// P(x) = (2πħ)^{−1} ε² Σ_jk φ_j φ_k q(ω_j − ω_k) e^{i(p_j − p_k)x/ħ}
/// with φ and p sampled at cell centers. The kernel A_jk = φ_j φ_k q_jk is
/// built once, so each x costs one quadratic form.
#[derive(Clone, Debug)]
pub struct ExactPositionDensity {
    momenta: Vec<f64>,
    kernel: ComplexMatrix,
    prefactor: f64,
    hbar: f64,
}

impl ExactPositionDensity {
    pub fn new(pk: &GaussianPacket, dist: &SurvivalDistribution, grid: &CellGrid) -> Result<Self> {
        if grid.kind() != CellKind::Momentum || grid.dims() != 1 {
            return Err(Error::InvalidParameter { name: "grid", value: grid.dims() as f64 });
        }
        let (lo, hi) = grid.extent();
        let b = pk.b();
        if hi < pk.p0() + COVERAGE_WIDTHS * b || lo > pk.p0() - COVERAGE_WIDTHS * b {
            let tail = 0.5 * libm::erfc((hi - pk.p0()) / b) + 0.5 * libm::erfc((pk.p0() - lo) / b);
            return Err(Error::InsufficientCoverage { tail_mass: tail });
        }
        let momenta: Vec<f64> = grid.indices().iter().map(|c| grid.center(*c)[0]).collect();
        let phi: Vec<f64> = momenta.iter().map(|&p| pk.momentum_amplitude(p)).collect();
        let omega: Vec<f64> = momenta.iter().map(|&p| pk.omega(p)).collect();
        let kernel = ComplexMatrix::from_fn(momenta.len(), |j, k| q_factor(dist, omega[j] - omega[k]) * (phi[j] * phi[k]));
        let eps = grid.epsilon();
        Ok(Self { momenta, kernel, prefactor: eps * eps / (2.0 * PI * pk.hbar()), hbar: pk.hbar() })
    }

    /// Complex value of the double sum; the imaginary part is rounding residue.
    pub fn eval_complex(&self, x: f64) -> Complex64 {
        let u: Vec<Complex64> = self.momenta.iter().map(|&p| Complex64::from_polar(1.0, p * x / self.hbar)).collect();
        let n = u.len();
        let terms: Vec<Complex64> = (0..n)
            .map(|j| {
                let row = self.kernel.row(j);
                let w = row.iter().zip(&u).fold(Complex64::new(0.0, 0.0), |acc, (a, uk)| acc + a * uk.conj());
                u[j] * w
            })
            .collect();
        crate::sum::pairwise_complex(&terms) * self.prefactor
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_complex(x).re
    }
}

/// One-shot evaluation of [`ExactPositionDensity`].
pub fn survival_position_exact(pk: &GaussianPacket, dist: &SurvivalDistribution, grid: &CellGrid, x: f64) -> Result<f64> {
    Ok(ExactPositionDensity::new(pk, dist, grid)?.eval(x))
}
