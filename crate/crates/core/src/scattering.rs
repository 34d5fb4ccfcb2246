//! Finite-dimensional wave operators, S-matrix and Lippmann–Schwinger states.
//!
//! With H = H₀ + H_I and damping ν > 0 the in/out states of a free eigenstate
//! |Φ_λ⟩ (H₀|Φ_λ⟩ = E_λ|Φ_λ⟩) are resolvent solves:
//!
//! Ω⁺|Φ_λ⟩ =  iħν (E_λ − H + iħν)^{−1} |Φ_λ⟩
//! Ω⁻|Φ_λ⟩ = −iħν (E_λ − H − iħν)^{−1} |Φ_λ⟩
//!
//! and S = Ω⁻†Ω⁺.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{norm, solve, ComplexMatrix, ComplexVector, Hamiltonian};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug)]
pub struct ScatteringModel {
    h0: Hamiltonian,
    hi: ComplexMatrix,
    h: Hamiltonian,
    nu: f64,
    hbar: f64,
}

impl ScatteringModel {
    pub fn new(h0: ComplexMatrix, hi: ComplexMatrix, nu: f64, hbar: f64) -> Result<Self> {
        hi.require_dim(h0.dim())?;
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter { name: "nu", value: nu });
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter { name: "hbar", value: hbar });
        }
        let h0 = Hamiltonian::new(h0)?;
        let defect = hi.hermiticity_defect();
        if defect > crate::DEFAULT_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let hi = hi.hermitian_part();
        let h = Hamiltonian::new(h0.matrix() + &hi)?;
        Ok(Self { h0, hi, h, nu, hbar })
    }

    /// ν = 1e−3 · (spectral spread of H)/ħ.
    pub fn with_default_nu(h0: ComplexMatrix, hi: ComplexMatrix, hbar: f64) -> Result<Self> {
        let probe = Self::new(h0, hi, 0.0, hbar)?;
        let nu = 1e-3 * probe.h.spread() / hbar;
        Ok(probe.with_nu(nu))
    }

    /// Same operators with a different damping.
    pub fn with_nu(&self, nu: f64) -> Self {
        Self { nu, ..self.clone() }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn free(&self) -> &Hamiltonian {
        &self.h0
    }

    pub fn full(&self) -> &Hamiltonian {
        &self.h
    }

    pub fn interaction(&self) -> &ComplexMatrix {
        &self.hi
    }

    /// E_λ in ascending order.
    pub fn energies(&self) -> &[f64] {
        self.h0.energies()
    }

    /// |Φ_λ⟩.
    pub fn free_state(&self, lambda: usize) -> Result<ComplexVector> {
        self.check_index(lambda)?;
        Ok(self.h0.eigenvectors().column(lambda))
    }

    fn check_index(&self, lambda: usize) -> Result<()> {
        if lambda >= self.dim() {
            return Err(Error::IndexOutOfRange { index: lambda, len: self.dim() });
        }
        Ok(())
    }

    fn resolvent_state(&self, lambda: usize, sign: f64) -> Result<ComplexVector> {
        let phi = self.free_state(lambda)?;
        let e = self.energies()[lambda];
        let shift = I * (sign * self.hbar * self.nu);
        let n = self.dim();
        let hm = self.h.matrix();
        let a = ComplexMatrix::from_fn(n, |i, j| if i == j { e + shift - hm[(i, j)] } else { -hm[(i, j)] });
        let rhs: Vec<Complex64> = phi.iter().map(|z| z * shift).collect();
        solve(&a, &rhs)
    }
}

/// |Ψ_λ⟩ = iħν (E_λ − H + iħν)^{−1} |Φ_λ⟩.
pub fn scattered_state(model: &ScatteringModel, lambda: usize) -> Result<ComplexVector> {
    model.resolvent_state(lambda, 1.0)
}

/// Ω⁻|Φ_λ⟩ = −iħν (E_λ − H − iħν)^{−1} |Φ_λ⟩.
pub fn outgoing_state(model: &ScatteringModel, lambda: usize) -> Result<ComplexVector> {
    model.resolvent_state(lambda, -1.0)
}

#[derive(Clone, Debug)]
pub struct LsSolution {
    pub state: ComplexVector,
    pub iterations: usize,
    pub residual: f64,
}

/// Fixed-point iteration |Ψ⟩ = |Φ_λ⟩ + (E_λ − H₀ + iħν)^{−1} H_I |Ψ⟩ in the H₀ eigenbasis.
///
/// Stops when successive iterates differ by at most `tol`; reports divergence
/// when that difference grows three times in a row.
pub fn lippmann_schwinger_iterate(model: &ScatteringModel, lambda: usize, max_iter: usize, tol: f64) -> Result<LsSolution> {
    model.check_index(lambda)?;
    let n = model.dim();
    let e = model.energies();
    let v = model.h0.to_eigenbasis(&model.hi);
    let g0: Vec<Complex64> = e.iter().map(|&ek| (e[lambda] - ek + I * (model.hbar * model.nu)).inv()).collect();
    if g0.iter().any(|z| !z.is_finite()) {
        return Err(Error::Singular);
    }
    let mut psi = alloc::vec![Complex64::new(0.0, 0.0); n];
    psi[lambda] = Complex64::new(1.0, 0.0);
    let mut history: Vec<f64> = Vec::new();
    for it in 1..=max_iter {
        let vpsi = v.mul_vec(&psi);
        let mut next: Vec<Complex64> = vpsi.iter().zip(&g0).map(|(a, g)| a * g).collect();
        next[lambda] += Complex64::new(1.0, 0.0);
        let residual = norm(&next.iter().zip(&psi).map(|(a, b)| a - b).collect::<Vec<_>>());
        psi = next;
        if residual <= tol {
            let state = model.h0.eigenvectors().mul_vec(&psi);
            return Ok(LsSolution { state, iterations: it, residual });
        }
        history.push(residual);
        let k = history.len();
        if k >= 4 && history[k - 1] > history[k - 2] && history[k - 2] > history[k - 3] && history[k - 3] > history[k - 4] {
            return Err(Error::Divergence { iteration: it, residual });
        }
    }
    Err(Error::NoConvergence { what: "Lippmann-Schwinger iteration" })
}

#[derive(Clone, Debug)]
pub struct WaveOperators {
    pub omega_plus: ComplexMatrix,
    pub omega_minus: ComplexMatrix,
    pub s: ComplexMatrix,
    /// max |Ω⁺†Ω⁺ − I|
    pub isometry_defect_plus: f64,
    /// max |Ω⁻†Ω⁻ − I|
    pub isometry_defect_minus: f64,
    /// max(|S†S − I|, |SS† − I|)
    pub unitarity_defect: f64,
    /// H eigenvectors carrying less than half their weight in range Ω⁺.
    pub bound_states: usize,
    /// max |Ω⁺Ω⁺† − (I − R)| with R the projector on those eigenvectors.
    pub range_defect: f64,
}

impl WaveOperators {
    /// S expressed in the H₀ eigenbasis, S_μλ = ⟨Φ_μ|S|Φ_λ⟩.
    pub fn s_free_basis(&self, model: &ScatteringModel) -> ComplexMatrix {
        model.h0.to_eigenbasis(&self.s)
    }
}

/// Ω± column by column, S = Ω⁻†Ω⁺ and their defects.
pub fn wave_operators_and_s_matrix(model: &ScatteringModel) -> Result<WaveOperators> {
    let n = model.dim();
    let plus: Vec<ComplexVector> = (0..n).map(|l| scattered_state(model, l)).collect::<Result<_>>()?;
    let minus: Vec<ComplexVector> = (0..n).map(|l| outgoing_state(model, l)).collect::<Result<_>>()?;
    let vdag = model.h0.eigenvectors().adjoint();
    let omega_plus = ComplexMatrix::from_columns(&plus)?.matmul(&vdag);
    let omega_minus = ComplexMatrix::from_columns(&minus)?.matmul(&vdag);
    let s = omega_minus.adjoint().matmul(&omega_plus);

    let range = omega_plus.matmul(&omega_plus.adjoint());
    let chi = model.h.eigenvectors();
    let mut r = ComplexMatrix::zeros(n);
    let mut bound_states = 0;
    for j in 0..n {
        let c = chi.column(j);
        let w = crate::linalg::inner(&c, &range.mul_vec(&c)).re;
        if w < 0.5 {
            bound_states += 1;
            r = &r + &ComplexMatrix::outer(&c, &c);
        }
    }
    let range_defect = range.max_abs_diff(&(&ComplexMatrix::identity(n) - &r));
    Ok(WaveOperators {
        isometry_defect_plus: omega_plus.isometry_defect(),
        isometry_defect_minus: omega_minus.isometry_defect(),
        unitarity_defect: s.unitarity_defect(),
        omega_plus,
        omega_minus,
        s,
        bound_states,
        range_defect,
    })
}

/// U₀(t′) Ω⁻† U(t₀) Ω⁺.
pub fn conditional_propagator(model: &ScatteringModel, t_prime: f64, t0: f64) -> Result<ComplexMatrix> {
    if !(t_prime >= 0.0) {
        return Err(Error::InvalidParameter { name: "t'", value: t_prime });
    }
    if !(t0 >= 0.0) {
        return Err(Error::InvalidParameter { name: "t0", value: t0 });
    }
    let w = wave_operators_and_s_matrix(model)?;
    Ok(model
        .h0
        .propagator(t_prime, model.hbar)
        .matmul(&w.omega_minus.adjoint())
        .matmul(&model.h.propagator(t0, model.hbar))
        .matmul(&w.omega_plus))
}

#[derive(Clone, Debug)]
pub struct Transition {
    /// f_μλ(t) for every μ.
    pub amplitudes: ComplexVector,
    /// Σ_μ |f_μλ(t)|², equal to ‖Ψ_λ‖².
    pub norm_sum: f64,
    /// 1 + Im T_λλ/(ħν) with T_μλ = ⟨Φ_μ|H_I|Ψ_λ⟩.
    pub n_lambda: f64,
    /// T_μλ for every μ.
    pub t_matrix_column: ComplexVector,
}

/// f_μλ(t) = e^{iE_μ t/ħ} ⟨Φ_μ|e^{−iHt/ħ}|Ψ_λ⟩ and the normalization N_λ.
pub fn transition_amplitudes(model: &ScatteringModel, lambda: usize, t: f64) -> Result<Transition> {
    let psi = scattered_state(model, lambda)?;
    let evolved = model.h.propagator(t, model.hbar).mul_vec(&psi);
    let vdag = model.h0.eigenvectors().adjoint();
    let in_free = vdag.mul_vec(&evolved);
    let e = model.energies();
    let amplitudes: ComplexVector =
        in_free.iter().zip(e).map(|(z, &em)| z * Complex64::from_polar(1.0, em * t / model.hbar)).collect();
    let norm_sum = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    let t_matrix_column = vdag.mul_vec(&model.hi.mul_vec(&psi));
    let n_lambda = 1.0 + t_matrix_column[lambda].im / (model.hbar * model.nu);
    Ok(Transition { amplitudes, norm_sum, n_lambda, t_matrix_column })
}

/// A discrete level at E = 0 coupled to a uniform band, with coupling g·ε^{3/2}.
///
/// The band has `levels` states at E_k = δ(k + ½) − levels·δ/2. In the regime
/// δ ≪ ħν ≪ band width the level's normalization follows
/// N − 1 ≈ −κ/(1 + κ), κ = π g² ε³ / (δ ħν).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandFamily {
    pub levels: usize,
    pub spacing: f64,
    pub coupling: f64,
    pub hbar: f64,
}

impl Default for BandFamily {
    fn default() -> Self {
        Self { levels: 120, spacing: 0.02, coupling: 0.08, hbar: 1.0 }
    }
}

impl BandFamily {
    /// The band size must be even so no band level sits at E = 0.
    pub fn model(&self, epsilon: f64, nu: f64) -> Result<ScatteringModel> {
        if self.levels % 2 != 0 || self.levels == 0 {
            return Err(Error::InvalidParameter { name: "band levels", value: self.levels as f64 });
        }
        let n = self.levels + 1;
        let mut e = alloc::vec![0.0; n];
        for k in 0..self.levels {
            e[k + 1] = self.spacing * (k as f64 + 0.5) - self.spacing * self.levels as f64 / 2.0;
        }
        let v = Complex64::new(self.coupling * libm::pow(epsilon, 1.5), 0.0);
        let hi = ComplexMatrix::from_fn(n, |i, j| if (i == 0) != (j == 0) { v } else { Complex64::new(0.0, 0.0) });
        ScatteringModel::new(ComplexMatrix::from_real_diagonal(&e), hi, nu, self.hbar)
    }

    /// Index of the discrete level after H₀ eigenvalues are sorted.
    pub fn level_index(&self) -> usize {
        self.levels / 2
    }

    pub fn kappa(&self, epsilon: f64, nu: f64) -> f64 {
        core::f64::consts::PI * self.coupling * self.coupling * libm::pow(epsilon, 3.0) / (self.spacing * self.hbar * nu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeRow {
    pub epsilon: f64,
    pub nu: f64,
    pub ratio: f64,
    pub n_lambda: f64,
    pub deviation: f64,
}

/// N_λ of the discrete level over every (ε, ν) pair.
pub fn double_limit_probe(family: &BandFamily, epsilons: &[f64], nus: &[f64]) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::with_capacity(epsilons.len() * nus.len());
    for &eps in epsilons {
        for &nu in nus {
            let model = family.model(eps, nu)?;
            let tr = transition_amplitudes(&model, family.level_index(), 0.0)?;
            rows.push(ProbeRow {
                epsilon: eps,
                nu,
                ratio: libm::pow(eps, 3.0) / nu,
                n_lambda: tr.n_lambda,
                deviation: (tr.n_lambda - 1.0).abs(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn two_level(g: f64, nu: f64) -> ScatteringModel {
        let h0 = ComplexMatrix::from_real_diagonal(&[-0.5, 0.5]);
        let hi = ComplexMatrix::from_rows(&[vec![c(0.0), c(g)], vec![c(g), c(0.0)]]).unwrap();
        ScatteringModel::new(h0, hi, nu, 1.0).unwrap()
    }

    #[test]
    fn free_model_is_trivial() {
        let m = two_level(0.0, 0.1);
        let w = wave_operators_and_s_matrix(&m).unwrap();
        assert!(w.s.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(w.omega_plus.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let ls = lippmann_schwinger_iterate(&m, 0, 10, 1e-14).unwrap();
        assert_eq!(ls.iterations, 1);
    }

    #[test]
    fn resolvent_residual() {
        let m = two_level(0.3, 0.05);
        let psi = scattered_state(&m, 1).unwrap();
        let e = m.energies()[1];
        let shift = I * 0.05;
        let lhs: Vec<Complex64> = (0..2)
            .map(|i| (e + shift) * psi[i] - m.full().matrix().row(i).iter().zip(&psi).map(|(a, b)| a * b).sum::<Complex64>())
            .collect();
        let phi = m.free_state(1).unwrap();
        for i in 0..2 {
            assert!((lhs[i] - shift * phi[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn norm_identity() {
        let m = two_level(0.2, 0.3);
        let t = transition_amplitudes(&m, 0, 0.0).unwrap();
        assert!((t.norm_sum - t.n_lambda).abs() < 1e-13);
    }

    #[test]
    fn strong_coupling_diverges() {
        let m = two_level(2.0, 0.01);
        assert!(matches!(lippmann_schwinger_iterate(&m, 0, 200, 1e-12), Err(Error::Divergence { .. })));
    }

    #[test]
    fn exact_resonance_is_singular() {
        let m = two_level(0.0, 0.0);
        assert_eq!(scattered_state(&m, 0).unwrap_err(), Error::Singular);
    }
}
