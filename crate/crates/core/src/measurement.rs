//! Projective measurement of discrete-spectrum observables.
//!
//! An observable is stored as distinct eigenvalues λ_α, each with an
//! orthonormal block of g_α eigenvectors |u_α^s⟩. A measurement may rotate
//! each degenerate block by a unitary Λ_α, so the detection operator is
//! M_α = Σ_s |ũ_α^s⟩⟨u_α^s| with ũ_α^s = Σ_n Λ_α^{sn} u_α^n.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, gram_schmidt, inner, orthonormality_defect, ComplexMatrix, ComplexVector, DensityMatrix, Hamiltonian,
};
use crate::DEFAULT_TOL;

/// Input eigenvectors must be orthonormal to this level before they are polished.
pub const ORTHONORMAL_INPUT_TOL: f64 = 1e-6;

/// Observable in spectral form.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralObservable {
    eigenvalues: Vec<f64>,
    blocks: Vec<Vec<ComplexVector>>,
    dim: usize,
    tol: f64,
}

impl SpectralObservable {
    /// Validates the blocks and re-orthonormalizes them with modified Gram–Schmidt.
    pub fn new(eigenvalues: Vec<f64>, mut blocks: Vec<Vec<ComplexVector>>) -> Result<Self> {
        if eigenvalues.len() != blocks.len() {
            return Err(Error::DimensionMismatch { expected: eigenvalues.len(), found: blocks.len() });
        }
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParameter { name: "number of outcomes", value: 0.0 });
        }
        for (i, &a) in eigenvalues.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::InvalidParameter { name: "eigenvalue", value: a });
            }
            if eigenvalues[..i].contains(&a) {
                return Err(Error::DuplicateEigenvalue { value: a });
            }
        }
        let dim: usize = blocks.iter().map(Vec::len).sum();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidParameter { name: "block degeneracy", value: 0.0 });
            }
            for v in b {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
                }
            }
        }
        let mut all: Vec<ComplexVector> = blocks.iter().flatten().cloned().collect();
        let defect = orthonormality_defect(&all);
        if defect > ORTHONORMAL_INPUT_TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        gram_schmidt(&mut all)?;
        let mut it = all.into_iter();
        for b in blocks.iter_mut() {
            for v in b.iter_mut() {
                *v = it.next().expect("vector count is preserved");
            }
        }
        Ok(Self { eigenvalues, blocks, dim, tol: DEFAULT_TOL })
    }

    /// Diagonal observable in the standard basis; equal entries share a block.
    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut eig: Vec<f64> = Vec::new();
        let mut blocks: Vec<Vec<ComplexVector>> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            let mut e = alloc::vec![Complex64::new(0.0, 0.0); n];
            e[i] = Complex64::new(1.0, 0.0);
            match eig.iter().position(|&x| x == v) {
                Some(k) => blocks[k].push(e),
                None => {
                    eig.push(v);
                    blocks.push(alloc::vec![e]);
                }
            }
        }
        Self::new(eig, blocks)
    }

    /// Spectral decomposition of a Hermitian matrix.
    ///
    /// Eigenvalues closer than `cluster_tol` (relative to the spectral scale) form one block.
    pub fn from_hermitian(a: &ComplexMatrix, cluster_tol: f64) -> Result<Self> {
        let defect = a.hermiticity_defect();
        if defect > DEFAULT_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let e = eigh(a);
        let scale = e.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut eig: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<ComplexVector>> = Vec::new();
        for (k, &l) in e.values.iter().enumerate() {
            let col = e.vectors.column(k);
            match eig.last() {
                Some(&prev) if (l - prev).abs() <= cluster_tol * scale => {
                    let c = counts.last_mut().expect("nonempty");
                    *eig.last_mut().expect("nonempty") = (prev * *c as f64 + l) / (*c as f64 + 1.0);
                    *c += 1;
                    blocks.last_mut().expect("nonempty").push(col);
                }
                _ => {
                    eig.push(l);
                    counts.push(1);
                    blocks.push(alloc::vec![col]);
                }
            }
        }
        Self::new(eig, blocks)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_outcomes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn degeneracies(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn block(&self, alpha: usize) -> Result<&[ComplexVector]> {
        self.blocks
            .get(alpha)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange { index: alpha, len: self.blocks.len() })
    }

    /// Σ_α λ_α P_α
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for (alpha, &l) in self.eigenvalues.iter().enumerate() {
            for u in &self.blocks[alpha] {
                m = &m + &ComplexMatrix::outer(u, u).scale_real(l);
            }
        }
        m
    }
}

/// Per-block unitary rotations Λ_α of the degenerate eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DegenerateRotation {
    blocks: Vec<ComplexMatrix>,
}

impl DegenerateRotation {
    pub fn new(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(blocks, DEFAULT_TOL)
    }

    pub fn with_tolerance(blocks: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        for b in &blocks {
            let defect = b.unitarity_defect();
            if defect > tol {
                return Err(Error::NotUnitary { defect });
            }
        }
        Ok(Self { blocks })
    }

    /// Λ_α = I for every block of `obs`.
    pub fn identity(obs: &SpectralObservable) -> Self {
        Self { blocks: obs.degeneracies().into_iter().map(ComplexMatrix::identity).collect() }
    }

    pub fn block(&self, alpha: usize) -> Result<&ComplexMatrix> {
        self.blocks.get(alpha).ok_or(Error::IndexOutOfRange { index: alpha, len: self.blocks.len() })
    }

    /// The rotated eigenvectors ũ_α^s = Σ_n Λ_α^{sn} u_α^n.
    pub fn rotated_vectors(&self, obs: &SpectralObservable, alpha: usize) -> Result<Vec<ComplexVector>> {
        let u = obs.block(alpha)?;
        let lam = self.block(alpha)?;
        lam.require_dim(u.len())?;
        Ok((0..u.len())
            .map(|s| {
                let mut v = alloc::vec![Complex64::new(0.0, 0.0); obs.dim()];
                for (n, un) in u.iter().enumerate() {
                    let c = lam[(s, n)];
                    for (x, &y) in v.iter_mut().zip(un) {
                        *x += c * y;
                    }
                }
                v
            })
            .collect())
    }

    fn check_against(&self, obs: &SpectralObservable) -> Result<()> {
        if self.blocks.len() != obs.num_outcomes() {
            return Err(Error::DimensionMismatch { expected: obs.num_outcomes(), found: self.blocks.len() });
        }
        for (b, g) in self.blocks.iter().zip(obs.degeneracies()) {
            b.require_dim(g)?;
        }
        Ok(())
    }
}

/// P_α = Σ_s |u_α^s⟩⟨u_α^s|
pub fn build_projector(obs: &SpectralObservable, alpha: usize) -> Result<ComplexMatrix> {
    let block = obs.block(alpha)?;
    Ok(ComplexMatrix::from_fn(obs.dim(), |i, j| {
        block.iter().fold(Complex64::new(0.0, 0.0), |acc, u| acc + u[i] * u[j].conj())
    }))
}

/// Tr(ρ P_α) for every outcome.
///
/// Values in (−tol, 0) are clamped to zero; anything lower is an error.
pub fn measurement_probabilities(rho: &DensityMatrix, obs: &SpectralObservable) -> Result<Vec<f64>> {
    probabilities_unchecked(rho.matrix(), obs)
}

pub(crate) fn probabilities_unchecked(rho: &ComplexMatrix, obs: &SpectralObservable) -> Result<Vec<f64>> {
    rho.require_dim(obs.dim())?;
    let mut out = Vec::with_capacity(obs.num_outcomes());
    for (alpha, block) in obs.blocks.iter().enumerate() {
        let p: f64 = block.iter().map(|u| inner(u, &rho.mul_vec(u)).re).sum();
        if p < -obs.tol {
            return Err(Error::NegativeProbability { outcome: alpha, value: p });
        }
        out.push(p.max(0.0));
    }
    Ok(out)
}

/// M_α = Σ_s |ũ_α^s⟩⟨u_α^s|
pub fn detection_operator(obs: &SpectralObservable, rot: &DegenerateRotation, alpha: usize) -> Result<ComplexMatrix> {
    rot.check_against(obs)?;
    let u = obs.block(alpha)?;
    let ut = rot.rotated_vectors(obs, alpha)?;
    Ok(ComplexMatrix::from_fn(obs.dim(), |i, j| {
        u.iter().zip(&ut).fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + b[i] * a[j].conj())
    }))
}

fn check_propagator(u_q: &ComplexMatrix, obs: &SpectralObservable) -> Result<()> {
    u_q.require_dim(obs.dim())?;
    let defect = u_q.unitarity_defect();
    if defect > obs.tol {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// Unnormalized σ_α = U M_α ρ M_α† U†.
fn conditioned(
    rho: &ComplexMatrix,
    obs: &SpectralObservable,
    rot: &DegenerateRotation,
    alpha: usize,
    u_q: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let um = u_q.matmul(&detection_operator(obs, rot, alpha)?);
    Ok(rho.conjugate_by(&um))
}

/// Outcome probability and the normalized subensemble state U M_α ρ M_α† U† / P_α.
pub fn post_measurement_state(
    rho: &DensityMatrix,
    obs: &SpectralObservable,
    rot: &DegenerateRotation,
    alpha: usize,
    u_q: &ComplexMatrix,
) -> Result<(f64, DensityMatrix)> {
    check_propagator(u_q, obs)?;
    let probs = measurement_probabilities(rho, obs)?;
    let p = *probs.get(alpha).ok_or(Error::IndexOutOfRange { index: alpha, len: probs.len() })?;
    if p <= obs.tol {
        return Err(Error::ZeroProbability { outcome: alpha, value: p });
    }
    let sigma = conditioned(rho.matrix(), obs, rot, alpha, u_q)?;
    Ok((p, DensityMatrix::from_raw(sigma.scale_real(1.0 / p).hermitian_part())))
}

/// Full-ensemble state Σ_α U M_α ρ M_α† U†.
pub fn ensemble_after_measurement(
    rho: &DensityMatrix,
    obs: &SpectralObservable,
    rot: &DegenerateRotation,
    u_q: &ComplexMatrix,
) -> Result<DensityMatrix> {
    rho.matrix().require_dim(obs.dim())?;
    check_propagator(u_q, obs)?;
    let mut acc = ComplexMatrix::zeros(obs.dim());
    for alpha in 0..obs.num_outcomes() {
        acc = &acc + &conditioned(rho.matrix(), obs, rot, alpha, u_q)?;
    }
    Ok(DensityMatrix::from_raw(acc.hermitian_part()))
}

/// True iff ‖AB − BA‖_max ≤ tol.
pub fn are_compatible(a: &SpectralObservable, b: &SpectralObservable, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.matrix().commutator(&b.matrix()).max_abs() <= tol)
}

/// Free evolution ρ(t) = Σ_nm ρ_nm e^{−i(ω_n−ω_m)Δt} |φ_n⟩⟨φ_m|.
pub fn evolve_density(rho: &DensityMatrix, h: &Hamiltonian, dt: f64, hbar: f64) -> Result<DensityMatrix> {
    rho.matrix().require_dim(h.dim())?;
    let out = h.modulate(rho.matrix(), |en, em| Complex64::from_polar(1.0, -(en - em) * dt / hbar));
    Ok(DensityMatrix::from_raw(out.hermitian_part()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_z() -> SpectralObservable {
        SpectralObservable::from_diagonal(&[1.0, -1.0]).unwrap()
    }

    fn sigma_x() -> SpectralObservable {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        SpectralObservable::new(vec![1.0, -1.0], vec![vec![vec![c(r, 0.0), c(r, 0.0)]], vec![vec![c(r, 0.0), c(-r, 0.0)]]])
            .unwrap()
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn projector_of_sigma_z() {
        let p = build_projector(&sigma_z(), 0).unwrap();
        assert_eq!(p, ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
        assert!(matches!(build_projector(&sigma_z(), 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn single_block_projector_is_identity() {
        let obs = SpectralObservable::from_diagonal(&[3.0, 3.0, 3.0]).unwrap();
        assert_eq!(build_projector(&obs, 0).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn equal_superposition_is_half_half() {
        let p = measurement_probabilities(&plus(), &sigma_z()).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn state_inside_eigenspace() {
        let obs = SpectralObservable::from_diagonal(&[1.0, 1.0, 2.0]).unwrap();
        let rho = DensityMatrix::new(build_projector(&obs, 0).unwrap().scale_real(0.5)).unwrap();
        assert_eq!(measurement_probabilities(&rho, &obs).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn identity_rotation_gives_projector() {
        let obs = SpectralObservable::from_diagonal(&[1.0, 1.0, 2.0]).unwrap();
        let rot = DegenerateRotation::identity(&obs);
        for a in 0..2 {
            let m = detection_operator(&obs, &rot, a).unwrap();
            assert!(m.max_abs_diff(&build_projector(&obs, a).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn phase_cancels_in_m_dagger_m() {
        let obs = sigma_x();
        let rot = DegenerateRotation::new(vec![
            ComplexMatrix::from_rows(&[vec![Complex64::from_polar(1.0, 0.7)]]).unwrap(),
            ComplexMatrix::from_rows(&[vec![Complex64::from_polar(1.0, -2.1)]]).unwrap(),
        ])
        .unwrap();
        for a in 0..2 {
            let m = detection_operator(&obs, &rot, a).unwrap();
            let p = build_projector(&obs, a).unwrap();
            assert!(m.adjoint().matmul(&m).max_abs_diff(&p) < 1e-15);
        }
    }

    #[test]
    fn collapse_to_eigenstate() {
        let obs = sigma_x();
        let rho = DensityMatrix::pure(&[c(1.0, 0.0), c(0.3, 0.4)]).unwrap();
        let rot = DegenerateRotation::identity(&obs);
        let (p, post) = post_measurement_state(&rho, &obs, &rot, 1, &ComplexMatrix::identity(2)).unwrap();
        assert!(p > 0.0);
        assert!(post.matrix().max_abs_diff(&build_projector(&obs, 1).unwrap()) < 1e-15);
    }

    #[test]
    fn zero_probability_outcome_is_rejected() {
        let rho = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let obs = sigma_z();
        let err = post_measurement_state(&rho, &obs, &DegenerateRotation::identity(&obs), 1, &ComplexMatrix::identity(2));
        assert!(matches!(err, Err(Error::ZeroProbability { outcome: 1, .. })));
    }

    #[test]
    fn full_decoherence_of_superposition() {
        let obs = sigma_z();
        let out = ensemble_after_measurement(&plus(), &obs, &DegenerateRotation::identity(&obs), &ComplexMatrix::identity(2))
            .unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn compatibility_of_pauli_pair() {
        assert!(are_compatible(&sigma_z(), &sigma_z(), 1e-12).unwrap());
        assert!(!are_compatible(&sigma_z(), &sigma_x(), 1e-12).unwrap());
    }

    #[test]
    fn evolution_identity_cases() {
        let h = Hamiltonian::new(ComplexMatrix::from_real_diagonal(&[0.0, 1.0])).unwrap();
        let rho = plus();
        assert!(evolve_density(&rho, &h, 0.0, 1.0).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let stat = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.3, 0.7])).unwrap();
        assert!(evolve_density(&stat, &h, 3.7, 1.0).unwrap().matrix().max_abs_diff(stat.matrix()) < 1e-15);
    }

    #[test]
    fn rejects_invalid_observables() {
        assert!(matches!(
            SpectralObservable::new(vec![1.0, 1.0], vec![vec![vec![c(1.0, 0.0), c(0.0, 0.0)]], vec![vec![c(0.0, 0.0), c(1.0, 0.0)]]]),
            Err(Error::DuplicateEigenvalue { .. })
        ));
        assert!(matches!(
            SpectralObservable::new(vec![1.0, 2.0], vec![vec![vec![c(1.0, 0.0), c(0.0, 0.0)]], vec![vec![c(1.0, 0.0), c(1.0, 0.0)]]]),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn from_hermitian_groups_degenerate_levels() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.5)],
            vec![c(0.0, 0.0), c(0.0, -0.5), c(0.5, 0.0)],
        ])
        .unwrap();
        let obs = SpectralObservable::from_hermitian(&a, 1e-9).unwrap();
        assert_eq!(obs.degeneracies(), vec![1, 2]);
        assert!(obs.matrix().max_abs_diff(&a) < 1e-14);
    }
}
