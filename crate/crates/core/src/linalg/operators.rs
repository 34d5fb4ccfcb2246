use num_complex::Complex64;

use super::{eigh, ComplexMatrix, HermitianEigen};
use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_TOL)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect });
        }
        let m = m.hermitian_part();
        let tr = m.trace().re;
        if (tr - 1.0).abs() > tol {
            return Err(Error::NotNormalized { what: "density matrix trace", value: tr });
        }
        let min = eigh(&m).values.first().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self(m))
    }

    /// |ψ⟩⟨ψ| for ψ normalized on the way in.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let n = super::norm(psi);
        if !(n > 0.0) {
            return Err(Error::NotNormalized { what: "state vector", value: n });
        }
        let u: alloc::vec::Vec<Complex64> = psi.iter().map(|z| z / n).collect();
        Ok(Self(ComplexMatrix::outer(&u, &u)))
    }

    pub(crate) fn from_raw(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Validated Hermitian generator with a cached eigendecomposition.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
    eigen: HermitianEigen,
}

impl Hamiltonian {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_TOL)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect });
        }
        let matrix = m.hermitian_part();
        let eigen = eigh(&matrix);
        Ok(Self { matrix, eigen })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn energies(&self) -> &[f64] {
        &self.eigen.values
    }

    /// Eigenvectors as columns, ordered like [`Self::energies`].
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigen.vectors
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    /// V† A V
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.eigen.vectors;
        v.adjoint().matmul(a).matmul(v)
    }

    /// V A V†
    pub fn from_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        a.conjugate_by(&self.eigen.vectors)
    }

    /// exp(−iHt/ħ)
    pub fn propagator(&self, t: f64, hbar: f64) -> ComplexMatrix {
        self.eigen.reconstruct_with(|e| Complex64::from_polar(1.0, -e * t / hbar))
    }

    /// Spectral spread max E − min E.
    pub fn spread(&self) -> f64 {
        match (self.eigen.values.first(), self.eigen.values.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// Applies (ρ')_nm = ρ_nm f(E_n, E_m) in the eigenbasis and maps back.
    /// Diagonal entries are left untouched.
    pub fn modulate(&self, rho: &ComplexMatrix, mut f: impl FnMut(f64, f64) -> Complex64) -> ComplexMatrix {
        let mut r = self.to_eigenbasis(rho);
        let e = &self.eigen.values;
        for i in 0..r.dim() {
            for j in 0..r.dim() {
                if i != j {
                    r[(i, j)] *= f(e[i], e[j]);
                }
            }
        }
        self.from_eigenbasis(&r)
    }
}
