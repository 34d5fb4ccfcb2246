//! Measurement in a basis of degenerate-eigenspace superpositions.
//!
//! Each outcome α gets one vector |v_α⟩ = Σ_s c_α^s |u_α^s⟩ inside its
//! eigenspace. A first-kind measurement maps it to
//! |ṽ_α⟩ = Σ_s c_α^s |ũ_α^s⟩, keeping the superposition intact.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm, ComplexMatrix, ComplexVector, DensityMatrix};
use crate::measurement::{DegenerateRotation, SpectralObservable};
use crate::DEFAULT_TOL;

/// Coefficients are rescaled to unit norm when this close to it.
pub const COEFF_NORM_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct VBasis {
    parent: SpectralObservable,
    coefficients: Vec<ComplexVector>,
}

impl VBasis {
    pub fn new(parent: SpectralObservable, mut coefficients: Vec<ComplexVector>) -> Result<Self> {
        if coefficients.len() != parent.num_outcomes() {
            return Err(Error::DimensionMismatch { expected: parent.num_outcomes(), found: coefficients.len() });
        }
        for (c, g) in coefficients.iter_mut().zip(parent.degeneracies()) {
            if c.len() != g {
                return Err(Error::DimensionMismatch { expected: g, found: c.len() });
            }
            let n = norm(c);
            if (n - 1.0).abs() > COEFF_NORM_TOL {
                return Err(Error::NotNormalized { what: "v-basis coefficients", value: n });
            }
            for z in c.iter_mut() {
                *z /= n;
            }
        }
        Ok(Self { parent, coefficients })
    }

    pub fn parent(&self) -> &SpectralObservable {
        &self.parent
    }

    pub fn coefficients(&self, alpha: usize) -> Result<&[Complex64]> {
        self.coefficients
            .get(alpha)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange { index: alpha, len: self.coefficients.len() })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// |v_α⟩
    pub fn vector(&self, alpha: usize) -> Result<ComplexVector> {
        combine(self.coefficients(alpha)?, self.parent.block(alpha)?, self.parent.dim())
    }

    /// |ṽ_α⟩ under the block rotation `rot`.
    pub fn rotated_vector(&self, rot: &DegenerateRotation, alpha: usize) -> Result<ComplexVector> {
        let ut = rot.rotated_vectors(&self.parent, alpha)?;
        combine(self.coefficients(alpha)?, &ut, self.parent.dim())
    }

    pub fn vectors(&self) -> Result<Vec<ComplexVector>> {
        (0..self.len()).map(|a| self.vector(a)).collect()
    }
}

fn combine(c: &[Complex64], basis: &[ComplexVector], dim: usize) -> Result<ComplexVector> {
    let mut v = alloc::vec![Complex64::new(0.0, 0.0); dim];
    for (&cs, u) in c.iter().zip(basis) {
        for (x, &y) in v.iter_mut().zip(u) {
            *x += cs * y;
        }
    }
    Ok(v)
}

/// Mixture of v-basis superpositions: weights π_k and amplitude rows B_kα.
#[derive(Clone, Debug, PartialEq)]
pub struct VState {
    weights: Vec<f64>,
    amplitudes: Vec<ComplexVector>,
}

impl VState {
    pub fn new(weights: Vec<f64>, amplitudes: Vec<ComplexVector>) -> Result<Self> {
        if weights.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: weights.len(), found: amplitudes.len() });
        }
        if let Some(&w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::InvalidParameter { name: "mixture weight", value: w });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { what: "mixture weights", value: total });
        }
        let width = amplitudes.first().map_or(0, Vec::len);
        for row in &amplitudes {
            if row.len() != width {
                return Err(Error::DimensionMismatch { expected: width, found: row.len() });
            }
            let n2: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            if (n2 - 1.0).abs() > DEFAULT_TOL {
                return Err(Error::NotNormalized { what: "amplitude row", value: n2 });
            }
        }
        Ok(Self { weights, amplitudes })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn amplitudes(&self) -> &[ComplexVector] {
        &self.amplitudes
    }

    /// w_αβ = Σ_k π_k B_kα B*_kβ
    pub fn w_matrix(&self) -> ComplexMatrix {
        let n = self.amplitudes.first().map_or(0, Vec::len);
        ComplexMatrix::from_fn(n, |a, b| {
            self.weights
                .iter()
                .zip(&self.amplitudes)
                .fold(Complex64::new(0.0, 0.0), |acc, (&p, row)| acc + row[a] * row[b].conj() * p)
        })
    }
}

/// ρ_v = Σ_αβ |v_α⟩ w_αβ ⟨v_β|
pub fn v_density(vs: &VState, vb: &VBasis) -> Result<DensityMatrix> {
    let w = vs.w_matrix();
    if w.dim() != vb.len() {
        return Err(Error::DimensionMismatch { expected: vb.len(), found: w.dim() });
    }
    let v = vb.vectors()?;
    let dim = vb.parent.dim();
    let mut rho = ComplexMatrix::zeros(dim);
    for a in 0..vb.len() {
        for b in 0..vb.len() {
            let wab = w[(a, b)];
            if wab == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..dim {
                for j in 0..dim {
                    rho[(i, j)] += v[a][i] * wab * v[b][j].conj();
                }
            }
        }
    }
    DensityMatrix::new(rho)
}

/// P_α = ⟨v_α|ρ_v|v_α⟩
pub fn v_probabilities(rho_v: &DensityMatrix, vb: &VBasis) -> Result<Vec<f64>> {
    rho_v.matrix().require_dim(vb.parent.dim())?;
    vb.vectors()?.iter().map(|v| Ok(inner(v, &rho_v.matrix().mul_vec(v)).re.max(0.0))).collect()
}

/// |ṽ_α(t′)⟩⟨ṽ_α(t′)| with |ṽ_α(t′)⟩ = U_Q |ṽ_α⟩.
pub fn v_post_state(vb: &VBasis, rot: &DegenerateRotation, alpha: usize, u_q: &ComplexMatrix) -> Result<DensityMatrix> {
    u_q.require_dim(vb.parent.dim())?;
    let defect = u_q.unitarity_defect();
    if defect > vb.parent.tolerance() {
        return Err(Error::NotUnitary { defect });
    }
    let v = u_q.mul_vec(&vb.rotated_vector(rot, alpha)?);
    Ok(DensityMatrix::from_raw(ComplexMatrix::outer(&v, &v)))
}

/// Observable with the |v_α⟩ as nondegenerate eigenvectors, eigenvalues λ_α.
///
/// When the v-basis does not span the space, one extra outcome is appended
/// carrying the orthogonal complement. Its eigenvalue is 0 unless some λ_α is
/// already 0, in which case it is max|λ_α| + 1.
pub fn tilde_observable(vb: &VBasis) -> Result<SpectralObservable> {
    let eig: Vec<f64> = vb.parent.eigenvalues().to_vec();
    let mut blocks: Vec<Vec<ComplexVector>> = vb.vectors()?.into_iter().map(|v| alloc::vec![v]).collect();
    let dim = vb.parent.dim();
    let mut basis: Vec<ComplexVector> = blocks.iter().map(|b| b[0].clone()).collect();
    let mut complement: Vec<ComplexVector> = Vec::new();
    while basis.len() < dim {
        let mut best: Option<(f64, ComplexVector)> = None;
        for i in 0..dim {
            let mut e = alloc::vec![Complex64::new(0.0, 0.0); dim];
            e[i] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for q in &basis {
                    let c = inner(q, &e);
                    for (x, &y) in e.iter_mut().zip(q) {
                        *x -= c * y;
                    }
                }
            }
            let r = norm(&e);
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, e));
            }
        }
        let (r, mut e) = best.expect("dim > 0");
        for x in e.iter_mut() {
            *x /= r;
        }
        basis.push(e.clone());
        complement.push(e);
    }
    let mut eigenvalues = eig;
    if !complement.is_empty() {
        let extra = if eigenvalues.contains(&0.0) {
            eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs())) + 1.0
        } else {
            0.0
        };
        eigenvalues.push(extra);
        blocks.push(complement);
    }
    Ok(SpectralObservable::new(eigenvalues, blocks)?.with_tolerance(vb.parent.tolerance()))
}
