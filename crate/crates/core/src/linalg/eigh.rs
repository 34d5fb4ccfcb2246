use alloc::vec::Vec;
use num_complex::Complex64;

use super::ComplexMatrix;

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// V diag(f(λ)) V†
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let fl: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, |i, j| {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                s += v[(i, k)] * fl[k] * v[(j, k)].conj();
            }
            s
        })
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Only the Hermitian part of `a` is used.
pub fn eigh(a: &ComplexMatrix) -> HermitianEigen {
    let n = a.dim();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    if scale == 0.0 || n < 2 {
        return finish(m, v);
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if libm::sqrt(off) <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    finish(m, v)
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = m.dim();
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Phase e^{-iφ} on column q makes the pivot real, then a real rotation zeroes it.
    let ph = (apq / mag).conj();
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
        if theta < 0.0 { -t } else { t }
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = ph * (-s);
    let jqq = ph * c;

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * jpp + akq * jqp;
        m[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        m[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

fn finish(m: ComplexMatrix, v: ComplexMatrix) -> HermitianEigen {
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check(a: &ComplexMatrix) {
        let e = eigh(a);
        let n = a.dim();
        assert!(e.vectors.unitarity_defect() < 1e-13);
        let av = a.matmul(&e.vectors);
        for k in 0..n {
            for i in 0..n {
                assert!((av[(i, k)] - e.vectors[(i, k)] * e.values[k]).norm() < 1e-12);
            }
        }
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn pauli_y() {
        let a = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        let e = eigh(&a);
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        check(&a);
    }

    #[test]
    fn dense_complex_4x4() {
        let a = ComplexMatrix::from_fn(4, |i, j| {
            let (i, j) = (i as f64, j as f64);
            if i == j {
                c(i * 0.7 - 1.0, 0.0)
            } else if i < j {
                c(libm::sin(i + 2.0 * j), libm::cos(3.0 * i - j))
            } else {
                c(libm::sin(j + 2.0 * i), -libm::cos(3.0 * j - i))
            }
        });
        check(&a);
    }

    #[test]
    fn degenerate_spectrum() {
        let a = ComplexMatrix::from_real_diagonal(&[2.0, 2.0, -1.0, 2.0]);
        check(&a);
        assert_eq!(eigh(&a).values, vec![-1.0, 2.0, 2.0, 2.0]);
    }
}
