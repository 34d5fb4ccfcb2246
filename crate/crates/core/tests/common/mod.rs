//! Independent oracles and random instance generators shared by the integration tests.
#![allow(dead_code)]

use qmeas::measurement::SpectralObservable;
use qmeas::{Complex64, ComplexMatrix, DensityMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

/// Haar-like unitary: classical Gram–Schmidt on Gaussian columns.
pub fn random_unitary(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < n {
        let mut v = gaussian_vector(rng, n);
        let proj: Vec<Complex64> =
            cols.iter().map(|q| q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum()).collect();
        for (q, p) in cols.iter().zip(&proj) {
            for i in 0..n {
                v[i] -= p * q[i];
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv < 1e-6 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / nv).collect());
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// G G† / Tr with G of size n × rank.
pub fn random_density_matrix(rng: &mut StdRng, n: usize, rank: usize) -> ComplexMatrix {
    let g: Vec<Vec<Complex64>> = (0..rank).map(|_| gaussian_vector(rng, n)).collect();
    let m = ComplexMatrix::from_fn(n, |i, j| g.iter().map(|v| v[i] * v[j].conj()).sum());
    let tr = m.trace().re;
    m.scale_real(1.0 / tr)
}

pub fn random_density(rng: &mut StdRng, n: usize) -> DensityMatrix {
    DensityMatrix::new(random_density_matrix(rng, n, n)).unwrap()
}

pub fn random_hermitian(rng: &mut StdRng, n: usize, scale: f64) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&g + &g.adjoint()).scale_real(0.5 * scale)
}

/// Hermitian matrix with eigenvalues uniform in [lo, hi].
pub fn random_hermitian_with_spectrum(rng: &mut StdRng, n: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let u = random_unitary(rng, n);
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    ComplexMatrix::from_real_diagonal(&d).conjugate_by(&u)
}

/// Observable with the given degeneracies built on the columns of a unitary.
pub fn observable_from_unitary(u: &ComplexMatrix, degeneracies: &[usize], eigenvalues: &[f64]) -> SpectralObservable {
    let mut k = 0;
    let blocks = degeneracies
        .iter()
        .map(|&g| {
            let b: Vec<Vec<Complex64>> = (k..k + g).map(|j| u.column(j)).collect();
            k += g;
            b
        })
        .collect();
    SpectralObservable::new(eigenvalues.to_vec(), blocks).unwrap()
}

pub fn random_observable(rng: &mut StdRng, degeneracies: &[usize]) -> SpectralObservable {
    let n: usize = degeneracies.iter().sum();
    let u = random_unitary(rng, n);
    let eig: Vec<f64> = (0..degeneracies.len()).map(|k| k as f64 - 0.37 * rng.random::<f64>()).collect();
    observable_from_unitary(&u, degeneracies, &eig)
}

/// Random degeneracy pattern with blocks of size 1..=max_g and total dimension ≤ max_dim.
pub fn random_degeneracies(rng: &mut StdRng, max_g: usize, max_dim: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut total = 0;
    loop {
        let g = rng.random_range(1..=max_g);
        if total + g > max_dim {
            break;
        }
        out.push(g);
        total += g;
        if total >= 2 && rng.random_bool(0.3) {
            break;
        }
    }
    if out.is_empty() {
        out.push(1);
    }
    if out.len() == 1 && total < max_dim {
        out.push(1);
    }
    out
}

/// exp(A) by scaling and squaring a 24-term Taylor series.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm1 = (0..n).map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let s = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a.scale_real(0.5f64.powi(s));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=24 {
        term = term.matmul(&b).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    sum
}

/// exp(−iHt/ħ) through the Taylor oracle.
pub fn propagator(h: &ComplexMatrix, t: f64, hbar: f64) -> ComplexMatrix {
    expm(&h.scale(c(0.0, -t / hbar)))
}

/// Adaptive Simpson with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol || delta.abs() <= 1e-15 * whole.abs() {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Complex adaptive Simpson, real and imaginary parts separately.
pub fn simpson_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Complex64 {
    c(simpson(&|x| f(x).re, a, b, tol), simpson(&|x| f(x).im, a, b, tol))
}

/// Composite Simpson over [a, b] split into `pieces` adaptive runs.
pub fn simpson_pieces<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces).map(|k| simpson(f, a + h * k as f64, a + h * (k + 1) as f64, tol / pieces as f64)).sum()
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
