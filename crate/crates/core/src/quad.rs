//! Gauss–Legendre quadrature: fixed, composite and adaptive.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let mut s = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    pub fn integrate_complex(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let mut s = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            s += f(c + h * x) * w;
        }
        s * h
    }

    /// Composite rule over `panels` equal subintervals.
    pub fn composite(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = (b - a) / panels as f64;
        let parts: Vec<f64> = (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .collect();
        crate::sum::pairwise(&parts)
    }
}

/// (P_n(x), P_n'(x))
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection with a fixed Gauss–Legendre rule.
#[derive(Clone, Debug)]
pub struct Adaptive {
    rule: GaussLegendre,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self { rule: GaussLegendre::new(15), abs_tol: 1e-14, rel_tol: 1e-13, max_depth: 40 }
    }
}

impl Adaptive {
    pub fn new(order: usize, abs_tol: f64, rel_tol: f64) -> Self {
        Self { rule: GaussLegendre::new(order), abs_tol, rel_tol, max_depth: 40 }
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
        Ok(self.integrate_complex(a, b, |x| Complex64::new(f(x), 0.0))?.re)
    }

    pub fn integrate_complex(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> Complex64) -> Result<Complex64> {
        let whole = self.rule.integrate_complex(a, b, &mut f);
        self.recurse(a, b, whole, 0, &mut f)
    }

    fn recurse(
        &self,
        a: f64,
        b: f64,
        whole: Complex64,
        depth: usize,
        f: &mut impl FnMut(f64) -> Complex64,
    ) -> Result<Complex64> {
        let m = 0.5 * (a + b);
        let left = self.rule.integrate_complex(a, m, &mut *f);
        let right = self.rule.integrate_complex(m, b, &mut *f);
        let halves = left + right;
        let err = (halves - whole).norm();
        if err <= self.abs_tol.max(self.rel_tol * halves.norm()) {
            return Ok(halves);
        }
        if depth >= self.max_depth {
            return Err(Error::NoConvergence { what: "adaptive quadrature" });
        }
        let l = self.recurse(a, m, left, depth + 1, f)?;
        let r = self.recurse(m, b, right, depth + 1, f)?;
        Ok(l + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        // degree 15 is integrated exactly
        let v = gl.integrate(-1.0, 2.0, |x| libm::pow(x, 15.0));
        let exact = (libm::pow(2.0, 16.0) - 1.0) / 16.0;
        assert!(((v - exact) / exact).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 8, 15, 40] {
            let s: f64 = GaussLegendre::new(n).weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn adaptive_gaussian() {
        let q = Adaptive::default();
        let v = q.integrate(-10.0, 10.0, |x| libm::exp(-x * x)).unwrap();
        assert!((v - libm::sqrt(core::f64::consts::PI)).abs() < 1e-13);
    }
}
