//! Order-fixed summation.

use num_complex::Complex64;

const BLOCK: usize = 32;

/// Pairwise sum with a fixed split order.
pub fn pairwise(xs: &[f64]) -> f64 {
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid]) + pairwise(&xs[mid..])
}

/// Pairwise sum of complex values.
pub fn pairwise_complex(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= BLOCK {
        let mut s = Complex64::new(0.0, 0.0);
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_complex(&xs[..mid]) + pairwise_complex(&xs[mid..])
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn pairwise_matches_exact_integers() {
        let xs: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
        assert_eq!(pairwise(&xs), 500500.0);
    }

    #[test]
    fn compensated_recovers_cancellation() {
        let mut acc = Compensated::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            acc.add(x);
        }
        assert_eq!(acc.value(), 2.0);
    }
}
