use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sum::Compensated;

pub const DEFAULT_HALF_WIDTH: f64 = 8.0;
pub const DEFAULT_POINTS: usize = 4096;

/// Density sampled on a uniform grid x_i = x_start + i h.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledDistribution {
    x_start: f64,
    h: f64,
    values: Vec<f64>,
}

impl SampledDistribution {
    pub fn new(x_start: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter { name: "h", value: h });
        }
        if values.len() < 2 {
            return Err(Error::InvalidParameter { name: "points", value: values.len() as f64 });
        }
        Ok(Self { x_start, h, values })
    }

    /// Samples `f` at `points` equally spaced nodes covering [lo, hi].
    pub fn sample(lo: f64, hi: f64, points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if points < 2 || !(hi > lo) {
            return Err(Error::InvalidParameter { name: "points", value: points as f64 });
        }
        let h = (hi - lo) / (points - 1) as f64;
        let values = (0..points).map(|i| f(lo + h * i as f64)).collect();
        Self::new(lo, h, values)
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_start + self.h * i as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Compensated trapezoid ∫ x^k P dx.
    pub fn moment(&self, k: i32) -> f64 {
        let n = self.values.len();
        let mut acc = Compensated::new();
        for (i, &v) in self.values.iter().enumerate() {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc.add(w * v * libm::pow(self.x(i), k as f64));
        }
        acc.value() * self.h
    }

    pub fn integral(&self) -> f64 {
        self.moment(0)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// P̃ = P/Q on {x ≥ x₀, P > 0}, zero elsewhere; returns (P̃, Q).
pub fn renormalize_positive(density: &SampledDistribution, x0: f64) -> Result<(SampledDistribution, f64)> {
    renormalize_region(density, |x| x >= x0)
}

pub(crate) fn renormalize_region(
    density: &SampledDistribution,
    keep: impl Fn(f64) -> bool,
) -> Result<(SampledDistribution, f64)> {
    let clipped: Vec<f64> = density
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| if keep(density.x(i)) && v > 0.0 { v } else { 0.0 })
        .collect();
    let mut out = SampledDistribution::new(density.x_start, density.h, clipped)?;
    let q = out.integral();
    if !(q > 0.0) {
        return Err(Error::DomainViolation { what: "normalization Q", value: q });
    }
    for v in out.values.iter_mut() {
        *v /= q;
    }
    Ok((out, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_density_is_untouched() {
        let d = SampledDistribution::sample(-10.0, 10.0, 2001, |x| libm::exp(-x * x) / libm::sqrt(core::f64::consts::PI))
            .unwrap();
        let (r, q) = renormalize_positive(&d, -20.0).unwrap();
        assert!((q - 1.0).abs() < 1e-14);
        assert!(r.values().iter().zip(d.values()).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn empty_region_is_an_error() {
        let d = SampledDistribution::sample(-1.0, 1.0, 11, |_| -1.0).unwrap();
        assert!(renormalize_positive(&d, 0.0).is_err());
    }
}
