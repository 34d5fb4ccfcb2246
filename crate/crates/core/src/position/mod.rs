//! Survival effect on one-dimensional position measurement.
//!
//! For a minimum-uncertainty packet ψ(x) ∝ exp(ip₀x/ħ − x²/2a²), averaging the
//! free evolution over the waiting time shifts the position density to first
//! order in τ:
//!
//! P(x) = π^{−1/2} a^{−1} (1 + 2lx/a²) e^{−x²/a²},  l = sτp₀/m,
//!
//! which turns negative below x₀ = −a²/2l. The momentum density is untouched.

mod asymptotics;
mod exact;
mod sampled;

pub use asymptotics::{
    appendix_d_moments, incomplete_gamma, renormalization_constant, renormalization_excess, renormalized_moments,
    AsymptoticPair,
};
pub use exact::{survival_position_exact, ExactPositionDensity};
pub use sampled::{renormalize_positive, SampledDistribution, DEFAULT_HALF_WIDTH, DEFAULT_POINTS};

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::survival::SurvivalDistribution;

/// ε₀ above which the first-order uncertainty product is flagged as unreliable.
pub const EPS0_WARNING: f64 = 0.1;

/// Gaussian minimum-uncertainty packet with its physical constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPacket {
    a: f64,
    p0: f64,
    hbar: f64,
    m: f64,
}

impl GaussianPacket {
    pub fn new(a: f64, p0: f64, hbar: f64, m: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("hbar", hbar), ("m", m)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter { name, value: v });
            }
        }
        if !p0.is_finite() {
            return Err(Error::InvalidParameter { name: "p0", value: p0 });
        }
        Ok(Self { a, p0, hbar, m })
    }

    /// a = ħ = m = 1.
    pub fn natural(p0: f64) -> Self {
        Self { a: 1.0, p0, hbar: 1.0, m: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    /// Momentum width b = ħ/a.
    pub fn b(&self) -> f64 {
        self.hbar / self.a
    }

    /// l = sτp₀/m.
    pub fn l(&self, dist: &SurvivalDistribution) -> f64 {
        dist.mean() * self.p0 / self.m
    }

    /// ε₀ = 2l²/a².
    pub fn eps0(&self, dist: &SurvivalDistribution) -> f64 {
        let l = self.l(dist);
        2.0 * l * l / (self.a * self.a)
    }

    /// Root x₀ = −a²/2l of the first-order density; `None` when l = 0.
    pub fn x0(&self, dist: &SurvivalDistribution) -> Option<f64> {
        let l = self.l(dist);
        (l != 0.0).then(|| -self.a * self.a / (2.0 * l))
    }

    /// σ = a²/4l² (infinite when l = 0).
    pub fn sigma(&self, dist: &SurvivalDistribution) -> f64 {
        let l = self.l(dist);
        self.a * self.a / (4.0 * l * l)
    }

    /// φ(p) = π^{−1/4} b^{−1/2} exp(−(p − p₀)²/2b²).
    pub fn momentum_amplitude(&self, p: f64) -> f64 {
        let b = self.b();
        let d = (p - self.p0) / b;
        libm::pow(PI, -0.25) / libm::sqrt(b) * libm::exp(-0.5 * d * d)
    }

    /// Kinetic frequency ω(p) = p²/2mħ.
    pub fn omega(&self, p: f64) -> f64 {
        p * p / (2.0 * self.m * self.hbar)
    }
}

/// Position-space wavefunction with an optional analytic second derivative.
pub trait WaveFunction1D {
    fn value(&self, x: f64) -> Complex64;

    fn second_derivative(&self, _x: f64) -> Option<Complex64> {
        None
    }

    /// Length scale setting the finite-difference step 1e−4 · scale.
    fn length_scale(&self) -> f64 {
        1.0
    }
}

impl WaveFunction1D for GaussianPacket {
    fn value(&self, x: f64) -> Complex64 {
        let amp = libm::pow(PI, -0.25) / libm::sqrt(self.a) * libm::exp(-x * x / (2.0 * self.a * self.a));
        Complex64::from_polar(amp, self.p0 * x / self.hbar)
    }

    fn second_derivative(&self, x: f64) -> Option<Complex64> {
        let g = Complex64::new(-x / (self.a * self.a), self.p0 / self.hbar);
        Some(self.value(x) * (g * g - 1.0 / (self.a * self.a)))
    }

    fn length_scale(&self) -> f64 {
        self.a
    }
}

/// ψ″ from the wavefunction, analytic when available, otherwise a Richardson-extrapolated centered difference.
pub fn second_derivative<W: WaveFunction1D + ?Sized>(psi: &W, x: f64) -> Complex64 {
    if let Some(d) = psi.second_derivative(x) {
        return d;
    }
    let h = 1e-4 * psi.length_scale();
    let d = |h: f64| (psi.value(x + h) - psi.value(x) * 2.0 + psi.value(x - h)) / (h * h);
    (d(h * 0.5) * 4.0 - d(h)) / 3.0
}

/// π^{−1/2} a^{−1} e^{−x²/a²}.
pub fn packet_position_density_ideal(pk: &GaussianPacket, x: f64) -> f64 {
    let a = pk.a;
    libm::exp(-x * x / (a * a)) / (libm::sqrt(PI) * a)
}

/// π^{−1/2} b^{−1} e^{−(p−p₀)²/b²}, identical with or without survival averaging.
pub fn packet_momentum_density(pk: &GaussianPacket, p: f64) -> f64 {
    let b = pk.b();
    let d = (p - pk.p0) / b;
    libm::exp(-d * d) / (libm::sqrt(PI) * b)
}

/// |ψ|² + (ħsτ/m) Im[ψ ∂²ψ*].
pub fn survival_position_first_order<W: WaveFunction1D + ?Sized>(
    psi: &W,
    dist: &SurvivalDistribution,
    m: f64,
    hbar: f64,
    x: f64,
) -> f64 {
    let v = psi.value(x);
    let d2 = second_derivative(psi, x);
    v.norm_sqr() + hbar * dist.mean() / m * (v * d2.conj()).im
}

/// Weighted sum of [`survival_position_first_order`] over an incoherent mixture.
pub fn survival_position_first_order_mixture(
    mixture: &[(f64, &dyn WaveFunction1D)],
    dist: &SurvivalDistribution,
    m: f64,
    hbar: f64,
    x: f64,
) -> f64 {
    mixture.iter().map(|(w, psi)| w * survival_position_first_order(*psi, dist, m, hbar, x)).sum()
}

/// π^{−1/2} a^{−1} (1 + 2lx/a²) e^{−x²/a²}.
pub fn survival_position_gaussian(pk: &GaussianPacket, dist: &SurvivalDistribution, x: f64) -> f64 {
    let a = pk.a;
    let l = pk.l(dist);
    (1.0 + 2.0 * l * x / (a * a)) * packet_position_density_ideal(pk, x)
}

/// W(ξ) = π^{−1/2} (1 + √(2ε₀) ξ) e^{−ξ²}.
pub fn dimensionless_w(eps0: f64, xi: f64) -> f64 {
    (1.0 + libm::sqrt(2.0 * eps0) * xi) * libm::exp(-xi * xi) / libm::sqrt(PI)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Uncertainty {
    pub mean_x: f64,
    pub dx: f64,
    pub dp: f64,
    pub product: f64,
    /// Q when the renormalized density was used.
    pub q: Option<f64>,
    /// Set when ε₀ exceeds [`EPS0_WARNING`].
    pub warning: bool,
}

/// Δx, Δp and their product for the first-order density.
///
/// With `use_renormalized` the moments are integrated numerically from the
/// clipped density P/Q on the default grid; otherwise ⟨x⟩ = l and ⟨x²⟩ = a²/2.
pub fn uncertainty_product(pk: &GaussianPacket, dist: &SurvivalDistribution, use_renormalized: bool) -> Result<Uncertainty> {
    let a = pk.a;
    let l = pk.l(dist);
    if l * l >= a * a / 2.0 {
        return Err(Error::DomainViolation { what: "l^2 >= a^2/2", value: l * l });
    }
    let dp = pk.hbar / (core::f64::consts::SQRT_2 * a);
    let warning = pk.eps0(dist) > EPS0_WARNING;
    if !use_renormalized {
        let dx = libm::sqrt(a * a / 2.0 - l * l);
        return Ok(Uncertainty { mean_x: l, dx, dp, product: dx * dp, q: None, warning });
    }
    let raw = SampledDistribution::sample(-DEFAULT_HALF_WIDTH * a, DEFAULT_HALF_WIDTH * a, DEFAULT_POINTS, |x| {
        survival_position_gaussian(pk, dist, x)
    })?;
    let x0 = pk.x0(dist).unwrap_or(f64::NEG_INFINITY);
    let (clipped, q) = if l >= 0.0 {
        renormalize_positive(&raw, x0)?
    } else {
        sampled::renormalize_region(&raw, |x| x <= x0)?
    };
    let mean_x = clipped.moment(1);
    let var = clipped.moment(2) - mean_x * mean_x;
    let dx = libm::sqrt(var);
    Ok(Uncertainty { mean_x, dx, dp, product: dx * dp, q: Some(q), warning })
}

/// (ξ, W) rows for ξ = lo + k·step up to hi.
pub fn w_curve(eps0: f64, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let n = libm::round((hi - lo) / step) as usize;
    (0..=n)
        .map(|k| {
            let xi = lo + step * k as f64;
            (xi, dimensionless_w(eps0, xi))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_peak() {
        let pk = GaussianPacket::natural(1.0);
        assert!((packet_position_density_ideal(&pk, 0.0) - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert!((packet_momentum_density(&pk, 1.0) - 1.0 / libm::sqrt(PI)).abs() < 1e-15);
    }

    #[test]
    fn root_of_first_order_density() {
        let pk = GaussianPacket::natural(2.0);
        let d = SurvivalDistribution::exponential(0.05).unwrap();
        let x0 = pk.x0(&d).unwrap();
        assert_eq!(survival_position_gaussian(&pk, &d, x0), 0.0);
        assert!(survival_position_gaussian(&pk, &d, x0 - 0.1) < 0.0);
    }

    #[test]
    fn w_special_values() {
        assert!((dimensionless_w(0.3, 0.0) - 1.0 / libm::sqrt(PI)).abs() < 1e-16);
        assert!(dimensionless_w(0.2, -1.0 / libm::sqrt(0.4)).abs() < 1e-16);
        assert!((dimensionless_w(0.0, 1.3) - libm::exp(-1.69) / libm::sqrt(PI)).abs() < 1e-16);
    }

    #[test]
    fn real_wavefunction_has_no_survival_term() {
        struct Real;
        impl WaveFunction1D for Real {
            fn value(&self, x: f64) -> Complex64 {
                Complex64::from_polar(libm::exp(-x * x) * (1.0 + x), 0.4)
            }
        }
        let d = SurvivalDistribution::gamma(0.2, 2.0).unwrap();
        for x in [-1.0, 0.0, 0.3, 2.0] {
            let v = Real.value(x).norm_sqr();
            assert!((survival_position_first_order(&Real, &d, 1.0, 1.0, x) - v).abs() < 1e-6);
        }
    }

    #[test]
    fn ideal_uncertainty() {
        let pk = GaussianPacket::natural(0.0);
        let d = SurvivalDistribution::exponential(0.1).unwrap();
        let u = uncertainty_product(&pk, &d, false).unwrap();
        assert_eq!(u.product, 0.5);
        assert!(!u.warning);
    }

    #[test]
    fn domain_violation() {
        let pk = GaussianPacket::natural(1.0);
        let d = SurvivalDistribution::exponential(0.8).unwrap();
        assert!(uncertainty_product(&pk, &d, false).is_err());
    }
}
