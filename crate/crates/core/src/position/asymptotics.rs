use core::f64::consts::PI;

use super::GaussianPacket;
use crate::error::{Error, Result};
use crate::special::upper_incomplete_gamma;
use crate::survival::SurvivalDistribution;

/// Γ(λ, σ) = ∫_σ^∞ t^{λ−1} e^{−t} dt for σ > 0.
pub fn incomplete_gamma(lambda: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter { name: "sigma", value: sigma });
    }
    upper_incomplete_gamma(lambda, sigma)
}

/// Exact value alongside its large-σ leading term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticPair {
    pub exact: f64,
    pub asymptotic: f64,
}

impl AsymptoticPair {
    pub fn relative_error(&self) -> f64 {
        ((self.asymptotic - self.exact) / self.exact).abs()
    }
}

fn check_sigma(pk: &GaussianPacket, dist: &SurvivalDistribution) -> Result<f64> {
    let sigma = pk.sigma(dist);
    if !(sigma > 1.0) || !sigma.is_finite() {
        return Err(Error::DomainViolation { what: "sigma = a^2/4l^2 must exceed 1", value: sigma });
    }
    Ok(sigma)
}

/// Moments of the first-order density over its negative region (x < x₀ for l > 0).
///
/// exact:      (−a)ⁿ/(2√π) [Γ((n+1)/2, σ) − σ^{−1/2} Γ((n+2)/2, σ)]
/// asymptotic: (−1)^{n+1} aⁿ/(4√π) (a/2l)^{n−3} e^{−σ}
///
/// For l < 0 the negative region is x > x₀ and odd moments flip sign.
pub fn appendix_d_moments(pk: &GaussianPacket, dist: &SurvivalDistribution, n: u32) -> Result<AsymptoticPair> {
    let sigma = check_sigma(pk, dist)?;
    let a = pk.a();
    let l = pk.l(dist).abs();
    let nf = n as f64;
    let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
    let exact = sign_n * libm::pow(a, nf) / (2.0 * libm::sqrt(PI))
        * (incomplete_gamma((nf + 1.0) / 2.0, sigma)? - incomplete_gamma((nf + 2.0) / 2.0, sigma)? / libm::sqrt(sigma));
    let asymptotic =
        -sign_n * libm::pow(a, nf) / (4.0 * libm::sqrt(PI)) * libm::pow(a / (2.0 * l), nf - 3.0) * libm::exp(-sigma);
    let mirror = if pk.l(dist) < 0.0 { sign_n } else { 1.0 };
    Ok(AsymptoticPair { exact: mirror * exact, asymptotic: mirror * asymptotic })
}

/// Q − 1 = −⟨x⁰⟩₀ against its leading term (2/√π)(l/a)³ e^{−σ}, free of the cancellation in Q.
pub fn renormalization_excess(pk: &GaussianPacket, dist: &SurvivalDistribution) -> Result<AsymptoticPair> {
    let sigma = check_sigma(pk, dist)?;
    let m0 = appendix_d_moments(pk, dist, 0)?;
    let r = pk.l(dist).abs() / pk.a();
    Ok(AsymptoticPair { exact: -m0.exact, asymptotic: 2.0 / libm::sqrt(PI) * r * r * r * libm::exp(-sigma) })
}

/// Q = 1 − ⟨x⁰⟩₀ against 1 + (2/√π)(l/a)³ e^{−σ}.
pub fn renormalization_constant(pk: &GaussianPacket, dist: &SurvivalDistribution) -> Result<AsymptoticPair> {
    let e = renormalization_excess(pk, dist)?;
    Ok(AsymptoticPair { exact: 1.0 + e.exact, asymptotic: 1.0 + e.asymptotic })
}

/// (⟨x⟩_r, ⟨x²⟩_r) = ((⟨xⁿ⟩ − ⟨xⁿ⟩₀)/Q) with ⟨x⟩ = l and ⟨x²⟩ = a²/2.
pub fn renormalized_moments(pk: &GaussianPacket, dist: &SurvivalDistribution) -> Result<(f64, f64)> {
    let q = renormalization_constant(pk, dist)?.exact;
    let m1 = appendix_d_moments(pk, dist, 1)?.exact;
    let m2 = appendix_d_moments(pk, dist, 2)?.exact;
    let a = pk.a();
    Ok(((pk.l(dist) - m1) / q, (a * a / 2.0 - m2) / q))
}
