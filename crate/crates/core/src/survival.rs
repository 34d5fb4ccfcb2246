//! Non-ideal measurement: survival-time averaging of the free evolution.
//!
//! A measurement that engages after a random delay t with density P̃(t)
//! replaces ρ by ρ_r = ∫ P̃(t) U(t) ρ U†(t) dt. In the energy eigenbasis this
//! damps coherences, (ρ_r)_nm = ρ_nm q(ω_n − ω_m), while leaving populations alone.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, Hamiltonian};
use crate::measurement::{probabilities_unchecked, SpectralObservable};
use crate::special::{gamma, ln_gamma, upper_incomplete_gamma};

/// Minimum number of midpoint nodes accepted by [`reduced_density_quadrature`].
pub const MIN_NODES: usize = 100;
/// Allowed max-norm disagreement between N and N/2 node quadratures.
pub const REFINEMENT_TOL: f64 = 1e-4;
/// Effective cutoff multiplier: the quadrature integrates up to max(τ₀, 40 s τ).
pub const CUTOFF_FACTOR: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurvivalKind {
    Exponential,
    Gamma,
}

/// Waiting-time law P̃(t) = γ^s t^{s−1} e^{−γt} / Γ(s), γ = 1/τ.
///
/// τ = 0 is accepted as the ideal limit, where q ≡ 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurvivalDistribution {
    kind: SurvivalKind,
    tau: f64,
    s: f64,
    tau0: f64,
}

impl SurvivalDistribution {
    pub fn exponential(tau: f64) -> Result<Self> {
        Self::build(SurvivalKind::Exponential, tau, 1.0)
    }

    pub fn gamma(tau: f64, s: f64) -> Result<Self> {
        Self::build(SurvivalKind::Gamma, tau, s)
    }

    pub fn ideal() -> Self {
        Self { kind: SurvivalKind::Exponential, tau: 0.0, s: 1.0, tau0: f64::INFINITY }
    }

    fn build(kind: SurvivalKind, tau: f64, s: f64) -> Result<Self> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter { name: "tau", value: tau });
        }
        if !(s >= 1.0) || !s.is_finite() {
            return Err(Error::InvalidParameter { name: "s", value: s });
        }
        Ok(Self { kind, tau, s, tau0: f64::INFINITY })
    }

    /// Sets the cutoff τ₀, which must exceed τ.
    pub fn with_cutoff(mut self, tau0: f64) -> Result<Self> {
        if !(tau0 > self.tau) {
            return Err(Error::InvalidParameter { name: "tau0", value: tau0 });
        }
        self.tau0 = tau0;
        Ok(self)
    }

    pub fn kind(&self) -> SurvivalKind {
        self.kind
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn shape(&self) -> f64 {
        self.s
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn rate(&self) -> f64 {
        1.0 / self.tau
    }

    /// τ/τ₀; zero when τ₀ = ∞.
    pub fn epsilon_hat(&self) -> f64 {
        self.tau / self.tau0
    }

    pub fn is_ideal(&self) -> bool {
        self.tau == 0.0
    }

    /// Mean waiting time s τ.
    pub fn mean(&self) -> f64 {
        self.s * self.tau
    }
}

/// P̃(t).
pub fn survival_density(dist: &SurvivalDistribution, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    if dist.is_ideal() {
        return Err(Error::InvalidParameter { name: "tau", value: 0.0 });
    }
    let g = dist.rate();
    let x = g * t;
    let s = dist.s;
    if t == 0.0 {
        return Ok(if s == 1.0 { g } else { 0.0 });
    }
    let direct = g * libm::pow(x, s - 1.0) * libm::exp(-x) / gamma(s);
    if direct.is_finite() && direct > 0.0 {
        return Ok(direct);
    }
    Ok(g * libm::exp((s - 1.0) * libm::log(x) - x - ln_gamma(s)))
}

/// q(ω) = (1 + iωτ)^{−s} on the principal branch.
pub fn q_factor(dist: &SurvivalDistribution, omega: f64) -> Complex64 {
    if dist.is_ideal() || omega == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let z = Complex64::new(1.0, omega * dist.tau);
    (z.ln() * (-dist.s)).exp()
}

/// Closed form (ρ_r)_nm = ρ_nm q(ω_n − ω_m) in the eigenbasis of H, ω = E/ħ.
pub fn reduced_density_closed(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    dist: &SurvivalDistribution,
    hbar: f64,
) -> Result<DensityMatrix> {
    rho.matrix().require_dim(h.dim())?;
    let out = h.modulate(rho.matrix(), |en, em| q_factor(dist, (en - em) / hbar));
    Ok(DensityMatrix::from_raw(out.hermitian_part()))
}

/// Result of the midpoint time average.
#[derive(Clone, Debug)]
pub struct TimeAverage {
    pub rho: ComplexMatrix,
    /// Integration horizon max(τ₀, 40 s τ).
    pub cutoff: f64,
    /// Probability mass of P̃ beyond the horizon.
    pub tail_mass: f64,
    /// Σ_i P̃(t_i) Δ before the weights are renormalized to 1.
    pub raw_weight: f64,
    /// Max-norm gap to the same rule with N/2 nodes.
    pub refinement_deviation: f64,
}

/// Midpoint rule ρ_r ≈ Σ_i w_i U(t_i) ρ U†(t_i) with t_i = (i − ½)Δ.
///
/// The weights w_i ∝ P̃(t_i) are normalized to sum to one so the trace is kept exactly.
pub fn reduced_density_quadrature(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    dist: &SurvivalDistribution,
    hbar: f64,
    n: usize,
) -> Result<TimeAverage> {
    rho.matrix().require_dim(h.dim())?;
    if n < MIN_NODES {
        return Err(Error::InvalidParameter { name: "N", value: n as f64 });
    }
    if dist.is_ideal() {
        return Ok(TimeAverage {
            rho: rho.matrix().clone(),
            cutoff: 0.0,
            tail_mass: 0.0,
            raw_weight: 1.0,
            refinement_deviation: 0.0,
        });
    }
    let horizon = CUTOFF_FACTOR * dist.mean();
    let cutoff = if dist.tau0.is_finite() { dist.tau0.max(horizon) } else { horizon };
    let fine = midpoint(rho.matrix(), h, dist, hbar, cutoff, n)?;
    let coarse = midpoint(rho.matrix(), h, dist, hbar, cutoff, n / 2)?;
    let refinement_deviation = fine.0.max_abs_diff(&coarse.0);
    if refinement_deviation > REFINEMENT_TOL {
        return Err(Error::RefinementMismatch { deviation: refinement_deviation });
    }
    let tail_mass = upper_incomplete_gamma(dist.s, cutoff / dist.tau)? / gamma(dist.s);
    Ok(TimeAverage { rho: fine.0.hermitian_part(), cutoff, tail_mass, raw_weight: fine.1, refinement_deviation })
}

fn midpoint(
    rho: &ComplexMatrix,
    h: &Hamiltonian,
    dist: &SurvivalDistribution,
    hbar: f64,
    cutoff: f64,
    n: usize,
) -> Result<(ComplexMatrix, f64)> {
    let delta = cutoff / n as f64;
    let nodes: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) * delta).collect();
    let weights: Vec<f64> = nodes.iter().map(|&t| survival_density(dist, t).map(|p| p * delta)).collect::<Result<_>>()?;
    let total = crate::sum::pairwise(&weights);
    let sum = block_sum(rho, h, hbar, &nodes, &weights);
    Ok((sum.scale_real(1.0 / total), total))
}

fn block_sum(rho: &ComplexMatrix, h: &Hamiltonian, hbar: f64, t: &[f64], w: &[f64]) -> ComplexMatrix {
    if t.len() <= 32 {
        let mut acc = ComplexMatrix::zeros(rho.dim());
        for (&ti, &wi) in t.iter().zip(w) {
            acc = &acc + &rho.conjugate_by(&h.propagator(ti, hbar)).scale_real(wi);
        }
        return acc;
    }
    let m = t.len() / 2;
    &block_sum(rho, h, hbar, &t[..m], &w[..m]) + &block_sum(rho, h, hbar, &t[m..], &w[m..])
}

/// First-order form ρ − (i s τ/ħ)[H, ρ].
pub fn reduced_density_first_order(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    dist: &SurvivalDistribution,
    hbar: f64,
) -> Result<ComplexMatrix> {
    rho.matrix().require_dim(h.dim())?;
    let c = h.matrix().commutator(rho.matrix());
    Ok(rho.matrix() - &c.scale(Complex64::new(0.0, dist.mean() / hbar)))
}

/// Tr(ρ_r P_α) with ρ_r from the closed form.
pub fn nonideal_probability(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    dist: &SurvivalDistribution,
    obs: &SpectralObservable,
    hbar: f64,
) -> Result<Vec<f64>> {
    let rr = reduced_density_closed(rho, h, dist, hbar)?;
    probabilities_unchecked(rr.matrix(), obs)
}
