//! Entangled coherent states, the higher-order polarization criterion, and
//! Stokes parameters.
//!
//! The even state is `N₊(|β,γ⟩ + |−β,−γ⟩)` with the analytic normalization
//! `N₊ = [2(1 + e^{−𝒥_sum})]^{−1/2}`, `𝒥_sum = 2(|β|² + |γ|²)`. The odd state
//! uses the numerically computed norm instead, which avoids catastrophic
//! cancellation near the origin where `1 − e^{−𝒥_sum}` underflows.

use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{self, Amplitude, CMatrix, CVector, FockDim, FockError};
use crate::kernel::{KernelError, PolarizationIndex};

#[derive(Debug, Error)]
pub enum StateError {
    #[error("the odd entangled state is undefined at beta = gamma = 0")]
    ZeroAmplitude,
    #[error("index of polarization undefined: beta = 0")]
    UndefinedIndex,
    #[error("criterion indeterminate: the state is annihilated by ax^n (norm {0:.3e})")]
    IndeterminateCriterion(f64),
    #[error("state length {len} does not match bimodal dimension {dim}^2")]
    WrongStateLength { len: usize, dim: usize },
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// The two coherent amplitudes (β for the x mode, γ for the y mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePair {
    pub beta: Amplitude,
    pub gamma: Amplitude,
}

impl ModePair {
    pub fn new(beta: Amplitude, gamma: Amplitude) -> Self {
        ModePair { beta, gamma }
    }

    /// 𝒥_sum = 2(|β|² + |γ|²).
    pub fn j_sum(&self) -> f64 {
        2.0 * (self.beta.value().norm_sqr() + self.gamma.value().norm_sqr())
    }

    /// 𝒥_diff = 2(|β|² − |γ|²).
    pub fn j_diff(&self) -> f64 {
        2.0 * (self.beta.value().norm_sqr() - self.gamma.value().norm_sqr())
    }
}

/// Stokes parameters in photon-number units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

/// Λ = (1 − e^{−j})/(1 + e^{−j}) = tanh(j/2), the entanglement attenuation
/// factor common to all Stokes parameters of the even state.
pub fn lambda_factor(j_sum: f64) -> f64 {
    (0.5 * j_sum).tanh()
}

/// Even entangled coherent state `N₊(|β,γ⟩ + |−β,−γ⟩)`, normalized.
pub fn even_ecs(modes: &ModePair, dim: FockDim) -> Result<CVector, StateError> {
    let bp = fock::coherent(modes.beta, dim)?;
    let gp = fock::coherent(modes.gamma, dim)?;
    Ok(even_from_branches(modes, dim, &bp, &gp))
}

/// Same construction with the tail-mass check skipped, for deliberate
/// under-truncation in convergence scans.
pub fn even_ecs_truncated(modes: &ModePair, dim: FockDim) -> CVector {
    let bp = fock::coherent_truncated(modes.beta, dim);
    let gp = fock::coherent_truncated(modes.gamma, dim);
    even_from_branches(modes, dim, &bp, &gp)
}

fn even_from_branches(modes: &ModePair, dim: FockDim, bp: &CVector, gp: &CVector) -> CVector {
    let bm = fock::coherent_truncated(-modes.beta, dim);
    let gm = fock::coherent_truncated(-modes.gamma, dim);
    let plus = fock::tensor_state(bp, gp);
    let minus = fock::tensor_state(&bm, &gm);
    let n_plus = (2.0 * (1.0 + (-modes.j_sum()).exp())).sqrt().recip();
    (plus + minus) * Complex64::from(n_plus)
}

/// Odd entangled coherent state `N₋(|β,γ⟩ − |−β,−γ⟩)`, normalized by the
/// truncated norm. Undefined at the origin.
pub fn odd_ecs(modes: &ModePair, dim: FockDim) -> Result<CVector, StateError> {
    if modes.beta.modulus() == 0.0 && modes.gamma.modulus() == 0.0 {
        return Err(StateError::ZeroAmplitude);
    }
    let bp = fock::coherent(modes.beta, dim)?;
    let gp = fock::coherent(modes.gamma, dim)?;
    let bm = fock::coherent_truncated(-modes.beta, dim);
    let gm = fock::coherent_truncated(-modes.gamma, dim);
    let raw = fock::tensor_state(&bp, &gp) - fock::tensor_state(&bm, &gm);
    let norm = raw.norm();
    if norm == 0.0 {
        return Err(StateError::ZeroAmplitude);
    }
    Ok(raw / Complex64::from(norm))
}

/// Index of polarization at the given order: `p⁽ⁿ⁾ = (γ/β)ⁿ`.
pub fn polarization_index(modes: &ModePair, order: u32) -> Result<PolarizationIndex, StateError> {
    if modes.beta.modulus() == 0.0 {
        return Err(StateError::UndefinedIndex);
    }
    let ratio = modes.gamma.value() / modes.beta.value();
    Ok(PolarizationIndex::new(order, ratio.powu(order))?)
}

/// Scale-free residual of the higher-order polarization criterion
/// `aᵧⁿ ρ̂ = p⁽ⁿ⁾ aₓⁿ ρ̂` for the pure state `ρ̂ = |ψ⟩⟨ψ|`:
/// `‖(aᵧⁿ − p⁽ⁿ⁾aₓⁿ)ρ̂‖_F / ‖aₓⁿρ̂‖_F`.
///
/// For unit `ψ` the Frobenius norms factor as `‖M|ψ⟩⟨ψ|‖_F = ‖M|ψ⟩‖`, so the
/// residual is computed on vectors.
pub fn criterion_residual(
    state: &CVector,
    p: PolarizationIndex,
    dim: FockDim,
) -> Result<f64, StateError> {
    let d = dim.get();
    if state.len() != d * d {
        return Err(StateError::WrongStateLength { len: state.len(), dim: d });
    }
    let (a, _) = fock::ladder(dim);
    let mut an = CMatrix::identity(d, d);
    for _ in 0..p.order() {
        an = &an * &a;
    }
    let ax = fock::tensor(&an, &fock::identity(dim));
    let ay = fock::tensor(&fock::identity(dim), &an);
    let vx = &ax * state;
    let vy = &ay * state;
    let denom = vx.norm();
    if denom < 1e-12 {
        return Err(StateError::IndeterminateCriterion(denom));
    }
    Ok((vy - vx * p.value()).norm() / denom)
}

/// Closed-form Stokes parameters of the even entangled coherent state.
///
/// s1 is computed in the factored form `(|β|−|γ|)(|β|+|γ|)Λ` so equal moduli
/// give an exact zero.
pub fn stokes_closed(modes: &ModePair) -> StokesVector {
    let lam = lambda_factor(modes.j_sum());
    let bm = modes.beta.modulus();
    let gm = modes.gamma.modulus();
    let rel = modes.beta.phase() - modes.gamma.phase();
    StokesVector {
        s0: (bm * bm + gm * gm) * lam,
        s1: (bm - gm) * (bm + gm) * lam,
        s2: 2.0 * lam * bm * gm * rel.cos(),
        s3: 2.0 * lam * bm * gm * (-rel).sin(),
    }
}

/// Stokes parameters as truncated expectation values of the quadratic mode
/// operators, for any bimodal state.
///
/// Operators: `Ŝ₀ = n̂ₓ + n̂ᵧ`, `Ŝ₁ = n̂ₓ − n̂ᵧ`, `Ŝ₂ = aₓ†aᵧ + aᵧ†aₓ`,
/// `Ŝ₃ = i(aᵧ†aₓ − aₓ†aᵧ)`.
pub fn stokes_oracle(state: &CVector, dim: FockDim) -> Result<StokesVector, StateError> {
    let d = dim.get();
    if state.len() != d * d {
        return Err(StateError::WrongStateLength { len: state.len(), dim: d });
    }
    let (a, _) = fock::ladder(dim);
    let ax = fock::tensor(&a, &fock::identity(dim));
    let ay = fock::tensor(&fock::identity(dim), &a);
    let vx = &ax * state;
    let vy = &ay * state;
    let cross = vx.dotc(&vy); // ⟨aₓ†aᵧ⟩
    Ok(StokesVector {
        s0: vx.norm_squared() + vy.norm_squared(),
        s1: vx.norm_squared() - vy.norm_squared(),
        s2: 2.0 * cross.re,
        s3: 2.0 * cross.im,
    })
}
