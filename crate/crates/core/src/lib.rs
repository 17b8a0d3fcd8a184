//! Numerical phase-space toolkit for higher-order optical polarization.
//!
//! Everything is built on dense complex linear algebra over a truncated
//! Fock basis `|0⟩ … |dim−1⟩`:
//!
//! - [`fock`] — states, ladder/displacement operators, tensor products,
//!   traces and expectation values;
//! - [`kernel`] — the s-parameterized transiting (kernel) operators,
//!   including the generalized higher-order operator with an explicit
//!   normal-ordering convention;
//! - [`states`] — entangled coherent states, the higher-order polarization
//!   criterion, and Stokes parameters (closed form and operator oracle);
//! - [`wigner`] — closed-form evaluators for the 2nd-order polarization
//!   Wigner function, phase-space grids and peak detection;
//! - [`oracle`] — brute-force `Tr[ρ̂ T̂⁽ⁿ⁾]` evaluation used to cross-validate
//!   every closed form, plus truncation-convergence scans.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to use from multiple threads.

pub mod fock;
pub mod kernel;
pub mod oracle;
pub mod states;
pub mod wigner;

pub use fock::{Amplitude, CMatrix, CVector, FockDim};
pub use kernel::{PolarizationIndex, SParameter};
pub use states::{ModePair, StokesVector};
pub use wigner::{PhaseSpacePoint, WignerGrid, WignerParams};

/// Numerical tolerances used by constructors and checks.
///
/// One record holds every knob so tests and callers read the same defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bound on |‖ψ‖ − 1| for states tagged normalized.
    pub norm: f64,
    /// Bound on ‖A − A†‖_max for operators tagged hermitian.
    pub hermiticity: f64,
    /// Bound on ‖A†A − I‖_max away from the truncation edge.
    pub unitarity: f64,
    /// Bound on ‖D(α)|0⟩ − |α⟩‖ between the two coherent constructions.
    pub displacement: f64,
    /// Poisson tail mass allowed beyond the retained Fock levels.
    pub tail_mass: f64,
    /// Relative gap under which a truncation scan counts as converged.
    pub convergence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            norm: 1e-10,
            hermiticity: 1e-10,
            unitarity: 1e-8,
            displacement: 1e-8,
            tail_mass: 1e-12,
            convergence: 1e-8,
        }
    }
}

/// Wrap an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let w = theta.rem_euclid(tau);
    // rem_euclid can return exactly tau when theta is a tiny negative number
    if w >= tau {
        0.0
    } else {
        w
    }
}
