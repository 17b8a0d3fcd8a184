//! Truncated Fock-space linear algebra.
//!
//! States are dense complex vectors over `|0⟩ … |dim−1⟩` (length `dim` for a
//! single mode, `dim²` for two modes), operators are dense complex matrices.
//! The bimodal ordering is fixed: the x mode is the left tensor factor and
//! flattening is row-major, so index `i = ix·dim + iy`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::Tolerances;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("Fock dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error(
        "truncation too small for |alpha| = {alpha_mod}: tail mass {tail:.3e} at dim {dim} \
         exceeds {bound:.3e} (need dim >= {required})"
    )]
    TruncationTooSmall {
        alpha_mod: f64,
        dim: usize,
        tail: f64,
        bound: f64,
        required: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A complex mode amplitude with polar accessors.
///
/// The phase of the zero amplitude is defined to be 0, and all phases are
/// reported in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude(pub Complex64);

impl Amplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Amplitude(Complex64::new(re, im))
    }

    pub fn from_polar(modulus: f64, phase: f64) -> Self {
        Amplitude(Complex64::from_polar(modulus, phase))
    }

    pub fn zero() -> Self {
        Amplitude(Complex64::new(0.0, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn modulus(self) -> f64 {
        self.0.norm()
    }

    /// Phase in `[0, 2π)`; 0 for the zero amplitude.
    pub fn phase(self) -> f64 {
        if self.0.norm_sqr() == 0.0 {
            0.0
        } else {
            crate::wrap_angle(self.0.arg())
        }
    }

    pub fn conj(self) -> Self {
        Amplitude(self.0.conj())
    }
}

impl From<Complex64> for Amplitude {
    fn from(z: Complex64) -> Self {
        Amplitude(z)
    }
}

impl From<f64> for Amplitude {
    fn from(x: f64) -> Self {
        Amplitude(Complex64::new(x, 0.0))
    }
}

impl std::ops::Neg for Amplitude {
    type Output = Amplitude;
    fn neg(self) -> Amplitude {
        Amplitude(-self.0)
    }
}

/// Number of retained Fock levels per mode (at least 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FockDim(usize);

impl FockDim {
    pub fn new(dim: usize) -> Result<Self, FockError> {
        if dim < 2 {
            Err(FockError::InvalidDimension(dim))
        } else {
            Ok(FockDim(dim))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Dimension of the two-mode tensor space.
    pub fn bimodal(self) -> usize {
        self.0 * self.0
    }

    /// Poisson tail mass of `|alpha|²` beyond level `dim − 1`.
    pub fn tail_mass(self, alpha_mod: f64) -> f64 {
        poisson_tail(alpha_mod * alpha_mod, self.0)
    }

    /// Smallest even dimension (at least 16) whose Poisson tail for
    /// `|alpha|²` is below `bound`.
    ///
    /// Even dimensions keep the parity diagonal of the s = 0 kernel balanced.
    pub fn for_amplitude(alpha_mod: f64, bound: f64) -> Self {
        let mut dim = 16usize;
        while poisson_tail(alpha_mod * alpha_mod, dim) >= bound && dim < 1 << 20 {
            dim += 2;
        }
        FockDim(dim)
    }

    fn check_tail(self, alpha: Amplitude, bound: f64) -> Result<(), FockError> {
        let tail = self.tail_mass(alpha.modulus());
        if tail >= bound {
            Err(FockError::TruncationTooSmall {
                alpha_mod: alpha.modulus(),
                dim: self.0,
                tail,
                bound,
                required: FockDim::for_amplitude(alpha.modulus(), bound).get(),
            })
        } else {
            Ok(())
        }
    }
}

fn poisson_tail(lambda: f64, dim: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let mut term = (-lambda).exp();
    let mut cum = term;
    for n in 1..dim {
        term *= lambda / n as f64;
        cum += term;
    }
    (1.0 - cum).max(0.0)
}

/// Annihilation and creation operators: `a|n⟩ = √n |n−1⟩`, `a† = aᵀ*`.
pub fn ladder(dim: FockDim) -> (CMatrix, CMatrix) {
    let n = dim.get();
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    (a, adag)
}

/// Diagonal number operator `n̂ = a†a`.
pub fn number_operator(dim: FockDim) -> CMatrix {
    let n = dim.get();
    CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        (0..n).map(|k| Complex64::new(k as f64, 0.0)),
    ))
}

pub fn identity(dim: FockDim) -> CMatrix {
    CMatrix::identity(dim.get(), dim.get())
}

/// Truncated coherent state with the default tail-mass bound.
///
/// Components are `cₙ = e^{−|α|²/2} αⁿ/√n!`; fails when the Poisson tail
/// beyond the retained levels exceeds the bound.
pub fn coherent(alpha: Amplitude, dim: FockDim) -> Result<CVector, FockError> {
    coherent_checked(alpha, dim, Tolerances::default().tail_mass)
}

pub fn coherent_checked(
    alpha: Amplitude,
    dim: FockDim,
    tail_bound: f64,
) -> Result<CVector, FockError> {
    dim.check_tail(alpha, tail_bound)?;
    Ok(coherent_truncated(alpha, dim))
}

/// Raw truncation of the coherent expansion, with no tail-mass check.
///
/// Used by convergence scans that deliberately under-truncate.
pub fn coherent_truncated(alpha: Amplitude, dim: FockDim) -> CVector {
    let n = dim.get();
    let z = alpha.value();
    let scale = (-0.5 * z.norm_sqr()).exp();
    let mut c = Complex64::new(scale, 0.0);
    CVector::from_iterator(
        n,
        (0..n).map(|k| {
            if k > 0 {
                c *= z / Complex64::from((k as f64).sqrt());
            }
            c
        }),
    )
}

/// Unitary displacement operator `D(α) = exp(α a† − α* a)`.
pub fn displacement(alpha: Amplitude, dim: FockDim) -> Result<CMatrix, FockError> {
    dim.check_tail(alpha, Tolerances::default().tail_mass)?;
    let (a, adag) = ladder(dim);
    let gen = adag * alpha.value() - a * alpha.value().conj();
    Ok(expm(&gen))
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(m: &CMatrix) -> CMatrix {
    assert_eq!(m.nrows(), m.ncols(), "expm needs a square matrix");
    let n = m.nrows();
    // induced 1-norm for the scaling estimate
    let norm = (0..n)
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let x = m * Complex64::from(0.5f64.powi(squarings as i32));
    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=40u32 {
        term = (&term * &x) / Complex64::from(k as f64);
        sum += &term;
        let tmax = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if tmax < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Kronecker product with the x mode as the left factor.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of state vectors, x mode left.
pub fn tensor_state(a: &CVector, b: &CVector) -> CVector {
    let (na, nb) = (a.len(), b.len());
    CVector::from_fn(na * nb, |i, _| a[i / nb] * b[i % nb])
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// `⟨ψ|A|ψ⟩`.
pub fn expect(state: &CVector, op: &CMatrix) -> Result<Complex64, FockError> {
    if op.nrows() != op.ncols() || op.ncols() != state.len() {
        return Err(FockError::DimensionMismatch(format!(
            "operator {}x{} against state of length {}",
            op.nrows(),
            op.ncols(),
            state.len()
        )));
    }
    Ok(state.dotc(&(op * state)))
}

/// `‖A − A†‖_max`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖A − A†‖_max / max(1, ‖A‖_max)`, for operators whose truncation-edge
/// entries are legitimately huge.
pub fn hermiticity_defect_rel(m: &CMatrix) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    hermiticity_defect(m) / scale
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
