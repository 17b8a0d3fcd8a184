//! Transiting (kernel) operators in the s-parameterized correspondence.
//!
//! The single-mode kernel is built in its separable normal-ordered form
//!
//! ```text
//! t(α, s) = λ e^{−λ|α|²} · exp(λα a†) · :exp(−λ n̂): · exp(λα* a),    λ = 2/(1−s)
//! ```
//!
//! which is the exact restriction of the infinite-dimensional operator to the
//! retained Fock block: the raising/lowering exponentials are finite sums
//! there, and `:exp(µ n̂):` is diagonal with entries `(1+µ)^m`. The displaced
//! diagonal form `λ D(α) ((s+1)/(s−1))^n̂ D†(α)` is the same operator; tests
//! verify the two routes agree away from the truncation edge, where the
//! matrix exponential of the truncated generator folds leaked amplitude back
//! into the block.
//!
//! The higher-order operator generalizes the wings to `a†ⁿ` powers and the
//! diagonal to `:exp(µ n̂ⁿ):`, read as Σ_k (µᵏ/k!) a†^{nk} a^{nk} per mode.
//! That convention is pinned by the coherent matrix-element rule
//! `⟨α| :exp(µ n̂ⁿ): |α⟩ = exp(µ|α|^{2n})`.

use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{self, Amplitude, CMatrix, CVector, FockDim, FockError};
use crate::Tolerances;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("s parameter {0} outside the supported range [-1, 0]")]
    UnsupportedS(f64),
    #[error("polarization order must be a positive integer, got {0}")]
    InvalidOrder(u32),
    #[error("expected polarization order {expected}, got {got}")]
    OrderMismatch { expected: u32, got: u32 },
    #[error("kernel construction produced non-finite entries at dim {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Quasiprobability ordering label, restricted to `[−1, 0]`.
///
/// `s = 0` is the Wigner kernel, `s = −1` the Q-kernel limit. Values above 0
/// (toward the P function) produce unbounded kernels and are rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SParameter(f64);

impl SParameter {
    pub const WIGNER: SParameter = SParameter(0.0);
    pub const HUSIMI_Q: SParameter = SParameter(-1.0);

    pub fn new(s: f64) -> Result<Self, KernelError> {
        if (-1.0..=0.0).contains(&s) {
            Ok(SParameter(s))
        } else {
            Err(KernelError::UnsupportedS(s))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// λ = 2/(1−s).
    pub fn lambda(self) -> f64 {
        2.0 / (1.0 - self.0)
    }

    /// (s+1)/(s−1), the base of the diagonal factor; equals 1 − λ.
    pub fn diag_base(self) -> f64 {
        (self.0 + 1.0) / (self.0 - 1.0)
    }
}

/// Order `n` together with the complex index of polarization `p⁽ⁿ⁾`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationIndex {
    order: u32,
    value: Complex64,
}

impl PolarizationIndex {
    pub fn new(order: u32, value: Complex64) -> Result<Self, KernelError> {
        if order == 0 {
            Err(KernelError::InvalidOrder(order))
        } else {
            Ok(PolarizationIndex { order, value })
        }
    }

    pub fn order(self) -> u32 {
        self.order
    }

    pub fn value(self) -> Complex64 {
        self.value
    }

    /// The non-random amplitude ratio `|p⁽ⁿ⁾|^{1/n}`.
    pub fn amplitude_ratio(self) -> f64 {
        self.value.norm().powf(1.0 / self.order as f64)
    }

    /// The `n` equally spaced phase-difference values `(Δ⁽ⁿ⁾ + 2mπ)/n`,
    /// each in `[0, 2π)`, spaced by `2π/n`.
    pub fn phase_values(self) -> Vec<f64> {
        let delta = Amplitude(self.value).phase();
        let n = self.order as f64;
        (0..self.order)
            .map(|m| (delta + 2.0 * std::f64::consts::PI * m as f64) / n)
            .collect()
    }
}

/// `exp(c a†ⁿ)` on the retained block (an exact finite sum there).
pub fn raising_exponential(coeff: Complex64, power: u32, dim: FockDim) -> CMatrix {
    assert!(power >= 1, "raising power must be positive");
    let d = dim.get();
    let n = power as usize;
    let mut w = CMatrix::zeros(d, d);
    for j in 0..d {
        // k-th term connects |j⟩ → |j + nk⟩ with weight cᵏ/k! √((j+nk)!/j!)
        let mut entry = Complex64::from(1.0);
        let mut k = 0usize;
        loop {
            let m = j + n * k;
            if m >= d {
                break;
            }
            w[(m, j)] = entry;
            k += 1;
            if j + n * k >= d {
                break;
            }
            entry *= coeff / Complex64::from(k as f64);
            for step in 0..n {
                entry *= Complex64::from(((j + n * (k - 1) + step + 1) as f64).sqrt());
            }
        }
    }
    w
}

/// Diagonal of `:exp(µ n̂ⁿ):` under the convention Σ_k (µᵏ/k!) a†^{nk} a^{nk}.
///
/// Entry m equals m!·[xᵐ] e^{x + µxⁿ}; the coefficients follow the stable
/// forward recurrence (m+1)·g_{m+1} = g_m + nµ·g_{m+1−n} from g' = (1+nµxⁿ⁻¹)g.
pub fn normal_ordered_diagonal(mu: f64, power: u32, dim: FockDim) -> Vec<f64> {
    assert!(power >= 1, "normal-ordering power must be positive");
    let d = dim.get();
    let n = power as usize;
    let mut g = vec![0.0f64; d];
    g[0] = 1.0;
    for m1 in 1..d {
        let lower = if m1 >= n { g[m1 - n] } else { 0.0 };
        g[m1] = (g[m1 - 1] + n as f64 * mu * lower) / m1 as f64;
    }
    let mut factorial = 1.0f64;
    g.iter()
        .enumerate()
        .map(|(m, gm)| {
            if m > 0 {
                factorial *= m as f64;
            }
            gm * factorial
        })
        .collect()
}

/// Single-mode factor `exp(c a†ⁿ) · :exp(µ n̂ⁿ): · exp(c* aⁿ)`.
fn mode_factor(coeff: Complex64, power: u32, mu: f64, dim: FockDim) -> CMatrix {
    let w = raising_exponential(coeff, power, dim);
    let diag = CVector::from_iterator(
        dim.get(),
        normal_ordered_diagonal(mu, power, dim).into_iter().map(Complex64::from),
    );
    let wd = &w * CMatrix::from_diagonal(&diag);
    let f = &wd * w.adjoint();
    // analytically hermitian; symmetrize away the product's rounding skew
    let half = Complex64::from(0.5);
    let ft = f.adjoint();
    (f + ft) * half
}

fn ensure_finite(m: CMatrix, dim: usize) -> Result<CMatrix, KernelError> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(m)
    } else {
        Err(KernelError::NonFinite(dim))
    }
}

/// Single-mode transiting operator `t(α, s)`.
///
/// Hermitian by construction; its trace tends to 1 for s ∈ [−1, 0) as the
/// dimension grows, and its coherent expectation is `λ e^{−λ|α−α₀|²}`.
pub fn kernel_single(
    alpha: Amplitude,
    s: SParameter,
    dim: FockDim,
) -> Result<CMatrix, KernelError> {
    check_tail(alpha, dim)?;
    let lam = s.lambda();
    let factor = mode_factor(Complex64::from(lam) * alpha.value(), 1, -lam, dim);
    let scale = Complex64::from(lam * (-lam * alpha.value().norm_sqr()).exp());
    ensure_finite(factor * scale, dim.get())
}

/// Bimodal transiting operator `T(αₓ, αᵧ, s) = t(αₓ, s) ⊗ t(αᵧ, s)`.
pub fn kernel_bimodal(
    ax: Amplitude,
    ay: Amplitude,
    s: SParameter,
    dim: FockDim,
) -> Result<CMatrix, KernelError> {
    let tx = kernel_single(ax, s, dim)?;
    let ty = kernel_single(ay, s, dim)?;
    Ok(fock::tensor(&tx, &ty))
}

/// Transiting operator for perfectly polarized light: the bimodal kernel at
/// `αᵧ = p αₓ` with a first-order index.
pub fn kernel_polarized(
    ax: Amplitude,
    p: PolarizationIndex,
    s: SParameter,
    dim: FockDim,
) -> Result<CMatrix, KernelError> {
    if p.order() != 1 {
        return Err(KernelError::OrderMismatch { expected: 1, got: p.order() });
    }
    kernel_bimodal(ax, Amplitude(p.value() * ax.value()), s, dim)
}

/// Generalized transiting operator of order `n = p.order()`:
///
/// ```text
/// T⁽ⁿ⁾ = 𝒥 · exp(λαₓⁿ(aₓ†ⁿ + p⁽ⁿ⁾aᵧ†ⁿ)) · :exp(−λ(n̂ₓⁿ + n̂ᵧⁿ)): · exp(λαₓ*ⁿ(aₓⁿ + p*⁽ⁿ⁾aᵧⁿ))
/// 𝒥    = λ² exp(−λ(1 + |p⁽ⁿ⁾|²)|αₓ|^{2n})
/// ```
///
/// Since the mode operators commute, each factor splits as a Kronecker
/// product and the whole operator is `𝒥 · Fx ⊗ Fy` with per-mode factors.
/// Reduces to [`kernel_polarized`] at n = 1.
pub fn kernel_higher(
    ax: Amplitude,
    p: PolarizationIndex,
    s: SParameter,
    dim: FockDim,
) -> Result<CMatrix, KernelError> {
    check_tail(ax, dim)?;
    check_tail(Amplitude::from(p.amplitude_ratio() * ax.modulus()), dim)?;
    kernel_higher_truncated(ax, p, s, dim)
}

/// [`kernel_higher`] without the tail-mass gate, for deliberate
/// under-truncation in convergence scans.
pub fn kernel_higher_truncated(
    ax: Amplitude,
    p: PolarizationIndex,
    s: SParameter,
    dim: FockDim,
) -> Result<CMatrix, KernelError> {
    let n = p.order();
    let lam = s.lambda();
    let axn = ax.value().powu(n);
    let cx = Complex64::from(lam) * axn;
    let cy = Complex64::from(lam) * axn * p.value();
    let fx = mode_factor(cx, n, -lam, dim);
    let fy = mode_factor(cy, n, -lam, dim);
    let prefactor = lam * lam
        * (-lam * (1.0 + p.value().norm_sqr()) * ax.modulus().powi(2 * n as i32)).exp();
    ensure_finite(
        fock::tensor(&fx, &fy) * Complex64::from(prefactor),
        dim.bimodal(),
    )
}

fn check_tail(alpha: Amplitude, dim: FockDim) -> Result<(), FockError> {
    let bound = Tolerances::default().tail_mass;
    let tail = dim.tail_mass(alpha.modulus());
    if tail >= bound {
        Err(FockError::TruncationTooSmall {
            alpha_mod: alpha.modulus(),
            dim: dim.get(),
            tail,
            bound,
            required: FockDim::for_amplitude(alpha.modulus(), bound).get(),
        })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent, expect, hermiticity_defect, max_abs_diff, trace};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn dim(n: usize) -> FockDim {
        FockDim::new(n).unwrap()
    }

    fn wigner() -> SParameter {
        SParameter::WIGNER
    }

    #[test]
    fn s_parameter_range() {
        assert!(SParameter::new(0.0).is_ok());
        assert!(SParameter::new(-1.0).is_ok());
        assert!(matches!(SParameter::new(0.1), Err(KernelError::UnsupportedS(_))));
        assert!(matches!(SParameter::new(-1.0001), Err(KernelError::UnsupportedS(_))));
        assert!(matches!(SParameter::new(f64::NAN), Err(KernelError::UnsupportedS(_))));
    }

    #[test]
    fn polarization_index_phases() {
        let p = PolarizationIndex::new(2, Complex64::from(1.0)).unwrap();
        let phases = p.phase_values();
        assert!((phases[0] - 0.0).abs() < 1e-15);
        assert!((phases[1] - PI).abs() < 1e-15);
        assert!((p.amplitude_ratio() - 1.0).abs() < 1e-15);

        // γ = iβ gives p⁽²⁾ = −1, phases {π/2, 3π/2}
        let p = PolarizationIndex::new(2, Complex64::from(-1.0)).unwrap();
        let phases = p.phase_values();
        assert!((phases[0] - PI / 2.0).abs() < 1e-15);
        assert!((phases[1] - 3.0 * PI / 2.0).abs() < 1e-15);

        assert!(matches!(
            PolarizationIndex::new(0, Complex64::from(1.0)),
            Err(KernelError::InvalidOrder(0))
        ));
    }

    proptest! {
        #[test]
        fn phase_values_spacing(order in 1u32..6, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            prop_assume!(re * re + im * im > 1e-6);
            let p = PolarizationIndex::new(order, Complex64::new(re, im)).unwrap();
            let phases = p.phase_values();
            prop_assert_eq!(phases.len(), order as usize);
            let step = 2.0 * PI / order as f64;
            for w in phases.windows(2) {
                prop_assert!((w[1] - w[0] - step).abs() < 1e-12);
            }
            for &v in &phases {
                prop_assert!((0.0..2.0 * PI).contains(&v));
            }
        }
    }

    #[test]
    fn q_limit_is_coherent_projector() {
        let d = dim(32);
        let alpha = Amplitude::from(0.5);
        let t = kernel_single(alpha, SParameter::HUSIMI_Q, d).unwrap();
        let v = coherent(alpha, d).unwrap();
        let proj = CMatrix::from_fn(32, 32, |i, j| v[i] * v[j].conj());
        assert!(max_abs_diff(&t, &proj) < 1e-12);
    }

    #[test]
    fn wigner_kernel_at_origin_is_twice_parity() {
        let d = dim(8);
        let t = kernel_single(Amplitude::zero(), wigner(), d).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j {
                    if i % 2 == 0 { 2.0 } else { -2.0 }
                } else {
                    0.0
                };
                assert!((t[(i, j)] - Complex64::from(want)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn coherent_expectation_is_gaussian() {
        let d = dim(32);
        let t = kernel_single(Amplitude::from(0.7), wigner(), d).unwrap();
        let v = coherent(Amplitude::from(0.7), d).unwrap();
        let got = expect(&v, &t).unwrap();
        assert!((got.re - 2.0).abs() < 1e-10, "got {got}");
        assert!(got.im.abs() < 1e-12);

        // displaced probe: Tr[|α₀⟩⟨α₀| t(α, 0)] = 2 e^{−2|α−α₀|²}
        let alpha = Amplitude::new(0.3, -0.4);
        let alpha0 = Amplitude::new(-0.2, 0.5);
        let t = kernel_single(alpha, wigner(), d).unwrap();
        let v = coherent(alpha0, d).unwrap();
        let got = expect(&v, &t).unwrap();
        let want = 2.0 * (-2.0 * (alpha.value() - alpha0.value()).norm_sqr()).exp();
        assert!((got.re - want).abs() < 1e-10);
    }

    #[test]
    fn trace_tends_to_one_below_wigner() {
        let d = dim(32);
        for s in [-1.0, -0.7, -0.3] {
            let t = kernel_single(Amplitude::from(0.6), SParameter::new(s).unwrap(), d).unwrap();
            let tr = trace(&t);
            // geometric tail |q|^dim plus rounding
            let q = (s + 1.0) / (s - 1.0);
            let bound = 3.0 * q.abs().powi(32) + 1e-10;
            assert!((tr.re - 1.0).abs() < bound, "s={s}: trace {tr}");
            assert!(tr.im.abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_trace_balanced_at_even_dim_for_origin() {
        // the parity diagonal cancels pairwise only when dim is even
        let t = kernel_single(Amplitude::zero(), wigner(), dim(32)).unwrap();
        assert!(trace(&t).norm() < 1e-14);
        let t = kernel_single(Amplitude::zero(), wigner(), dim(33)).unwrap();
        assert!((trace(&t).re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn normal_ordered_diagonal_first_order_is_geometric() {
        let d = normal_ordered_diagonal(-2.0, 1, dim(8));
        for (m, &v) in d.iter().enumerate() {
            let want = (-1.0f64).powi(m as i32);
            assert!((v - want).abs() < 1e-14);
        }
        let d = normal_ordered_diagonal(-1.0, 1, dim(8));
        assert_eq!(d[0], 1.0);
        assert!(d[1..].iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn coherent_rule_for_normal_ordered_exponential() {
        // ⟨α| :exp(µ n̂ⁿ): |α⟩ = exp(µ |α|^{2n}) — the identity pinning the convention.
        // dim 64 keeps the n = 3 coefficient tail below the tolerance at |α| = 1.
        let d = dim(64);
        for n in 1u32..=3 {
            for mu in [-2.0, -1.0, -0.5] {
                for amod in [0.3, 0.7, 1.0] {
                    let alpha = Amplitude::from_polar(amod, 0.9);
                    let v = coherent(alpha, d).unwrap();
                    let diag = normal_ordered_diagonal(mu, n, d);
                    let got: f64 = v
                        .iter()
                        .zip(diag.iter())
                        .map(|(c, dm)| c.norm_sqr() * dm)
                        .sum();
                    let want = (mu * amod.powi(2 * n as i32)).exp();
                    assert!(
                        (got - want).abs() < 1e-10 * want.abs().max(1.0),
                        "n={n} mu={mu} amod={amod}: got {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn bimodal_vacuum_q_projector() {
        let d = dim(16);
        let t = kernel_bimodal(Amplitude::zero(), Amplitude::zero(), SParameter::HUSIMI_Q, d)
            .unwrap();
        let mut want = CMatrix::zeros(256, 256);
        want[(0, 0)] = Complex64::from(1.0);
        assert!(max_abs_diff(&t, &want) < 1e-14);
    }

    #[test]
    fn bimodal_trace_factorizes() {
        let d = dim(24);
        let s = SParameter::new(-0.5).unwrap();
        let ax = Amplitude::new(0.4, 0.1);
        let ay = Amplitude::new(-0.2, 0.3);
        let t = kernel_bimodal(ax, ay, s, d).unwrap();
        let tx = kernel_single(ax, s, d).unwrap();
        let ty = kernel_single(ay, s, d).unwrap();
        assert!((trace(&t) - trace(&tx) * trace(&ty)).norm() < 1e-10);
    }

    #[test]
    fn bimodal_coherent_expectation() {
        let d = dim(32);
        let t = kernel_bimodal(Amplitude::from(0.7), Amplitude::from(0.7), wigner(), d).unwrap();
        let v = fock::tensor_state(
            &coherent(Amplitude::from(0.7), d).unwrap(),
            &coherent(Amplitude::from(0.7), d).unwrap(),
        );
        let got = expect(&v, &t).unwrap();
        assert!((got.re - 4.0).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn polarized_zero_index_factorizes() {
        let d = dim(16);
        let p = PolarizationIndex::new(1, Complex64::from(0.0)).unwrap();
        let ax = Amplitude::from(0.5);
        let t = kernel_polarized(ax, p, wigner(), d).unwrap();
        let want = fock::tensor(
            &kernel_single(ax, wigner(), d).unwrap(),
            &kernel_single(Amplitude::zero(), wigner(), d).unwrap(),
        );
        assert!(max_abs_diff(&t, &want) < 1e-13);
    }

    #[test]
    fn polarized_matches_bimodal_substitution() {
        let d = dim(24);
        let ax = Amplitude::from(0.5);
        for (pre, pim) in [(1.0, 0.0), (0.0, 1.0)] {
            let p = PolarizationIndex::new(1, Complex64::new(pre, pim)).unwrap();
            let t = kernel_polarized(ax, p, wigner(), d).unwrap();
            let want =
                kernel_bimodal(ax, Amplitude(Complex64::new(pre, pim) * ax.value()), wigner(), d)
                    .unwrap();
            assert!(max_abs_diff(&t, &want) < 1e-12);
        }
        let wrong = PolarizationIndex::new(2, Complex64::from(1.0)).unwrap();
        assert!(matches!(
            kernel_polarized(ax, wrong, wigner(), d),
            Err(KernelError::OrderMismatch { .. })
        ));
    }

    #[test]
    fn higher_reduces_to_polarized_at_first_order() {
        let d = dim(24);
        let ax = Amplitude::from(0.5);
        for s in [SParameter::WIGNER, SParameter::new(-0.4).unwrap()] {
            for p in [Complex64::from(1.0), Complex64::new(0.3, 0.6)] {
                let p1 = PolarizationIndex::new(1, p).unwrap();
                let hi = kernel_higher(ax, p1, s, d).unwrap();
                let lo = kernel_polarized(ax, p1, s, d).unwrap();
                assert!(max_abs_diff(&hi, &lo) < 1e-10, "s={:?} p={p}", s.value());
            }
        }
    }

    #[test]
    fn higher_at_origin_is_diagonal() {
        let d = dim(12);
        let p = PolarizationIndex::new(2, Complex64::from(1.0)).unwrap();
        let t = kernel_higher(Amplitude::zero(), p, wigner(), d).unwrap();
        let diag = normal_ordered_diagonal(-2.0, 2, d);
        for i in 0..144 {
            for j in 0..144 {
                let want = if i == j {
                    4.0 * diag[i / 12] * diag[i % 12]
                } else {
                    0.0
                };
                assert!(
                    (t[(i, j)] - Complex64::from(want)).norm() < 1e-12,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn higher_hermitian_and_even_parity() {
        let d = dim(24);
        let p = PolarizationIndex::new(2, Complex64::new(0.8, 0.3)).unwrap();
        let ax = Amplitude::new(0.5, 0.4);
        let t = kernel_higher(ax, p, wigner(), d).unwrap();
        // relative defect: edge entries of the n = 2 kernel grow like the
        // unbounded :exp(−λn̂²): diagonal, so an absolute bound is meaningless
        assert!(fock::hermiticity_defect_rel(&t) < Tolerances::default().hermiticity);

        // even total degree per mode: ⟨−β,−γ|T|−β,−γ⟩ = ⟨β,γ|T|β,γ⟩
        let beta = Amplitude::new(0.6, -0.2);
        let gamma = Amplitude::new(-0.1, 0.5);
        let plus = fock::tensor_state(&coherent(beta, d).unwrap(), &coherent(gamma, d).unwrap());
        let minus =
            fock::tensor_state(&coherent(-beta, d).unwrap(), &coherent(-gamma, d).unwrap());
        let ep = expect(&plus, &t).unwrap();
        let em = expect(&minus, &t).unwrap();
        assert!((ep - em).norm() < 1e-10 * (1.0 + ep.norm()));
    }

    proptest! {
        #[test]
        fn kernel_single_hermitian(
            re in -0.9f64..0.9, im in -0.9f64..0.9, s in -1.0f64..0.0,
        ) {
            let t = kernel_single(
                Amplitude::new(re, im),
                SParameter::new(s).unwrap(),
                dim(24),
            ).unwrap();
            prop_assert!(hermiticity_defect(&t) < Tolerances::default().hermiticity);
        }
    }
}
