//! Closed-form evaluators for the 2nd-order polarization Wigner function,
//! the odd-order proportional form, phase-space grids and peak detection.
//!
//! Conventions: all angles live in `[0, 2π)`; `Φ = 2(φ_x − φ_β)` and
//! `Θ = Δ⁽²⁾ − Δ_HS⁽²⁾`; the branch indices relate the half-angle coordinates
//! to the primary phases via `δ = ½(Δ⁽²⁾ + 2mπ)` and `δ_HS = ½(2lπ + Δ_HS⁽²⁾)`.
//! Because the exponent of the Poincaré form is a product of two cosines
//! shifted by the same argument, it is π-periodic in that argument; the
//! branch inputs k and l therefore never change the value and k defaults to m
//! (the identification under which the half-angle algebra reproduces the
//! general form exactly).

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::fock::Amplitude;
use crate::kernel::PolarizationIndex;
use crate::states::{lambda_factor, ModePair, StateError};
use crate::wrap_angle;

#[derive(Debug, Error)]
pub enum WignerError {
    #[error("axis pair must name two distinct axes, got {0} and {1}")]
    InvalidAxisPair(&'static str, &'static str),
    #[error("grid resolution must be at least 2 per axis, got {0}")]
    ResolutionTooSmall(usize),
    #[error(
        "Poincare form requires |p2| = |p_HS| = 1, got |p2| = {p2_mod}, |p_HS| = {phs_mod}"
    )]
    PoincareRestriction { p2_mod: f64, phs_mod: f64 },
    #[error("expected polarization order {expected}, got {got}")]
    OrderMismatch { expected: u32, got: u32 },
    #[error("the odd-order form is undefined at beta = 0")]
    ZeroBeta,
    #[error("grid cell ({i}, {j}) is not a positive finite value: {value}")]
    NonPositiveCell { i: usize, j: usize, value: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Fixed parameters of the 2nd-order surface.
///
/// γ is implied: `|γ| = |β|·|p_HS⁽²⁾|^{1/2}` and
/// `φ_γ = φ_β + ½(Δ_HS⁽²⁾ + 2lπ)` for a chosen branch l.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerParams {
    pub beta_mod: f64,
    pub beta_phase: f64,
    /// |p⁽²⁾| of the kernel index.
    pub p2_mod: f64,
    /// Δ⁽²⁾ of the kernel index.
    pub p2_phase: f64,
    /// |p_HS⁽²⁾| of the state index.
    pub phs_mod: f64,
    /// Δ_HS⁽²⁾ of the state index.
    pub phs_phase: f64,
}

impl WignerParams {
    /// Poincaré-sphere surface parameters: unit kernel and state moduli.
    pub fn poincare(beta_mod: f64, beta_phase: f64, p2_phase: f64, phs_phase: f64) -> Self {
        WignerParams {
            beta_mod,
            beta_phase: wrap_angle(beta_phase),
            p2_mod: 1.0,
            p2_phase: wrap_angle(p2_phase),
            phs_mod: 1.0,
            phs_phase: wrap_angle(phs_phase),
        }
    }

    pub fn gamma_mod(&self) -> f64 {
        self.beta_mod * self.phs_mod.sqrt()
    }

    pub fn gamma_phase(&self, l: u8) -> f64 {
        wrap_angle(self.beta_phase + 0.5 * (self.phs_phase + TAU * l as f64))
    }

    /// The coherent amplitudes of the even state described by these
    /// parameters, on the given phase branch.
    pub fn modes(&self, l: u8) -> ModePair {
        ModePair::new(
            Amplitude::from_polar(self.beta_mod, self.beta_phase),
            Amplitude::from_polar(self.gamma_mod(), self.gamma_phase(l)),
        )
    }

    /// The kernel index p⁽²⁾ these parameters describe.
    pub fn kernel_index(&self) -> PolarizationIndex {
        PolarizationIndex::new(
            2,
            num_complex::Complex64::from_polar(self.p2_mod, self.p2_phase),
        )
        .expect("order 2 is valid")
    }

    /// Parameters with Δ⁽²⁾ refreshed from a half-angle coordinate δ,
    /// keeping `δ = ½(Δ⁽²⁾ + 2mπ)` consistent (the 2mπ drops modulo 2π).
    pub fn with_delta(&self, delta: f64) -> Self {
        WignerParams { p2_phase: wrap_angle(2.0 * delta), ..*self }
    }
}

/// A phase-space evaluation point with its branch indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub alpha_mod: f64,
    pub phi_x: f64,
    /// Half-angle coordinate δ = ½(Δ⁽²⁾ + 2mπ).
    pub delta: f64,
    pub m: u8,
    pub l: u8,
    pub k: u8,
}

impl PhaseSpacePoint {
    /// A point whose δ is consistent with the Δ⁽²⁾ stored in `params`.
    pub fn consistent(
        params: &WignerParams,
        alpha_mod: f64,
        phi_x: f64,
        m: u8,
        l: u8,
        k: u8,
    ) -> Self {
        PhaseSpacePoint {
            alpha_mod,
            phi_x: wrap_angle(phi_x),
            delta: wrap_angle(0.5 * params.p2_phase + PI * m as f64),
            m,
            l,
            k,
        }
    }

    pub fn alpha(&self) -> Amplitude {
        Amplitude::from_polar(self.alpha_mod, self.phi_x)
    }
}

/// The general closed form: `𝒥′ exp[4|αₓ|²|β|²(cos Φ + |p⁽²⁾||p_HS⁽²⁾| cos(Φ+Θ))]`
/// with `𝒥′ = 4 exp[−2(1+|p⁽²⁾|²)|αₓ|⁴ − 2(|β|⁴+|γ|⁴)]`.
///
/// Strictly positive for every finite input.
pub fn w2_closed(point: &PhaseSpacePoint, params: &WignerParams) -> f64 {
    let a2 = point.alpha_mod * point.alpha_mod;
    let b2 = params.beta_mod * params.beta_mod;
    let beta4 = b2 * b2;
    let gamma4 = beta4 * params.phs_mod * params.phs_mod;
    let phi = 2.0 * (point.phi_x - params.beta_phase);
    let theta = params.p2_phase - params.phs_phase;
    let j_prime =
        4.0 * (-2.0 * (1.0 + params.p2_mod * params.p2_mod) * a2 * a2 - 2.0 * (beta4 + gamma4))
            .exp();
    let wings = 4.0
        * a2
        * b2
        * (phi.cos() + params.p2_mod * params.phs_mod * (phi + theta).cos());
    j_prime * wings.exp()
}

/// The simplified Poincaré-sphere form, valid when `|p⁽²⁾| = |p_HS⁽²⁾| = 1`:
///
/// ```text
/// 𝒥′ exp[8|αₓ|²|β|² cos(δ − δ_HS − πk + πl) cos(2(φ_x − φ_β) + δ − δ_HS − πk + πl)]
/// ```
///
/// with `δ_HS = ½(2lπ + Δ_HS⁽²⁾)`. Equals [`w2_closed`] at the corresponding
/// phases for every branch assignment, because the cosine product is
/// π-periodic in its shared argument.
pub fn w2_poincare(point: &PhaseSpacePoint, params: &WignerParams) -> Result<f64, WignerError> {
    if (params.p2_mod - 1.0).abs() > 1e-12 || (params.phs_mod - 1.0).abs() > 1e-12 {
        return Err(WignerError::PoincareRestriction {
            p2_mod: params.p2_mod,
            phs_mod: params.phs_mod,
        });
    }
    let a2 = point.alpha_mod * point.alpha_mod;
    let b2 = params.beta_mod * params.beta_mod;
    let delta_hs = 0.5 * (TAU * point.l as f64 + params.phs_phase);
    let x = point.delta - delta_hs - PI * point.k as f64 + PI * point.l as f64;
    let j_prime = 4.0 * (-4.0 * a2 * a2 - 4.0 * b2 * b2).exp();
    let exponent = 8.0 * a2 * b2 * x.cos() * (2.0 * (point.phi_x - params.beta_phase) + x).cos();
    Ok(j_prime * exponent.exp())
}

/// The odd-order (n = 3) proportional form
/// `exp[−4|β|²R²(1 + |β|²R² + |β|⁴R⁴)] · Λ` with `R = |p_HS⁽³⁾|`.
///
/// Only a proportionality: the overall normalization is not fixed. The value
/// depends on the mode intensities alone, never on φ_x or δ.
pub fn w3_closed(modes: &ModePair, p3: PolarizationIndex) -> Result<f64, WignerError> {
    if p3.order() != 3 {
        return Err(WignerError::OrderMismatch { expected: 3, got: p3.order() });
    }
    if modes.beta.modulus() == 0.0 {
        return Err(WignerError::ZeroBeta);
    }
    let t = modes.beta.value().norm_sqr() * p3.value().norm_sqr();
    Ok((-4.0 * t * (1.0 + t + t * t)).exp() * lambda_factor(modes.j_sum()))
}

/// Sweepable grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Delta,
    PhiX,
    AlphaMod,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Delta => "delta",
            Axis::PhiX => "phi_x",
            Axis::AlphaMod => "alpha_mod",
        }
    }

    /// Angular axes wrap around; the radial one does not.
    pub fn is_periodic(self) -> bool {
        !matches!(self, Axis::AlphaMod)
    }

    /// Default sweep range: `[0, 2π)` for angles, `[0, 1.2)` for the radius.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            Axis::AlphaMod => (0.0, 1.2),
            _ => (0.0, TAU),
        }
    }
}

/// One axis of a grid: `count` samples from `start` toward `stop`, endpoint
/// excluded, so nested power-of-two resolutions share sample positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(axis: Axis, start: f64, stop: f64, count: usize) -> Self {
        AxisSpec { axis, start, stop, count }
    }

    /// Full default range at the given resolution.
    pub fn default_for(axis: Axis, count: usize) -> Self {
        let (start, stop) = axis.default_range();
        AxisSpec { axis, start, stop, count }
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / self.count as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

/// Which scalar evaluator filled a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridEvaluator {
    /// `w2_poincare` (unit moduli).
    Poincare,
    /// `w2_closed` (general moduli).
    Closed,
    /// `w3_closed`, an unnormalized proportional value.
    OddProportional,
}

impl GridEvaluator {
    pub fn name(self) -> &'static str {
        match self {
            GridEvaluator::Poincare => "w2_poincare",
            GridEvaluator::Closed => "w2_closed",
            GridEvaluator::OddProportional => "w3_proportional",
        }
    }
}

/// An evaluated surface with its full parameter record.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub params: WignerParams,
    pub base: PhaseSpacePoint,
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    pub evaluator: GridEvaluator,
    /// True when the values carry an unknown overall constant.
    pub proportional: bool,
    /// Row-major, axis1 outer.
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis2.count + j]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.count, self.axis2.count)
    }

    /// First cell (in row-major scan order) attaining the maximum value.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0usize, 0usize, f64::NEG_INFINITY);
        for i in 0..self.axis1.count {
            for j in 0..self.axis2.count {
                let v = self.at(i, j);
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        best
    }
}

fn apply_axis(
    point: &mut PhaseSpacePoint,
    params: &mut WignerParams,
    axis: Axis,
    value: f64,
) {
    match axis {
        Axis::Delta => {
            point.delta = value;
            *params = params.with_delta(value);
        }
        Axis::PhiX => point.phi_x = value,
        Axis::AlphaMod => point.alpha_mod = value,
    }
}

/// Dense evaluation of the 2nd-order surface over two axes, every other
/// parameter held at its `base`/`params` value.
///
/// Uses the Poincaré form when both index moduli are 1, the general closed
/// form otherwise; every cell is checked to be finite and positive.
pub fn sample_grid(
    params: &WignerParams,
    base: &PhaseSpacePoint,
    axis1: AxisSpec,
    axis2: AxisSpec,
) -> Result<WignerGrid, WignerError> {
    validate_axes(&axis1, &axis2)?;
    let on_sphere =
        (params.p2_mod - 1.0).abs() <= 1e-12 && (params.phs_mod - 1.0).abs() <= 1e-12;
    let evaluator = if on_sphere { GridEvaluator::Poincare } else { GridEvaluator::Closed };
    let mut values = Vec::with_capacity(axis1.count * axis2.count);
    for v1 in axis1.values() {
        for v2 in axis2.values() {
            let mut point = *base;
            let mut cell_params = *params;
            apply_axis(&mut point, &mut cell_params, axis1.axis, v1);
            apply_axis(&mut point, &mut cell_params, axis2.axis, v2);
            let w = match evaluator {
                GridEvaluator::Poincare => w2_poincare(&point, &cell_params)?,
                _ => w2_closed(&point, &cell_params),
            };
            values.push(w);
        }
    }
    let grid = WignerGrid {
        params: *params,
        base: *base,
        axis1,
        axis2,
        evaluator,
        proportional: false,
        values,
    };
    check_positive(&grid)?;
    Ok(grid)
}

/// Grid of the odd-order (n = 3) proportional value over the same axis
/// machinery. The surface is flat: the value has no phase-space dependence.
pub fn sample_grid_odd(
    params: &WignerParams,
    base: &PhaseSpacePoint,
    axis1: AxisSpec,
    axis2: AxisSpec,
) -> Result<WignerGrid, WignerError> {
    validate_axes(&axis1, &axis2)?;
    let modes = params.modes(base.l);
    let p3 = crate::states::polarization_index(&modes, 3)?;
    let w = w3_closed(&modes, p3)?;
    let grid = WignerGrid {
        params: *params,
        base: *base,
        axis1,
        axis2,
        evaluator: GridEvaluator::OddProportional,
        proportional: true,
        values: vec![w; axis1.count * axis2.count],
    };
    check_positive(&grid)?;
    Ok(grid)
}

fn validate_axes(axis1: &AxisSpec, axis2: &AxisSpec) -> Result<(), WignerError> {
    if axis1.axis == axis2.axis {
        return Err(WignerError::InvalidAxisPair(axis1.axis.name(), axis2.axis.name()));
    }
    let min = axis1.count.min(axis2.count);
    if min < 2 {
        return Err(WignerError::ResolutionTooSmall(min));
    }
    Ok(())
}

fn check_positive(grid: &WignerGrid) -> Result<(), WignerError> {
    for i in 0..grid.axis1.count {
        for j in 0..grid.axis2.count {
            let v = grid.at(i, j);
            if !(v.is_finite() && v > 0.0) {
                return Err(WignerError::NonPositiveCell { i, j, value: v });
            }
        }
    }
    Ok(())
}

/// A detected local maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub axis1_value: f64,
    pub axis2_value: f64,
    pub height: f64,
}

/// Local maxima under strict 8-neighborhood dominance.
///
/// Angular axes wrap around; connected plateaus of equal value are merged and
/// reported at their centroid (circular mean on periodic axes). A component
/// counts as a peak only when it has at least one neighbor outside itself and
/// every such neighbor is strictly lower, so a constant grid has no peaks.
/// Results are sorted by height descending.
pub fn find_peaks(grid: &WignerGrid) -> Vec<Peak> {
    let (n1, n2) = grid.shape();
    let p1 = grid.axis1.axis.is_periodic();
    let p2 = grid.axis2.axis.is_periodic();
    let idx = |i: usize, j: usize| i * n2 + j;

    let neighbor = |i: usize, j: usize, di: i64, dj: i64| -> Option<(usize, usize)> {
        let ni = i as i64 + di;
        let nj = j as i64 + dj;
        let ni = if p1 {
            ni.rem_euclid(n1 as i64)
        } else if (0..n1 as i64).contains(&ni) {
            ni
        } else {
            return None;
        };
        let nj = if p2 {
            nj.rem_euclid(n2 as i64)
        } else if (0..n2 as i64).contains(&nj) {
            nj
        } else {
            return None;
        };
        Some((ni as usize, nj as usize))
    };

    let mut visited = vec![false; n1 * n2];
    let mut peaks = Vec::new();

    for si in 0..n1 {
        for sj in 0..n2 {
            if visited[idx(si, sj)] {
                continue;
            }
            let value = grid.at(si, sj);
            // flood-fill the connected component of exactly equal values
            let mut component = vec![(si, sj)];
            let mut stack = vec![(si, sj)];
            visited[idx(si, sj)] = true;
            let mut is_peak = true;
            let mut has_outside = false;
            while let Some((ci, cj)) = stack.pop() {
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let Some((ni, nj)) = neighbor(ci, cj, di, dj) else {
                            continue;
                        };
                        if (ni, nj) == (ci, cj) {
                            continue; // wrapped onto itself on a size-1 axis
                        }
                        let nv = grid.at(ni, nj);
                        if nv == value {
                            if !visited[idx(ni, nj)] {
                                visited[idx(ni, nj)] = true;
                                component.push((ni, nj));
                                stack.push((ni, nj));
                            }
                        } else {
                            has_outside = true;
                            if nv > value {
                                is_peak = false;
                            }
                        }
                    }
                }
            }
            if is_peak && has_outside {
                let c1 = centroid(component.iter().map(|&(i, _)| i), n1, p1);
                let c2 = centroid(component.iter().map(|&(_, j)| j), n2, p2);
                peaks.push(Peak {
                    axis1_value: grid.axis1.start + c1 * grid.axis1.step(),
                    axis2_value: grid.axis2.start + c2 * grid.axis2.step(),
                    height: value,
                });
            }
        }
    }

    peaks.sort_by(|a, b| {
        b.height
            .partial_cmp(&a.height)
            .unwrap()
            .then(a.axis1_value.partial_cmp(&b.axis1_value).unwrap())
            .then(a.axis2_value.partial_cmp(&b.axis2_value).unwrap())
    });
    peaks
}

/// Mean index of a component along one axis, circular when periodic.
fn centroid(indices: impl Iterator<Item = usize> + Clone, n: usize, periodic: bool) -> f64 {
    let count = indices.clone().count() as f64;
    if !periodic {
        return indices.map(|i| i as f64).sum::<f64>() / count;
    }
    let (mut sx, mut sy) = (0.0f64, 0.0f64);
    for i in indices.clone() {
        let theta = TAU * i as f64 / n as f64;
        sx += theta.cos();
        sy += theta.sin();
    }
    if (sx * sx + sy * sy).sqrt() < 1e-9 * count {
        // degenerate ring: fall back to the plain mean
        return indices.map(|i| i as f64).sum::<f64>() / count;
    }
    let mean = sy.atan2(sx).rem_euclid(TAU);
    mean / TAU * n as f64
}
