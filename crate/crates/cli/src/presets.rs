//! The six figure presets: fixed `|αₓ| = 0.8`, `|β| = 0.7`, unit index
//! moduli, and the tabulated `(φ_β, δ_HS, m, l)` combinations.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI, TAU};

use polwig::wigner::{PhaseSpacePoint, WignerParams};
use polwig::wrap_angle;

pub const ALPHA_MOD: f64 = 0.8;
pub const BETA_MOD: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigurePreset {
    pub id: &'static str,
    pub phi_beta: f64,
    pub delta_hs: f64,
    pub m: u8,
    pub l: u8,
}

pub const PRESETS: [FigurePreset; 6] = [
    FigurePreset { id: "1a", phi_beta: 0.0, delta_hs: 0.0, m: 1, l: 0 },
    FigurePreset { id: "1b", phi_beta: FRAC_PI_6, delta_hs: FRAC_PI_6, m: 1, l: 0 },
    FigurePreset { id: "1c", phi_beta: FRAC_PI_2, delta_hs: FRAC_PI_2, m: 1, l: 0 },
    FigurePreset { id: "1d", phi_beta: FRAC_PI_2, delta_hs: PI, m: 1, l: 0 },
    FigurePreset { id: "1e", phi_beta: PI, delta_hs: 0.0, m: 1, l: 0 },
    FigurePreset { id: "1f", phi_beta: FRAC_PI_6, delta_hs: FRAC_PI_2, m: 1, l: 1 },
];

pub fn lookup(id: &str) -> Option<&'static FigurePreset> {
    PRESETS.iter().find(|p| p.id == id)
}

impl FigurePreset {
    /// Surface parameters: the preset's δ_HS folds into
    /// `Δ_HS⁽²⁾ = 2δ_HS − 2lπ` (a possible π shift of δ_HS leaves the
    /// surface unchanged).
    pub fn params(&self) -> WignerParams {
        WignerParams::poincare(
            BETA_MOD,
            self.phi_beta,
            0.0,
            wrap_angle(2.0 * self.delta_hs - TAU * self.l as f64),
        )
    }

    /// Fixed point with `k = m`; δ and φ_x are the swept coordinates.
    pub fn base_point(&self) -> PhaseSpacePoint {
        let params = self.params();
        PhaseSpacePoint::consistent(&params, ALPHA_MOD, 0.0, self.m, self.l, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_finds_all_and_only_presets() {
        for id in ["1a", "1b", "1c", "1d", "1e", "1f"] {
            assert!(lookup(id).is_some(), "{id}");
        }
        assert!(lookup("1g").is_none());
        assert!(lookup("").is_none());
    }

    #[test]
    fn preset_values() {
        let p = lookup("1f").unwrap();
        assert_eq!((p.m, p.l), (1, 1));
        assert!((p.phi_beta - FRAC_PI_6).abs() < 1e-15);
        assert!((p.delta_hs - FRAC_PI_2).abs() < 1e-15);
        let params = p.params();
        assert_eq!(params.p2_mod, 1.0);
        assert_eq!(params.phs_mod, 1.0);
        // Δ_HS = 2·π/2 − 2π folded into [0, 2π)
        assert!((params.phs_phase - PI).abs() < 1e-12);
    }
}
