//! Validated physical parameters and the linearized operating point.
//!
//! Everything here is stored in angular units (rad/s). Configuration layers
//! that accept ν = ω/2π values convert through [`hz_to_angular`].
//!
//! [`hz_to_angular`]: crate::constants::hz_to_angular

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermal::bose_occupation;

/// Physical rates and frequencies of the cavity–magnon–phonon system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity resonance ω_a.
    pub omega_a: f64,
    /// Magnon resonance ω_m.
    pub omega_m: f64,
    /// Mechanical resonance ω_b.
    pub omega_b: f64,
    /// Mechanical damping γ_b.
    pub gamma_b: f64,
    /// Cavity decay κ_a.
    pub kappa_a: f64,
    /// Magnon decay κ_m.
    pub kappa_m: f64,
    /// Cavity–magnon coupling g_a.
    pub g_a: f64,
    /// Bare magnomechanical coupling g_m.
    pub g_m: f64,
    /// Rabi amplitude Ω of the magnon drive.
    pub rabi: f64,
    /// Drive frequency ω_0.
    pub omega_drive: f64,
    /// Bath temperature in kelvin.
    pub temperature: f64,
    /// Homodyne detection efficiency η.
    pub eta: f64,
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and >= 0, got {v}")))
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        positive("omega_a", self.omega_a)?;
        positive("omega_m", self.omega_m)?;
        positive("omega_b", self.omega_b)?;
        positive("gamma_b", self.gamma_b)?;
        positive("kappa_a", self.kappa_a)?;
        positive("kappa_m", self.kappa_m)?;
        positive("g_a", self.g_a)?;
        positive("g_m", self.g_m)?;
        non_negative("rabi", self.rabi)?;
        positive("omega_drive", self.omega_drive)?;
        non_negative("temperature", self.temperature)?;
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::invalid("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        Ok(())
    }

    /// Bare drive detunings Δ_a = ω_a − ω_0 and Δ_m = ω_m − ω_0.
    pub fn detunings(&self) -> Detunings {
        let delta_m = self.omega_m - self.omega_drive;
        Detunings {
            delta_a: self.omega_a - self.omega_drive,
            delta_m,
            delta_m_tilde: delta_m,
        }
    }

    pub fn occupations(&self) -> Result<Occupations> {
        Ok(Occupations {
            cavity: bose_occupation(self.omega_a, self.temperature)?,
            magnon: bose_occupation(self.omega_m, self.temperature)?,
            phonon: bose_occupation(self.omega_b, self.temperature)?,
        })
    }
}

/// Drive detunings in rad/s.
///
/// `delta_m_tilde` includes the magnomechanical frequency shift g_m⟨q⟩ once
/// a steady state has been solved; before that it equals `delta_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detunings {
    pub delta_a: f64,
    pub delta_m: f64,
    pub delta_m_tilde: f64,
}

/// Thermal occupations n_a(ω_a), n_m(ω_m), n_b(ω_b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occupations {
    pub cavity: f64,
    pub magnon: f64,
    pub phonon: f64,
}

/// The resonantly driven, linearized system that all spectral and cooling
/// routines operate on: validated parameters, a real effective coupling G_m,
/// and the bath occupations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub params: SystemParams,
    /// Effective magnomechanical coupling G_m = √2 g_m⟨m⟩ (rad/s).
    pub coupling: f64,
    pub occupations: Occupations,
}

impl OperatingPoint {
    /// Build an operating point with G_m given directly. The bare `g_m` and
    /// `rabi` fields of `params` are not used by anything downstream.
    pub fn with_coupling(params: SystemParams, coupling: f64) -> Result<Self> {
        params.validate()?;
        non_negative("G_m", coupling)?;
        Ok(Self {
            params,
            coupling,
            occupations: params.occupations()?,
        })
    }

    /// Build an operating point from a solved steady state. Only the resonant
    /// case Δ_a = Δ̃_m = 0 is supported, where G_m is real.
    pub fn from_steady_state(params: SystemParams, ss: &crate::steady::SteadyState) -> Result<Self> {
        params.validate()?;
        let scale = params.kappa_a.max(params.kappa_m);
        let d = ss.detunings;
        if d.delta_a.abs() > 1e-9 * scale || d.delta_m_tilde.abs() > 1e-9 * scale {
            return Err(Error::NotResonant {
                delta_a: d.delta_a,
                delta_m_tilde: d.delta_m_tilde,
            });
        }
        let g = ss.coupling;
        if g.im.abs() > 1e-9 * g.norm().max(f64::MIN_POSITIVE) || g.re < 0.0 {
            return Err(Error::NotResonant {
                delta_a: d.delta_a,
                delta_m_tilde: d.delta_m_tilde,
            });
        }
        Self::with_coupling(params, g.re)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::constants::hz_to_angular;

    /// Reference parameter set, with κ_m/2π given in MHz.
    pub fn reference_params(kappa_m_mhz: f64) -> SystemParams {
        SystemParams {
            omega_a: hz_to_angular(10e9),
            omega_m: hz_to_angular(10e9),
            omega_b: hz_to_angular(10e6),
            gamma_b: hz_to_angular(100.0),
            kappa_a: hz_to_angular(5e6),
            kappa_m: hz_to_angular(kappa_m_mhz * 1e6),
            g_a: hz_to_angular(18e6),
            g_m: hz_to_angular(1.0),
            rabi: 0.0,
            omega_drive: hz_to_angular(10e9),
            temperature: 0.01,
            eta: 0.9,
        }
    }

    pub fn reference_point(kappa_m_mhz: f64) -> OperatingPoint {
        OperatingPoint::with_coupling(reference_params(kappa_m_mhz), hz_to_angular(2e6)).unwrap()
    }
}
