//! Frequency-domain response of the feedback-cooled oscillator.
//!
//! All functions take the Fourier frequency ω in rad/s. Noise spectral
//! densities follow the symmetrized convention in which the variance of a
//! quadrature is (1/2π)∫S(ω)dω.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::params::{OperatingPoint, SystemParams};
use crate::thermal::omega_coth;

/// Shape of the band filter applied to the feedback gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandFilter {
    /// Ideal cutoff: full gain for |ω| ≤ half-width, zero outside.
    #[default]
    Rect,
}

/// How a quoted measurement-noise density is mapped onto the internal
/// rad/s convention.
///
/// `PerRadPerSec` uses the quoted number as is. It reproduces the reference
/// cooling curves and the quoted imprecision lower bounds, so it is the
/// default. `PerHertz` treats the number as a density per Hz and divides by
/// 2π.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImpUnit {
    #[default]
    PerRadPerSec,
    PerHertz,
}

impl ImpUnit {
    pub fn to_internal(self, quoted: f64) -> f64 {
        match self {
            ImpUnit::PerRadPerSec => quoted,
            ImpUnit::PerHertz => quoted / TAU,
        }
    }
}

/// Feedback loop settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackConfig {
    /// Dimensionless gain coefficient; 0 is open loop.
    pub g0: f64,
    /// Half-width of the gain band around ω = 0 (rad/s).
    pub band_half_width: f64,
    pub filter: BandFilter,
    /// Measurement-noise density of the amplitude estimate, as quoted.
    pub s_imp: f64,
    pub s_imp_unit: ImpUnit,
}

impl FeedbackConfig {
    /// Gain band of ±2ω_b with the default filter and unit convention.
    pub fn new(params: &SystemParams, g0: f64, s_imp: f64) -> Self {
        Self {
            g0,
            band_half_width: 2.0 * params.omega_b,
            filter: BandFilter::Rect,
            s_imp,
            s_imp_unit: ImpUnit::default(),
        }
    }

    pub fn open_loop(params: &SystemParams) -> Self {
        Self::new(params, 0.0, 0.0)
    }

    pub fn with_g0(mut self, g0: f64) -> Self {
        self.g0 = g0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g0.is_finite() && self.g0 >= 0.0) {
            return Err(Error::invalid("g0", format!("must be >= 0, got {}", self.g0)));
        }
        if !(self.band_half_width.is_finite() && self.band_half_width > 0.0) {
            return Err(Error::invalid(
                "band_half_width",
                format!("must be > 0, got {}", self.band_half_width),
            ));
        }
        if !(self.s_imp.is_finite() && self.s_imp >= 0.0) {
            return Err(Error::invalid("s_imp", format!("must be >= 0, got {}", self.s_imp)));
        }
        Ok(())
    }

    /// Measurement-noise density in the internal convention.
    pub fn s_imp_internal(&self) -> f64 {
        self.s_imp_unit.to_internal(self.s_imp)
    }

    fn in_band(&self, omega: f64) -> bool {
        match self.filter {
            BandFilter::Rect => omega.abs() <= self.band_half_width,
        }
    }
}

/// Thermal force model for the mechanical bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThermalModel {
    /// (γ_bω/ω_b)·coth(ħω/2k_BT).
    #[default]
    Colored,
    /// White approximation γ_b(2n_b + 1).
    Markovian,
}

/// Natural susceptibility 1/(κ − iω) of a damped mode.
#[inline]
pub fn chi_mode(omega: f64, kappa: f64) -> Complex64 {
    1.0 / Complex64::new(kappa, -omega)
}

/// Magnon susceptibility dressed by the cavity, [χ_m⁻¹ + g_a²χ_a]⁻¹.
#[inline]
pub fn chi_ma(omega: f64, params: &SystemParams) -> Complex64 {
    let chi_a = chi_mode(omega, params.kappa_a);
    1.0 / (Complex64::new(params.kappa_m, -omega) + params.g_a * params.g_a * chi_a)
}

/// Mechanical susceptibility without feedback, ω_b/(ω_b² − ω² − iγ_bω).
pub fn chi_b(omega: f64, params: &SystemParams) -> Complex64 {
    let wb = params.omega_b;
    wb / Complex64::new(wb * wb - omega * omega, -params.gamma_b * omega)
}

fn check_loop(op: &OperatingPoint, fb: &FeedbackConfig) -> Result<()> {
    fb.validate()?;
    if fb.g0 > 0.0 && op.coupling == 0.0 {
        return Err(Error::LoopCannotAct { g0: fb.g0 });
    }
    Ok(())
}

/// Designed gain iγ_bωg0 / [√η ω_b g_a G_m χ_a χ_ma] inside the band, zero
/// outside.
pub fn gain(omega: f64, op: &OperatingPoint, fb: &FeedbackConfig) -> Result<Complex64> {
    check_loop(op, fb)?;
    Ok(gain_unchecked(omega, op, fb))
}

fn gain_unchecked(omega: f64, op: &OperatingPoint, fb: &FeedbackConfig) -> Complex64 {
    if fb.g0 == 0.0 || !fb.in_band(omega) {
        return Complex64::new(0.0, 0.0);
    }
    let p = &op.params;
    let chain = chi_mode(omega, p.kappa_a) * chi_ma(omega, p);
    let num = Complex64::new(0.0, p.gamma_b * omega * fb.g0);
    num / (p.eta.sqrt() * p.omega_b * p.g_a * op.coupling * chain)
}

/// Loop transfer ζ(ω) = √η g_a G_m χ_a χ_ma g(ω).
pub fn zeta(omega: f64, op: &OperatingPoint, fb: &FeedbackConfig) -> Result<Complex64> {
    check_loop(op, fb)?;
    let p = &op.params;
    let chain = chi_mode(omega, p.kappa_a) * chi_ma(omega, p);
    Ok(p.eta.sqrt() * p.g_a * op.coupling * chain * gain_unchecked(omega, op, fb))
}

/// Mechanical frequency shift δω_b = −Re ζ.
pub fn frequency_shift(zeta: Complex64) -> f64 {
    -zeta.re
}

/// Damping change δγ_b = (ω_b/ω)·Im ζ; zero at ω = 0 where ζ vanishes.
pub fn damping_shift(omega: f64, omega_b: f64, zeta: Complex64) -> f64 {
    if omega == 0.0 {
        0.0
    } else {
        omega_b / omega * zeta.im
    }
}

/// Effective susceptibility ω_b/(ω_b² − ω² − iγ_bω − ζω_b).
pub fn chi_b_eff(omega: f64, op: &OperatingPoint, fb: &FeedbackConfig) -> Result<Complex64> {
    let z = zeta(omega, op, fb)?;
    Ok(chi_b_eff_from_zeta(omega, &op.params, z))
}

fn chi_b_eff_from_zeta(omega: f64, p: &SystemParams, zeta: Complex64) -> Complex64 {
    let wb = p.omega_b;
    let denom = Complex64::new(wb * wb - omega * omega, -p.gamma_b * omega) - zeta * wb;
    wb / denom
}

/// The individual force-noise contributions driving the oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseTerms {
    /// Cavity back-action S_a^ba.
    pub a_ba: f64,
    /// Magnon back-action S_m^ba.
    pub m_ba: f64,
    /// Mechanical bath S_b^th.
    pub b_th: f64,
    /// Back-action through the loop S_fb^{a,m}.
    pub fb_am: f64,
    /// Feedback-gained imprecision S_q^imp.
    pub q_imp: f64,
}

impl NoiseTerms {
    pub fn total(&self) -> f64 {
        self.a_ba + self.m_ba + self.b_th + self.fb_am + self.q_imp
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.a_ba, self.m_ba, self.b_th, self.fb_am, self.q_imp]
    }
}

/// Everything the spectrum knows at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub omega: f64,
    pub chi_a: Complex64,
    pub chi_m: Complex64,
    pub chi_ma: Complex64,
    pub chi_b_eff: Complex64,
    pub gain: Complex64,
    pub zeta: Complex64,
    pub terms: NoiseTerms,
    pub s_q: f64,
    pub s_p: f64,
}

/// Noise terms at ω for the given loop, thermal model and occupations held
/// by the operating point.
pub fn nsd_terms(
    omega: f64,
    op: &OperatingPoint,
    fb: &FeedbackConfig,
    thermal: ThermalModel,
) -> Result<NoiseTerms> {
    check_loop(op, fb)?;
    Ok(Spectrum::unchecked(op, fb, thermal).sample(omega).terms)
}

/// Validated evaluator for one (operating point, loop) pair.
#[derive(Debug, Clone, Copy)]
pub struct Spectrum<'a> {
    op: &'a OperatingPoint,
    fb: &'a FeedbackConfig,
    thermal: ThermalModel,
    s_imp: f64,
}

impl<'a> Spectrum<'a> {
    pub fn new(op: &'a OperatingPoint, fb: &'a FeedbackConfig, thermal: ThermalModel) -> Result<Self> {
        check_loop(op, fb)?;
        Ok(Self::unchecked(op, fb, thermal))
    }

    fn unchecked(op: &'a OperatingPoint, fb: &'a FeedbackConfig, thermal: ThermalModel) -> Self {
        Self {
            op,
            fb,
            thermal,
            s_imp: fb.s_imp_internal(),
        }
    }

    pub fn operating_point(&self) -> &OperatingPoint {
        self.op
    }

    pub fn feedback(&self) -> &FeedbackConfig {
        self.fb
    }

    pub fn sample(&self, omega: f64) -> SpectrumSample {
        let p = &self.op.params;
        let occ = &self.op.occupations;
        let gm = self.op.coupling;
        let ga2 = p.g_a * p.g_a;

        let chi_a = chi_mode(omega, p.kappa_a);
        let chi_m = chi_mode(omega, p.kappa_m);
        let chi_ma = 1.0 / (1.0 / chi_m + ga2 * chi_a);
        let chain2 = (chi_a * chi_ma).norm_sqr();

        let g = gain_unchecked(omega, self.op, self.fb);
        let zeta = p.eta.sqrt() * p.g_a * gm * chi_a * chi_ma * g;
        let chi_b_eff = chi_b_eff_from_zeta(omega, p, zeta);
        let g2 = g.norm_sqr();

        let cavity_noise = 2.0 * occ.cavity + 1.0;
        let magnon_noise = 2.0 * occ.magnon + 1.0;

        let a_ba = ga2 * gm * gm * chain2 * p.kappa_a * cavity_noise;
        let m_ba = gm * gm * chi_ma.norm_sqr() * p.kappa_m * magnon_noise;
        let b_th = match self.thermal {
            ThermalModel::Colored => p.gamma_b / p.omega_b * omega_coth(omega, p.temperature),
            ThermalModel::Markovian => p.gamma_b * (2.0 * occ.phonon + 1.0),
        };
        let fb_am = g2 / (4.0 * p.kappa_a) * (p.eta * cavity_noise + (1.0 - p.eta))
            + p.eta * g2 * ga2 * chain2 * p.kappa_m * magnon_noise
            - p.eta * g2 * ga2 * chain2 * p.kappa_m * cavity_noise;
        let q_imp = g2 * self.s_imp;

        let terms = NoiseTerms {
            a_ba,
            m_ba,
            b_th,
            fb_am,
            q_imp,
        };
        let s_q = chi_b_eff.norm_sqr() * terms.total();
        let s_p = omega * omega / (p.omega_b * p.omega_b) * s_q;
        SpectrumSample {
            omega,
            chi_a,
            chi_m,
            chi_ma,
            chi_b_eff,
            gain: g,
            zeta,
            terms,
            s_q,
            s_p,
        }
    }

    pub fn s_q(&self, omega: f64) -> f64 {
        self.sample(omega).s_q
    }

    pub fn s_p(&self, omega: f64) -> f64 {
        self.sample(omega).s_p
    }
}
