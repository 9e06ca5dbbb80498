//! Measurement-based feedback cooling of the mechanical mode in a
//! cavity–magnon–phonon system.
//!
//! The crate covers the linearized model end to end:
//!
//! - [`params`] and [`steady`]: physical parameters, thermal occupations and
//!   the classical steady state that fixes the effective coupling G_m.
//! - [`spectrum`]: susceptibilities, the band-limited designed gain, the loop
//!   transfer ζ(ω), and the noise spectral densities S_q(ω), S_p(ω).
//! - [`drift`] and [`lyapunov`]: the drift matrix, its stability test, and a
//!   Lyapunov-equation covariance used as an independent check.
//! - [`cooling`]: variance integrals, the effective phonon number, and the
//!   optimal-gain search.
//!
//! All frequencies are angular (rad/s) internally.

pub mod constants;
pub mod cooling;
pub mod drift;
pub mod error;
pub mod lyapunov;
pub mod params;
pub mod quadrature;
pub mod spectrum;
pub mod steady;
pub mod thermal;

pub use cooling::{
    log_grid, min_imp_noise, n_eff, optimize_gain, refine_gain, resonance_linewidth, scan_gain,
    variances, Breakdown, CoolingResult, GainOptimum, GridPolicy, SourceVariances, Variances,
};
pub use drift::{drift_matrix, drift_matrix_at, is_stable, DriftMatrix, DriftVariant, StabilityReport};
pub use error::{Error, Result};
pub use lyapunov::{diffusion_matrix, lyapunov_covariance, mechanical_variances};
pub use params::{Detunings, Occupations, OperatingPoint, SystemParams};
pub use spectrum::{
    chi_b, chi_b_eff, chi_ma, chi_mode, gain, nsd_terms, zeta, BandFilter, FeedbackConfig, ImpUnit,
    NoiseTerms, Spectrum, SpectrumSample, ThermalModel,
};
pub use steady::{rabi_for_target_coupling, steady_state, steady_state_resonant, SteadyState};
pub use thermal::bose_occupation;

pub use num_complex::Complex64;
