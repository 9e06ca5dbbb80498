//! Physical constants (CODATA 2018 exact/recommended values).

use std::f64::consts::TAU;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Convert a frequency quoted as ν = ω/2π (Hz) to angular frequency (rad/s).
#[inline]
pub fn hz_to_angular(nu: f64) -> f64 {
    TAU * nu
}

/// Convert an angular frequency (rad/s) back to ν = ω/2π (Hz).
#[inline]
pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TAU
}
