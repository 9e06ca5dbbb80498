//! Bose–Einstein occupations and the colored Brownian force spectrum.

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};

/// Mean thermal occupation 1/(exp(ħω/k_BT) − 1). Zero at T = 0.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::invalid("temperature", format!("must be >= 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * omega / (K_B * temperature)).exp_m1())
}

/// ω·coth(ħω/2k_BT), the frequency weight of the Brownian force spectrum.
///
/// Even in ω. The ω → 0 limit 2k_BT/ħ is taken explicitly, and at T = 0 the
/// weight reduces to |ω|.
pub fn omega_coth(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return omega.abs();
    }
    let thermal_rate = 2.0 * K_B * temperature / HBAR;
    if omega == 0.0 {
        return thermal_rate;
    }
    let x = omega / thermal_rate;
    thermal_rate * x / x.tanh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_angular;
    use proptest::prelude::*;

    #[test]
    fn occupation_at_ten_millikelvin() {
        let n = bose_occupation(hz_to_angular(10e6), 0.01).unwrap();
        assert!((n - 20.0).abs() / 20.0 < 0.05, "n = {n}");
    }

    #[test]
    fn occupation_at_four_kelvin() {
        let n = bose_occupation(hz_to_angular(10e6), 4.0).unwrap();
        assert!((n - 8.3e3).abs() / 8.3e3 < 0.03, "n = {n}");
    }

    #[test]
    fn zero_temperature_gives_zero() {
        for nu in [1.0, 1e6, 1e10] {
            assert_eq!(bose_occupation(hz_to_angular(nu), 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn nonpositive_frequency_is_a_domain_error() {
        assert!(bose_occupation(0.0, 1.0).is_err());
        assert!(bose_occupation(-1.0, 1.0).is_err());
    }

    #[test]
    fn omega_coth_limits() {
        let t = 0.01;
        let at_zero = omega_coth(0.0, t);
        let near_zero = omega_coth(1e-3, t);
        assert!((at_zero - near_zero).abs() / at_zero < 1e-12);
        assert_eq!(omega_coth(-3.0, 0.0), 3.0);
        // high frequency: coth -> 1
        let w = 1e14;
        assert!((omega_coth(w, t) - w).abs() / w < 1e-12);
    }

    proptest! {
        #[test]
        fn occupation_monotone(nu in 1e3f64..1e11, t in 1e-4f64..500.0, f in 1.01f64..3.0) {
            let w = hz_to_angular(nu);
            let n = bose_occupation(w, t).unwrap();
            prop_assert!(bose_occupation(w, t * f).unwrap() >= n);
            prop_assert!(bose_occupation(w * f, t).unwrap() <= n);
        }

        #[test]
        fn omega_coth_is_even(w in 1.0f64..1e10, t in 0.0f64..300.0) {
            prop_assert_eq!(omega_coth(w, t), omega_coth(-w, t));
        }
    }
}
