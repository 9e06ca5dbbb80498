//! Drift matrix of the quadrature fluctuations and its stability test.
//!
//! Ordering of the fluctuation vector: (δX_a, δY_a, δX_m, δY_m, δq, δp).

use nalgebra::{linalg::Schur, Matrix6};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::OperatingPoint;
use crate::spectrum::{zeta, FeedbackConfig};

/// Spectral-abscissa margin, as a fraction of ω_b, required to call a
/// system stable.
pub const STABILITY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DriftVariant {
    /// Feedback enters through ζ(ω) evaluated at one Fourier frequency.
    FrequencyDependent { omega: f64 },
    /// Designed gain: pure damping (1 + g0)γ_b, no frequency shift.
    DesignedGain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    pub entries: Matrix6<f64>,
    pub variant: DriftVariant,
    /// Mechanical frequency, which sets the stability margin.
    pub omega_b: f64,
}

fn skeleton(op: &OperatingPoint) -> Matrix6<f64> {
    let p = &op.params;
    let gm = op.coupling;
    #[rustfmt::skip]
    let a = Matrix6::new(
        -p.kappa_a, 0.0,        0.0,        p.g_a,      0.0,         0.0,
        0.0,        -p.kappa_a, -p.g_a,     0.0,        0.0,         0.0,
        0.0,        p.g_a,      -p.kappa_m, 0.0,        0.0,         0.0,
        -p.g_a,     0.0,        0.0,        -p.kappa_m, -gm,         0.0,
        0.0,        0.0,        0.0,        0.0,        0.0,         p.omega_b,
        0.0,        0.0,        -gm,        0.0,        -p.omega_b,  -p.gamma_b,
    );
    a
}

/// Drift matrix for the designed gain: the (p, p) entry is −(1 + g0)γ_b.
pub fn drift_matrix(op: &OperatingPoint, fb: &FeedbackConfig) -> DriftMatrix {
    let mut entries = skeleton(op);
    entries[(5, 5)] = -(1.0 + fb.g0) * op.params.gamma_b;
    DriftMatrix {
        entries,
        variant: DriftVariant::DesignedGain,
        omega_b: op.params.omega_b,
    }
}

/// Drift matrix with the loop folded in through ζ(ω) at a single ω ≠ 0.
pub fn drift_matrix_at(op: &OperatingPoint, fb: &FeedbackConfig, omega: f64) -> Result<DriftMatrix> {
    if omega == 0.0 {
        return Err(Error::invalid("omega", "frequency-dependent drift needs ω ≠ 0"));
    }
    let z = zeta(omega, op, fb)?;
    let p = &op.params;
    let mut entries = skeleton(op);
    entries[(5, 4)] = -p.omega_b + z.re;
    entries[(5, 5)] = -p.gamma_b - p.omega_b / omega * z.im;
    Ok(DriftMatrix {
        entries,
        variant: DriftVariant::FrequencyDependent { omega },
        omega_b: p.omega_b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex64>,
    /// max Re λ (rad/s).
    pub spectral_abscissa: f64,
    /// The abscissa must lie below this value (−margin·ω_b).
    pub threshold: f64,
    pub stable: bool,
}

impl StabilityReport {
    pub fn require_stable(&self) -> Result<()> {
        if self.stable {
            Ok(())
        } else {
            Err(Error::Unstable {
                abscissa: self.spectral_abscissa,
                threshold: self.threshold,
            })
        }
    }
}

pub fn eigenvalues(a: &Matrix6<f64>) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(*a, f64::EPSILON, 10_000).ok_or(Error::EigenSolver)?;
    let mut ev: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(ev)
}

/// All eigenvalues must have real part below −1e-6·ω_b.
pub fn is_stable(a: &DriftMatrix) -> Result<StabilityReport> {
    let eigenvalues = eigenvalues(&a.entries)?;
    let spectral_abscissa = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let threshold = -STABILITY_MARGIN * a.omega_b;
    Ok(StabilityReport {
        stable: spectral_abscissa < threshold,
        eigenvalues,
        spectral_abscissa,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_angular;
    use crate::params::fixtures::reference_point;

    #[test]
    fn designed_gain_row_and_coupling_blocks() {
        let op = reference_point(10.0);
        let p = op.params;
        let a = drift_matrix(&op, &FeedbackConfig::new(&p, 7.0, 0.0)).entries;
        let row: Vec<f64> = a.row(5).iter().copied().collect();
        assert_eq!(row, vec![0.0, 0.0, -op.coupling, 0.0, -p.omega_b, -8.0 * p.gamma_b]);
        assert_eq!(a[(0, 3)], p.g_a);
        assert_eq!(a[(3, 0)], -p.g_a);
        assert_eq!(a[(1, 2)], -p.g_a);
        assert_eq!(a[(2, 1)], p.g_a);
    }

    #[test]
    fn damping_entry_values() {
        let op = reference_point(10.0);
        let open = drift_matrix(&op, &FeedbackConfig::open_loop(&op.params));
        assert_eq!(open.entries[(5, 5)], -op.params.gamma_b);
        let a = drift_matrix(&op, &FeedbackConfig::new(&op.params, 1e3, 0.0));
        let expect = -hz_to_angular(1.001e5);
        assert!((a.entries[(5, 5)] - expect).abs() < 1e-9 * expect.abs());
    }

    #[test]
    fn frequency_dependent_form_agrees_with_designed_gain_in_band() {
        let op = reference_point(10.0);
        let fb = FeedbackConfig::new(&op.params, 300.0, 0.0);
        let designed = drift_matrix(&op, &fb);
        for w in [0.3, 1.0, 1.7] {
            let at = drift_matrix_at(&op, &fb, w * op.params.omega_b).unwrap();
            let diff = (at.entries - designed.entries).abs().max();
            assert!(diff < 1e-9 * op.params.omega_b, "diff {diff}");
        }
        assert!(drift_matrix_at(&op, &fb, 0.0).is_err());
    }

    #[test]
    fn decoupled_spectrum_is_block_structured() {
        let mut op = reference_point(10.0);
        op.coupling = 0.0;
        let a = drift_matrix(&op, &FeedbackConfig::open_loop(&op.params));
        for i in 0..4 {
            for j in 4..6 {
                assert_eq!(a.entries[(i, j)], 0.0);
                assert_eq!(a.entries[(j, i)], 0.0);
            }
        }
        let r = is_stable(&a).unwrap();
        assert!(r.stable);
        let p = op.params;
        // mechanical pair: −γ_b/2 ± i·sqrt(ω_b² − γ_b²/4)
        let mech = r
            .eigenvalues
            .iter()
            .filter(|z| (z.im.abs() - p.omega_b).abs() < 1e-3 * p.omega_b)
            .collect::<Vec<_>>();
        assert_eq!(mech.len(), 2);
        for z in mech {
            assert!((z.re + p.gamma_b / 2.0).abs() < 1e-6 * p.gamma_b);
        }
    }

    #[test]
    fn negative_damping_is_unstable() {
        let op = reference_point(10.0);
        let mut a = drift_matrix(&op, &FeedbackConfig::open_loop(&op.params));
        assert!(is_stable(&a).unwrap().stable);
        a.entries[(5, 5)] = op.params.gamma_b;
        let r = is_stable(&a).unwrap();
        assert!(!r.stable);
        assert!(r.spectral_abscissa > 0.0);
        assert!(matches!(r.require_stable(), Err(Error::Unstable { .. })));
    }
}
