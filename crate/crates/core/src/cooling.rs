//! Variances, effective phonon number, and the gain search.

use serde::Serialize;
use std::f64::consts::TAU;

use crate::drift::{drift_matrix, is_stable};
use crate::error::{Error, Result};
use crate::params::OperatingPoint;
use crate::quadrature::{integrate, QuadOptions};
use crate::spectrum::{chi_mode, FeedbackConfig, Spectrum, ThermalModel};

/// Product S_imp · S_F^ba of the imprecision and back-action densities at
/// the quantum limit, in the normalization used by [`min_imp_noise`].
pub const IMPRECISION_BACKACTION_PRODUCT: f64 = 0.25;

/// Integration settings for the variance integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPolicy {
    /// Integrate over |ω| ≤ omega_max_factor · ω_b.
    pub omega_max_factor: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    pub thermal: ThermalModel,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            omega_max_factor: 20.0,
            rel_tol: 1e-6,
            max_intervals: 20_000,
            thermal: ThermalModel::Colored,
        }
    }
}

/// Variance contributed by each noise source.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SourceVariances {
    pub cavity_backaction: f64,
    pub magnon_backaction: f64,
    pub thermal: f64,
    pub loop_backaction: f64,
    pub imprecision: f64,
}

impl SourceVariances {
    fn from_slice(v: &[f64]) -> Self {
        Self {
            cavity_backaction: v[0],
            magnon_backaction: v[1],
            thermal: v[2],
            loop_backaction: v[3],
            imprecision: v[4],
        }
    }

    pub fn total(&self) -> f64 {
        self.cavity_backaction + self.magnon_backaction + self.thermal + self.loop_backaction + self.imprecision
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Breakdown {
    pub q: SourceVariances,
    pub p: SourceVariances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Variances {
    pub var_q: f64,
    pub var_p: f64,
    pub breakdown: Breakdown,
    pub achieved_rel: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoolingResult {
    pub var_q: f64,
    pub var_p: f64,
    pub n_eff: f64,
    pub stable: bool,
    pub spectral_abscissa: f64,
    pub breakdown: Breakdown,
    pub g0_used: f64,
}

/// Frequencies at which the integration range is always split.
fn breakpoints(op: &OperatingPoint, fb: &FeedbackConfig, omega_max: f64) -> Vec<f64> {
    let wb = op.params.omega_b;
    let gamma_eff = (1.0 + fb.g0) * op.params.gamma_b;
    let mut pts = vec![0.0, wb, 2.0 * wb, fb.band_half_width, omega_max];
    // Bracket the resonance a few linewidths out so the peak is resolved
    // without relying on bisection from the outside alone.
    for k in [1.0, 10.0, 100.0] {
        let off = k * gamma_eff;
        if off < 0.5 * wb {
            pts.push(wb - off);
            pts.push(wb + off);
        }
    }
    let mut all: Vec<f64> = pts
        .iter()
        .filter(|&&x| x <= omega_max)
        .flat_map(|&x| [x, -x])
        .collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// Position and momentum variances by quadrature of S_q and S_p.
///
/// Refuses unstable configurations before integrating.
pub fn variances(op: &OperatingPoint, fb: &FeedbackConfig, policy: &GridPolicy) -> Result<Variances> {
    let spectrum = Spectrum::new(op, fb, policy.thermal)?;
    is_stable(&drift_matrix(op, fb))?.require_stable()?;
    integrate_spectrum(&spectrum, policy)
}

fn integrate_spectrum(spectrum: &Spectrum<'_>, policy: &GridPolicy) -> Result<Variances> {
    let op = spectrum.operating_point();
    let fb = spectrum.feedback();
    let wb = op.params.omega_b;
    let omega_max = policy.omega_max_factor * wb;

    let integrand = |w: f64| -> [f64; 12] {
        let s = spectrum.sample(w);
        let chi2 = s.chi_b_eff.norm_sqr();
        let ratio = w * w / (wb * wb);
        let t = s.terms.as_array();
        let mut out = [0.0; 12];
        out[0] = s.s_q;
        out[1] = s.s_p;
        for k in 0..5 {
            out[2 + k] = chi2 * t[k];
            out[7 + k] = ratio * chi2 * t[k];
        }
        out
    };
    let opts = QuadOptions {
        rel_tol: policy.rel_tol,
        abs_tol: 0.0,
        max_intervals: policy.max_intervals,
    };
    let r = integrate(integrand, &breakpoints(op, fb, omega_max), 2, &opts);
    if !r.converged {
        return Err(Error::QuadratureNotConverged {
            requested: policy.rel_tol,
            achieved: r.achieved_rel,
            intervals: r.intervals,
        });
    }
    let v: Vec<f64> = r.values.iter().map(|x| x / TAU).collect();
    Ok(Variances {
        var_q: v[0],
        var_p: v[1],
        breakdown: Breakdown {
            q: SourceVariances::from_slice(&v[2..7]),
            p: SourceVariances::from_slice(&v[7..12]),
        },
        achieved_rel: r.achieved_rel,
        intervals: r.intervals,
    })
}

/// Effective phonon number (⟨δq²⟩ + ⟨δp²⟩ − 1)/2 with its breakdown.
pub fn n_eff(op: &OperatingPoint, fb: &FeedbackConfig, policy: &GridPolicy) -> Result<CoolingResult> {
    let spectrum = Spectrum::new(op, fb, policy.thermal)?;
    let report = is_stable(&drift_matrix(op, fb))?;
    report.require_stable()?;
    let v = integrate_spectrum(&spectrum, policy)?;
    Ok(CoolingResult {
        var_q: v.var_q,
        var_p: v.var_p,
        n_eff: 0.5 * (v.var_q + v.var_p - 1.0),
        stable: true,
        spectral_abscissa: report.spectral_abscissa,
        breakdown: v.breakdown,
        g0_used: fb.g0,
    })
}

/// Evaluate n_eff at each gain in `g0s`, in order.
pub fn scan_gain(
    op: &OperatingPoint,
    template: &FeedbackConfig,
    g0s: &[f64],
    policy: &GridPolicy,
) -> Vec<Result<CoolingResult>> {
    g0s.iter()
        .map(|&g0| n_eff(op, &template.with_g0(g0), policy))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainOptimum {
    pub g0_opt: f64,
    pub result: CoolingResult,
    /// Gains skipped because the loop was unstable there.
    pub unstable: Vec<f64>,
    pub evaluations: usize,
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section refinement of a scanned minimum.
///
/// `scan` pairs each gain (ascending) with its result. The minimum among
/// stable points is bracketed by its neighbours and refined in log g0. With
/// fewer than three points no refinement is attempted.
pub fn refine_gain(
    op: &OperatingPoint,
    template: &FeedbackConfig,
    scan: &[(f64, Result<CoolingResult>)],
    policy: &GridPolicy,
) -> Result<GainOptimum> {
    let unstable: Vec<f64> = scan
        .iter()
        .filter(|(_, r)| matches!(r, Err(Error::Unstable { .. })))
        .map(|(g, _)| *g)
        .collect();
    let stable: Vec<(usize, f64, CoolingResult)> = scan
        .iter()
        .enumerate()
        .filter_map(|(i, (g, r))| r.as_ref().ok().map(|c| (i, *g, *c)))
        .collect();
    let lo = scan.first().map_or(f64::NAN, |s| s.0);
    let hi = scan.last().map_or(f64::NAN, |s| s.0);
    let (best_i, best_g, best) = stable
        .iter()
        .min_by(|a, b| a.2.n_eff.total_cmp(&b.2.n_eff))
        .copied()
        .ok_or(Error::NoStableGain { lo, hi })?;

    let mut optimum = GainOptimum {
        g0_opt: best_g,
        result: best,
        unstable,
        evaluations: 0,
    };
    if scan.len() < 3 {
        return Ok(optimum);
    }
    let left = scan[best_i.saturating_sub(1)].0;
    let right = scan[(best_i + 1).min(scan.len() - 1)].0;
    if !(left > 0.0 && right > left) {
        return Ok(optimum);
    }

    let mut eval = |log_g: f64| -> f64 {
        optimum.evaluations += 1;
        let g0 = log_g.exp();
        match n_eff(op, &template.with_g0(g0), policy) {
            Ok(r) => {
                if r.n_eff < optimum.result.n_eff {
                    optimum.g0_opt = g0;
                    optimum.result = r;
                }
                r.n_eff
            }
            Err(_) => f64::INFINITY,
        }
    };

    let (mut a, mut b) = (left.ln(), right.ln());
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while b - a > 1e-4 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = eval(d);
        }
    }
    Ok(optimum)
}

/// Log-spaced gains from `lo` to `hi` with at least `per_decade` points per
/// decade (endpoints included).
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo * 10f64.powf(decades * i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// Coarse log scan (≥ 40 points/decade) followed by golden-section
/// refinement.
pub fn optimize_gain(
    op: &OperatingPoint,
    template: &FeedbackConfig,
    g0_range: (f64, f64),
    policy: &GridPolicy,
) -> Result<GainOptimum> {
    let (lo, hi) = g0_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid("g0_range", format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let grid = log_grid(lo, hi, 40);
    let results = scan_gain(op, template, &grid, policy);
    let scan: Vec<(f64, Result<CoolingResult>)> = grid.into_iter().zip(results).collect();
    // Propagate hard failures (non-convergence etc.); instability is expected.
    if let Some((_, Err(e))) = scan
        .iter()
        .find(|(_, r)| matches!(r, Err(e) if !matches!(e, Error::Unstable { .. })))
    {
        return Err(e.clone());
    }
    refine_gain(op, template, &scan, policy)
}

/// Smallest measurement-noise density allowed by the imprecision/back-action
/// product bound at ω = ω_b, in the internal (per rad/s) convention.
///
/// The imprecision referred to the position, S_imp/(η g_a²G_m²|χ_aχ_ma|²),
/// times the back-action force density S_a^ba + S_m^ba is held at
/// [`IMPRECISION_BACKACTION_PRODUCT`]. G_m and χ_ma drop out of the ratio.
pub fn min_imp_noise(op: &OperatingPoint) -> f64 {
    let p = &op.params;
    let n = &op.occupations;
    let readout = p.g_a * p.g_a * chi_mode(p.omega_b, p.kappa_a).norm_sqr();
    let force = readout * p.kappa_a * (2.0 * n.cavity + 1.0) + p.kappa_m * (2.0 * n.magnon + 1.0);
    IMPRECISION_BACKACTION_PRODUCT * p.eta * readout / force
}

/// Full width at half maximum of the S_q resonance near ω_b.
pub fn resonance_linewidth(op: &OperatingPoint, fb: &FeedbackConfig) -> Result<f64> {
    let spectrum = Spectrum::new(op, fb, ThermalModel::Colored)?;
    let wb = op.params.omega_b;
    let guess = (1.0 + fb.g0) * op.params.gamma_b;
    let s = |w: f64| spectrum.s_q(w);

    // Locate the peak on a grid spanning a few expected widths, then polish.
    let span = 5.0 * guess;
    let n = 2001;
    let (mut peak_w, mut peak) = (wb, s(wb));
    for i in 0..n {
        let w = wb - span + 2.0 * span * i as f64 / (n - 1) as f64;
        let v = s(w);
        if v > peak {
            peak = v;
            peak_w = w;
        }
    }
    let half = 0.5 * peak;
    let edge = |dir: f64| -> f64 {
        let mut inner = peak_w;
        let mut outer = peak_w + dir * guess;
        while s(outer) > half {
            inner = outer;
            outer = peak_w + 2.0 * (outer - peak_w);
        }
        for _ in 0..200 {
            let mid = 0.5 * (inner + outer);
            if s(mid) > half {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        0.5 * (inner + outer)
    };
    Ok(edge(1.0) - edge(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::reference_point;

    #[test]
    fn decoupled_markovian_oscillator_is_thermal() {
        let mut op = reference_point(10.0);
        op.coupling = 0.0;
        let fb = FeedbackConfig::open_loop(&op.params);
        let policy = GridPolicy {
            thermal: ThermalModel::Markovian,
            omega_max_factor: 2e4,
            ..GridPolicy::default()
        };
        let v = variances(&op, &fb, &policy).unwrap();
        let expect = op.occupations.phonon + 0.5;
        // The finite cutoff removes ∫_{|ω|>ω_max} ≈ 2γ_b/(πω_max) of the total.
        assert!((v.var_q - expect).abs() / expect < 1e-6, "{}", v.var_q);
        assert!((v.var_p - expect).abs() / expect < 1e-6, "{}", v.var_p);
    }

    #[test]
    fn breakdown_adds_up() {
        let op = reference_point(10.0);
        let fb = FeedbackConfig::new(&op.params, 1e3, 4.04e-9);
        let r = n_eff(&op, &fb, &GridPolicy::default()).unwrap();
        assert!((r.breakdown.q.total() - r.var_q).abs() < 1e-6 * r.var_q);
        assert!((r.breakdown.p.total() - r.var_p).abs() < 1e-6 * r.var_p);
        assert!(r.var_q + r.var_p >= 1.0 - 1e-6);
        assert_eq!(r.n_eff, 0.5 * (r.var_q + r.var_p - 1.0));
    }

    #[test]
    fn open_loop_is_dominated_by_back_action_heating() {
        let op = reference_point(10.0);
        let r = n_eff(&op, &FeedbackConfig::open_loop(&op.params), &GridPolicy::default()).unwrap();
        assert!(r.n_eff > op.occupations.phonon);
        assert_eq!(r.breakdown.q.loop_backaction, 0.0);
        assert_eq!(r.breakdown.q.imprecision, 0.0);
        let ba = r.breakdown.q.cavity_backaction + r.breakdown.q.magnon_backaction;
        assert!(ba > r.breakdown.q.thermal);
    }

    #[test]
    fn unstable_point_is_refused() {
        // The drift matrix is block-triangular in G_m, so only a sign flip of
        // the damping can destabilize it.
        let mut op = reference_point(10.0);
        op.params.gamma_b = -op.params.gamma_b;
        let fb = FeedbackConfig::open_loop(&op.params);
        let report = is_stable(&drift_matrix(&op, &fb)).unwrap();
        assert!(!report.stable);
        assert!(matches!(n_eff(&op, &fb, &GridPolicy::default()), Err(Error::Unstable { .. })));
    }

    #[test]
    fn log_grid_density() {
        let g = log_grid(1.0, 1e4, 40);
        assert_eq!(g.len(), 161);
        assert_eq!(g[0], 1.0);
        assert_eq!(*g.last().unwrap(), 1e4);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn two_point_scan_is_not_refined() {
        let op = reference_point(10.0);
        let fb = FeedbackConfig::new(&op.params, 0.0, 4.04e-9);
        let policy = GridPolicy::default();
        let g0s = [10.0, 1e3];
        let scan: Vec<_> = g0s.iter().copied().zip(scan_gain(&op, &fb, &g0s, &policy)).collect();
        let opt = refine_gain(&op, &fb, &scan, &policy).unwrap();
        assert_eq!(opt.evaluations, 0);
        assert_eq!(opt.g0_opt, 1e3);
    }

    #[test]
    fn imprecision_bound_orders_with_magnon_linewidth() {
        let s: Vec<f64> = [1.0, 10.0, 100.0].iter().map(|&k| min_imp_noise(&reference_point(k))).collect();
        assert!(s[0] > s[1] && s[1] > s[2]);
    }

    #[test]
    fn linewidth_of_open_loop_peak() {
        let mut op = reference_point(10.0);
        op.coupling = 0.0;
        let w = resonance_linewidth(&op, &FeedbackConfig::open_loop(&op.params)).unwrap();
        assert!((w - op.params.gamma_b).abs() / op.params.gamma_b < 0.01, "{w}");
    }
}
