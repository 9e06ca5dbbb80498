//! Subcommand implementations. Each returns the text to emit.

use rayon::prelude::*;
use serde_json::{json, Value};

use magnocool::constants::{angular_to_hz, hz_to_angular};
use magnocool::{
    drift_matrix, is_stable, n_eff, optimize_gain, refine_gain, Complex64, CoolingResult,
    Error as CoreError, FeedbackConfig, GainOptimum, OperatingPoint, Spectrum,
};

use crate::axis::{AxisSpec, Scale};
use crate::config::{coupling_hz, Format, RunConfig};
use crate::error::CliError;
use crate::output::{round_json, Cell, Table};

/// n_eff above which a 2-D sweep point is flagged.
pub const SWEEP_FLAG_THRESHOLD: f64 = 10.0;

const SOURCES: [&str; 5] = ["cavity_ba", "magnon_ba", "thermal", "loop_ba", "imprecision"];

fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn report(v: Value, digits: usize) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(&v, digits)).expect("json");
    s.push('\n');
    s
}

fn loop_for(cfg: &RunConfig) -> Result<(OperatingPoint, FeedbackConfig), CliError> {
    let op = cfg.operating_point()?;
    let fb = cfg.feedback(&op.params);
    fb.validate()?;
    Ok((op, fb))
}

/// Mean fields, couplings and bath occupations as JSON.
pub fn steady_state(cfg: &RunConfig) -> Result<String, CliError> {
    let params = cfg.system_params()?;
    let ss = cfg.steady_state()?;
    let occ = params.occupations()?;
    let entry = if cfg.system.big_g_m.is_some() && cfg.system.omega_drive.is_none() {
        "G_m"
    } else {
        "drive"
    };
    let v = json!({
        "entry": entry,
        "mean_a": complex(ss.mean_a),
        "mean_m": complex(ss.mean_m),
        "mean_q": ss.mean_q,
        "mean_p": ss.mean_p,
        "G_m_over_2pi_Hz": complex(ss.coupling / hz_to_angular(1.0)),
        "rabi_over_2pi_Hz": angular_to_hz(params.rabi),
        "g_m_over_2pi_Hz": angular_to_hz(params.g_m),
        "delta_a_over_2pi_Hz": angular_to_hz(ss.detunings.delta_a),
        "delta_m_over_2pi_Hz": angular_to_hz(ss.detunings.delta_m),
        "delta_m_tilde_over_2pi_Hz": angular_to_hz(ss.detunings.delta_m_tilde),
        "iterations": ss.iterations,
        "n_a": occ.cavity,
        "n_m": occ.magnon,
        "n_b": occ.phonon,
    });
    Ok(report(v, cfg.output.precision))
}

/// Force-noise terms and spectra on a frequency grid (Hz).
pub fn spectrum(cfg: &RunConfig, axis: Option<&AxisSpec>) -> Result<Table, CliError> {
    let (op, fb) = loop_for(cfg)?;
    is_stable(&drift_matrix(&op, &fb))?.require_stable()?;
    let spec = Spectrum::new(&op, &fb, cfg.integration.thermal)?;

    let nu_b = cfg.system.omega_b;
    let axis = match axis {
        Some(a) => {
            a.validate_with(&["omega"])?;
            a.clone()
        }
        None => AxisSpec {
            name: "omega".into(),
            scale: Scale::Linear,
            min: -3.0 * nu_b,
            max: 3.0 * nu_b,
            count: 1201,
        },
    };
    let grid = axis.values();
    let samples: Vec<_> = grid
        .par_iter()
        .map(|&nu| spec.sample(hz_to_angular(nu)))
        .collect();

    let mut t = Table::new(&[
        "omega_over_2pi_Hz",
        "S_a_ba",
        "S_m_ba",
        "S_b_th",
        "S_fb_am",
        "S_q_imp",
        "S_q",
        "S_p",
    ]);
    for (nu, s) in grid.iter().zip(&samples) {
        let mut row: Vec<Cell> = vec![(*nu).into()];
        row.extend(s.terms.as_array().iter().map(|&x| Cell::from(x)));
        row.push(s.s_q.into());
        row.push(s.s_p.into());
        t.push(row);
    }
    Ok(t)
}

fn cooling_columns(leading: &[&str]) -> Vec<String> {
    let mut cols: Vec<String> = leading.iter().map(|s| s.to_string()).collect();
    cols.extend(["n_eff", "var_q", "var_p", "stable"].map(String::from));
    for quad in ["q", "p"] {
        cols.extend(SOURCES.iter().map(|s| format!("var_{quad}_{s}")));
    }
    cols
}

/// Cells after the leading axis values; unstable points carry blanks.
fn cooling_cells(r: &Result<CoolingResult, CoreError>) -> Vec<Cell> {
    match r {
        Ok(c) => {
            let mut row = vec![c.n_eff.into(), c.var_q.into(), c.var_p.into(), true.into()];
            for s in [c.breakdown.q, c.breakdown.p] {
                row.extend(
                    [s.cavity_backaction, s.magnon_backaction, s.thermal, s.loop_backaction, s.imprecision]
                        .map(Cell::from),
                );
            }
            row
        }
        Err(_) => {
            let mut row = vec![Cell::Missing; 4 + 2 * SOURCES.len()];
            row[3] = false.into();
            row
        }
    }
}

/// Keep instability as data; anything else aborts the run.
fn tolerate_unstable<T>(r: Result<T, CoreError>) -> Result<Result<T, CoreError>, CliError> {
    match r {
        Err(e @ CoreError::Unstable { .. }) => Ok(Err(e)),
        Err(e) => Err(e.into()),
        ok => Ok(ok),
    }
}

/// n_eff against g0, with the optimum as a summary.
pub fn cool(cfg: &RunConfig, axis: Option<&AxisSpec>) -> Result<Table, CliError> {
    let (op, template) = loop_for(cfg)?;
    let policy = cfg.grid_policy();
    let axis = match axis {
        Some(a) => {
            a.validate_with(&["g0"])?;
            a.clone()
        }
        None => AxisSpec {
            name: "g0".into(),
            scale: Scale::Log,
            min: 1.0,
            max: 1e5,
            count: 201,
        },
    };
    let grid = axis.values();
    let results: Vec<Result<CoolingResult, CoreError>> = grid
        .par_iter()
        .map(|&g0| n_eff(&op, &template.with_g0(g0), &policy))
        .collect::<Vec<_>>()
        .into_iter()
        .map(tolerate_unstable)
        .collect::<Result<_, _>>()?;

    let mut t = Table::new(&cooling_columns(&["g0"]));
    for (g0, r) in grid.iter().zip(&results) {
        let mut row = vec![Cell::from(*g0)];
        row.extend(cooling_cells(r));
        t.push(row);
    }

    // A scan of two points is reported as is; longer scans are refined
    // between the neighbours of the best grid point.
    let scan: Vec<_> = grid.iter().copied().zip(results).collect();
    let summary = match refine_gain(&op, &template, &scan, &policy) {
        Ok(GainOptimum { g0_opt, result, evaluations, .. }) => json!({
            "g0_opt": g0_opt,
            "n_eff_min": result.n_eff,
            "refined": scan.len() > 2,
            "refine_evaluations": evaluations,
        }),
        Err(CoreError::NoStableGain { .. }) => json!({
            "g0_opt": null,
            "n_eff_min": null,
            "refined": false,
            "refine_evaluations": 0,
        }),
        Err(e) => return Err(e.into()),
    };
    t.summary = Some(summary);
    Ok(t)
}

/// Long-format grid of log10 n_eff over two parameters.
pub fn sweep2d(cfg: &RunConfig, axes: &[AxisSpec]) -> Result<Table, CliError> {
    let [ax, ay] = axes else {
        return Err(CliError::Usage(format!(
            "sweep2d needs exactly 2 axes, got {}",
            axes.len()
        )));
    };
    ax.validate()?;
    ay.validate()?;
    if ax.name == ay.name {
        return Err(CliError::Config {
            field: "sweep.axes".into(),
            reason: format!("both axes sweep `{}`", ax.name),
        });
    }
    let policy = cfg.grid_policy();
    let optimize = cfg.sweep.optimize_gain;
    let [g_lo, g_hi] = cfg.sweep.gain_range;

    let points: Vec<(f64, f64)> = ax
        .values()
        .into_iter()
        .flat_map(|x| ay.values().into_iter().map(move |y| (x, y)))
        .collect();

    let evaluate = |&(x, y): &(f64, f64)| -> Result<(Result<CoolingResult, CoreError>, Option<f64>), CliError> {
        let point = cfg.with_value(&ax.name, x)?.with_value(&ay.name, y)?;
        let (op, fb) = loop_for(&point)?;
        if optimize {
            match optimize_gain(&op, &fb, (g_lo, g_hi), &policy) {
                Ok(o) => Ok((Ok(o.result), Some(o.g0_opt))),
                Err(CoreError::NoStableGain { lo, hi }) => Ok((
                    Err(CoreError::NoStableGain { lo, hi }),
                    None,
                )),
                Err(e) => Err(e.into()),
            }
        } else {
            Ok((tolerate_unstable(n_eff(&op, &fb, &policy))?, None))
        }
    };
    let results: Vec<_> = points
        .par_iter()
        .map(evaluate)
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_, _>>()?;

    let mut cols = vec!["x".to_string(), "y".into(), "log10_n_eff".into(), "exceeds_10".into()];
    if optimize {
        cols.push("g0_opt".into());
    }
    cols.extend(cooling_columns(&[]));
    let mut t = Table::new(&cols);
    for ((x, y), (r, g0_opt)) in points.iter().zip(&results) {
        let n = r.as_ref().ok().map(|c| c.n_eff);
        let mut row = vec![
            Cell::from(*x),
            Cell::from(*y),
            n.map(f64::log10).into(),
            n.map_or(Cell::Missing, |n| (n > SWEEP_FLAG_THRESHOLD).into()),
        ];
        if optimize {
            row.push((*g0_opt).into());
        }
        row.extend(cooling_cells(r));
        t.push(row);
    }
    t.summary = Some(json!({ "x": ax.name, "y": ay.name }));
    Ok(t)
}

/// Eigenvalues of the closed-loop drift matrix and the verdict.
pub fn stability(cfg: &RunConfig) -> Result<String, CliError> {
    let (op, fb) = loop_for(cfg)?;
    let r = is_stable(&drift_matrix(&op, &fb))?;
    let eig: Vec<Value> = r
        .eigenvalues
        .iter()
        .map(|&z| complex(z / hz_to_angular(1.0)))
        .collect();
    let v = json!({
        "eigenvalues_over_2pi_Hz": eig,
        "spectral_abscissa_over_2pi_Hz": angular_to_hz(r.spectral_abscissa),
        "threshold_over_2pi_Hz": angular_to_hz(r.threshold),
        "stable": r.stable,
        "verdict": if r.stable { "stable" } else { "unstable" },
        "G_m_over_2pi_Hz": coupling_hz(&op),
        "g0": fb.g0,
    });
    Ok(report(v, cfg.output.precision))
}

/// Render a table or report for output.
pub fn render(t: &Table, cfg: &RunConfig, format: Format) -> String {
    t.render(format, cfg.output.precision)
}
