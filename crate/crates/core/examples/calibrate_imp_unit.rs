//! Decide how quoted measurement-noise densities map onto the internal
//! convention, by comparing both readings against the reference minima for
//! κ_m/2π = 10 MHz at S_imp = 1e-8, 1e-7, 1e-6.
//!
//! cargo run --release -p magnocool-core --example calibrate_imp_unit

use magnocool::constants::hz_to_angular;
use magnocool::{optimize_gain, FeedbackConfig, GridPolicy, ImpUnit, OperatingPoint, SystemParams};

fn main() {
    let params = SystemParams {
        omega_a: hz_to_angular(10e9),
        omega_m: hz_to_angular(10e9),
        omega_b: hz_to_angular(10e6),
        gamma_b: hz_to_angular(100.0),
        kappa_a: hz_to_angular(5e6),
        kappa_m: hz_to_angular(10e6),
        g_a: hz_to_angular(18e6),
        g_m: hz_to_angular(1.0),
        rabi: 0.0,
        omega_drive: hz_to_angular(10e9),
        temperature: 0.01,
        eta: 0.9,
    };
    let op = OperatingPoint::with_coupling(params, hz_to_angular(2e6)).expect("valid parameters");
    let reference = [(1e-8, 0.57), (1e-7, 2.12), (1e-6, 7.5)];

    let mut best: Option<(ImpUnit, f64)> = None;
    for unit in [ImpUnit::PerRadPerSec, ImpUnit::PerHertz] {
        let mut worst: f64 = 0.0;
        for (s_imp, target) in reference {
            let fb = FeedbackConfig {
                s_imp_unit: unit,
                ..FeedbackConfig::new(&params, 0.0, s_imp)
            };
            let opt = optimize_gain(&op, &fb, (1.0, 1e5), &GridPolicy::default()).expect("stable");
            let dev = (opt.result.n_eff - target).abs() / target;
            worst = worst.max(dev);
            println!(
                "{unit:?}: S_imp = {s_imp:e} -> min n_eff = {:.4} (reference {target}, {:+.1}%)",
                opt.result.n_eff,
                100.0 * (opt.result.n_eff - target) / target
            );
        }
        if best.is_none_or(|(_, w)| worst < w) {
            best = Some((unit, worst));
        }
    }
    let (unit, worst) = best.unwrap();
    println!("selected {unit:?} (worst deviation {:.1}%)", 100.0 * worst);
}
