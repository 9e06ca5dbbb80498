//! Adaptive Gauss–Kronrod (G10/K21) quadrature over vector-valued integrands.
//!
//! All components share one subdivision. Convergence is judged on the first
//! `controlled` components only; the rest ride along, which keeps per-source
//! breakdowns exactly additive with the totals they are integrated with.

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_751_377_480,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_intervals: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult<const N: usize> {
    pub values: [f64; N],
    pub errors: [f64; N],
    pub intervals: usize,
    pub evaluations: usize,
    /// Largest err/|value| among the controlled components.
    pub achieved_rel: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn kronrod21<const N: usize, F>(f: &F, a: f64, b: f64) -> Segment<N>
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let mut abs_k = [0.0; N];
    for k in 0..N {
        kron[k] = WGK[10] * fc[k];
        abs_k[k] = WGK[10] * fc[k].abs();
    }
    let mut samples = [[0.0; N]; 20];
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        for k in 0..N {
            kron[k] += WGK[j] * (lo[k] + hi[k]);
            abs_k[k] += WGK[j] * (lo[k].abs() + hi[k].abs());
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * (lo[k] + hi[k]);
            }
        }
        samples[2 * j] = lo;
        samples[2 * j + 1] = hi;
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for k in 0..N {
        let mean = kron[k] * 0.5;
        let mut asc = WGK[10] * (fc[k] - mean).abs();
        for j in 0..10 {
            asc += WGK[j] * ((samples[2 * j][k] - mean).abs() + (samples[2 * j + 1][k] - mean).abs());
        }
        let result = kron[k] * half;
        let resabs = abs_k[k] * half.abs();
        let resasc = asc * half.abs();
        let mut err = ((kron[k] - gauss[k]) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        value[k] = result;
        error[k] = err;
    }
    Segment { a, b, value, error }
}

/// Integrate `f` over [breakpoints[0], breakpoints[last]], with forced
/// subdivision at every interior breakpoint. Breakpoints must be sorted.
pub fn integrate<const N: usize, F>(
    f: F,
    breakpoints: &[f64],
    controlled: usize,
    opts: &QuadOptions,
) -> QuadResult<N>
where
    F: Fn(f64) -> [f64; N],
{
    assert!(breakpoints.len() >= 2, "need at least two breakpoints");
    assert!(
        breakpoints.windows(2).all(|w| w[0] <= w[1]),
        "breakpoints must be sorted"
    );
    let controlled = controlled.min(N);

    let mut segments: Vec<Segment<N>> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod21(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * segments.len();

    loop {
        let mut values = [0.0; N];
        let mut errors = [0.0; N];
        for s in &segments {
            for k in 0..N {
                values[k] += s.value[k];
                errors[k] += s.error[k];
            }
        }
        let tol: Vec<f64> = (0..controlled)
            .map(|k| opts.abs_tol.max(opts.rel_tol * values[k].abs()))
            .collect();
        let achieved_rel = (0..controlled)
            .map(|k| {
                if values[k] == 0.0 {
                    if errors[k] == 0.0 { 0.0 } else { f64::INFINITY }
                } else {
                    errors[k] / values[k].abs()
                }
            })
            .fold(0.0, f64::max);
        let done = (0..controlled).all(|k| errors[k] <= tol[k]);
        if done || segments.len() >= opts.max_intervals {
            return QuadResult {
                values,
                errors,
                intervals: segments.len(),
                evaluations,
                achieved_rel,
                converged: done,
            };
        }

        // Bisect the segment contributing most to the normalized error.
        let score = |s: &Segment<N>| -> f64 {
            (0..controlled)
                .map(|k| {
                    if tol[k] > 0.0 {
                        s.error[k] / tol[k]
                    } else {
                        s.error[k]
                    }
                })
                .sum()
        };
        let (worst, _) = segments
            .iter()
            .enumerate()
            .map(|(i, s)| (i, score(s)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // Interval exhausted at machine resolution; freeze its error.
            let mut frozen = s;
            frozen.error = [0.0; N];
            segments.push(frozen);
            continue;
        }
        segments.push(kronrod21(&f, s.a, mid));
        segments.push(kronrod21(&f, mid, s.b));
        evaluations += 42;
    }
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(f: F, breakpoints: &[f64], opts: &QuadOptions) -> QuadResult<1>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| [f(x)], breakpoints, 1, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_is_exact_for_high_degree_polynomials() {
        for deg in 0..=31 {
            let r = kronrod21(&|x: f64| [x.powi(deg)], 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((r.value[0] - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn gauss_weights_and_nodes_are_consistent() {
        // Both embedded rules integrate 1 over [-1, 1] to 2.
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
        // The Gauss rule is exact to degree 19 on its own.
        let x18: f64 = 2.0 * (0..5).map(|j| WG[j] * XGK[2 * j + 1].powi(18)).sum::<f64>();
        assert!((x18 - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn narrow_lorentzian_with_breakpoint_at_peak() {
        let x0 = 6.0e7;
        let g = 600.0;
        let f = |x: f64| g / ((x - x0).powi(2) + g * g);
        let a = -1.2e9;
        let b = 1.2e9;
        let exact = ((b - x0) / g).atan() - ((a - x0) / g).atan();
        let r = integrate_scalar(f, &[a, 0.0, x0, 2.0 * x0, b], &QuadOptions::default());
        assert!(r.converged);
        assert!((r.values[0] - exact).abs() / exact < 1e-7, "{} vs {}", r.values[0], exact);
        assert!(exact > 0.99 * PI);
    }

    #[test]
    fn vector_components_share_subdivision() {
        let f = |x: f64| [x.sin().powi(2) + x.cos().powi(2), x.sin().powi(2), x.cos().powi(2)];
        let r = integrate(f, &[0.0, 10.0], 1, &QuadOptions::default());
        assert!((r.values[0] - 10.0).abs() < 1e-12);
        assert!((r.values[1] + r.values[2] - r.values[0]).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_intervals: 3,
        };
        let r = integrate_scalar(|x: f64| 1.0 / x.abs().sqrt().max(1e-300), &[-1.0, 1.0], &opts);
        assert!(!r.converged);
        assert!(r.achieved_rel > 1e-14);
    }
}
