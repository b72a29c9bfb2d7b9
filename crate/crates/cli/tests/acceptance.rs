//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::process::Command;
use std::time::Instant;

use corner_lightning::analysis::{convergence_sweep, sup_error, ConvergenceTable, InteriorCompact, SweepConfig};
use corner_lightning::fastdec::{certify_bounds, eval_bowtie, eval_reference, BowtieParams};
use corner_lightning::geometry::{boundary_grid, Clustering, ConvexDomain, SectorDomain};
use corner_lightning::lightning::{build_approximant, slit_quadrature, LightningScheme, Target};
use corner_lightning::minimax::{solve_minimax, unit_circle, MinimaxProblem};
use corner_lightning::ComplexPoint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SWEEP_N: [usize; 6] = [16, 36, 64, 100, 144, 196];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn sector() -> SectorDomain {
    SectorDomain::new(0.5, FRAC_PI_4).unwrap()
}

fn sweep(target: Target) -> ConvergenceTable {
    let mut config = SweepConfig::new(sector(), SWEEP_N.to_vec(), 2.0);
    config.interior = vec![InteriorCompact {
        label: "annulus".into(),
        r_min: 0.1,
        r_max: 0.25,
        half_angle: FRAC_PI_8,
        radial: 10,
        angular: 9,
    }];
    convergence_sweep(&target, &config).unwrap()
}

fn inner_bound() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [10, 100, 1000] {
        worst = worst.max(certify_bounds(n, 400).unwrap().sup_inner);
    }
    outcome(worst <= 1.0 + 1e-10, format!("max sup|R_n| on S_1/3 = {worst:.15}"))
}

fn extended_bound() -> Outcome {
    let sups: Vec<f64> = [10, 100, 1000].iter().map(|&n| certify_bounds(n, 400).unwrap().sup_extended).collect();
    let c = sups.iter().copied().fold(0.0, f64::max);
    outcome(c < 20.0, format!("sup over 1/n-neighbourhood {sups:.4?}, constant {c:.4}"))
}

fn centre_decay() -> Outcome {
    // r(-1/3) = (2/3)(10/9) = 20/27 exactly.
    let oracle = (20.0f64 / 27.0).powi(50);
    let value = eval_reference(50, Complex64::new(-1.0 / 3.0, 0.0)).modulus();
    let rel = (value - oracle).abs() / oracle;
    let c_exact = -(20.0f64 / 27.0).ln();
    let exponents: Vec<f64> = [10, 100, 1000]
        .iter()
        .map(|&n| certify_bounds(n, 10).unwrap().probes.iter().find(|p| p.0 == 1.0).unwrap().1)
        .collect();
    let spread = exponents.iter().map(|c| (c - c_exact).abs()).fold(0.0, f64::max);
    outcome(
        rel <= 1e-9 && spread <= 1e-9,
        format!("relative error {rel:.2e}, centre exponent {:.5} (spread {spread:.1e})", exponents[0]),
    )
}

fn phi_bounds() -> Outcome {
    let tol = 1e-12;
    let rule = slit_quadrature(1e-16, 16).unwrap();
    let mut upper_margin = f64::NEG_INFINITY;
    let mut lower_margin = f64::NEG_INFINITY;
    let mut gamma_nodes = 0;
    for n in [16, 64, 196] {
        let scheme = LightningScheme::new(n, 2.0).unwrap();
        for i in 0..100 {
            let r = 1e-12f64.powf(1.0 - i as f64 / 99.0) * 0.999;
            for j in 0..100 {
                let z = Complex64::from_polar(r, -FRAC_PI_4 + FRAC_PI_4 * (2 * j + 1) as f64 / 100.0);
                let lg = scheme.eval_phi(z).unwrap().log_magnitude;
                upper_margin = upper_margin.max(lg - z.norm().ln());
            }
        }
        let eps = scheme.epsilon_split();
        for &t in rule.nodes.iter().filter(|t| t.abs() <= eps) {
            let lg = scheme.eval_phi(Complex64::new(t, 0.0)).unwrap().log_magnitude;
            lower_margin = lower_margin.max(t.abs().ln() - lg);
            gamma_nodes += 1;
        }
    }
    outcome(
        upper_margin <= tol && lower_margin <= tol && gamma_nodes > 0,
        format!(
            "max ln|phi/z| on sector {upper_margin:.2e}, max ln|zeta/phi| on {gamma_nodes} slit nodes {lower_margin:.2e}"
        ),
    )
}

fn cauchy_identity() -> Outcome {
    let d = sector();
    let grid = boundary_grid(&d, 50, Clustering::Exponential).unwrap();
    let mut worst: f64 = 0.0;
    for n in [64, 100, 144, 196] {
        let r = build_approximant(&Target::EntireZ2, &d, n, 2.0).unwrap();
        worst = worst.max(sup_error(|z| r.evaluate(z), |z| z * z, &grid).unwrap());
    }
    outcome(worst <= 1e-10, format!("max error for z^2, n = 64..196: {worst:.2e}"))
}

fn boundary_rate(table: &ConvergenceTable) -> Outcome {
    let fit = table.boundary_fit().expect("boundary fit");
    let last = table.rows.last().unwrap().boundary_error.unwrap();
    outcome(
        fit.slope < 0.0 && fit.r_squared >= 0.95 && last <= 1e-4,
        format!("slope {:.4}, R² {:.5}, error at n = 196 {last:.2e}", fit.slope, fit.r_squared),
    )
}

fn interior_rate(table: &ConvergenceTable) -> Outcome {
    let fit = table.interior_fit(0).expect("interior fit");
    let dominated = table
        .rows
        .iter()
        .filter(|r| r.n >= 64)
        .all(|r| r.interior_errors[0].unwrap() <= r.boundary_error.unwrap());
    outcome(
        fit.slope < 0.0 && fit.r_squared >= 0.9 && dominated,
        format!("slope {:.4}, R² {:.5}, interior <= boundary for n >= 64: {dominated}", fit.slope, fit.r_squared),
    )
}

fn holder_sensitivity(sqrt_table: &ConvergenceTable) -> Outcome {
    let table = sweep(Target::Zpow03);
    let s_half = sqrt_table.boundary_fit().unwrap().slope;
    let s_03 = table.boundary_fit().unwrap().slope;
    outcome(s_03 < 0.0 && s_03 > s_half, format!("slope z^0.3 {s_03:.4} vs z^0.5 {s_half:.4}"))
}

fn minimax_baseline() -> Outcome {
    let samples = unit_circle(256);
    let estimate = |n: usize, f: &dyn Fn(ComplexPoint) -> ComplexPoint| {
        solve_minimax(&MinimaxProblem::from_fn(samples.clone(), f, n).unwrap()).unwrap().error_estimate
    };
    let e: Vec<f64> = (3..=12).map(|n| estimate(n, &|z| 1.0 / (z - 2.0))).collect();
    let ratios: Vec<f64> = e.windows(2).map(|w| w[0] / w[1]).collect();
    let ratios_ok = ratios.iter().all(|r| (1.8..=2.2).contains(r));
    let poly_worst = (0..=12)
        .map(|n| {
            estimate(n, &move |z: ComplexPoint| {
                (0..=n).rev().fold(Complex64::new(0.0, 0.0), |acc, j| acc * z + Complex64::new(1.0, j as f64))
            })
        })
        .fold(0.0, f64::max);
    outcome(
        ratios_ok && poly_worst <= 1e-10,
        format!(
            "ratios n = 4..12 in [{:.4}, {:.4}], polynomial error {poly_worst:.1e}",
            ratios.iter().copied().fold(f64::INFINITY, f64::min),
            ratios.iter().copied().fold(0.0, f64::max)
        ),
    )
}

fn bowtie_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let image = sector();
    let degree_param = 60u64;
    let mut worst: f64 = 0.0;
    let mut at_zeta: f64 = 0.0;
    for _ in 0..1000 {
        let zeta = Complex64::from_polar(rng.gen_range(0.75..1.5), rng.gen_range(-PI..PI));
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        assert!(!image.contains(zeta * zeta));
        let half_side = 3.0;
        let params = BowtieParams::for_image(&image, zeta, half_side).unwrap();
        // Direct complex arithmetic: r(w)^(n/3), w = e^{-i Theta}(z^2 - zeta^2) / (3 lambda).
        let w = Complex64::from_polar(1.0, -params.rotation) * (z * z - zeta * zeta) / (3.0 * half_side);
        let oracle = ((1.0 + w) * (1.0 + w * w)).powu((degree_param / 3) as u32);
        let value = eval_bowtie(degree_param, zeta, z, &params).unwrap().to_complex();
        worst = worst.max((value - oracle).norm() / oracle.norm().max(1.0));
        for s in [zeta, -zeta] {
            at_zeta = at_zeta.max((eval_bowtie(degree_param, zeta, s, &params).unwrap().to_complex() - 1.0).norm());
        }
    }
    outcome(worst <= 1e-12 && at_zeta <= 1e-12, format!("max deviation {worst:.1e}, |R - 1| at ±zeta {at_zeta:.1e}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let status = Command::new(env!("CARGO_BIN_EXE_corner-lightning"))
            .args([
                "lightning-sweep", "--target", "zsqrt", "--rho", "0.5", "--theta", "0.7853981633974483",
                "--sigma", "2", "--n", "16,36,64,100,144,196", "--out", name,
            ])
            .current_dir(dir.path())
            .stderr(std::process::Stdio::null())
            .status()
            .unwrap();
        if !status.success() {
            return outcome(false, format!("CLI exited with {status}"));
        }
        outputs.push(std::fs::read(dir.path().join(name)).unwrap());
    }
    let rows = String::from_utf8_lossy(&outputs[0]).lines().filter(|l| !l.starts_with('#')).count() - 1;
    outcome(outputs[0] == outputs[1], format!("{} bytes, {rows} rows, identical: {}", outputs[0].len(), outputs[0] == outputs[1]))
}

fn main() {
    let mut all = true;
    let mut report = |id: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2} {name}: {} ({:.2}s)", o.detail, start.elapsed().as_secs_f64());
        all &= o.passed;
    };
    report(1, "fast-decreasing inner bound", &mut inner_bound);
    report(2, "fast-decreasing extended bound", &mut extended_bound);
    report(3, "centre decay (20/27)^50", &mut centre_decay);
    report(4, "node function bounds", &mut phi_bounds);
    report(5, "Cauchy identity for z^2", &mut cauchy_identity);
    let start = Instant::now();
    let sqrt_table = sweep(Target::Zsqrt);
    println!("       z^1/2 sweep took {:.2}s", start.elapsed().as_secs_f64());
    report(6, "root-exponential boundary rate", &mut || boundary_rate(&sqrt_table));
    report(7, "geometric interior rate", &mut || interior_rate(&sqrt_table));
    report(8, "Hölder exponent sensitivity", &mut || holder_sensitivity(&sqrt_table));
    report(9, "minimax baseline", &mut minimax_baseline);
    report(10, "bowtie identity", &mut bowtie_identity);
    report(11, "CLI determinism", &mut determinism);
    if !all {
        println!("acceptance: some criteria FAILED");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
