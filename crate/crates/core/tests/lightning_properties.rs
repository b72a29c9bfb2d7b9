use std::f64::consts::{FRAC_PI_4, PI};

use corner_lightning::analysis::sup_error;
use corner_lightning::geometry::{boundary_grid, Clustering, SectorDomain};
use corner_lightning::lightning::{build_approximant, slit_quadrature, LightningScheme, SlitFunction, Target};
use corner_lightning::ComplexPoint;
use num_complex::Complex64;

fn sector() -> SectorDomain {
    SectorDomain::new(0.5, FRAC_PI_4).unwrap()
}

/// 100 x 100 polar grid of the open sector A_theta, radii graded toward 0.
fn sector_grid(theta: f64) -> Vec<ComplexPoint> {
    let mut pts = Vec::with_capacity(10_000);
    for i in 0..100 {
        let r = 1e-12f64.powf(1.0 - i as f64 / 99.0) * 0.999;
        for j in 0..100 {
            let a = -theta + 2.0 * theta * (j as f64 + 0.5) / 100.0;
            pts.push(Complex64::from_polar(r, a));
        }
    }
    pts
}

#[test]
fn factors_are_contractive_in_right_half_plane() {
    let scheme = LightningScheme::new(64, 2.0).unwrap();
    for z in sector_grid(PI / 2.0 - 1e-9).iter().step_by(7) {
        for m in scheme.factor_moduli(*z) {
            assert!(m <= 1.0 + 1e-15, "{z}: {m}");
        }
    }
}

#[test]
fn gamma_eps_tail_is_bounded_by_holder_integral() {
    // |I_eps(z)| <= (J / 2 pi) eps^delta / delta with J = sup |jump(t)| / |t|^delta.
    let d = sector();
    let grid = boundary_grid(&d, 300, Clustering::Exponential).unwrap();
    for target in [Target::Zsqrt, Target::Zpow03] {
        let delta = target.holder_exponent();
        let jump_scale = (1..200)
            .map(|k| -(k as f64) / 200.0)
            .map(|t: f64| target.jump(t).norm() / t.abs().powf(delta))
            .fold(0.0, f64::max);
        for n in [36, 100, 196] {
            let r = build_approximant(&target, &d, n, 2.0).unwrap();
            let eps = r.scheme().epsilon_split();
            let bound = jump_scale / (2.0 * PI) * eps.powf(delta) / delta;
            for &z in &grid.points {
                let split = r.slit_error_split(z).unwrap();
                assert!(split.near.norm() <= 1.01 * bound, "{target} n={n} z={z}: {} > {bound}", split.near.norm());
            }
        }
    }
}

#[test]
fn error_split_accounts_for_the_whole_error() {
    let d = sector();
    let r = build_approximant(&Target::Zsqrt, &d, 64, 2.0).unwrap();
    // Away from the cutoff the truncated Cauchy integral and circle tail are negligible.
    for z in [Complex64::from_polar(0.3, 0.5), Complex64::from_polar(0.01, -0.7), Complex64::new(0.5, 0.0)] {
        let split = r.slit_error_split(z).unwrap();
        let err = Target::Zsqrt.value(z) - r.evaluate(z).unwrap();
        assert!((err - split.near - split.far).norm() < 1e-12 + 1e-3 * err.norm(), "{z}");
    }
}

fn contour_integral(f: impl Fn(ComplexPoint) -> ComplexPoint, centre: ComplexPoint, radius: f64) -> ComplexPoint {
    let m = 256;
    (0..m)
        .map(|k| {
            let u = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / m as f64);
            f(centre + radius * u) * radius * u * Complex64::new(0.0, 2.0 * PI / m as f64)
        })
        .sum::<ComplexPoint>()
        / Complex64::new(0.0, 2.0 * PI)
}

#[test]
fn slit_part_has_simple_poles_at_the_scheme_poles() {
    let r = build_approximant(&Target::Zsqrt, &sector(), 16, 2.0).unwrap();
    let poles = r.scheme().poles().to_vec();
    for j in 1..poles.len() - 1 {
        let gap = (poles[j + 1] - poles[j]).abs().min((poles[j] - poles[j - 1]).abs());
        let radius = 0.1 * gap;
        let centre = Complex64::new(poles[j], 0.0);
        let slit = |z| r.evaluate_slit(z).unwrap();
        let residue = contour_integral(slit, centre, radius);
        let half = contour_integral(slit, centre, 0.5 * radius);
        assert!(residue.norm() > 0.0);
        // A simple pole's residue does not depend on the radius.
        assert!((residue - half).norm() <= 1e-6 * residue.norm(), "pole {j}");
        let moment = contour_integral(|z| slit(z) * (z - centre), centre, radius);
        assert!(moment.norm() <= 1e-6 * residue.norm() * radius + 1e-14, "pole {j} is not simple");
    }
    for centre in [Complex64::new(0.25, 0.05), Complex64::from_polar(0.15, -0.4)] {
        let loop_integral = contour_integral(|z| r.evaluate_slit(z).unwrap(), centre, 0.05);
        assert!(loop_integral.norm() < 1e-13, "{centre}: {}", loop_integral.norm());
    }
}

#[test]
fn jump_free_target_is_reproduced() {
    let d = sector();
    let grid = boundary_grid(&d, 200, Clustering::Exponential).unwrap();
    for n in [64, 100] {
        let r = build_approximant(&Target::EntireZ2, &d, n, 2.0).unwrap();
        let err = sup_error(|z| r.evaluate(z), |z| z * z, &grid).unwrap();
        assert!(err <= 1e-10, "n={n}: {err}");
    }
}

#[test]
fn parallel_and_sequential_evaluation_agree() {
    let d = sector();
    let r = build_approximant(&Target::Zpow03, &d, 36, 2.0).unwrap();
    let grid = boundary_grid(&d, 150, Clustering::Exponential).unwrap();
    let par = r.evaluate_many(&grid.points).unwrap();
    for (z, v) in grid.points.iter().zip(&par) {
        assert_eq!(r.evaluate(*z).unwrap(), *v);
    }
}

#[test]
fn quadrature_covers_gamma_eps() {
    let rule = slit_quadrature(1e-16, 16).unwrap();
    for n in [16, 64, 196] {
        let eps = LightningScheme::new(n, 2.0).unwrap().epsilon_split();
        assert!(rule.nodes.iter().filter(|t| t.abs() < eps).count() >= 16);
    }
}
