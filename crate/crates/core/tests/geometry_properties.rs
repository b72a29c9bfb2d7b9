use std::f64::consts::{FRAC_PI_4, PI};

use corner_lightning::geometry::{
    anchor_square, anchor_square_default, closest_point, ConvexDomain, ConvexPolygon, SectorDomain,
};
use corner_lightning::ComplexPoint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform-in-arclength samples of the sector boundary, independent of the
/// library's grid code.
fn dense_sector_boundary(rho: f64, theta: f64, count: usize) -> Vec<ComplexPoint> {
    let per_part = count / 3;
    let mut pts = Vec::with_capacity(3 * per_part + 1);
    for k in 0..=per_part {
        let t = k as f64 / per_part as f64;
        pts.push(Complex64::from_polar(rho * t, theta));
        pts.push(Complex64::from_polar(rho * t, -theta));
        pts.push(Complex64::from_polar(rho, -theta + 2.0 * theta * t));
    }
    pts
}

fn brute_min(samples: &[ComplexPoint], z: ComplexPoint) -> (ComplexPoint, f64) {
    samples
        .iter()
        .map(|&p| (p, (p - z).norm()))
        .fold((samples[0], f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
}

#[test]
fn closest_point_examples_against_million_samples() {
    let s = SectorDomain::new(0.5, FRAC_PI_4).unwrap();
    let dense = dense_sector_boundary(0.5, FRAC_PI_4, 1_000_000);
    for (zeta, expected_point, expected_d) in [
        (Complex64::new(-0.3, 0.0), Complex64::new(0.0, 0.0), 0.3),
        (Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), 0.5),
    ] {
        let (bp, bd) = brute_min(&dense, zeta);
        let (p, d) = closest_point(&s, zeta).unwrap();
        assert!((bd - expected_d).abs() < 1e-6 && (bp - expected_point).norm() < 1e-3);
        assert!((p - expected_point).norm() < 1e-15);
        assert!((d - expected_d).abs() < 1e-15);
    }
}

#[test]
fn closest_point_is_a_metric_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = SectorDomain::new(0.5, FRAC_PI_4).unwrap();
    let dense = dense_sector_boundary(0.5, FRAC_PI_4, 3000);
    let mut checked = 0;
    while checked < 10_000 {
        let zeta = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        if s.contains(zeta) {
            continue;
        }
        let (p, d) = closest_point(&s, zeta).unwrap();
        assert!(s.project_to_boundary(p).1 < 1e-15, "returned point {p} not on boundary");
        assert!(((zeta - p).norm() - d).abs() < 1e-15);
        let (_, bd) = brute_min(&dense, zeta);
        assert!(bd >= d - 1e-9, "{zeta}: sampled {bd} < returned {d}");
        checked += 1;
    }
}

#[test]
fn polygon_projection_against_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let hexagon = ConvexPolygon::new(
        (0..6).map(|k| Complex64::from_polar(1.0 + 0.1 * (k % 2) as f64, PI * k as f64 / 3.0)).collect(),
    )
    .unwrap();
    let dense = hexagon.boundary_points(6000, corner_lightning::geometry::Clustering::None);
    for _ in 0..2000 {
        let zeta = Complex64::from_polar(rng.gen_range(1.2..3.0), rng.gen_range(-PI..PI));
        let (_, d) = closest_point(&hexagon, zeta).unwrap();
        assert!(brute_min(&dense, zeta).1 >= d - 1e-9);
    }
}

#[test]
fn anchored_square_half_plane_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = SectorDomain::new(0.5, FRAC_PI_4).unwrap();
    let samples = dense_sector_boundary(0.5, FRAC_PI_4, 1000);
    let triangle = ConvexPolygon::new(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(0.5, 1.5),
    ])
    .unwrap();
    for _ in 0..500 {
        let zeta = Complex64::from_polar(rng.gen_range(0.55..2.0), rng.gen_range(-PI..PI));
        if s.contains(zeta) {
            continue;
        }
        let sq = anchor_square_default(&s, zeta).unwrap();
        for v in &samples {
            assert!(sq.local(*v).re <= 1e-12, "{zeta}: {v}");
            assert!(sq.contains(*v));
        }
        let zeta = Complex64::new(1.0, 0.7) + Complex64::from_polar(rng.gen_range(1.5..3.0), rng.gen_range(-PI..PI));
        let sq = anchor_square_default(&triangle, zeta).unwrap();
        for v in triangle.vertices() {
            assert!(sq.local(*v).re <= 1e-12);
            assert!(sq.contains(*v));
        }
    }
}

#[test]
fn slit_anchors_face_the_sector() {
    // Every slit anchor sees the corner as its nearest point, so Theta = pi.
    let s = SectorDomain::new(0.5, FRAC_PI_4).unwrap();
    for t in [-1.0, -0.5, -1e-3, -1e-16] {
        let sq = anchor_square(&s, Complex64::new(t, 0.0), 3.0).unwrap();
        assert_eq!(sq.rotation(), PI);
    }
}
