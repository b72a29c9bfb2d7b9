//! Compact convex domains, metric projection onto their boundaries, anchored
//! squares and deterministic evaluation grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{ComplexPoint, Error, Result};

/// Smallest modulus reached by exponentially clustered boundary grids.
pub const CLUSTER_FLOOR: f64 = 1e-15;

/// Boundary/interior classification tolerance, relative to the magnitudes of
/// the points involved.
fn boundary_tolerance(a: ComplexPoint, b: ComplexPoint) -> f64 {
    4.0 * f64::EPSILON * a.norm().max(b.norm())
}

/// Operations shared by the compact convex sets approximation happens on.
pub trait ConvexDomain {
    /// Nearest boundary point and its distance, with no interior check.
    fn project_to_boundary(&self, z: ComplexPoint) -> (ComplexPoint, f64);

    /// Closed containment.
    fn contains(&self, z: ComplexPoint) -> bool;

    fn diameter(&self) -> f64;

    /// Radius of the largest disc inside the domain.
    fn inradius(&self) -> f64;

    /// Bounding box `(min, max)` corners.
    fn bounding_box(&self) -> (ComplexPoint, ComplexPoint);

    /// Boundary points in traversal order.
    fn boundary_points(&self, count: usize, clustering: Clustering) -> Vec<ComplexPoint>;
}

/// The sector `rho * A_theta = {|z| <= rho, |arg z| <= theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorDomain {
    rho: f64,
    theta: f64,
}

impl SectorDomain {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sector radius must lie in (0, 1), got {rho}"
            )));
        }
        if !(theta > 0.0 && theta < PI / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "sector half-angle must lie in (0, pi/2), got {theta}"
            )));
        }
        Ok(Self { rho, theta })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Tip of the ray at angle `sign * theta`.
    fn corner(&self, sign: f64) -> ComplexPoint {
        Complex64::from_polar(self.rho, sign * self.theta)
    }
}

impl ConvexDomain for SectorDomain {
    fn project_to_boundary(&self, z: ComplexPoint) -> (ComplexPoint, f64) {
        let mut candidates = Vec::with_capacity(3);
        for sign in [-1.0, 1.0] {
            candidates.push(project_to_segment(z, Complex64::new(0.0, 0.0), self.corner(sign)));
        }
        if z.norm() > 0.0 && z.arg().abs() <= self.theta {
            candidates.push(z * (self.rho / z.norm()));
        }
        nearest_with_tiebreak(z, &candidates)
    }

    fn contains(&self, z: ComplexPoint) -> bool {
        z.norm() <= self.rho && (z.norm() == 0.0 || z.arg().abs() <= self.theta)
    }

    fn diameter(&self) -> f64 {
        self.rho.max(2.0 * self.rho * self.theta.sin())
    }

    fn inradius(&self) -> f64 {
        let s = self.theta.sin();
        self.rho * s / (1.0 + s)
    }

    fn bounding_box(&self) -> (ComplexPoint, ComplexPoint) {
        let half_height = self.rho * self.theta.sin();
        (
            Complex64::new(0.0, -half_height),
            Complex64::new(self.rho, half_height),
        )
    }

    fn boundary_points(&self, count: usize, clustering: Clustering) -> Vec<ComplexPoint> {
        let (rho, theta) = (self.rho, self.theta);
        match clustering {
            Clustering::None => {
                // Arclength parametrization: lower ray outwards, arc, upper ray inwards.
                let arc = 2.0 * rho * theta;
                let perimeter = 2.0 * rho + arc;
                (0..count)
                    .map(|k| {
                        let s = k as f64 * perimeter / count as f64;
                        if s < rho {
                            Complex64::from_polar(s, -theta)
                        } else if s < rho + arc {
                            Complex64::from_polar(rho, -theta + (s - rho) / rho)
                        } else {
                            Complex64::from_polar(perimeter - s, theta)
                        }
                    })
                    .collect()
            }
            Clustering::Exponential => {
                let remaining = count - 1;
                let per_ray = remaining / 3;
                let on_arc = remaining - 2 * per_ray;
                let radii = geometric_radii(CLUSTER_FLOOR, rho, per_ray);
                let mut points = Vec::with_capacity(count);
                points.push(Complex64::new(0.0, 0.0));
                points.extend(radii.iter().map(|&r| Complex64::from_polar(r, -theta)));
                // Arc interior points; ray tips are already on the rays.
                points.extend((1..=on_arc).map(|k| {
                    let angle = -theta + 2.0 * theta * k as f64 / (on_arc + 1) as f64;
                    Complex64::from_polar(rho, angle)
                }));
                points.extend(radii.iter().rev().map(|&r| Complex64::from_polar(r, theta)));
                points
            }
        }
    }
}

/// Radii spaced geometrically from `floor` up to `top` (inclusive).
fn geometric_radii(floor: f64, top: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![floor],
        _ => {
            let ratio = (top / floor).ln();
            (0..count)
                .map(|j| floor * (ratio * j as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// A strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<ComplexPoint>,
}

fn cross(a: ComplexPoint, b: ComplexPoint) -> f64 {
    a.re * b.im - a.im * b.re
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<ComplexPoint>) -> Result<Self> {
        let k = vertices.len();
        if k < 3 {
            return Err(Error::InvalidParameter(format!(
                "polygon needs at least 3 vertices, got {k}"
            )));
        }
        if vertices.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("polygon vertex is not finite".into()));
        }
        let mut turning = 0.0;
        for i in 0..k {
            let a = vertices[i];
            let b = vertices[(i + 1) % k];
            let c = vertices[(i + 2) % k];
            let (e1, e2) = (b - a, c - b);
            if cross(e1, e2) <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "polygon is not strictly convex counterclockwise at vertex {}",
                    (i + 1) % k
                )));
            }
            turning += (e2 / e1).arg();
        }
        // A star polygon turns left everywhere but winds more than once.
        if (turning - 2.0 * PI).abs() > 1e-9 {
            return Err(Error::InvalidParameter("polygon winds more than once".into()));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[ComplexPoint] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = (ComplexPoint, ComplexPoint)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| (self.vertices[i], self.vertices[(i + 1) % k]))
    }
}

impl ConvexDomain for ConvexPolygon {
    fn project_to_boundary(&self, z: ComplexPoint) -> (ComplexPoint, f64) {
        let candidates: Vec<_> = self.edges().map(|(a, b)| project_to_segment(z, a, b)).collect();
        nearest_with_tiebreak(z, &candidates)
    }

    fn contains(&self, z: ComplexPoint) -> bool {
        self.edges().all(|(a, b)| {
            let edge = b - a;
            cross(edge, z - a) >= -4.0 * f64::EPSILON * edge.norm() * (z - a).norm()
        })
    }

    fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    fn inradius(&self) -> f64 {
        // Chebyshev centre: the optimum of max r s.t. n_i.x + r <= b_i sits
        // where three constraints are active.
        let lines: Vec<(f64, f64, f64)> = self
            .edges()
            .map(|(a, b)| {
                let e = b - a;
                let len = e.norm();
                // Inward unit normal is i*e/|e|; constraint written outward.
                let (nx, ny) = (e.im / len, -e.re / len);
                (nx, ny, nx * a.re + ny * a.im)
            })
            .collect();
        let k = lines.len();
        let mut best: f64 = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    let m = nalgebra::Matrix3::new(
                        lines[i].0, lines[i].1, 1.0, lines[j].0, lines[j].1, 1.0, lines[l].0,
                        lines[l].1, 1.0,
                    );
                    let rhs = nalgebra::Vector3::new(lines[i].2, lines[j].2, lines[l].2);
                    let Some(sol) = m.lu().solve(&rhs) else { continue };
                    let feasible = lines
                        .iter()
                        .all(|&(nx, ny, b)| nx * sol[0] + ny * sol[1] + sol[2] <= b + 1e-12);
                    if feasible {
                        best = best.max(sol[2]);
                    }
                }
            }
        }
        best
    }

    fn bounding_box(&self) -> (ComplexPoint, ComplexPoint) {
        let fold = |f: fn(f64, f64) -> f64, init: f64, part: fn(&ComplexPoint) -> f64| {
            self.vertices.iter().map(part).fold(init, f)
        };
        (
            Complex64::new(
                fold(f64::min, f64::INFINITY, |v| v.re),
                fold(f64::min, f64::INFINITY, |v| v.im),
            ),
            Complex64::new(
                fold(f64::max, f64::NEG_INFINITY, |v| v.re),
                fold(f64::max, f64::NEG_INFINITY, |v| v.im),
            ),
        )
    }

    fn boundary_points(&self, count: usize, clustering: Clustering) -> Vec<ComplexPoint> {
        match clustering {
            Clustering::None => {
                let lengths: Vec<f64> = self.edges().map(|(a, b)| (b - a).norm()).collect();
                let perimeter: f64 = lengths.iter().sum();
                let edges: Vec<_> = self.edges().collect();
                (0..count)
                    .map(|k| {
                        let mut s = k as f64 * perimeter / count as f64;
                        for ((a, b), len) in edges.iter().zip(&lengths) {
                            if s < *len {
                                return a + (b - a) * (s / len);
                            }
                            s -= len;
                        }
                        edges[0].0
                    })
                    .collect()
            }
            Clustering::Exponential => {
                // Every vertex is a corner: grade each edge toward both ends.
                let k = self.vertices.len();
                let per_edge = (count / k).max(1);
                let mut points = Vec::with_capacity(per_edge * k);
                for (e, (a, b)) in self.edges().enumerate() {
                    let quota = if e == k - 1 { count.saturating_sub(points.len()) } else { per_edge };
                    if quota == 0 {
                        break;
                    }
                    let floor = 2.0 * CLUSTER_FLOOR / (b - a).norm();
                    points.push(a);
                    let interior = quota - 1;
                    points.extend((0..interior).map(|j| {
                        let u = (j + 1) as f64 / (interior + 1) as f64;
                        let t = if u <= 0.5 {
                            0.5 * floor.powf(1.0 - 2.0 * u)
                        } else {
                            1.0 - 0.5 * floor.powf(2.0 * u - 1.0)
                        };
                        a + (b - a) * t
                    }));
                }
                points.truncate(count);
                points
            }
        }
    }
}

/// Either supported domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Sector(SectorDomain),
    Polygon(ConvexPolygon),
}

impl From<SectorDomain> for Domain {
    fn from(s: SectorDomain) -> Self {
        Domain::Sector(s)
    }
}

impl From<ConvexPolygon> for Domain {
    fn from(p: ConvexPolygon) -> Self {
        Domain::Polygon(p)
    }
}

macro_rules! dispatch {
    ($self:ident, $d:ident => $e:expr) => {
        match $self {
            Domain::Sector($d) => $e,
            Domain::Polygon($d) => $e,
        }
    };
}

impl ConvexDomain for Domain {
    fn project_to_boundary(&self, z: ComplexPoint) -> (ComplexPoint, f64) {
        dispatch!(self, d => d.project_to_boundary(z))
    }
    fn contains(&self, z: ComplexPoint) -> bool {
        dispatch!(self, d => d.contains(z))
    }
    fn diameter(&self) -> f64 {
        dispatch!(self, d => d.diameter())
    }
    fn inradius(&self) -> f64 {
        dispatch!(self, d => d.inradius())
    }
    fn bounding_box(&self) -> (ComplexPoint, ComplexPoint) {
        dispatch!(self, d => d.bounding_box())
    }
    fn boundary_points(&self, count: usize, clustering: Clustering) -> Vec<ComplexPoint> {
        dispatch!(self, d => d.boundary_points(count, clustering))
    }
}

fn project_to_segment(z: ComplexPoint, a: ComplexPoint, b: ComplexPoint) -> ComplexPoint {
    let e = b - a;
    let len2 = e.norm_sqr();
    let t = ((z - a) * e.conj()).re / len2;
    a + e * t.clamp(0.0, 1.0)
}

/// Nearest candidate; near-ties go to the smallest argument.
fn nearest_with_tiebreak(z: ComplexPoint, candidates: &[ComplexPoint]) -> (ComplexPoint, f64) {
    let mut best = candidates[0];
    let mut best_d = (z - best).norm();
    for &c in &candidates[1..] {
        let d = (z - c).norm();
        let tie = (d - best_d).abs() <= 1e-14 * best_d.max(1e-300);
        if (!tie && d < best_d) || (tie && c.arg() < best.arg()) {
            best = c;
            best_d = d;
        }
    }
    (best, best_d)
}

/// Nearest boundary point to an exterior or boundary anchor.
///
/// Boundary inputs return themselves at distance zero; strictly interior
/// inputs are rejected.
pub fn closest_point<D: ConvexDomain + ?Sized>(
    domain: &D,
    zeta: ComplexPoint,
) -> Result<(ComplexPoint, f64)> {
    let (p, d) = domain.project_to_boundary(zeta);
    if d <= boundary_tolerance(zeta, p) {
        return Ok((zeta, 0.0));
    }
    if domain.contains(zeta) {
        return Err(Error::InteriorAnchor(zeta));
    }
    Ok((p, d))
}

/// The square `S_zeta` with `zeta` at the midpoint of one side, rotated so
/// that the domain lies on the square's side of the line through `zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchoredSquare {
    anchor: ComplexPoint,
    rotation: f64,
    half_side: f64,
}

impl AnchoredSquare {
    pub fn new(anchor: ComplexPoint, rotation: f64, half_side: f64) -> Result<Self> {
        if !(half_side > 0.0 && half_side.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half side must be positive, got {half_side}"
            )));
        }
        Ok(Self { anchor, rotation, half_side })
    }

    pub fn anchor(&self) -> ComplexPoint {
        self.anchor
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn half_side(&self) -> f64 {
        self.half_side
    }

    /// Rotated coordinate `w = e^{-i rotation} (z - anchor)`; the square is
    /// `{-2 half_side <= Re w <= 0, |Im w| <= half_side}`.
    pub fn local(&self, z: ComplexPoint) -> ComplexPoint {
        Complex64::from_polar(1.0, -self.rotation) * (z - self.anchor)
    }

    pub fn contains(&self, z: ComplexPoint) -> bool {
        let w = self.local(z);
        let tol = 1e-12 * self.half_side;
        w.re <= tol && w.re >= -2.0 * self.half_side - tol && w.im.abs() <= self.half_side + tol
    }

    pub fn corners(&self) -> [ComplexPoint; 4] {
        let l = self.half_side;
        let turn = Complex64::from_polar(1.0, self.rotation);
        [
            Complex64::new(0.0, -l),
            Complex64::new(0.0, l),
            Complex64::new(-2.0 * l, l),
            Complex64::new(-2.0 * l, -l),
        ]
        .map(|w| self.anchor + turn * w)
    }
}

/// Builds `S_zeta` with an explicit half side.
pub fn anchor_square<D: ConvexDomain + ?Sized>(
    domain: &D,
    zeta: ComplexPoint,
    half_side: f64,
) -> Result<AnchoredSquare> {
    let (nearest, distance) = closest_point(domain, zeta)?;
    if distance == 0.0 {
        return Err(Error::DegenerateAnchor(zeta));
    }
    AnchoredSquare::new(zeta, (zeta - nearest).arg(), half_side)
}

/// Builds `S_zeta` with half side `diam(K_eps)`, `eps` the anchor's distance.
pub fn anchor_square_default<D: ConvexDomain + ?Sized>(
    domain: &D,
    zeta: ComplexPoint,
) -> Result<AnchoredSquare> {
    let (_, distance) = closest_point(domain, zeta)?;
    anchor_square(domain, zeta, domain.diameter() + 2.0 * distance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridLabel {
    Boundary,
    Interior,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clustering {
    None,
    /// Geometric refinement toward the corners, down to [`CLUSTER_FLOOR`].
    #[serde(rename = "exponential-toward-origin")]
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationGrid {
    pub points: Vec<ComplexPoint>,
    pub label: GridLabel,
    pub clustering: Clustering,
}

impl EvaluationGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Annular sector `{r_min <= |z| <= r_max, |arg z| <= half_angle}` on a
    /// `radial x angular` tensor lattice; it must sit in the open interior
    /// of `domain`.
    pub fn annular_sector<D: ConvexDomain + ?Sized>(
        domain: &D,
        r_min: f64,
        r_max: f64,
        half_angle: f64,
        radial: usize,
        angular: usize,
    ) -> Result<Self> {
        if !(0.0 < r_min && r_min <= r_max && half_angle >= 0.0) || radial < 1 || angular < 1 {
            return Err(Error::InvalidParameter(format!(
                "bad annular sector [{r_min}, {r_max}] x {half_angle} ({radial}x{angular})"
            )));
        }
        let spread = |i: usize, n: usize| if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
        let mut points = Vec::with_capacity(radial * angular);
        for i in 0..radial {
            let r = r_min + (r_max - r_min) * spread(i, radial);
            for j in 0..angular {
                let a = -half_angle + 2.0 * half_angle * spread(j, angular);
                let z = Complex64::from_polar(r, a);
                let (_, d) = domain.project_to_boundary(z);
                if !domain.contains(z) || d <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "annular sector point {z} is not interior to the domain"
                    )));
                }
                points.push(z);
            }
        }
        Ok(Self { points, label: GridLabel::Interior, clustering: Clustering::None })
    }

    /// `density x density` lattice on the rectangle `[x0, x1] x [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, density: usize) -> Self {
        let step = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (density - 1) as f64;
        let points = (0..density)
            .flat_map(|i| (0..density).map(move |j| Complex64::new(step(x0, x1, i), step(y0, y1, j))))
            .collect();
        Self { points, label: GridLabel::Square, clustering: Clustering::None }
    }
}

/// `count` boundary points in a fixed traversal order.
pub fn boundary_grid<D: ConvexDomain + ?Sized>(
    domain: &D,
    count: usize,
    clustering: Clustering,
) -> Result<EvaluationGrid> {
    if count < 2 {
        return Err(Error::InvalidParameter(format!(
            "boundary grid needs at least 2 points, got {count}"
        )));
    }
    Ok(EvaluationGrid {
        points: domain.boundary_points(count, clustering),
        label: GridLabel::Boundary,
        clustering,
    })
}

/// `count` points of the compact `{z in K: d(z, boundary) >= margin}`.
pub fn interior_compact_grid<D: ConvexDomain + ?Sized>(
    domain: &D,
    margin: f64,
    count: usize,
) -> Result<EvaluationGrid> {
    let inradius = domain.inradius();
    if margin.is_nan() || margin <= 0.0 || margin >= inradius {
        return Err(Error::EmptyCompact { margin, inradius });
    }
    if count == 0 {
        return Err(Error::InvalidParameter("interior grid needs at least 1 point".into()));
    }
    let (lo, hi) = domain.bounding_box();
    let mut side = ((count as f64).sqrt().ceil() as usize).max(2) * 2;
    while side <= 1 << 13 {
        let candidates: Vec<ComplexPoint> = (0..side)
            .flat_map(|i| {
                (0..side).map(move |j| {
                    let t = (i as f64 + 0.5) / side as f64;
                    let s = (j as f64 + 0.5) / side as f64;
                    Complex64::new(lo.re + (hi.re - lo.re) * t, lo.im + (hi.im - lo.im) * s)
                })
            })
            .filter(|&z| domain.contains(z) && domain.project_to_boundary(z).1 >= margin)
            .collect();
        if candidates.len() >= count {
            let points = (0..count).map(|k| candidates[k * candidates.len() / count]).collect();
            return Ok(EvaluationGrid { points, label: GridLabel::Interior, clustering: Clustering::None });
        }
        side *= 2;
    }
    Err(Error::EmptyCompact { margin, inradius })
}
