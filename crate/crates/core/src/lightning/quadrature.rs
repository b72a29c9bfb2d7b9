use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slit integrals stop at `|zeta| = 1e-16`.
pub const DEFAULT_MIN_SCALE: f64 = 1e-16;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(g: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; g];
    let mut weights = vec![0.0; g];
    for i in 0..g.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (g as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(g, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(g, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[g - 1 - i] = x;
        weights[i] = w;
        weights[g - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_g(x), P_g'(x))` by the three-term recurrence.
fn legendre(g: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if g == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=g {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let g = g as f64;
    (p1, g * (x * p1 - p0) / (x * x - 1.0))
}

/// Composite Gauss–Legendre rule on `[-1, -e^{-(K+1)}]` with panels
/// `[-e^{-k}, -e^{-(k+1)}]` shrinking geometrically toward the corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub panels: Vec<(f64, f64)>,
    pub nodes_per_panel: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    /// Left end of the panel closest to the corner.
    pub fn cutoff(&self) -> f64 {
        self.panels.last().map_or(0.0, |p| p.1)
    }
}

pub fn slit_quadrature(min_scale: f64, nodes_per_panel: usize) -> Result<QuadratureRule> {
    if !(min_scale > 0.0 && min_scale < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "min scale must lie in (0, 1), got {min_scale}"
        )));
    }
    if nodes_per_panel < 4 {
        return Err(Error::InvalidParameter(format!(
            "need at least 4 nodes per panel, got {nodes_per_panel}"
        )));
    }
    let panel_count = (-min_scale.ln()).ceil() as usize;
    let (x, w) = gauss_legendre(nodes_per_panel);
    let mut panels = Vec::with_capacity(panel_count);
    let mut nodes = Vec::with_capacity(panel_count * nodes_per_panel);
    let mut weights = Vec::with_capacity(panel_count * nodes_per_panel);
    for k in 0..panel_count {
        let (a, b) = (-(-(k as f64)).exp(), -(-(k as f64 + 1.0)).exp());
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        panels.push((a, b));
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    Ok(QuadratureRule { panels, nodes_per_panel, nodes, weights })
}
