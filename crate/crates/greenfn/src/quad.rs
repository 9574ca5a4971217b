//! Composite Gauss-Legendre quadrature over piecewise-smooth integrands.
//!
//! Kernel products are smooth except for kinks (or jumps in the highest
//! derivatives) where an evaluation point crosses the diagonal. The rule
//! therefore takes explicit split points; every segment between consecutive
//! splits is handled with Gauss panels whose nodes stay strictly inside, so
//! no evaluation ever lands on a kink.

use crate::error::{Error, Result};

/// Composite Gauss-Legendre rule: `panels` panels per smooth segment,
/// `nodes` Gauss points per panel.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    panels: usize,
    nodes: usize,
    /// Nodes and weights on the reference interval [-1, 1].
    base_nodes: Vec<f64>,
    base_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(panels: usize, nodes: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::Config("quadrature needs at least one panel".into()));
        }
        if nodes == 0 || nodes > 64 {
            return Err(Error::Config(format!(
                "Gauss node count must lie in 1..=64, got {nodes}"
            )));
        }
        let (base_nodes, base_weights) = gauss_legendre(nodes);
        Ok(QuadratureRule {
            panels,
            nodes,
            base_nodes,
            base_weights,
        })
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Rule with twice the panel count (used by convergence checks).
    pub fn refined(&self) -> Self {
        QuadratureRule {
            panels: self.panels * 2,
            nodes: self.nodes,
            base_nodes: self.base_nodes.clone(),
            base_weights: self.base_weights.clone(),
        }
    }

    /// Integrate f over [a, b], splitting the domain at the given interior
    /// points. Splits outside (a, b) are ignored; duplicates are merged.
    pub fn integrate<F>(&self, a: f64, b: f64, splits: &[f64], mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if !(a < b) {
            return Err(Error::Config(format!(
                "integration interval [{a}, {b}] is empty"
            )));
        }
        let span = b - a;
        let merge_tol = 1e-14 * span.max(1.0);
        let mut pts: Vec<f64> = Vec::with_capacity(splits.len() + 2);
        pts.push(a);
        for &s in splits {
            if s > a + merge_tol && s < b - merge_tol {
                pts.push(s);
            }
        }
        pts.push(b);
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup_by(|x, y| (*x - *y).abs() <= merge_tol);

        let mut total = 0.0;
        for seg in pts.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let width = (hi - lo) / self.panels as f64;
            for p in 0..self.panels {
                let pa = lo + p as f64 * width;
                let half = 0.5 * width;
                let mid = pa + half;
                for (x, w) in self.base_nodes.iter().zip(&self.base_weights) {
                    total += half * w * f(mid + half * x)?;
                }
            }
        }
        Ok(total)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Chebyshev-like initial guess, refined by Newton
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[i] = -x;
        weights[i] = w;
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for j in 1..m {
        let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
