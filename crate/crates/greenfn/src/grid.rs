//! Rectangular (t, s) evaluation grids.
//!
//! Source points s must stay strictly inside the interval (the kernel is
//! defined for interior sources only), while t may touch the endpoints.

/// A rectangular set of evaluation points: every t paired with every s.
#[derive(Debug, Clone)]
pub struct TsGrid {
    pub t: Vec<f64>,
    pub s: Vec<f64>,
}

impl TsGrid {
    /// t covers [a, b] including endpoints; s is strictly interior.
    pub fn uniform(interval: (f64, f64), nt: usize, ns: usize) -> Self {
        let (a, b) = interval;
        let t = (0..nt)
            .map(|i| a + (b - a) * i as f64 / (nt.max(2) - 1) as f64)
            .collect();
        let s = (1..=ns)
            .map(|j| a + (b - a) * j as f64 / (ns + 1) as f64)
            .collect();
        TsGrid { t, s }
    }

    /// Both axes strictly interior.
    pub fn interior(interval: (f64, f64), nt: usize, ns: usize) -> Self {
        let (a, b) = interval;
        let t = (1..=nt)
            .map(|i| a + (b - a) * i as f64 / (nt + 1) as f64)
            .collect();
        let s = (1..=ns)
            .map(|j| a + (b - a) * j as f64 / (ns + 1) as f64)
            .collect();
        TsGrid { t, s }
    }

    /// Interior grid with the s-lattice offset so that no t coincides with
    /// any s: every point is off-diagonal.
    pub fn staggered(interval: (f64, f64), nt: usize, ns: usize) -> Self {
        let (a, b) = interval;
        let t: Vec<f64> = (1..=nt)
            .map(|i| a + (b - a) * i as f64 / (nt + 1) as f64)
            .collect();
        let hs = (b - a) / ns as f64;
        let s: Vec<f64> = (1..=ns)
            .map(|j| {
                let mut v = a + (j as f64 - 0.5) * hs;
                if t.iter().any(|&ti| ti == v) {
                    v += 1e-3 * hs;
                }
                v
            })
            .collect();
        TsGrid { t, s }
    }

    pub fn len(&self) -> usize {
        self.t.len() * self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty() || self.s.is_empty()
    }

    /// All (t, s) pairs, t varying fastest.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.s
            .iter()
            .flat_map(move |&s| self.t.iter().map(move |&t| (t, s)))
    }
}
