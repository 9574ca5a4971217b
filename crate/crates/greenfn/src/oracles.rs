//! Closed-form reference kernels on [0, 1], used as ground truth by the
//! test and acceptance suites.
//!
//! Three problems admit elementary kernels:
//!
//! * `mixed-k0`:     u'' + M u  = sigma,  u(0) = u'(1) = 0,
//! * `mixed-k1`:     u'' + M u' = sigma,  u(0) = u'(1) = 0,
//! * `dirichlet-k0`: u'' + M u  = sigma,  u(0) = u(1)  = 0.
//!
//! Each evaluator codes g, its first and its second t-derivative as
//! separate expressions, so equation residuals assembled from them provide
//! a genuine transcription check rather than an algebraic identity.

use crate::bvp::{boundary, BvpSpec};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::green::Side;

/// Which closed-form problem a kernel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemTag {
    MixedK0,
    MixedK1,
    DirichletK0,
}

impl ProblemTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemTag::MixedK0 => "mixed-k0",
            ProblemTag::MixedK1 => "mixed-k1",
            ProblemTag::DirichletK0 => "dirichlet-k0",
        }
    }
}

/// A closed-form kernel with its parameter and validity notes.
#[derive(Debug, Clone)]
pub struct ClosedFormKernel {
    tag: ProblemTag,
    param: f64,
}

impl ClosedFormKernel {
    /// Fails when the parameter is an eigenvalue of the problem, where no
    /// kernel exists.
    pub fn new(tag: ProblemTag, param: f64) -> Result<Self> {
        match tag {
            ProblemTag::MixedK0 => {
                mixed_k0_kernel(param, 0.25, 0.5, 0)?;
            }
            ProblemTag::DirichletK0 => {
                dirichlet_k0_kernel(param, 0.25, 0.5, 0)?;
            }
            ProblemTag::MixedK1 => {}
        }
        Ok(ClosedFormKernel { tag, param })
    }

    pub fn tag(&self) -> ProblemTag {
        self.tag
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// Parameter values excluded for this family.
    pub fn validity_notes(&self) -> &'static str {
        match self.tag {
            ProblemTag::MixedK0 => "undefined at M = (pi/2 + k pi)^2",
            ProblemTag::MixedK1 => "defined for every real M",
            ProblemTag::DirichletK0 => "undefined at M = (k pi)^2, k >= 1",
        }
    }

    /// l-th t-derivative at (t, s), l in 0..=2. At t = s the region
    /// s <= t wins, matching the displayed piecewise forms.
    pub fn eval(&self, t: f64, s: f64, l: usize) -> Result<f64> {
        let side = if t < s { Side::Below } else { Side::Above };
        self.eval_sided(t, s, l, side)
    }

    /// Branch-explicit evaluation, usable on the diagonal for the
    /// discontinuous orders.
    pub fn eval_sided(&self, t: f64, s: f64, l: usize, side: Side) -> Result<f64> {
        let above = side == Side::Above;
        match self.tag {
            ProblemTag::MixedK0 => mixed_k0_branch(self.param, t, s, l, above),
            ProblemTag::MixedK1 => Ok(mixed_k1_branch(self.param, t, s, l, above)),
            ProblemTag::DirichletK0 => dirichlet_k0_branch(self.param, t, s, l, above),
        }
    }

    /// The matching problem description.
    pub fn spec(&self) -> BvpSpec {
        match self.tag {
            ProblemTag::MixedK0 => mixed_k0_spec(self.param),
            ProblemTag::MixedK1 => mixed_k1_spec(self.param),
            ProblemTag::DirichletK0 => dirichlet_k0_spec(self.param),
        }
    }
}

/// Problem description for u'' + M u, u(0) = u'(1) = 0.
pub fn mixed_k0_spec(param: f64) -> BvpSpec {
    let (alpha, beta) = boundary::mixed();
    BvpSpec::new(
        2,
        (0.0, 1.0),
        vec![Coefficient::zero(), Coefficient::zero()],
        0,
        param,
        alpha,
        beta,
    )
    .expect("mixed spec is valid")
}

/// Problem description for u'' + M u', u(0) = u'(1) = 0.
pub fn mixed_k1_spec(param: f64) -> BvpSpec {
    let (alpha, beta) = boundary::mixed();
    BvpSpec::new(
        2,
        (0.0, 1.0),
        vec![Coefficient::zero(), Coefficient::zero()],
        1,
        param,
        alpha,
        beta,
    )
    .expect("mixed spec is valid")
}

/// Problem description for u'' + M u, u(0) = u(1) = 0.
pub fn dirichlet_k0_spec(param: f64) -> BvpSpec {
    let (alpha, beta) = boundary::dirichlet();
    BvpSpec::new(
        2,
        (0.0, 1.0),
        vec![Coefficient::zero(), Coefficient::zero()],
        0,
        param,
        alpha,
        beta,
    )
    .expect("dirichlet spec is valid")
}

/// Kernel of u'' + M u' with u(0) = u'(1) = 0, for any real M:
///
/// ```text
/// g(t,s) = (1 - e^{Ms})/M              for 0 <= s <= t <= 1,
///          e^{Ms}(e^{-Mt} - 1)/M       for 0 <  t <  s <= 1,
/// ```
///
/// with the M = 0 limit g = -min(t, s). `l` in {0, 1, 2} selects the
/// t-derivative order; the region s <= t wins on the diagonal.
pub fn mixed_k1_kernel(m: f64, t: f64, s: f64, l: usize) -> f64 {
    mixed_k1_branch(m, t, s, l, s <= t)
}

fn mixed_k1_branch(m: f64, t: f64, s: f64, l: usize, above: bool) -> f64 {
    debug_assert!(l <= 2, "only orders 0..=2 are coded");
    if above {
        match l {
            // exp_m1 keeps the removable M -> 0 singularity exact
            0 => {
                if m == 0.0 {
                    -s
                } else {
                    -(m * s).exp_m1() / m
                }
            }
            _ => 0.0,
        }
    } else {
        match l {
            0 => {
                if m == 0.0 {
                    -t
                } else {
                    (m * s).exp() * (-m * t).exp_m1() / m
                }
            }
            1 => -(m * (s - t)).exp(),
            _ => m * (m * (s - t)).exp(),
        }
    }
}

/// Fundamental pair for u'' + M u = 0 normalized for the mixed conditions:
/// u1(0) = 0 and u2'(1) = 0, with the constant Wronskian u1 u2' - u1' u2.
/// Returns derivative stacks (value, first, second) of both and the
/// Wronskian. Written with one-signed hyperbolic expressions for M < 0, so
/// no large-argument cancellation occurs.
fn mixed_k0_pair(m: f64, t: f64) -> ([f64; 3], [f64; 3], f64) {
    if m > 0.0 {
        let w = m.sqrt();
        let u1 = [(w * t).sin(), w * (w * t).cos(), -m * (w * t).sin()];
        let u2 = [
            (w * (1.0 - t)).cos(),
            w * (w * (1.0 - t)).sin(),
            -m * (w * (1.0 - t)).cos(),
        ];
        (u1, u2, -w * w.cos())
    } else if m < 0.0 {
        let w = (-m).sqrt();
        let u1 = [(w * t).sinh(), w * (w * t).cosh(), -m * (w * t).sinh()];
        let u2 = [
            (w * (1.0 - t)).cosh(),
            -w * (w * (1.0 - t)).sinh(),
            -m * (w * (1.0 - t)).cosh(),
        ];
        (u1, u2, -w * w.cosh())
    } else {
        ([t, 1.0, 0.0], [1.0, 0.0, 0.0], -1.0)
    }
}

/// Kernel of u'' + M u with u(0) = u'(1) = 0, built by variation of
/// parameters and normalized so the first-derivative jump is +1. Errors when
/// M is an eigenvalue (pi/2 + k pi)^2.
pub fn mixed_k0_kernel(m: f64, t: f64, s: f64, l: usize) -> Result<f64> {
    mixed_k0_branch(m, t, s, l, s <= t)
}

fn mixed_k0_branch(m: f64, t: f64, s: f64, l: usize, above: bool) -> Result<f64> {
    debug_assert!(l <= 2, "only orders 0..=2 are coded");
    let (_, _, w) = mixed_k0_pair(m, 0.0);
    if w.abs() < 1e-12 {
        return Err(Error::OracleUndefined(format!(
            "M = {m} is an eigenvalue of the mixed problem"
        )));
    }
    let value = if above {
        let (u1s, _, _) = mixed_k0_pair(m, s);
        let (_, u2t, _) = mixed_k0_pair(m, t);
        u2t[l] * u1s[0] / w
    } else {
        let (u1t, _, _) = mixed_k0_pair(m, t);
        let (_, u2s, _) = mixed_k0_pair(m, s);
        u1t[l] * u2s[0] / w
    };
    Ok(value)
}

/// Fundamental pair for the Dirichlet problem: u1(0) = 0, u2(1) = 0.
fn dirichlet_pair(m: f64, t: f64) -> ([f64; 3], [f64; 3], f64) {
    if m > 0.0 {
        let w = m.sqrt();
        let u1 = [(w * t).sin(), w * (w * t).cos(), -m * (w * t).sin()];
        let u2 = [
            (w * (1.0 - t)).sin(),
            -w * (w * (1.0 - t)).cos(),
            -m * (w * (1.0 - t)).sin(),
        ];
        (u1, u2, -w * w.sin())
    } else if m < 0.0 {
        let w = (-m).sqrt();
        let u1 = [(w * t).sinh(), w * (w * t).cosh(), -m * (w * t).sinh()];
        let u2 = [
            (w * (1.0 - t)).sinh(),
            -w * (w * (1.0 - t)).cosh(),
            -m * (w * (1.0 - t)).sinh(),
        ];
        (u1, u2, -w * w.sinh())
    } else {
        ([t, 1.0, 0.0], [1.0 - t, -1.0, 0.0], -1.0)
    }
}

/// Kernel of u'' + M u with u(0) = u(1) = 0. Errors at the Dirichlet
/// eigenvalues (k pi)^2.
pub fn dirichlet_k0_kernel(m: f64, t: f64, s: f64, l: usize) -> Result<f64> {
    dirichlet_k0_branch(m, t, s, l, s <= t)
}

fn dirichlet_k0_branch(m: f64, t: f64, s: f64, l: usize, above: bool) -> Result<f64> {
    debug_assert!(l <= 2, "only orders 0..=2 are coded");
    let (_, _, w) = dirichlet_pair(m, 0.0);
    if w.abs() < 1e-12 {
        return Err(Error::OracleUndefined(format!(
            "M = {m} is an eigenvalue of the Dirichlet problem"
        )));
    }
    let value = if above {
        let (u1s, _, _) = dirichlet_pair(m, s);
        let (_, u2t, _) = dirichlet_pair(m, t);
        u2t[l] * u1s[0] / w
    } else {
        let (u1t, _, _) = dirichlet_pair(m, t);
        let (_, u2s, _) = dirichlet_pair(m, s);
        u1t[l] * u2s[0] / w
    };
    Ok(value)
}
