//! Parameter-linking identities between two kernels of the same problem and
//! the pointwise comparison results they imply.
//!
//! For kernels g0, g1 of the same operator at parameters M0, M1 the
//! difference of (derivatives of) the kernels equals (M0 - M1) times an
//! integral of one kernel derivative against the shift-order derivative of
//! the other. Two variants exist depending on which kernel sits at which
//! slot, an order-n version carries an extra pointwise term, and crossing
//! the two variants eliminates the kernel difference entirely. Every
//! function here returns the defect of one such identity: zero in exact
//! arithmetic.

use crate::error::{Error, Result};
use crate::green::GreenFunction;
use crate::grid::TsGrid;
use crate::quad::QuadratureRule;
use crate::report::{GridDescription, ResidualReport, ResidualSample};

/// Which kernel occupies the first slot of the linking integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Integral of d^l g0(t, r) times d^k g1(r, s).
    First,
    /// Integral of d^l g1(t, r) times d^k g0(r, s).
    Second,
}

/// The eight verified identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityTag {
    /// Kernel-level identity, first variant.
    Link0,
    /// Kernel-level identity, second variant.
    Link1,
    /// Derivative identity of order l, first variant.
    DLink1,
    /// Derivative identity of order l, second variant.
    DLink2,
    /// Order-n identity with the extra pointwise term, first variant.
    DLinkN1,
    /// Order-n identity with the extra pointwise term, second variant.
    DLinkN2,
    /// Cross identity equating the two integrals for l <= n-1.
    Cross,
    /// Cross identity at order n with both pointwise terms.
    CrossN,
}

impl IdentityTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityTag::Link0 => "link-0",
            IdentityTag::Link1 => "link-1",
            IdentityTag::DLink1 => "dlink-1",
            IdentityTag::DLink2 => "dlink-2",
            IdentityTag::DLinkN1 => "dlink-n-1",
            IdentityTag::DLinkN2 => "dlink-n-2",
            IdentityTag::Cross => "cross",
            IdentityTag::CrossN => "cross-n",
        }
    }

    pub fn all() -> [IdentityTag; 8] {
        [
            IdentityTag::Link0,
            IdentityTag::Link1,
            IdentityTag::DLink1,
            IdentityTag::DLink2,
            IdentityTag::DLinkN1,
            IdentityTag::DLinkN2,
            IdentityTag::Cross,
            IdentityTag::CrossN,
        ]
    }

    /// Whether this tag takes a derivative level from the caller.
    pub fn takes_level(&self) -> bool {
        matches!(
            self,
            IdentityTag::DLink1 | IdentityTag::DLink2 | IdentityTag::Cross
        )
    }
}

fn check_compatible(g0: &GreenFunction, g1: &GreenFunction) -> Result<()> {
    if !g0.spec().same_family(g1.spec()) {
        return Err(Error::SpecMismatch(
            "order, interval, coefficients, shift order and boundary matrices must agree".into(),
        ));
    }
    Ok(())
}

/// Integral over r of d^la ga(t, r) * d^k gb(r, s), split at r = t and
/// r = s where the factors kink.
fn kernel_product_integral(
    ga: &GreenFunction,
    la: usize,
    gb: &GreenFunction,
    t: f64,
    s: f64,
    quad: &QuadratureRule,
) -> Result<f64> {
    let (a, b) = ga.spec().interval();
    let k = ga.spec().shift();
    quad.integrate(a, b, &[t, s], |r| Ok(ga.eval(t, r, la)? * gb.eval(r, s, k)?))
}

/// Defect of the derivative-level linking identity for l <= n-1:
///
/// ```text
/// d^l g1(t,s) - d^l g0(t,s) - (M0 - M1) Int d^l gA(t,r) d^k gB(r,s) dr
/// ```
///
/// with (A, B) = (0, 1) for the first variant and (1, 0) for the second.
pub fn linking_residual(
    g0: &GreenFunction,
    g1: &GreenFunction,
    l: usize,
    variant: Variant,
    t: f64,
    s: f64,
    quad: &QuadratureRule,
) -> Result<f64> {
    check_compatible(g0, g1)?;
    let n = g0.spec().order();
    if l >= n {
        return Err(Error::UnsupportedOrder { order: l, max: n - 1 });
    }
    if l + 1 == n && t == s {
        return Err(Error::DiagonalSide { t, order: l });
    }
    let dm = g0.spec().param() - g1.spec().param();
    let diff = g1.eval(t, s, l)? - g0.eval(t, s, l)?;
    if dm == 0.0 {
        return Ok(diff);
    }
    let integral = match variant {
        Variant::First => kernel_product_integral(g0, l, g1, t, s, quad)?,
        Variant::Second => kernel_product_integral(g1, l, g0, t, s, quad)?,
    };
    Ok(diff - dm * integral)
}

/// Defect of the order-n linking identity, which adds the pointwise term
/// (M0 - M1) d^k gB(t, s) to the integral form. Defined off the diagonal.
pub fn linking_residual_order_n(
    g0: &GreenFunction,
    g1: &GreenFunction,
    variant: Variant,
    t: f64,
    s: f64,
    quad: &QuadratureRule,
) -> Result<f64> {
    check_compatible(g0, g1)?;
    let n = g0.spec().order();
    let k = g0.spec().shift();
    if t == s {
        return Err(Error::DiagonalSide { t, order: n });
    }
    let dm = g0.spec().param() - g1.spec().param();
    let diff = g1.eval(t, s, n)? - g0.eval(t, s, n)?;
    if dm == 0.0 {
        return Ok(diff);
    }
    let (integral, pointwise) = match variant {
        Variant::First => (
            kernel_product_integral(g0, n, g1, t, s, quad)?,
            g1.eval(t, s, k)?,
        ),
        Variant::Second => (
            kernel_product_integral(g1, n, g0, t, s, quad)?,
            g0.eval(t, s, k)?,
        ),
    };
    Ok(diff - dm * (integral + pointwise))
}

/// Defect of the cross identity: the two linking integrals agree for
/// l <= n-1, and at l = n they agree after adding the respective pointwise
/// shift-derivative terms.
pub fn cross_identity_residual(
    g0: &GreenFunction,
    g1: &GreenFunction,
    l: usize,
    t: f64,
    s: f64,
    quad: &QuadratureRule,
) -> Result<f64> {
    check_compatible(g0, g1)?;
    let n = g0.spec().order();
    let k = g0.spec().shift();
    if l > n {
        return Err(Error::UnsupportedOrder { order: l, max: n });
    }
    if l + 1 >= n && t == s {
        return Err(Error::DiagonalSide { t, order: l });
    }
    let lhs = kernel_product_integral(g0, l, g1, t, s, quad)?;
    let rhs = kernel_product_integral(g1, l, g0, t, s, quad)?;
    if l < n {
        Ok(lhs - rhs)
    } else {
        Ok(lhs + g1.eval(t, s, k)? - rhs - g0.eval(t, s, k)?)
    }
}

/// Evaluate one tagged identity at a point. `l` feeds the tags that carry a
/// free derivative level and is ignored by the rest.
pub fn identity_residual(
    tag: IdentityTag,
    g0: &GreenFunction,
    g1: &GreenFunction,
    l: usize,
    t: f64,
    s: f64,
    quad: &QuadratureRule,
) -> Result<f64> {
    let n = g0.spec().order();
    match tag {
        IdentityTag::Link0 => linking_residual(g0, g1, 0, Variant::First, t, s, quad),
        IdentityTag::Link1 => linking_residual(g0, g1, 0, Variant::Second, t, s, quad),
        IdentityTag::DLink1 => linking_residual(g0, g1, l, Variant::First, t, s, quad),
        IdentityTag::DLink2 => linking_residual(g0, g1, l, Variant::Second, t, s, quad),
        IdentityTag::DLinkN1 => linking_residual_order_n(g0, g1, Variant::First, t, s, quad),
        IdentityTag::DLinkN2 => linking_residual_order_n(g0, g1, Variant::Second, t, s, quad),
        IdentityTag::Cross => cross_identity_residual(g0, g1, l, t, s, quad),
        IdentityTag::CrossN => cross_identity_residual(g0, g1, n, t, s, quad),
    }
}

/// Run every identity over a grid. Tags with a free level are evaluated once
/// per entry of `levels`; the rest once. Returns one report per (tag, level)
/// plus the raw per-point samples.
pub fn verify_identities(
    g0: &GreenFunction,
    g1: &GreenFunction,
    levels: &[usize],
    grid: &TsGrid,
    quad: &QuadratureRule,
) -> Result<(Vec<ResidualReport>, Vec<ResidualSample>)> {
    check_compatible(g0, g1)?;
    if grid.is_empty() {
        return Err(Error::Config("verification grid is empty".into()));
    }
    let mut reports = Vec::new();
    let mut samples = Vec::new();
    let desc = GridDescription {
        t_points: grid.t.len(),
        s_points: grid.s.len(),
        interval: g0.spec().interval(),
    };
    for tag in IdentityTag::all() {
        let tag_levels: Vec<Option<usize>> = if tag.takes_level() {
            levels.iter().map(|&l| Some(l)).collect()
        } else {
            vec![None]
        };
        for level in tag_levels {
            let mut max_abs = 0.0f64;
            let mut sum_abs = 0.0f64;
            let mut count = 0usize;
            let mut max_at = (f64::NAN, f64::NAN);
            for (t, s) in grid.points() {
                if t == s {
                    continue;
                }
                let r = identity_residual(tag, g0, g1, level.unwrap_or(0), t, s, quad)?;
                samples.push(ResidualSample {
                    identity: tag.as_str().to_string(),
                    level,
                    t,
                    s,
                    residual: r,
                });
                let ra = r.abs();
                sum_abs += ra;
                count += 1;
                if ra > max_abs {
                    max_abs = ra;
                    max_at = (t, s);
                }
            }
            reports.push(ResidualReport {
                identity: tag.as_str().to_string(),
                level,
                grid: desc.clone(),
                max_abs,
                mean_abs: sum_abs / count.max(1) as f64,
                max_location: max_at,
            });
        }
    }
    Ok((reports, samples))
}

/// One-sided sign classification used by the hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSign {
    Nonnegative,
    Nonpositive,
    /// Within tolerance of zero everywhere: compatible with both signs.
    Zero,
    Mixed,
}

fn grid_sign(min: f64, max: f64, tol: f64) -> GridSign {
    let nonneg = min >= -tol;
    let nonpos = max <= tol;
    match (nonneg, nonpos) {
        (true, true) => GridSign::Zero,
        (true, false) => GridSign::Nonnegative,
        (false, true) => GridSign::Nonpositive,
        (false, false) => GridSign::Mixed,
    }
}

/// Which sign hypothesis the kernel pair satisfied on the sampled grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisStatus {
    /// Constant sign, same for both kernels: the comparison theorem with
    /// a nonincreasing conclusion applies.
    SameSign,
    /// Constant sign, opposite between the kernels: the reversed variant
    /// with a nondecreasing conclusion applies.
    OppositeSign,
    /// Neither sign pattern holds on the grid.
    Violated,
}

/// Pointwise verdict of the comparison trichotomy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// Both derivative values vanish and the point lies left of the source
    /// (t < s).
    BothVanishLeft,
    /// Both vanish with t > s.
    BothVanishRight,
    /// Strict inequality in the direction the hypothesis dictates; the gap
    /// is |v1 - v0|.
    Strict { gap: f64 },
    /// Gap below the certification margin.
    Indeterminate { gap: f64 },
    /// Strict inequality in the wrong direction: a theorem violation.
    Contradicts { gap: f64 },
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub hypothesis: HypothesisStatus,
    /// Which hypothesis pairing matched: true when (d^l g0, d^k g1) carried
    /// the signs, false for (d^l g1, d^k g0).
    pub pairing_first: bool,
    /// Interior off-diagonal verdicts as (t, s, verdict).
    pub verdicts: Vec<(f64, f64, Verdict)>,
}

/// Comparison options; the strictness margin should dominate the combined
/// quadrature and solve tolerances, since strictness below that scale is
/// not certifiable.
#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub vanish_tol: f64,
    pub sign_tol: f64,
    pub strict_margin: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            vanish_tol: 1e-10,
            sign_tol: 1e-9,
            strict_margin: 1e-8,
        }
    }
}

/// Classify every interior off-diagonal grid point into the comparison
/// trichotomy for the l-th derivative, after checking the constant-sign
/// hypotheses on the same grid. Requires M0 < M1.
pub fn compare_kernels(
    g0: &GreenFunction,
    g1: &GreenFunction,
    l: usize,
    grid: &TsGrid,
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    check_compatible(g0, g1)?;
    if !(g0.spec().param() < g1.spec().param()) {
        return Err(Error::InvalidSpec(format!(
            "comparison requires M0 < M1, got {} and {}",
            g0.spec().param(),
            g1.spec().param()
        )));
    }
    let n = g0.spec().order();
    let k = g0.spec().shift();
    let (a, b) = g0.spec().interval();

    // sample the four sign fields over the grid, skipping points where a
    // discontinuous order sits exactly on the diagonal
    let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); 4];
    let fields: [(&GreenFunction, usize); 4] = [(g0, l), (g1, k), (g1, l), (g0, k)];
    for (t, s) in grid.points() {
        for (idx, &(g, order)) in fields.iter().enumerate() {
            if t == s && order + 2 > n {
                continue;
            }
            let v = g.eval(t, s, order)?;
            ranges[idx].0 = ranges[idx].0.min(v);
            ranges[idx].1 = ranges[idx].1.max(v);
        }
    }
    let signs: Vec<GridSign> = ranges
        .iter()
        .map(|&(lo, hi)| grid_sign(lo, hi, opts.sign_tol))
        .collect();

    let pair_status = |x: GridSign, y: GridSign| -> Option<HypothesisStatus> {
        use GridSign::*;
        match (x, y) {
            (Mixed, _) | (_, Mixed) => None,
            (Zero, _) | (_, Zero) => Some(HypothesisStatus::SameSign),
            (Nonnegative, Nonnegative) | (Nonpositive, Nonpositive) => {
                Some(HypothesisStatus::SameSign)
            }
            _ => Some(HypothesisStatus::OppositeSign),
        }
    };

    let (hypothesis, pairing_first) = match pair_status(signs[0], signs[1]) {
        Some(h) => (h, true),
        None => match pair_status(signs[2], signs[3]) {
            Some(h) => (h, false),
            None => (HypothesisStatus::Violated, true),
        },
    };

    if hypothesis == HypothesisStatus::Violated {
        return Ok(ComparisonReport {
            hypothesis,
            pairing_first,
            verdicts: Vec::new(),
        });
    }

    let mut verdicts = Vec::new();
    for (t, s) in grid.points() {
        if t <= a || t >= b || t == s {
            continue;
        }
        let v0 = g0.eval(t, s, l)?;
        let v1 = g1.eval(t, s, l)?;
        let verdict = if v0.abs() <= opts.vanish_tol && v1.abs() <= opts.vanish_tol {
            if t < s {
                Verdict::BothVanishLeft
            } else {
                Verdict::BothVanishRight
            }
        } else {
            let gap = (v1 - v0).abs();
            let strict_ok = match hypothesis {
                HypothesisStatus::SameSign => v1 < v0 - opts.strict_margin,
                HypothesisStatus::OppositeSign => v1 > v0 + opts.strict_margin,
                HypothesisStatus::Violated => unreachable!(),
            };
            let strict_bad = match hypothesis {
                HypothesisStatus::SameSign => v1 > v0 + opts.strict_margin,
                HypothesisStatus::OppositeSign => v1 < v0 - opts.strict_margin,
                HypothesisStatus::Violated => unreachable!(),
            };
            if strict_ok {
                Verdict::Strict { gap }
            } else if strict_bad {
                Verdict::Contradicts { gap }
            } else {
                Verdict::Indeterminate { gap }
            }
        };
        verdicts.push((t, s, verdict));
    }
    Ok(ComparisonReport {
        hypothesis,
        pairing_first,
        verdicts,
    })
}

/// Sign-based parameter ordering: when the shift-order derivative of g0 is
/// nonnegative and that of g1 nonpositive over the grid, with a genuinely
/// positive spread somewhere, the parameters must satisfy M1 < M0. Returns
/// whether the sign pattern held.
pub fn parameter_order_witness(
    g0: &GreenFunction,
    g1: &GreenFunction,
    grid: &TsGrid,
    tol: f64,
) -> Result<bool> {
    check_compatible(g0, g1)?;
    let n = g0.spec().order();
    let k = g0.spec().shift();
    let mut min0 = f64::INFINITY;
    let mut max0 = f64::NEG_INFINITY;
    let mut min1 = f64::INFINITY;
    let mut max1 = f64::NEG_INFINITY;
    for (t, s) in grid.points() {
        if t == s && k + 2 > n {
            continue;
        }
        let v0 = g0.eval(t, s, k)?;
        let v1 = g1.eval(t, s, k)?;
        min0 = min0.min(v0);
        max0 = max0.max(v0);
        min1 = min1.min(v1);
        max1 = max1.max(v1);
    }
    Ok(min0 >= -tol && max1 <= tol && (max0 > 10.0 * tol || min1 < -10.0 * tol))
}
