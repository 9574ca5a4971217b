//! Parameter-line analysis: eigenvalues of the characteristic determinant,
//! constant-sign parameter windows and their endpoints, strong-sign envelope
//! witnesses, and monotone dependence of kernel derivatives on the
//! parameter.
//!
//! The shift-0 eigenvalue problem is exactly a parameter translation, so
//! eigenvalues are found directly as the parameter values where the
//! characteristic determinant vanishes; no separate eigensolver is needed.

use crate::bvp::BvpSpec;
use crate::error::{Error, Result};
use crate::green::{check_solvability, GreenFunction};
use crate::grid::TsGrid;
use crate::report::{
    EigenvalueInfo, EndpointCheck, GridDescription, LevelClass, MonotoneDirection,
    MonotonicityVerdict, SignClass, SignWindow, SweepEntry, SweepReport,
};
use rayon::prelude::*;

/// Characteristic determinant D(M) of the problem: zero exactly at the
/// parameter values where uniqueness fails.
pub fn characteristic_determinant(spec: &BvpSpec, tol: f64) -> Result<f64> {
    Ok(check_solvability(spec, tol)?.det)
}

#[derive(Debug, Clone)]
pub struct EigenOptions {
    /// Number of scan intervals over the bracket.
    pub scan_points: usize,
    /// Integrator tolerance for determinant evaluations.
    pub tol: f64,
    /// Bisection stops when the bracket width drops below this.
    pub refine_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            scan_points: 400,
            tol: 1e-12,
            refine_tol: 1e-10,
        }
    }
}

/// Eigenvalue scan result: sorted roots of the characteristic determinant,
/// the sign-change brackets they were refined from, and whether the list
/// was cut at `max_count`.
#[derive(Debug, Clone)]
pub struct EigenvalueScan {
    pub values: Vec<f64>,
    pub brackets: Vec<(f64, f64)>,
    pub truncated: bool,
}

impl EigenvalueScan {
    pub fn infos(&self) -> Vec<EigenvalueInfo> {
        self.values
            .iter()
            .zip(&self.brackets)
            .map(|(&value, &bracket)| EigenvalueInfo { value, bracket })
            .collect()
    }
}

/// Scan D(M) over the bracket, bracket the sign changes, and refine each by
/// bisection. Finds roots of odd multiplicity; tangential zeros do not
/// produce a sign change and are not detected.
pub fn find_eigenvalues(
    template: &BvpSpec,
    bracket: (f64, f64),
    max_count: usize,
    opts: &EigenOptions,
) -> Result<EigenvalueScan> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Config(format!(
            "eigenvalue bracket [{lo}, {hi}] must be finite and increasing"
        )));
    }
    if opts.scan_points < 2 {
        return Err(Error::Config("eigenvalue scan needs at least 2 points".into()));
    }
    let n = opts.scan_points;
    let ms: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let dets: Vec<f64> = ms
        .par_iter()
        .map(|&m| characteristic_determinant(&template.with_param(m), opts.tol))
        .collect::<Result<Vec<_>>>()?;

    let mut values = Vec::new();
    let mut brackets = Vec::new();
    for i in 0..n {
        let (m0, m1) = (ms[i], ms[i + 1]);
        let (d0, d1) = (dets[i], dets[i + 1]);
        if d0 == 0.0 {
            values.push(m0);
            brackets.push((m0, m0));
            continue;
        }
        if d0 * d1 < 0.0 {
            let mut a = m0;
            let mut b = m1;
            let mut da = d0;
            for _ in 0..200 {
                if b - a <= opts.refine_tol {
                    break;
                }
                let mid = 0.5 * (a + b);
                let dm = characteristic_determinant(&template.with_param(mid), opts.tol)?;
                if dm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if da * dm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    da = dm;
                }
            }
            values.push(0.5 * (a + b));
            brackets.push((m0, m1));
        }
    }
    if dets[n] == 0.0 {
        values.push(ms[n]);
        brackets.push((ms[n], ms[n]));
    }

    let truncated = values.len() > max_count;
    values.truncate(max_count);
    brackets.truncate(max_count);
    Ok(EigenvalueScan {
        values,
        brackets,
        truncated,
    })
}

/// Sign of a strong-sign envelope witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSign {
    Positive,
    Negative,
}

/// Constructive envelope witness: phi(t) k1(s) <= g(t,s) <= phi(t) k2(s)
/// with one-signed envelopes, sampled on an interior grid.
#[derive(Debug, Clone)]
pub struct StrongSignWitness {
    pub sign: WitnessSign,
    pub t_grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
    /// Smallest of the envelope sign margins and the k2 - k1 gaps; positive
    /// by construction of a returned witness.
    pub margin: f64,
}

/// Try to construct an envelope witness on the interior grid: phi is the
/// kernel magnitude at the midpoint source, and k1, k2 are the per-s
/// extremes of g/phi. Returns None when the construction fails (phi
/// vanishing, envelopes not one-signed, or degenerate gap); failure is not
/// a disproof.
pub fn strong_sign_witness(
    g: &GreenFunction,
    grid: &TsGrid,
) -> Result<Option<StrongSignWitness>> {
    let (a, b) = g.spec().interval();
    let s_mid = 0.5 * (a + b);
    let t_grid: Vec<f64> = grid
        .t
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    if t_grid.is_empty() || grid.s.is_empty() {
        return Ok(None);
    }
    let mut phi = Vec::with_capacity(t_grid.len());
    for &t in &t_grid {
        let v = g.eval(t, s_mid, 0)?.abs();
        if v < 1e-12 {
            return Ok(None);
        }
        phi.push(v);
    }
    let mut k1 = Vec::with_capacity(grid.s.len());
    let mut k2 = Vec::with_capacity(grid.s.len());
    for &s in &grid.s {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, &t) in t_grid.iter().enumerate() {
            let r = g.eval(t, s, 0)? / phi[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        k1.push(lo);
        k2.push(hi);
    }
    let min_k1 = k1.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_k2 = k2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_gap = k1
        .iter()
        .zip(&k2)
        .map(|(&lo, &hi)| hi - lo)
        .fold(f64::INFINITY, f64::min);
    let (sign, sign_margin) = if min_k1 > 0.0 {
        (WitnessSign::Positive, min_k1)
    } else if max_k2 < 0.0 {
        (WitnessSign::Negative, -max_k2)
    } else {
        return Ok(None);
    };
    if min_gap <= 0.0 {
        return Ok(None);
    }
    Ok(Some(StrongSignWitness {
        sign,
        t_grid,
        phi,
        s_grid: grid.s.clone(),
        k1,
        k2,
        margin: sign_margin.min(min_gap),
    }))
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Integrator tolerance for kernel builds.
    pub build_tol: f64,
    /// "Nonnegative on the square" is asserted as >= -class_tol on the grid.
    pub class_tol: f64,
    /// Window endpoints are bisected down to this parameter resolution.
    pub bisect_tol: f64,
    /// Allowed pointwise slack in the monotonicity comparisons.
    pub monotone_slack: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            build_tol: 1e-10,
            class_tol: 1e-9,
            bisect_tol: 1e-6,
            monotone_slack: 1e-8,
        }
    }
}

/// Uniform parameter grid over a bracket with neighborhoods of the given
/// points removed.
pub fn build_m_grid(
    bracket: (f64, f64),
    points: usize,
    exclusions: &[f64],
    radius: f64,
) -> Vec<f64> {
    let (lo, hi) = bracket;
    (0..points)
        .map(|i| {
            if points == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (points - 1) as f64
            }
        })
        .filter(|m| exclusions.iter().all(|e| (m - e).abs() > radius))
        .collect()
}

/// Evaluate one derivative field over the grid. Diagonal points are skipped
/// (NaN) for orders where the two lateral limits differ.
fn field_values(g: &GreenFunction, grid: &TsGrid, l: usize) -> Result<Vec<f64>> {
    let n = g.spec().order();
    let mut out = Vec::with_capacity(grid.len());
    for (t, s) in grid.points() {
        if t == s && l + 2 > n {
            out.push(f64::NAN);
        } else {
            out.push(g.eval(t, s, l)?);
        }
    }
    Ok(out)
}

fn classify_values(values: &[f64], class_tol: f64) -> (SignClass, f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v.is_nan() {
            continue;
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let class = if lo >= -class_tol && hi <= class_tol {
        SignClass::Indeterminate
    } else if lo >= -class_tol {
        SignClass::Nonnegative
    } else if hi <= class_tol {
        SignClass::Nonpositive
    } else {
        SignClass::SignChanging
    };
    (class, lo, hi)
}

struct EntryData {
    entry: SweepEntry,
    fields: Option<Vec<Vec<f64>>>,
}

fn classify_at(
    template: &BvpSpec,
    m: f64,
    levels: &[usize],
    grid: &TsGrid,
    opts: &SweepOptions,
) -> Result<EntryData> {
    let spec = template.with_param(m);
    match GreenFunction::build(spec, opts.build_tol) {
        Ok(g) => {
            let mut per_level = Vec::with_capacity(levels.len());
            let mut fields = Vec::with_capacity(levels.len());
            let mut max_abs_kernel = 0.0f64;
            for &l in levels {
                let values = field_values(&g, grid, l)?;
                let (class, lo, hi) = classify_values(&values, opts.class_tol);
                if l == 0 {
                    max_abs_kernel = lo.abs().max(hi.abs());
                }
                per_level.push(LevelClass {
                    level: l,
                    class,
                    min: lo,
                    max: hi,
                });
                fields.push(values);
            }
            Ok(EntryData {
                entry: SweepEntry {
                    m,
                    solvable: true,
                    det: g.certificate().det,
                    per_level,
                    max_abs_kernel,
                },
                fields: Some(fields),
            })
        }
        Err(Error::NotSolvable { det, .. }) => Ok(EntryData {
            entry: SweepEntry {
                m,
                solvable: false,
                det,
                per_level: levels
                    .iter()
                    .map(|&l| LevelClass {
                        level: l,
                        class: SignClass::NotSolvable,
                        min: f64::NAN,
                        max: f64::NAN,
                    })
                    .collect(),
                max_abs_kernel: f64::NAN,
            },
            fields: None,
        }),
        Err(e) => Err(e),
    }
}

/// Predicate for endpoint refinement: does the field at level l have the
/// target class at parameter m?
fn class_at(
    template: &BvpSpec,
    m: f64,
    l: usize,
    grid: &TsGrid,
    opts: &SweepOptions,
) -> Result<SignClass> {
    match GreenFunction::build(template.with_param(m), opts.build_tol) {
        Ok(g) => {
            let values = field_values(&g, grid, l)?;
            Ok(classify_values(&values, opts.class_tol).0)
        }
        Err(Error::NotSolvable { .. }) => Ok(SignClass::NotSolvable),
        Err(e) => Err(e),
    }
}

fn bisect_boundary(
    template: &BvpSpec,
    inside: f64,
    outside: f64,
    l: usize,
    target: SignClass,
    grid: &TsGrid,
    opts: &SweepOptions,
) -> Result<f64> {
    let mut a = inside;
    let mut b = outside;
    while (b - a).abs() > opts.bisect_tol {
        let mid = 0.5 * (a + b);
        if class_at(template, mid, l, grid, opts)? == target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Classify the kernel and its requested derivatives over the parameter
/// grid, refine the constant-sign window endpoints, check the coincidence
/// of adjacent window endpoints for the kernel itself, and verify monotone
/// ordering between consecutive constant-sign parameter values.
///
/// The interval-structure statements assume shift order 0; other shifts are
/// swept, but the window semantics are not theorem-backed there.
pub fn sweep(
    template: &BvpSpec,
    m_values: &[f64],
    levels: &[usize],
    grid: &TsGrid,
    eigenvalues: &[EigenvalueInfo],
    opts: &SweepOptions,
) -> Result<SweepReport> {
    if m_values.is_empty() {
        return Err(Error::Config("parameter grid is empty".into()));
    }
    if grid.is_empty() {
        return Err(Error::Config("evaluation grid is empty".into()));
    }
    // level 0 is needed internally for the monotonicity pairing
    let mut all_levels: Vec<usize> = levels.to_vec();
    if !all_levels.contains(&0) {
        all_levels.push(0);
    }

    let data: Vec<EntryData> = m_values
        .par_iter()
        .map(|&m| classify_at(template, m, &all_levels, grid, opts))
        .collect::<Result<Vec<_>>>()?;

    let level_index = |l: usize| all_levels.iter().position(|&x| x == l).unwrap();

    // maximal constant-sign runs per level, endpoints refined by bisection
    let mut windows = Vec::new();
    for &l in levels {
        let li = level_index(l);
        for target in [SignClass::Nonpositive, SignClass::Nonnegative] {
            let mut i = 0;
            while i < data.len() {
                if data[i].entry.per_level[li].class != target {
                    i += 1;
                    continue;
                }
                let start = i;
                while i + 1 < data.len() && data[i + 1].entry.per_level[li].class == target {
                    i += 1;
                }
                let end = i;
                let lo_edge = start == 0;
                let hi_edge = end == data.len() - 1;
                let m_lo = if lo_edge {
                    m_values[start]
                } else {
                    bisect_boundary(
                        template,
                        m_values[start],
                        m_values[start - 1],
                        l,
                        target,
                        grid,
                        opts,
                    )?
                };
                let m_hi = if hi_edge {
                    m_values[end]
                } else {
                    bisect_boundary(
                        template,
                        m_values[end],
                        m_values[end + 1],
                        l,
                        target,
                        grid,
                        opts,
                    )?
                };
                windows.push(SignWindow {
                    level: l,
                    class: target,
                    m_lo,
                    m_hi,
                    lo_at_bracket_edge: lo_edge,
                    hi_at_bracket_edge: hi_edge,
                });
                i += 1;
            }
        }
    }

    // endpoint coincidence for the kernel itself: sup of a nonpositive
    // window against inf of the adjacent nonnegative window
    let mut endpoint_check = None;
    if levels.contains(&0) {
        let neg: Vec<&SignWindow> = windows
            .iter()
            .filter(|w| w.level == 0 && w.class == SignClass::Nonpositive)
            .collect();
        let pos: Vec<&SignWindow> = windows
            .iter()
            .filter(|w| w.level == 0 && w.class == SignClass::Nonnegative)
            .collect();
        let mut best: Option<EndpointCheck> = None;
        for wn in &neg {
            if wn.hi_at_bracket_edge {
                continue;
            }
            for wp in &pos {
                if wp.lo_at_bracket_edge || wp.m_lo < wn.m_hi - 1.0 {
                    continue;
                }
                let gap = (wp.m_lo - wn.m_hi).abs();
                if best.as_ref().is_none_or(|b| gap < b.gap) {
                    best = Some(EndpointCheck {
                        sup_nonpositive: wn.m_hi,
                        inf_nonnegative: wp.m_lo,
                        gap,
                    });
                }
            }
        }
        endpoint_check = best;
    }

    // monotone ordering between consecutive constant-sign parameter values:
    // same sign of d^l g at the lower parameter and of the kernel at the
    // upper parameter forces a nonincreasing field, opposite signs a
    // nondecreasing one
    let mut monotonicity = Vec::new();
    let points: Vec<(f64, f64)> = grid.points().collect();
    for &l in levels {
        let li = level_index(l);
        let l0 = level_index(0);
        for w in data.windows(2) {
            let (e1, e2) = (&w[0], &w[1]);
            let (Some(f1), Some(f2)) = (&e1.fields, &e2.fields) else {
                continue;
            };
            let sign_l = match e1.entry.per_level[li].class {
                SignClass::Nonnegative => 1.0,
                SignClass::Nonpositive => -1.0,
                _ => continue,
            };
            let sign_0 = match e2.entry.per_level[l0].class {
                SignClass::Nonnegative => 1.0,
                SignClass::Nonpositive => -1.0,
                _ => continue,
            };
            let expected = if sign_l == sign_0 {
                MonotoneDirection::Nonincreasing
            } else {
                MonotoneDirection::Nondecreasing
            };
            let mut violations = 0usize;
            let mut worst = 0.0f64;
            let mut worst_at = (f64::NAN, f64::NAN);
            for (idx, (&v1, &v2)) in f1[li].iter().zip(&f2[li]).enumerate() {
                if v1.is_nan() || v2.is_nan() {
                    continue;
                }
                let excess = match expected {
                    MonotoneDirection::Nonincreasing => v2 - v1,
                    MonotoneDirection::Nondecreasing => v1 - v2,
                };
                if excess > opts.monotone_slack {
                    violations += 1;
                    if excess > worst {
                        worst = excess;
                        worst_at = points[idx];
                    }
                }
            }
            monotonicity.push(MonotonicityVerdict {
                level: l,
                m_from: e1.entry.m,
                m_to: e2.entry.m,
                expected,
                violations,
                worst,
                worst_location: worst_at,
            });
        }
    }

    let entries = data
        .into_iter()
        .map(|d| {
            let mut e = d.entry;
            // report only the requested levels, in their order
            e.per_level = levels
                .iter()
                .map(|&l| e.per_level[level_index(l)].clone())
                .collect();
            e
        })
        .collect();

    Ok(SweepReport {
        levels: levels.to_vec(),
        grid: GridDescription {
            t_points: grid.t.len(),
            s_points: grid.s.len(),
            interval: template.interval(),
        },
        entries,
        eigenvalues: eigenvalues.to_vec(),
        windows,
        endpoint_check,
        monotonicity,
    })
}

/// Which half-interval relative to the source point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    /// [a, s)
    Left,
    /// (s, b]
    Right,
}

/// Sign-change count of a kernel derivative on one half-interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroCount {
    /// The restriction is numerically identically zero, a distinguished
    /// outcome rather than "zero crossings".
    IdenticallyZero,
    Count(usize),
}

/// Count sign changes of the l-th derivative of g(., s) on one side of the
/// source point, with one refinement pass around each detected change.
pub fn zero_count(
    g: &GreenFunction,
    l: usize,
    s: f64,
    half: Half,
    grid_density: usize,
) -> Result<ZeroCount> {
    let n = g.spec().order();
    if l >= n {
        return Err(Error::UnsupportedOrder { order: l, max: n - 1 });
    }
    let (a, b) = g.spec().interval();
    let density = grid_density.max(8);
    let ts: Vec<f64> = match half {
        Half::Left => (0..density)
            .map(|i| a + (s - a) * i as f64 / density as f64)
            .collect(),
        Half::Right => (1..=density)
            .map(|i| s + (b - s) * i as f64 / density as f64)
            .collect(),
    };
    let values: Vec<f64> = ts
        .iter()
        .map(|&t| g.eval(t, s, l))
        .collect::<Result<Vec<_>>>()?;
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs < 1e-10 {
        return Ok(ZeroCount::IdenticallyZero);
    }
    let band = 1e-12 * max_abs.max(1.0);
    let mut count = 0usize;
    for i in 0..values.len() - 1 {
        if values[i].abs() <= band || values[i + 1].abs() <= band {
            continue;
        }
        if values[i] * values[i + 1] < 0.0 {
            // refinement pass: recount inside the bracketing interval
            let mut sub = 0usize;
            let mut prev = values[i];
            for j in 1..=32 {
                let t = ts[i] + (ts[i + 1] - ts[i]) * j as f64 / 32.0;
                let v = g.eval(t, s, l)?;
                if prev.abs() > band && v.abs() > band && prev * v < 0.0 {
                    sub += 1;
                }
                if v.abs() > band {
                    prev = v;
                }
            }
            count += sub.max(1);
        }
    }
    Ok(ZeroCount::Count(count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;
    use std::f64::consts::PI;

    #[test]
    fn eigenvalues_of_the_mixed_problem() {
        let template = oracles::mixed_k0_spec(0.0);
        let scan = find_eigenvalues(&template, (0.0, 62.0), 16, &EigenOptions::default())
            .unwrap();
        let expected = [
            (PI / 2.0).powi(2),
            (3.0 * PI / 2.0).powi(2),
            (5.0 * PI / 2.0).powi(2),
        ];
        assert_eq!(scan.values.len(), 3, "{:?}", scan.values);
        for (v, e) in scan.values.iter().zip(expected) {
            assert!((v - e).abs() <= 1e-8, "{v} vs {e}");
        }
        assert!(!scan.truncated);
        // a strict sub-bracket only contains what it contains
        let scan = find_eigenvalues(&template, (0.0, 30.0), 16, &EigenOptions::default())
            .unwrap();
        assert_eq!(scan.values.len(), 2);
    }

    #[test]
    fn shifted_problem_has_no_eigenvalues() {
        let template = oracles::mixed_k1_spec(0.0);
        let scan = find_eigenvalues(&template, (-20.0, 20.0), 16, &EigenOptions::default())
            .unwrap();
        assert!(scan.values.is_empty(), "{:?}", scan.values);
    }

    #[test]
    fn dirichlet_eigenvalues() {
        let template = oracles::dirichlet_k0_spec(0.0);
        let scan = find_eigenvalues(&template, (0.0, 50.0), 16, &EigenOptions::default())
            .unwrap();
        let expected = [PI * PI, 4.0 * PI * PI];
        assert_eq!(scan.values.len(), 2, "{:?}", scan.values);
        for (v, e) in scan.values.iter().zip(expected) {
            assert!((v - e).abs() <= 1e-8, "{v} vs {e}");
        }
    }

    #[test]
    fn truncation_flag() {
        let template = oracles::mixed_k0_spec(0.0);
        let scan = find_eigenvalues(&template, (0.0, 62.0), 2, &EigenOptions::default())
            .unwrap();
        assert_eq!(scan.values.len(), 2);
        assert!(scan.truncated);
    }

    #[test]
    fn negative_witness_for_the_mixed_kernel() {
        let g = GreenFunction::build(oracles::mixed_k0_spec(0.0), 1e-10).unwrap();
        let grid = TsGrid::interior((0.0, 1.0), 24, 24);
        let w = strong_sign_witness(&g, &grid).unwrap().expect("witness");
        assert_eq!(w.sign, WitnessSign::Negative);
        assert!(w.margin > 0.0);
        // envelope inequalities hold on the grid by construction; respot-check
        for (j, &s) in w.s_grid.iter().enumerate() {
            for (i, &t) in w.t_grid.iter().enumerate() {
                let v = g.eval(t, s, 0).unwrap();
                assert!(w.phi[i] * w.k1[j] <= v + 1e-12);
                assert!(v <= w.phi[i] * w.k2[j] + 1e-12);
            }
        }
    }

    #[test]
    fn sign_changing_kernel_has_no_witness() {
        let g = GreenFunction::build(oracles::mixed_k0_spec(4.0), 1e-10).unwrap();
        let grid = TsGrid::interior((0.0, 1.0), 24, 24);
        assert!(strong_sign_witness(&g, &grid).unwrap().is_none());
    }

    #[test]
    fn shifted_kernel_witness_negative_for_any_parameter() {
        for m in [-3.0, 0.0, 2.0, 7.0] {
            let g = GreenFunction::build(oracles::mixed_k1_spec(m), 1e-10).unwrap();
            let grid = TsGrid::interior((0.0, 1.0), 20, 20);
            let w = strong_sign_witness(&g, &grid).unwrap().expect("witness");
            assert_eq!(w.sign, WitnessSign::Negative, "m = {m}");
        }
    }

    #[test]
    fn sweep_classifies_the_mixed_kernel() {
        let template = oracles::mixed_k0_spec(0.0);
        let grid = TsGrid::uniform((0.0, 1.0), 30, 30);
        let ms = build_m_grid((-10.0, 2.4), 25, &[], 0.0);
        let report = sweep(
            &template,
            &ms,
            &[0],
            &grid,
            &[],
            &SweepOptions::default(),
        )
        .unwrap();
        for e in &report.entries {
            assert_eq!(e.per_level[0].class, SignClass::Nonpositive, "M = {}", e.m);
        }
        // kernel decreasing in the parameter throughout the window
        for v in &report.monotonicity {
            assert_eq!(v.expected, MonotoneDirection::Nonincreasing);
            assert_eq!(v.violations, 0, "between {} and {}", v.m_from, v.m_to);
        }
    }

    #[test]
    fn sweep_derivative_classifications() {
        let template = oracles::mixed_k0_spec(0.0);
        let grid = TsGrid::uniform((0.0, 1.0), 30, 30);
        // derivative nonpositive and decreasing inside (0, pi^2/4)
        let ms = build_m_grid((0.3, 2.4), 8, &[], 0.0);
        let report = sweep(
            &template,
            &ms,
            &[1],
            &grid,
            &[],
            &SweepOptions::default(),
        )
        .unwrap();
        for e in &report.entries {
            assert_eq!(e.per_level[0].class, SignClass::Nonpositive, "M = {}", e.m);
        }
        for v in &report.monotonicity {
            assert_eq!(v.expected, MonotoneDirection::Nonincreasing);
            assert_eq!(v.violations, 0);
        }
        // negative parameters make the derivative change sign
        let ms = build_m_grid((-6.0, -0.5), 6, &[], 0.0);
        let report = sweep(
            &template,
            &ms,
            &[1],
            &grid,
            &[],
            &SweepOptions::default(),
        )
        .unwrap();
        for e in &report.entries {
            assert_eq!(e.per_level[0].class, SignClass::SignChanging, "M = {}", e.m);
        }
    }

    #[test]
    fn window_endpoint_matches_shifted_eigenvalue_structure() {
        // The nonpositive window of the mixed kernel ends at the smallest
        // eigenvalue: sup(N_0) = pi^2/4. Independently, the first eigenvalue
        // above any interior parameter of the window equals that endpoint.
        let template = oracles::mixed_k0_spec(0.0);
        let grid = TsGrid::uniform((0.0, 1.0), 30, 30);
        let ms = build_m_grid((-4.0, 2.9), 12, &[(PI / 2.0).powi(2)], 0.3);
        let report = sweep(
            &template,
            &ms,
            &[0],
            &grid,
            &[],
            &SweepOptions::default(),
        )
        .unwrap();
        let wn = report
            .windows
            .iter()
            .find(|w| w.class == SignClass::Nonpositive)
            .expect("nonpositive window");
        assert!(!wn.hi_at_bracket_edge);
        assert!(
            (wn.m_hi - (PI / 2.0).powi(2)).abs() < 1e-4,
            "sup(N_0) = {}",
            wn.m_hi
        );
        let scan = find_eigenvalues(&template, (0.0, 5.0), 4, &EigenOptions::default())
            .unwrap();
        assert!((scan.values[0] - wn.m_hi).abs() < 1e-5);
    }

    #[test]
    fn pointwise_ordering_across_three_parameters() {
        // M1 < Mbar < M2 inside the constant-sign window: kernels order
        // reversely to the parameters, pointwise
        let tol = 1e-10;
        let g_low = GreenFunction::build(oracles::mixed_k0_spec(-2.0), tol).unwrap();
        let g_mid = GreenFunction::build(oracles::mixed_k0_spec(0.0), tol).unwrap();
        let g_high = GreenFunction::build(oracles::mixed_k0_spec(1.0), tol).unwrap();
        for (t, s) in TsGrid::staggered((0.0, 1.0), 10, 10).points() {
            let lo = g_low.eval(t, s, 0).unwrap();
            let mid = g_mid.eval(t, s, 0).unwrap();
            let hi = g_high.eval(t, s, 0).unwrap();
            assert!(hi <= mid + 1e-8 && mid <= lo + 1e-8, "t={t} s={s}");
        }
    }

    #[test]
    fn empty_grid_is_a_usage_error() {
        let template = oracles::mixed_k0_spec(0.0);
        let grid = TsGrid::uniform((0.0, 1.0), 10, 10);
        assert!(matches!(
            sweep(&template, &[], &[0], &grid, &[], &SweepOptions::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn zero_counts() {
        let tol = 1e-10;
        // shifted problem: derivative identically zero right of the source
        let g = GreenFunction::build(oracles::mixed_k1_spec(2.0), tol).unwrap();
        assert_eq!(
            zero_count(&g, 1, 0.4, Half::Right, 512).unwrap(),
            ZeroCount::IdenticallyZero
        );
        assert_eq!(
            zero_count(&g, 1, 0.4, Half::Left, 512).unwrap(),
            ZeroCount::Count(0)
        );
        // negative mixed kernel: no interior zeros on either half
        let g = GreenFunction::build(oracles::mixed_k0_spec(1.0), tol).unwrap();
        for half in [Half::Left, Half::Right] {
            assert_eq!(
                zero_count(&g, 0, 0.5, half, 512).unwrap(),
                ZeroCount::Count(0)
            );
        }
        // between eigenvalues the kernel oscillates: some source point sees
        // at least one interior zero on a half-interval
        let g = GreenFunction::build(oracles::mixed_k0_spec(15.0), tol).unwrap();
        let mut found = false;
        for i in 1..10 {
            let s = i as f64 / 10.0;
            for half in [Half::Left, Half::Right] {
                if let ZeroCount::Count(c) = zero_count(&g, 0, s, half, 512).unwrap() {
                    if c >= 1 {
                        found = true;
                    }
                }
            }
        }
        assert!(found);
        // counts stable under doubling the sampling density
        let g = GreenFunction::build(oracles::mixed_k0_spec(15.0), tol).unwrap();
        for i in 1..8 {
            let s = i as f64 / 8.0;
            let c1 = zero_count(&g, 0, s, Half::Left, 2000).unwrap();
            let c2 = zero_count(&g, 0, s, Half::Left, 4000).unwrap();
            assert_eq!(c1, c2, "s = {s}");
        }
    }
}
