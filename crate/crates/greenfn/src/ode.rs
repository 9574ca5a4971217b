//! Homogeneous-equation integration: an adaptive embedded Runge-Kutta scheme
//! (Dormand-Prince 5(4)) with continuous output, and the fundamental system
//! of the operator built on top of it.
//!
//! The fundamental system integrates the n-dimensional companion form of
//! `T u = 0` for n initial stacks forming the identity matrix at the left
//! endpoint, so `y_i^(j)(a) = delta_ij`. The parameter is folded into the
//! companion coefficients before integration, giving a single code path for
//! every shift order.

use crate::bvp::BvpSpec;
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Error estimate weights (difference of the embedded orders).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Continuous-output weights.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 1_000_000;

/// What the integrator was asked for and what it achieved.
#[derive(Debug, Clone)]
pub struct ToleranceRecord {
    pub rtol: f64,
    pub atol: f64,
    pub steps: usize,
    pub rejected: usize,
    /// Largest interpolant defect |u' - f(t, u)| observed at step midpoints.
    pub max_defect: f64,
}

struct Segment {
    t0: f64,
    h: f64,
    /// Five interpolation coefficient vectors, each of the state dimension.
    cont: [Vec<f64>; 5],
}

impl Segment {
    fn theta(&self, t: f64) -> f64 {
        ((t - self.t0) / self.h).clamp(0.0, 1.0)
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let th = self.theta(t);
        let th1 = 1.0 - th;
        let [c0, c1, c2, c3, c4] = &self.cont;
        for i in 0..out.len() {
            out[i] = c0[i] + th * (c1[i] + th1 * (c2[i] + th * (c3[i] + th1 * c4[i])));
        }
    }

    fn eval_derivative_into(&self, t: f64, out: &mut [f64]) {
        let th = self.theta(t);
        let [_, c1, c2, c3, c4] = &self.cont;
        for i in 0..out.len() {
            let p = c1[i]
                + c2[i] * (1.0 - 2.0 * th)
                + c3[i] * th * (2.0 - 3.0 * th)
                + c4[i] * 2.0 * th * (1.0 - th) * (1.0 - 2.0 * th);
            out[i] = p / self.h;
        }
    }
}

/// Piecewise-polynomial representation of one integration run, evaluable at
/// any point of the integration interval.
pub struct DenseOutput {
    dim: usize,
    t0: f64,
    t1: f64,
    segments: Vec<Segment>,
    record: ToleranceRecord,
}

impl DenseOutput {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn record(&self) -> &ToleranceRecord {
        &self.record
    }

    fn locate(&self, t: f64) -> Result<&Segment> {
        let span = self.t1 - self.t0;
        let slack = 1e-12 * span.max(1.0);
        if t < self.t0 - slack || t > self.t1 + slack {
            return Err(Error::OutOfInterval {
                t,
                a: self.t0,
                b: self.t1,
            });
        }
        // first segment whose end reaches t
        let idx = self
            .segments
            .partition_point(|seg| seg.t0 + seg.h < t)
            .min(self.segments.len() - 1);
        Ok(&self.segments[idx])
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.locate(t)?.eval_into(t, out);
        Ok(())
    }

    pub fn eval_derivative_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.locate(t)?.eval_derivative_into(t, out);
        Ok(())
    }
}

/// Integrate y' = f(t, y) from t0 to t1 (t0 < t1) with dense output.
///
/// Steps are accepted on the embedded error estimate and additionally on
/// the midpoint defect of the interpolant, |u' - f(t, u)| measured against
/// `defect_tol` scales. The interpolant is one order below the solution, so
/// without the defect test its derivative error would dominate any residual
/// measured through the dense output.
pub fn integrate_dense<F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: &[f64],
    rtol: f64,
    atol: f64,
    defect_tol: f64,
) -> Result<DenseOutput>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0.to_vec();

    let mut k = vec![vec![0.0; dim]; 7];
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];

    f(t, &y, &mut k[0]);

    let mut h = (span * 1e-3).min(span);
    let h_min = span * 1e-14;
    let mut segments: Vec<Segment> = Vec::new();
    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut max_defect = 0.0f64;

    while t < t1 {
        if steps >= MAX_STEPS {
            return Err(Error::StepBudget { t });
        }
        if h < h_min {
            return Err(Error::IntegratorStall { t });
        }
        if t + h > t1 {
            h = t1 - t;
        }
        steps += 1;

        // stages 2..7 (k[0] carried over, FSAL)
        for i in 0..dim {
            y_stage[i] = y[i] + h * A21 * k[0][i];
        }
        f(t + C2 * h, &y_stage, &mut k[1]);
        for i in 0..dim {
            y_stage[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        f(t + C3 * h, &y_stage, &mut k[2]);
        for i in 0..dim {
            y_stage[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        f(t + C4 * h, &y_stage, &mut k[3]);
        for i in 0..dim {
            y_stage[i] =
                y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        f(t + C5 * h, &y_stage, &mut k[4]);
        for i in 0..dim {
            y_stage[i] = y[i]
                + h * (A61 * k[0][i]
                    + A62 * k[1][i]
                    + A63 * k[2][i]
                    + A64 * k[3][i]
                    + A65 * k[4][i]);
        }
        f(t + h, &y_stage, &mut k[5]);
        for i in 0..dim {
            y_new[i] = y[i]
                + h * (A71 * k[0][i]
                    + A73 * k[2][i]
                    + A74 * k[3][i]
                    + A75 * k[4][i]
                    + A76 * k[5][i]);
        }
        f(t + h, &y_new, &mut k[6]);

        // scaled RMS error of the embedded pair
        let mut err_sq = 0.0;
        for i in 0..dim {
            let e = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / dim as f64).sqrt();

        if err <= 1.0 {
            // error accepted: build the interpolation coefficients
            let mut c0 = Vec::with_capacity(dim);
            let mut c1 = Vec::with_capacity(dim);
            let mut c2 = Vec::with_capacity(dim);
            let mut c3 = Vec::with_capacity(dim);
            let mut c4 = Vec::with_capacity(dim);
            for i in 0..dim {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                c0.push(y[i]);
                c1.push(ydiff);
                c2.push(bspl);
                c3.push(ydiff - h * k[6][i] - bspl);
                c4.push(
                    h * (D1 * k[0][i]
                        + D3 * k[2][i]
                        + D4 * k[3][i]
                        + D5 * k[4][i]
                        + D6 * k[5][i]
                        + D7 * k[6][i]),
                );
            }
            let seg = Segment {
                t0: t,
                h,
                cont: [c0, c1, c2, c3, c4],
            };

            // defect test at the step midpoint
            let t_mid = t + 0.5 * h;
            seg.eval_into(t_mid, &mut y_stage);
            f(t_mid, &y_stage, &mut scratch);
            seg.eval_derivative_into(t_mid, &mut y_new[..dim]);
            let mut defect_ratio = 0.0f64;
            let mut defect = 0.0f64;
            for i in 0..dim {
                let d = (y_new[i] - scratch[i]).abs();
                defect = defect.max(d);
                defect_ratio = defect_ratio.max(d / (defect_tol * (1.0 + scratch[i].abs())));
            }
            if defect_ratio > 1.0 {
                rejected += 1;
                // the defect shrinks one order faster than the error
                h *= (0.9 * defect_ratio.powf(-0.25)).clamp(0.1, 0.9);
                continue;
            }
            max_defect = max_defect.max(defect);

            // restore y_new (the state) from the interpolant endpoint
            seg.eval_into(t + h, &mut y_new);
            t += h;
            y.copy_from_slice(&y_new);
            k.swap(0, 6); // FSAL
            segments.push(seg);

            let err_scale = if err == 0.0 {
                10.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 10.0)
            };
            // the defect controller predicts its own allowable growth
            let defect_scale = if defect_ratio > 0.0 {
                (0.9 * defect_ratio.powf(-0.25)).clamp(0.2, 10.0)
            } else {
                10.0
            };
            h *= err_scale.min(defect_scale);
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }

    Ok(DenseOutput {
        dim,
        t0,
        t1,
        segments,
        record: ToleranceRecord {
            rtol,
            atol,
            steps,
            rejected,
            max_defect,
        },
    })
}

/// n independent solutions of the homogeneous equation with identity
/// derivative stacks at the left endpoint, evaluable anywhere on the
/// interval through the integrator's continuous output.
pub struct FundamentalSystem {
    order: usize,
    interval: (f64, f64),
    /// Effective companion coefficients and their exact derivatives:
    /// `eff[j][p]` is the p-th derivative of the coefficient at position
    /// j + 1 (multiplying u^(n-1-j)).
    eff: Vec<Vec<Coefficient>>,
    dense: DenseOutput,
}

impl FundamentalSystem {
    /// Integrate the homogeneous problem for the given spec. `tol` is used
    /// for both the absolute and relative integrator tolerances.
    pub fn build(spec: &BvpSpec, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "integration tolerance must be positive, got {tol}"
            )));
        }
        let n = spec.order();
        let (a, b) = spec.interval();
        let eff_base = spec.effective_coeffs();
        // exact derivatives up to order n-1, enough for stacks of order 2n-1
        let eff: Vec<Vec<Coefficient>> = eff_base
            .iter()
            .map(|c| {
                let mut row = Vec::with_capacity(n);
                row.push(c.clone());
                for p in 1..n {
                    let prev: &Coefficient = &row[p - 1];
                    row.push(prev.derivative());
                }
                row
            })
            .collect();

        // State layout: trajectory i occupies components i*n .. i*n + n-1,
        // component j holding u^(j).
        let dim = n * n;
        let mut y0 = vec![0.0; dim];
        for i in 0..n {
            y0[i * n + i] = 1.0;
        }
        let eff_for_f = eff.clone();
        let f = move |t: f64, y: &[f64], dy: &mut [f64]| {
            let mut coeffs = [0.0f64; 16];
            let mut coeffs_vec;
            let cvals: &mut [f64] = if n <= 16 {
                &mut coeffs[..n]
            } else {
                coeffs_vec = vec![0.0; n];
                &mut coeffs_vec
            };
            for (j, row) in eff_for_f.iter().enumerate() {
                cvals[j] = row[0].eval(t);
            }
            for i in 0..n {
                let base = i * n;
                for j in 0..n - 1 {
                    dy[base + j] = y[base + j + 1];
                }
                let mut top = 0.0;
                for j in 0..n {
                    // cvals[j] multiplies u^(n-1-j)
                    top -= cvals[j] * y[base + n - 1 - j];
                }
                dy[base + n - 1] = top;
            }
        };
        let dense = integrate_dense(f, a, b, &y0, tol, tol)?;
        Ok(FundamentalSystem {
            order: n,
            interval: (a, b),
            eff,
            dense,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn tolerance(&self) -> &ToleranceRecord {
        self.dense.record()
    }

    /// Derivative stack at t: entry (j, i) holds y_i^(j)(t) for
    /// j, i in 0..n.
    pub fn stack(&self, t: f64) -> Result<DMatrix<f64>> {
        let n = self.order;
        let mut buf = vec![0.0; n * n];
        self.dense.eval_into(t, &mut buf)?;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = buf[i * n + j];
            }
        }
        Ok(m)
    }

    /// Derivative stack extended past order n-1: rows n.. are recovered by
    /// differentiating the equation algebraically, using exact derivatives
    /// of the coefficients. Row count is `max_order + 1`; `max_order` may be
    /// at most 2n - 1.
    pub fn extended_stack(&self, t: f64, max_order: usize) -> Result<DMatrix<f64>> {
        let n = self.order;
        if max_order > 2 * n - 1 {
            return Err(Error::UnsupportedOrder {
                order: max_order,
                max: 2 * n - 1,
            });
        }
        let base = self.stack(t)?;
        let mut m = DMatrix::zeros(max_order + 1, n);
        for j in 0..n.min(max_order + 1) {
            for i in 0..n {
                m[(j, i)] = base[(j, i)];
            }
        }
        // Row n + q follows from the q-th derivative of the equation:
        // u^(n+q) = - sum_j sum_p C(q,p) eff_j^(p) u^(n-j+q-p).
        for row in n..=max_order {
            let q = row - n;
            for i in 0..n {
                let mut acc = 0.0;
                for j in 1..=n {
                    for p in 0..=q {
                        let cf = self.eff[j - 1][p].eval(t);
                        if cf != 0.0 {
                            acc -= binomial(q, p) * cf * m[(n - j + q - p, i)];
                        }
                    }
                }
                m[(row, i)] = acc;
            }
        }
        Ok(m)
    }

    /// Wronskian of the fundamental system at t.
    pub fn wronskian(&self, t: f64) -> Result<f64> {
        Ok(self.stack(t)?.determinant())
    }

    /// y_i^(j)(t), with i, j in 0..n.
    pub fn value(&self, i: usize, j: usize, t: f64) -> Result<f64> {
        Ok(self.stack(t)?[(j, i)])
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::boundary;
    use approx::assert_abs_diff_eq;

    fn spec(shift: usize, param: f64) -> BvpSpec {
        let (alpha, beta) = boundary::mixed();
        BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::zero(), Coefficient::zero()],
            shift,
            param,
            alpha,
            beta,
        )
        .unwrap()
    }

    #[test]
    fn harmonic_fundamental_pair() {
        // u'' + u = 0 with identity stacks: y1 = cos t, y2 = sin t
        let fs = FundamentalSystem::build(&spec(0, 1.0), 1e-10).unwrap();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let st = fs.stack(t).unwrap();
            assert_abs_diff_eq!(st[(0, 0)], t.cos(), epsilon = 1e-9);
            assert_abs_diff_eq!(st[(1, 0)], -t.sin(), epsilon = 1e-9);
            assert_abs_diff_eq!(st[(0, 1)], t.sin(), epsilon = 1e-9);
            assert_abs_diff_eq!(st[(1, 1)], t.cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn double_integration_basis() {
        // u'' = 0: y1 = 1, y2 = t
        let fs = FundamentalSystem::build(&spec(0, 0.0), 1e-10).unwrap();
        let st = fs.stack(0.73).unwrap();
        assert_abs_diff_eq!(st[(0, 0)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(st[(0, 1)], 0.73, epsilon = 1e-12);
        assert_abs_diff_eq!(st[(1, 1)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn damped_basis_matches_hand_solution() {
        // u'' + 2u' = 0: y1 = 1, y2 = (1 - exp(-2t)) / 2
        let fs = FundamentalSystem::build(&spec(1, 2.0), 1e-10).unwrap();
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            let st = fs.stack(t).unwrap();
            assert_abs_diff_eq!(st[(0, 0)], 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(st[(0, 1)], (1.0 - (-2.0 * t).exp()) / 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn abel_identity_for_wronskian() {
        // W(t) = W(a) exp(-int a_1~), with the effective first coefficient.
        // For u'' + 2u' = 0 (shift 1, param 2): W(t) = exp(-2t).
        let fs = FundamentalSystem::build(&spec(1, 2.0), 1e-10).unwrap();
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            let w = fs.wronskian(t).unwrap();
            let expected = (-2.0 * t).exp();
            assert!(
                (w - expected).abs() <= 1e-6 * expected.abs(),
                "t={t}: W={w}, expected {expected}"
            );
        }
        // For u'' + Mu = 0 the Wronskian is constant.
        let fs = FundamentalSystem::build(&spec(0, 5.0), 1e-10).unwrap();
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            assert!((fs.wronskian(t).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn basis_ignores_boundary_matrices() {
        // The homogeneous solutions depend only on (coefficients, shift,
        // param), not on the boundary data.
        let (alpha, beta) = boundary::mixed();
        let (alpha2, beta2) = boundary::dirichlet();
        let s1 = BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::zero(), Coefficient::zero()],
            0,
            3.0,
            alpha,
            beta,
        )
        .unwrap();
        let s2 = BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::zero(), Coefficient::zero()],
            0,
            3.0,
            alpha2,
            beta2,
        )
        .unwrap();
        let f1 = FundamentalSystem::build(&s1, 1e-10).unwrap();
        let f2 = FundamentalSystem::build(&s2, 1e-10).unwrap();
        for i in 0..=7 {
            let t = i as f64 / 7.0;
            assert_eq!(f1.stack(t).unwrap(), f2.stack(t).unwrap());
        }
    }

    #[test]
    fn tolerance_refinement_is_consistent() {
        let tol = 1e-8;
        let f1 = FundamentalSystem::build(&spec(0, 30.0), tol).unwrap();
        let f2 = FundamentalSystem::build(&spec(0, 30.0), tol / 10.0).unwrap();
        for i in 0..=25 {
            let t = i as f64 / 25.0;
            let a = f1.stack(t).unwrap();
            let b = f2.stack(t).unwrap();
            for j in 0..2 {
                for i2 in 0..2 {
                    assert!(
                        (a[(j, i2)] - b[(j, i2)]).abs() < 10.0 * tol,
                        "t={t} ({j},{i2}): {} vs {}",
                        a[(j, i2)],
                        b[(j, i2)]
                    );
                }
            }
        }
    }

    #[test]
    fn extended_stack_matches_equation() {
        // u'' + (1+t) u = 0: u''' = -(u + (1+t) u')  via the product rule.
        let (alpha, beta) = boundary::mixed();
        let s = BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::zero(), Coefficient::poly(&[1.0, 1.0])],
            0,
            0.0,
            alpha,
            beta,
        )
        .unwrap();
        let fs = FundamentalSystem::build(&s, 1e-11).unwrap();
        let t = 0.4;
        let m = fs.extended_stack(t, 3).unwrap();
        for i in 0..2 {
            let u = m[(0, i)];
            let du = m[(1, i)];
            let d2 = m[(2, i)];
            let d3 = m[(3, i)];
            assert_abs_diff_eq!(d2, -(1.0 + t) * u, epsilon = 1e-9);
            assert_abs_diff_eq!(d3, -(u + (1.0 + t) * du), epsilon = 1e-9);
        }
        assert!(fs.extended_stack(t, 4).is_err());
    }

    #[test]
    fn interpolant_defect_is_recorded_small() {
        let fs = FundamentalSystem::build(&spec(0, 25.0), 1e-10).unwrap();
        assert!(fs.tolerance().max_defect < 1e-6);
    }
}
