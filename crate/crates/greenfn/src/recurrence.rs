//! The derivative-annihilating operator.
//!
//! The l-th t-derivative of the kernel solves, off the diagonal, an n-th
//! order homogeneous equation whose coefficients come from a recurrence on
//! the original coefficients. Level 0 is the operator itself (with the
//! parameter folded in); each level differentiates the equation once and
//! eliminates the undifferentiated unknown, which requires the trailing
//! coefficient of the previous level to be either identically zero or
//! nowhere zero on the interval. Coefficients stay in the exact closed-form
//! algebra throughout, so no finite differencing enters the recurrence.

use crate::bvp::BvpSpec;
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::green::{GreenFunction, Side};

/// Which recurrence case applied at a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchCase {
    /// Trailing coefficient identically zero: plain derivative update.
    ZeroTail,
    /// Trailing coefficient nowhere zero: quotient-rule update.
    NonzeroTail,
}

/// Where the parameter enters the level-0 coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParamPlacement {
    /// On the coefficient of u^(shift), i.e. position n - shift. This is
    /// what the operator definition dictates.
    #[default]
    OperatorOrder,
    /// On the coefficient at position equal to the shift index itself. Kept
    /// selectable for experimentation; not used by the default build.
    LiteralIndex,
}

/// n-th order operator annihilating the level-th t-derivative of the kernel
/// off the diagonal.
#[derive(Debug, Clone)]
pub struct AnnihilatorOp {
    order: usize,
    level: usize,
    /// b_1 .. b_n; index j-1 multiplies u^(n-j). The leading coefficient is
    /// identically one at every level.
    coeffs: Vec<Coefficient>,
    branches: Vec<BranchCase>,
}

impl AnnihilatorOp {
    /// Run the recurrence up to the requested level with the parameter
    /// placed per the operator definition.
    pub fn build(spec: &BvpSpec, level: usize) -> Result<Self> {
        Self::build_with_placement(spec, level, ParamPlacement::OperatorOrder)
    }

    pub fn build_with_placement(
        spec: &BvpSpec,
        level: usize,
        placement: ParamPlacement,
    ) -> Result<Self> {
        let n = spec.order();
        if level >= n {
            return Err(Error::UnsupportedOrder {
                order: level,
                max: n.saturating_sub(1),
            });
        }
        let (a, b) = spec.interval();

        // level 0: the operator coefficients with the parameter folded in
        let mut coeffs: Vec<Coefficient> = match placement {
            ParamPlacement::OperatorOrder => spec.effective_coeffs(),
            ParamPlacement::LiteralIndex => {
                let mut cs: Vec<Coefficient> =
                    (1..=n).map(|j| spec.coeff(j).clone()).collect();
                let k = spec.shift();
                if k >= 1 {
                    cs[k - 1] = Coefficient::sum(vec![
                        cs[k - 1].clone(),
                        Coefficient::constant(spec.param()),
                    ]);
                } else {
                    // index 0 names the leading coefficient, which is pinned
                    // to one; the literal reading has nowhere to put M here
                    return Err(Error::RecurrenceHypothesis {
                        level: 0,
                        reason: "literal index placement undefined for shift 0".into(),
                    });
                }
                cs
            }
        };

        let mut branches = Vec::with_capacity(level);
        for r in 1..=level {
            let tail = &coeffs[n - 1];
            let case = if tail.is_zero_on(a, b) {
                BranchCase::ZeroTail
            } else if tail.nonvanishing_on(a, b) == Some(true) {
                BranchCase::NonzeroTail
            } else {
                return Err(Error::RecurrenceHypothesis {
                    level: r,
                    reason: format!(
                        "trailing coefficient b_{},{} vanishes at isolated points \
                         or changes sign on [{a}, {b}]",
                        n,
                        r - 1
                    ),
                });
            };

            // previous-level coefficients including b_0 = 1 at the front
            let mut prev = Vec::with_capacity(n + 1);
            prev.push(Coefficient::one());
            prev.extend(coeffs.iter().cloned());

            let next: Vec<Coefficient> = match case {
                BranchCase::ZeroTail => (1..=n)
                    .map(|j| {
                        Coefficient::sum(vec![prev[j].clone(), prev[j - 1].derivative()])
                    })
                    .collect(),
                BranchCase::NonzeroTail => {
                    // the dichotomy at the next level is decided by whether
                    // (b_{n-1}/b_n)' is identically -1 or never -1
                    let tail = prev[n].clone();
                    let ratio_deriv = Coefficient::quot(prev[n - 1].clone(), tail.clone())
                        .derivative();
                    let shifted = Coefficient::sum(vec![
                        ratio_deriv.clone(),
                        Coefficient::one(),
                    ]);
                    if !shifted.is_zero_on(a, b) && shifted.nonvanishing_on(a, b) != Some(true)
                    {
                        return Err(Error::RecurrenceHypothesis {
                            level: r,
                            reason: format!(
                                "(b_{},{}/b_{},{})' is neither identically -1 nor \
                                 everywhere different from -1",
                                n - 1,
                                r - 1,
                                n,
                                r - 1
                            ),
                        });
                    }
                    (1..=n)
                        .map(|j| {
                            let update = Coefficient::prod(vec![
                                tail.clone(),
                                Coefficient::quot(prev[j - 1].clone(), tail.clone())
                                    .derivative(),
                            ]);
                            Coefficient::sum(vec![prev[j].clone(), update])
                        })
                        .collect()
                }
            };
            branches.push(case);
            coeffs = next;
        }

        Ok(AnnihilatorOp {
            order: n,
            level,
            coeffs,
            branches,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Coefficient b_j for j in 1..=n (multiplying u^(n-j)).
    pub fn coefficient(&self, j: usize) -> &Coefficient {
        &self.coeffs[j - 1]
    }

    pub fn branches(&self) -> &[BranchCase] {
        &self.branches
    }

    /// Apply the operator to a derivative stack: derivs[m] holds u^(m)(t)
    /// for m = 0..=n.
    pub fn apply(&self, derivs: &[f64], t: f64) -> f64 {
        let n = self.order;
        let mut acc = derivs[n];
        for j in 1..=n {
            acc += self.coeffs[j - 1].eval(t) * derivs[n - j];
        }
        acc
    }

    /// Residual of the operator applied to the level-th t-derivative of the
    /// kernel at (t, s), t != s. Kernel derivatives up to order n + level
    /// are recovered by algebraic differentiation of the equation.
    pub fn residual(&self, g: &GreenFunction, t: f64, s: f64) -> Result<f64> {
        if t == s {
            return Err(Error::DiagonalSide {
                t,
                order: self.level + self.order,
            });
        }
        let side = if t < s { Side::Below } else { Side::Above };
        let stack = g.derivative_stack(t, s, side, self.order + self.level)?;
        let derivs: Vec<f64> = stack[self.level..=self.level + self.order].to_vec();
        Ok(self.apply(&derivs, t))
    }

    /// Human-readable rendering, one line per coefficient.
    pub fn pretty(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let n = self.order;
        let _ = writeln!(
            out,
            "H_{} u = u^({}){}",
            self.level,
            n,
            if n > 0 { " + ..." } else { "" }
        );
        for j in 1..=n {
            let _ = writeln!(
                out,
                "  b[{j}] (coefficient of u^({})): {}",
                n - j,
                self.coeffs[j - 1]
            );
        }
        let _ = writeln!(
            out,
            "  branch cases per level: {:?}",
            self.branches
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::boundary;
    use crate::grid::TsGrid;
    use crate::oracles;
    use approx::assert_abs_diff_eq;

    const TOL: f64 = 1e-10;

    fn variable_spec() -> BvpSpec {
        // u'' + (1 + t) u = 0 with mixed conditions
        let (alpha, beta) = boundary::mixed();
        BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::zero(), Coefficient::poly(&[1.0, 1.0])],
            0,
            0.0,
            alpha,
            beta,
        )
        .unwrap()
    }

    #[test]
    fn level_zero_is_the_operator_verbatim() {
        let spec = oracles::mixed_k0_spec(3.0);
        let h0 = AnnihilatorOp::build(&spec, 0).unwrap();
        for t in [0.1, 0.5, 0.9] {
            let derivs = [1.3, -0.2, 0.7];
            assert_eq!(
                h0.apply(&derivs, t),
                spec.apply_operator(&derivs, t).unwrap()
            );
        }
        assert!(h0.branches().is_empty());
    }

    #[test]
    fn constant_coefficients_collapse() {
        // every level reproduces the original coefficients, so the operator
        // evaluates bit-for-bit like level zero
        let spec = oracles::mixed_k0_spec(2.0);
        let h0 = AnnihilatorOp::build(&spec, 0).unwrap();
        let h1 = AnnihilatorOp::build(&spec, 1).unwrap();
        for j in 1..=2 {
            assert_eq!(
                h1.coefficient(j).as_const(),
                h0.coefficient(j).as_const()
            );
        }
        let derivs = [0.3, -1.1, 0.9];
        for t in [0.2, 0.8] {
            assert_eq!(h1.apply(&derivs, t), h0.apply(&derivs, t));
        }
        // shifted-parameter constant case collapses too
        let spec = oracles::mixed_k1_spec(4.0);
        let h1 = AnnihilatorOp::build(&spec, 1).unwrap();
        assert_eq!(h1.coefficient(1).as_const(), Some(4.0));
        assert_eq!(h1.coefficient(2).as_const(), Some(0.0));
    }

    #[test]
    fn variable_coefficient_level_one_matches_hand_derivation() {
        // u'' + (1+t) u = 0 differentiated once, eliminating u:
        // v'' - v'/(1+t) + (1+t) v = 0 for v = u'
        let spec = variable_spec();
        let h1 = AnnihilatorOp::build(&spec, 1).unwrap();
        assert_eq!(h1.branches(), &[BranchCase::NonzeroTail]);
        for i in 0..100 {
            let t = i as f64 / 99.0;
            assert_abs_diff_eq!(
                h1.coefficient(1).eval(t),
                -1.0 / (1.0 + t),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(h1.coefficient(2).eval(t), 1.0 + t, epsilon = 1e-12);
        }
    }

    #[test]
    fn residual_vanishes_for_constant_coefficient_kernel() {
        let spec = oracles::mixed_k0_spec(1.0);
        let g = GreenFunction::build(spec.clone(), TOL).unwrap();
        let h1 = AnnihilatorOp::build(&spec, 1).unwrap();
        let h0 = AnnihilatorOp::build(&spec, 0).unwrap();
        for (t, s) in TsGrid::staggered((0.0, 1.0), 20, 20).points() {
            let r1 = h1.residual(&g, t, s).unwrap();
            assert!(r1.abs() <= 1e-6, "H_1 at ({t},{s}): {r1}");
            let r0 = h0.residual(&g, t, s).unwrap();
            assert!(r0.abs() <= 1e-7, "H_0 at ({t},{s}): {r0}");
        }
    }

    #[test]
    fn residual_vanishes_for_variable_coefficient_kernel() {
        let spec = variable_spec();
        let g = GreenFunction::build(spec.clone(), TOL).unwrap();
        let h1 = AnnihilatorOp::build(&spec, 1).unwrap();
        for (t, s) in TsGrid::staggered((0.0, 1.0), 20, 20).points() {
            let r = h1.residual(&g, t, s).unwrap();
            assert!(r.abs() <= 1e-6, "({t},{s}): {r}");
        }
    }

    #[test]
    fn zero_tail_branch_from_ratio_derivative_minus_one() {
        // a_1 = -t, a_2 = 1: (a_1/a_2)' = -1 everywhere, so the next level
        // has an identically zero trailing coefficient
        let (alpha, beta) = boundary::mixed();
        let spec = BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::poly(&[0.0, -1.0]), Coefficient::one()],
            0,
            0.0,
            alpha,
            beta,
        )
        .unwrap();
        let h1 = AnnihilatorOp::build(&spec, 1).unwrap();
        assert_eq!(h1.branches(), &[BranchCase::NonzeroTail]);
        let (a, b) = spec.interval();
        assert!(h1.coefficient(2).is_zero_on(a, b));
        // and b_1 stays -t
        for t in [0.0, 0.4, 1.0] {
            assert_abs_diff_eq!(h1.coefficient(1).eval(t), -t, epsilon = 1e-13);
        }
    }

    #[test]
    fn branch_consistency_nonzero_case() {
        // (b_1/b_2)' != -1 everywhere implies the next trailing coefficient
        // has no zero on the interval
        let spec = variable_spec();
        let h1 = AnnihilatorOp::build(&spec, 1).unwrap();
        let (a, b) = spec.interval();
        assert_eq!(
            h1.coefficient(2).nonvanishing_on(a, b),
            Some(true)
        );
    }

    #[test]
    fn hypothesis_violations_are_named() {
        let (alpha, beta) = boundary::mixed();
        // trailing coefficient t - 1/2 vanishes inside the interval
        let spec = BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::zero(), Coefficient::poly(&[-0.5, 1.0])],
            0,
            0.0,
            alpha.clone(),
            beta.clone(),
        )
        .unwrap();
        match AnnihilatorOp::build(&spec, 1) {
            Err(Error::RecurrenceHypothesis { level, .. }) => assert_eq!(level, 1),
            other => panic!("expected hypothesis error, got {other:?}"),
        }
        // (a_1/a_2)' = -t equals -1 only at t = 1: the mixed condition fails
        let spec = BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![
                Coefficient::poly(&[0.0, 0.0, -0.5]),
                Coefficient::one(),
            ],
            0,
            0.0,
            alpha,
            beta,
        )
        .unwrap();
        match AnnihilatorOp::build(&spec, 1) {
            Err(Error::RecurrenceHypothesis { level, .. }) => assert_eq!(level, 1),
            other => panic!("expected hypothesis error, got {other:?}"),
        }
    }

    #[test]
    fn level_bounds_respected() {
        let spec = oracles::mixed_k0_spec(0.0);
        assert!(AnnihilatorOp::build(&spec, 2).is_err());
        // first-order problems reject any level past zero
        let alpha = nalgebra::DMatrix::from_row_slice(1, 1, &[1.0]);
        let beta = nalgebra::DMatrix::from_row_slice(1, 1, &[-1.0]);
        let spec1 = BvpSpec::new(
            1,
            (0.0, 1.0),
            vec![Coefficient::zero()],
            0,
            1.0,
            alpha,
            beta,
        )
        .unwrap();
        assert!(AnnihilatorOp::build(&spec1, 1).is_err());
        assert!(AnnihilatorOp::build(&spec1, 0).is_ok());
    }

    #[test]
    fn smoothness_bookkeeping_for_polynomials() {
        // building level n-1 for polynomial coefficients of degree d only
        // requests derivatives of orders that exist; degree-2 coefficients
        // at order 3, level 2
        let alpha = nalgebra::DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        );
        let beta = nalgebra::DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        );
        let spec = BvpSpec::new(
            3,
            (0.0, 1.0),
            vec![
                Coefficient::poly(&[1.0, 0.5, 0.25]),
                Coefficient::zero(),
                Coefficient::poly(&[2.0, 1.0]),
            ],
            0,
            0.5,
            alpha,
            beta,
        )
        .unwrap();
        let h2 = AnnihilatorOp::build(&spec, 2).unwrap();
        assert_eq!(h2.branches().len(), 2);
        // coefficients stay finite and evaluable across the interval
        for j in 1..=3 {
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                assert!(h2.coefficient(j).eval(t).is_finite());
            }
        }
    }

    #[test]
    fn literal_placement_differs_from_operator_placement() {
        let spec = oracles::mixed_k1_spec(3.0);
        let op = AnnihilatorOp::build(&spec, 0).unwrap();
        let lit =
            AnnihilatorOp::build_with_placement(&spec, 0, ParamPlacement::LiteralIndex)
                .unwrap();
        // operator convention adds M at position n - k = 1; the literal
        // reading also lands at index k = 1 here, so for n = 2, k = 1 the
        // two coincide
        assert_eq!(op.coefficient(1).as_const(), lit.coefficient(1).as_const());
        // for k = 0 the literal reading is rejected
        let spec0 = oracles::mixed_k0_spec(3.0);
        assert!(AnnihilatorOp::build_with_placement(
            &spec0,
            0,
            ParamPlacement::LiteralIndex
        )
        .is_err());
    }

    #[test]
    fn pretty_output_names_the_coefficients() {
        let h1 = AnnihilatorOp::build(&variable_spec(), 1).unwrap();
        let text = h1.pretty();
        assert!(text.contains("b[1]"));
        assert!(text.contains("b[2]"));
    }
}
