//! Problem description: the n-th order operator with a spectral-type
//! parameter attached to one derivative order, plus two-point boundary
//! functionals.
//!
//! The operator acting on u is
//!
//! ```text
//! T u = u^(n) + a_1(t) u^(n-1) + ... + a_n(t) u + M u^(k)
//! ```
//!
//! and the boundary functionals combine derivative values at both endpoints:
//!
//! ```text
//! B_i(u) = sum_j ( alpha[i][j] u^(j)(a) + beta[i][j] u^(j)(b) ),  j = 0..n-1.
//! ```

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Full description of one boundary value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BvpSpec {
    order: usize,
    interval: (f64, f64),
    /// a_1 .. a_n; index 0 holds a_1, the coefficient of u^(n-1).
    coeffs: Vec<Coefficient>,
    /// Derivative order multiplied by the parameter, 0 <= shift <= order-1.
    shift: usize,
    /// The real parameter M.
    param: f64,
    /// alpha[(i, j)] weights u^(j) at the left endpoint in B_i.
    alpha: DMatrix<f64>,
    /// beta[(i, j)] weights u^(j) at the right endpoint in B_i.
    beta: DMatrix<f64>,
}

impl BvpSpec {
    pub fn new(
        order: usize,
        interval: (f64, f64),
        coeffs: Vec<Coefficient>,
        shift: usize,
        param: f64,
        alpha: DMatrix<f64>,
        beta: DMatrix<f64>,
    ) -> Result<Self> {
        let (a, b) = interval;
        if order == 0 {
            return Err(Error::InvalidSpec("order must be at least 1".into()));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidSpec(format!(
                "interval must satisfy a < b with finite endpoints, got [{a}, {b}]"
            )));
        }
        if coeffs.len() != order {
            return Err(Error::InvalidSpec(format!(
                "expected {} coefficients a_1..a_{}, got {}",
                order,
                order,
                coeffs.len()
            )));
        }
        if shift >= order {
            return Err(Error::InvalidSpec(format!(
                "shift order k = {shift} must lie in 0..{}",
                order - 1
            )));
        }
        if !param.is_finite() {
            return Err(Error::InvalidSpec("parameter must be finite".into()));
        }
        for (name, m) in [("alpha", &alpha), ("beta", &beta)] {
            if m.nrows() != order || m.ncols() != order {
                return Err(Error::InvalidSpec(format!(
                    "{name} must be {order}x{order}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        for i in 0..order {
            let row_zero = (0..order).all(|j| alpha[(i, j)] == 0.0 && beta[(i, j)] == 0.0);
            if row_zero {
                return Err(Error::InvalidSpec(format!(
                    "boundary row {i} of [alpha | beta] is identically zero"
                )));
            }
        }
        Ok(BvpSpec {
            order,
            interval,
            coeffs,
            shift,
            param,
            alpha,
            beta,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    pub fn alpha(&self) -> &DMatrix<f64> {
        &self.alpha
    }

    pub fn beta(&self) -> &DMatrix<f64> {
        &self.beta
    }

    /// Coefficient a_j for j in 1..=n.
    pub fn coeff(&self, j: usize) -> &Coefficient {
        &self.coeffs[j - 1]
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    /// Same problem with a different parameter value.
    pub fn with_param(&self, param: f64) -> Self {
        let mut out = self.clone();
        out.param = param;
        out
    }

    /// True when the two specs describe the same problem up to the parameter.
    pub fn same_family(&self, other: &Self) -> bool {
        self.order == other.order
            && self.interval == other.interval
            && self.shift == other.shift
            && self.coeffs == other.coeffs
            && self.alpha == other.alpha
            && self.beta == other.beta
    }

    /// Effective coefficient of u^(n-j) with the parameter folded in:
    /// the parameter multiplies u^(shift), which is position j = n - shift.
    pub fn effective_coeff(&self, j: usize) -> Coefficient {
        let base = self.coeff(j).clone();
        if j == self.order - self.shift {
            Coefficient::sum(vec![base, Coefficient::constant(self.param)])
        } else {
            base
        }
    }

    /// All effective coefficients, index 0 holding position j = 1.
    pub fn effective_coeffs(&self) -> Vec<Coefficient> {
        (1..=self.order).map(|j| self.effective_coeff(j)).collect()
    }

    /// True when every effective coefficient is constant.
    pub fn has_constant_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_const().is_some())
    }

    /// Apply the full operator to a derivative stack at t:
    /// `derivs[j]` holds u^(j)(t) for j = 0..=n.
    pub fn apply_operator(&self, derivs: &[f64], t: f64) -> Result<f64> {
        let n = self.order;
        let (a, b) = self.interval;
        if !(a..=b).contains(&t) {
            return Err(Error::OutOfInterval { t, a, b });
        }
        if derivs.len() != n + 1 {
            return Err(Error::InvalidSpec(format!(
                "derivative stack must hold orders 0..={}, got {} entries",
                n,
                derivs.len()
            )));
        }
        let mut acc = derivs[n];
        for j in 1..=n {
            acc += self.coeff(j).eval(t) * derivs[n - j];
        }
        acc += self.param * derivs[self.shift];
        Ok(acc)
    }

    /// Apply every boundary functional to a solution whose derivative stacks
    /// at the endpoints are `at_a[j] = u^(j)(a)` and `at_b[j] = u^(j)(b)`.
    pub fn boundary_values(&self, at_a: &DVector<f64>, at_b: &DVector<f64>) -> DVector<f64> {
        &self.alpha * at_a + &self.beta * at_b
    }
}

/// Boundary matrices for common condition sets on problems of order 2.
pub mod boundary {
    use nalgebra::DMatrix;

    /// u(a) = 0, u(b) = 0.
    pub fn dirichlet() -> (DMatrix<f64>, DMatrix<f64>) {
        let alpha = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let beta = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        (alpha, beta)
    }

    /// u(a) = 0, u'(b) = 0.
    pub fn mixed() -> (DMatrix<f64>, DMatrix<f64>) {
        let alpha = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let beta = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        (alpha, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mixed_spec(shift: usize, param: f64) -> BvpSpec {
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
    fn operator_on_cosine_stack_is_zero() {
        // u = cos t solves u'' + u = 0; the stack at any t is (u, u', u'').
        let spec = mixed_spec(0, 1.0);
        let t = 0.5f64;
        let v = spec
            .apply_operator(&[t.cos(), -t.sin(), -t.cos()], t)
            .unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        // the spec example uses the stack (1, 0, -1)
        let v = spec.apply_operator(&[1.0, 0.0, -1.0], 0.5).unwrap();
        assert_abs_diff_eq!(v, 0.0);
    }

    #[test]
    fn operator_with_shifted_parameter() {
        let spec = mixed_spec(1, 3.0);
        let v = spec.apply_operator(&[5.0, 2.0, 4.0], 0.3).unwrap();
        assert_abs_diff_eq!(v, 10.0);
    }

    #[test]
    fn operator_with_variable_coefficient() {
        let (alpha, beta) = boundary::mixed();
        let spec = BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::zero(), Coefficient::poly(&[1.0, 1.0])],
            0,
            0.0,
            alpha,
            beta,
        )
        .unwrap();
        let v = spec.apply_operator(&[1.0, 0.0, 0.0], 0.25).unwrap();
        assert_abs_diff_eq!(v, 1.25);
    }

    #[test]
    fn rejects_out_of_interval_and_bad_stack() {
        let spec = mixed_spec(0, 1.0);
        assert!(matches!(
            spec.apply_operator(&[1.0, 0.0, -1.0], 1.5),
            Err(Error::OutOfInterval { .. })
        ));
        assert!(spec.apply_operator(&[1.0, 0.0], 0.5).is_err());
    }

    #[test]
    fn validation_rejects_degenerate_specs() {
        let (alpha, beta) = boundary::mixed();
        // reversed interval
        assert!(BvpSpec::new(
            2,
            (1.0, 0.0),
            vec![Coefficient::zero(), Coefficient::zero()],
            0,
            0.0,
            alpha.clone(),
            beta.clone(),
        )
        .is_err());
        // shift out of range
        assert!(BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::zero(), Coefficient::zero()],
            2,
            0.0,
            alpha.clone(),
            beta.clone(),
        )
        .is_err());
        // all-zero boundary row
        let zero = DMatrix::zeros(2, 2);
        assert!(BvpSpec::new(
            2,
            (0.0, 1.0),
            vec![Coefficient::zero(), Coefficient::zero()],
            0,
            0.0,
            zero.clone(),
            zero,
        )
        .is_err());
    }

    #[test]
    fn parameter_folds_into_position_n_minus_k() {
        // k = 0: the parameter lands on the coefficient of u (position n)
        let spec = mixed_spec(0, 2.5);
        assert_abs_diff_eq!(spec.effective_coeff(2).eval(0.3), 2.5);
        assert!(spec.effective_coeff(1).is_structurally_zero());
        // k = 1: it lands on the coefficient of u' (position n-1)
        let spec = mixed_spec(1, 2.5);
        assert_abs_diff_eq!(spec.effective_coeff(1).eval(0.3), 2.5);
        assert!(spec.effective_coeff(2).is_structurally_zero());
    }
}
