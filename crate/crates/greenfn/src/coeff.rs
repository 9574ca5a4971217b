//! Closed-form coefficient functions.
//!
//! The operator coefficients are restricted to families that can be
//! differentiated exactly: constants, polynomials in t, scaled exponentials,
//! and sums/products of those. Exact derivatives matter because the
//! derivative-annihilating recurrence consumes derivatives of the
//! coefficients themselves; finite differencing there would contaminate the
//! operator residuals.
//!
//! Quotients arise internally when the recurrence divides by a trailing
//! coefficient. They are part of the algebra (with an exact quotient rule)
//! but not part of the JSON problem schema.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A coefficient function on a real interval, closed under exact
/// differentiation.
///
/// JSON forms accepted in problem files:
/// `{"type":"const","value":c}`, `{"type":"poly","coeffs":[c0,c1,...]}`,
/// `{"type":"exp","scale":s,"rate":r}`, `{"type":"sum","terms":[...]}`,
/// `{"type":"prod","factors":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Coefficient {
    /// Constant value.
    Const { value: f64 },
    /// Polynomial c0 + c1 t + c2 t^2 + ...
    Poly { coeffs: Vec<f64> },
    /// scale * exp(rate * t)
    Exp { scale: f64, rate: f64 },
    /// Sum of terms.
    Sum { terms: Vec<Coefficient> },
    /// Product of factors.
    Prod { factors: Vec<Coefficient> },
    /// Quotient numerator/denominator. Internal to the recurrence algebra;
    /// not expressible in problem files.
    #[serde(skip)]
    Quot {
        num: Box<Coefficient>,
        den: Box<Coefficient>,
    },
}

impl Coefficient {
    pub fn constant(value: f64) -> Self {
        Coefficient::Const { value }
    }

    pub fn zero() -> Self {
        Coefficient::Const { value: 0.0 }
    }

    pub fn one() -> Self {
        Coefficient::Const { value: 1.0 }
    }

    pub fn poly(coeffs: &[f64]) -> Self {
        Coefficient::Poly {
            coeffs: coeffs.to_vec(),
        }
    }

    pub fn exp(scale: f64, rate: f64) -> Self {
        Coefficient::Exp { scale, rate }
    }

    /// Sum with flattening and removal of structural zeros.
    pub fn sum(terms: Vec<Coefficient>) -> Self {
        let mut flat = Vec::new();
        let mut const_part = 0.0;
        for term in terms {
            match term {
                Coefficient::Sum { terms } => {
                    for t in terms {
                        match t {
                            Coefficient::Const { value } => const_part += value,
                            other if other.is_structurally_zero() => {}
                            other => flat.push(other),
                        }
                    }
                }
                Coefficient::Const { value } => const_part += value,
                other if other.is_structurally_zero() => {}
                other => flat.push(other),
            }
        }
        if const_part != 0.0 {
            flat.push(Coefficient::constant(const_part));
        }
        match flat.len() {
            0 => Coefficient::zero(),
            1 => flat.pop().unwrap(),
            _ => Coefficient::Sum { terms: flat },
        }
    }

    /// Product with flattening; any structurally zero factor collapses the
    /// whole product.
    pub fn prod(factors: Vec<Coefficient>) -> Self {
        let mut flat = Vec::new();
        let mut const_part = 1.0;
        for factor in factors {
            if factor.is_structurally_zero() {
                return Coefficient::zero();
            }
            match factor {
                Coefficient::Prod { factors } => {
                    for f in factors {
                        match f {
                            Coefficient::Const { value } => const_part *= value,
                            other => flat.push(other),
                        }
                    }
                }
                Coefficient::Const { value } => const_part *= value,
                other => flat.push(other),
            }
        }
        if const_part == 0.0 {
            return Coefficient::zero();
        }
        if const_part != 1.0 {
            flat.insert(0, Coefficient::constant(const_part));
        }
        match flat.len() {
            0 => Coefficient::one(),
            1 => flat.pop().unwrap(),
            _ => Coefficient::Prod { factors: flat },
        }
    }

    /// Quotient numerator/denominator.
    pub fn quot(num: Coefficient, den: Coefficient) -> Self {
        if num.is_structurally_zero() {
            return Coefficient::zero();
        }
        if let Some(c) = den.as_const() {
            return Coefficient::prod(vec![Coefficient::constant(1.0 / c), num]);
        }
        Coefficient::Quot {
            num: Box::new(num),
            den: Box::new(den),
        }
    }

    /// Evaluate at t.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Coefficient::Const { value } => *value,
            Coefficient::Poly { coeffs } => {
                // Horner
                coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
            Coefficient::Exp { scale, rate } => scale * (rate * t).exp(),
            Coefficient::Sum { terms } => terms.iter().map(|c| c.eval(t)).sum(),
            Coefficient::Prod { factors } => factors.iter().map(|c| c.eval(t)).product(),
            Coefficient::Quot { num, den } => num.eval(t) / den.eval(t),
        }
    }

    /// Exact first derivative.
    pub fn derivative(&self) -> Coefficient {
        match self {
            Coefficient::Const { .. } => Coefficient::zero(),
            Coefficient::Poly { coeffs } => {
                if coeffs.len() <= 1 {
                    return Coefficient::zero();
                }
                let d: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| i as f64 * c)
                    .collect();
                if d.iter().all(|&c| c == 0.0) {
                    Coefficient::zero()
                } else {
                    Coefficient::Poly { coeffs: d }
                }
            }
            Coefficient::Exp { scale, rate } => {
                if *rate == 0.0 || *scale == 0.0 {
                    Coefficient::zero()
                } else {
                    Coefficient::Exp {
                        scale: scale * rate,
                        rate: *rate,
                    }
                }
            }
            Coefficient::Sum { terms } => {
                Coefficient::sum(terms.iter().map(|c| c.derivative()).collect())
            }
            Coefficient::Prod { factors } => {
                // n-ary product rule
                let mut terms = Vec::with_capacity(factors.len());
                for i in 0..factors.len() {
                    let mut parts = Vec::with_capacity(factors.len());
                    for (j, f) in factors.iter().enumerate() {
                        if i == j {
                            parts.push(f.derivative());
                        } else {
                            parts.push(f.clone());
                        }
                    }
                    terms.push(Coefficient::prod(parts));
                }
                Coefficient::sum(terms)
            }
            Coefficient::Quot { num, den } => {
                // (f/g)' = (f'g - f g') / g^2
                let f = num.as_ref().clone();
                let g = den.as_ref().clone();
                let numerator = Coefficient::sum(vec![
                    Coefficient::prod(vec![f.derivative(), g.clone()]),
                    Coefficient::prod(vec![
                        Coefficient::constant(-1.0),
                        f,
                        g.derivative(),
                    ]),
                ]);
                Coefficient::quot(numerator, Coefficient::prod(vec![g.clone(), g]))
            }
        }
    }

    /// Exact derivative of order r (r = 0 returns a clone).
    pub fn derivative_n(&self, r: usize) -> Coefficient {
        let mut out = self.clone();
        for _ in 0..r {
            out = out.derivative();
        }
        out
    }

    /// True when the expression is zero by structure alone (no sampling).
    pub fn is_structurally_zero(&self) -> bool {
        match self {
            Coefficient::Const { value } => *value == 0.0,
            Coefficient::Poly { coeffs } => coeffs.iter().all(|&c| c == 0.0),
            Coefficient::Exp { scale, .. } => *scale == 0.0,
            Coefficient::Sum { terms } => terms.iter().all(|c| c.is_structurally_zero()),
            Coefficient::Prod { factors } => factors.iter().any(|c| c.is_structurally_zero()),
            Coefficient::Quot { num, .. } => num.is_structurally_zero(),
        }
    }

    /// Constant value when the expression is constant by structure.
    pub fn as_const(&self) -> Option<f64> {
        match self {
            Coefficient::Const { value } => Some(*value),
            Coefficient::Poly { coeffs } => match coeffs.len() {
                0 => Some(0.0),
                1 => Some(coeffs[0]),
                _ => {
                    if coeffs[1..].iter().all(|&c| c == 0.0) {
                        Some(coeffs[0])
                    } else {
                        None
                    }
                }
            },
            Coefficient::Exp { scale, rate } => {
                if *scale == 0.0 {
                    Some(0.0)
                } else if *rate == 0.0 {
                    Some(*scale)
                } else {
                    None
                }
            }
            Coefficient::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.as_const()?;
                }
                Some(acc)
            }
            Coefficient::Prod { factors } => {
                let mut acc = 1.0;
                for f in factors {
                    acc *= f.as_const()?;
                }
                Some(acc)
            }
            Coefficient::Quot { num, den } => Some(num.as_const()? / den.as_const()?),
        }
    }

    /// Whether the function is identically zero on [a, b]: structural test
    /// first, dense sampling as a fallback.
    pub fn is_zero_on(&self, a: f64, b: f64) -> bool {
        if self.is_structurally_zero() {
            return true;
        }
        if let Some(c) = self.as_const() {
            return c == 0.0;
        }
        const SAMPLES: usize = 1024;
        (0..=SAMPLES).all(|i| {
            let t = a + (b - a) * i as f64 / SAMPLES as f64;
            self.eval(t).abs() < 1e-12
        })
    }

    /// Sign-definiteness on [a, b] by dense sampling: `Some(true)` when the
    /// function never vanishes, `Some(false)` when it is identically zero,
    /// `None` when it vanishes at isolated points or changes sign.
    pub fn nonvanishing_on(&self, a: f64, b: f64) -> Option<bool> {
        if self.is_zero_on(a, b) {
            return Some(false);
        }
        const SAMPLES: usize = 1024;
        let values: Vec<f64> = (0..=SAMPLES)
            .map(|i| self.eval(a + (b - a) * i as f64 / SAMPLES as f64))
            .collect();
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let min_abs = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let sign_change = values.windows(2).any(|w| w[0] * w[1] < 0.0);
        if sign_change || min_abs < 1e-9 * max_abs.max(1.0) {
            None
        } else {
            Some(true)
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const { value } => write!(f, "{}", value),
            Coefficient::Poly { coeffs } => {
                let mut first = true;
                for (i, &c) in coeffs.iter().enumerate() {
                    if c == 0.0 && coeffs.len() > 1 {
                        continue;
                    }
                    if !first {
                        write!(f, " {} ", if c < 0.0 { "-" } else { "+" })?;
                    } else if c < 0.0 {
                        write!(f, "-")?;
                    }
                    let mag = c.abs();
                    match i {
                        0 => write!(f, "{}", mag)?,
                        1 if mag == 1.0 => write!(f, "t")?,
                        1 => write!(f, "{}*t", mag)?,
                        _ if mag == 1.0 => write!(f, "t^{}", i)?,
                        _ => write!(f, "{}*t^{}", mag, i)?,
                    }
                    first = false;
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
            Coefficient::Exp { scale, rate } => write!(f, "{}*exp({}*t)", scale, rate),
            Coefficient::Sum { terms } => {
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "({})", t)?;
                }
                Ok(())
            }
            Coefficient::Prod { factors } => {
                for (i, c) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "({})", c)?;
                }
                Ok(())
            }
            Coefficient::Quot { num, den } => write!(f, "({})/({})", num, den),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn poly_eval_and_derivative() {
        let p = Coefficient::poly(&[1.0, 0.0, 3.0]); // 1 + 3t^2
        assert_abs_diff_eq!(p.eval(2.0), 13.0);
        let d = p.derivative(); // 6t
        assert_abs_diff_eq!(d.eval(2.0), 12.0);
        // derivative of order beyond the degree is identically zero
        assert!(p.derivative_n(3).is_structurally_zero());
    }

    #[test]
    fn exp_derivative_chain() {
        let e = Coefficient::exp(2.0, -1.5);
        let d2 = e.derivative_n(2); // 2 * 1.5^2 * exp(-1.5 t)
        assert_abs_diff_eq!(d2.eval(0.3), 4.5 * (-0.45f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn quotient_rule_matches_hand_computation() {
        // (1 / (1 + t))' = -1 / (1 + t)^2
        let q = Coefficient::quot(Coefficient::one(), Coefficient::poly(&[1.0, 1.0]));
        let d = q.derivative();
        for i in 0..10 {
            let t = 0.1 * i as f64;
            assert_abs_diff_eq!(d.eval(t), -1.0 / (1.0 + t).powi(2), epsilon = 1e-13);
        }
    }

    #[test]
    fn structural_zero_detection() {
        assert!(Coefficient::poly(&[0.0, 0.0]).is_structurally_zero());
        assert!(Coefficient::prod(vec![
            Coefficient::poly(&[1.0, 2.0]),
            Coefficient::zero()
        ])
        .is_structurally_zero());
        assert!(!Coefficient::poly(&[0.0, 1.0]).is_structurally_zero());
        // t - 0.5 vanishes at an isolated point: neither zero nor nonvanishing
        assert_eq!(
            Coefficient::poly(&[-0.5, 1.0]).nonvanishing_on(0.0, 1.0),
            None
        );
        assert_eq!(
            Coefficient::poly(&[1.0, 1.0]).nonvanishing_on(0.0, 1.0),
            Some(true)
        );
    }

    #[test]
    fn json_round_trip_and_schema() {
        let json = r#"{"type":"sum","terms":[
            {"type":"const","value":2.0},
            {"type":"poly","coeffs":[0.0,1.0]},
            {"type":"prod","factors":[{"type":"exp","scale":1.0,"rate":-1.0},
                                      {"type":"poly","coeffs":[1.0,1.0]}]}]}"#;
        let c: Coefficient = serde_json::from_str(json).unwrap();
        let t = 0.7;
        assert_abs_diff_eq!(
            c.eval(t),
            2.0 + t + (-t).exp() * (1.0 + t),
            epsilon = 1e-14
        );
        let back = serde_json::to_string(&c).unwrap();
        let c2: Coefficient = serde_json::from_str(&back).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn unknown_family_rejected() {
        let bad = r#"{"type":"spline","knots":[0.0,1.0]}"#;
        assert!(serde_json::from_str::<Coefficient>(bad).is_err());
        let extra = r#"{"type":"const","value":1.0,"stray":3}"#;
        assert!(serde_json::from_str::<Coefficient>(extra).is_err());
    }

    fn arb_coeff(depth: u32) -> BoxedStrategy<Coefficient> {
        let leaf = prop_oneof![
            (-3.0..3.0f64).prop_map(Coefficient::constant),
            proptest::collection::vec(-2.0..2.0f64, 1..4)
                .prop_map(|c| Coefficient::Poly { coeffs: c }),
            ((-2.0..2.0f64), (-2.0..2.0f64))
                .prop_map(|(s, r)| Coefficient::exp(s, r)),
        ];
        if depth == 0 {
            leaf.boxed()
        } else {
            prop_oneof![
                leaf,
                proptest::collection::vec(arb_coeff(depth - 1), 1..3)
                    .prop_map(|t| Coefficient::Sum { terms: t }),
                proptest::collection::vec(arb_coeff(depth - 1), 1..3)
                    .prop_map(|f| Coefficient::Prod { factors: f }),
            ]
            .boxed()
        }
    }

    proptest! {
        // Exact derivative must agree with a central difference of the
        // evaluation, which exercises every family's calculus at once.
        #[test]
        fn derivative_matches_finite_difference(c in arb_coeff(2), t in 0.1..0.9f64) {
            let h = 1e-5;
            let fd = (c.eval(t + h) - c.eval(t - h)) / (2.0 * h);
            let exact = c.derivative().eval(t);
            let scale = 1.0 + fd.abs().max(exact.abs());
            prop_assert!((fd - exact).abs() <= 1e-6 * scale);
        }
    }
}
