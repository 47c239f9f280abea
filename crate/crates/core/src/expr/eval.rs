use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

use super::{Expr, HalfInteger, Kind, Var};

/// A point in the polarized coordinate space; `x₊` and `x₋` are independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub x_plus: Complex64,
    pub x_minus: Complex64,
}

impl EvalPoint {
    pub fn new(x_plus: Complex64, x_minus: Complex64) -> Self {
        EvalPoint { x_plus, x_minus }
    }

    /// The physical slice `x₋ = conj(x₊)` with `x₊ = x + iy`.
    pub fn real_slice(x: f64, y: f64) -> Self {
        let z = Complex64::new(x, y);
        EvalPoint::new(z, z.conj())
    }

    pub fn get(&self, v: Var) -> Complex64 {
        match v {
            Var::Plus => self.x_plus,
            Var::Minus => self.x_minus,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("singular point: divisor or log argument of magnitude {magnitude:e} in `{subtree}`")]
    Singular { subtree: String, magnitude: f64 },
    #[error("non-finite value in `{subtree}`")]
    NonFinite { subtree: String },
}

pub(crate) fn pow_value(base: Complex64, exponent: HalfInteger) -> Complex64 {
    if exponent.is_integer() {
        base.powi(exponent.twice() / 2)
    } else {
        base.sqrt().powi(exponent.twice())
    }
}

/// Memoizing evaluator for one point.
///
/// Shared subexpressions are evaluated once; the cache pins the nodes it
/// has seen so identities stay valid for the evaluator's lifetime.
pub struct Evaluator {
    point: EvalPoint,
    guard: f64,
    cache: HashMap<usize, (Expr, Complex64)>,
}

impl Evaluator {
    pub fn new(point: EvalPoint) -> Self {
        Self::with_guard(point, 0.0)
    }

    /// Divisors and log arguments with magnitude `<= guard` are rejected.
    pub fn with_guard(point: EvalPoint, guard: f64) -> Self {
        Evaluator {
            point,
            guard,
            cache: HashMap::new(),
        }
    }

    pub fn point(&self) -> EvalPoint {
        self.point
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Complex64, EvalError> {
        if let Some((_, v)) = self.cache.get(&e.node_id()) {
            return Ok(*v);
        }
        let value = match e.kind() {
            Kind::Const(c) => *c,
            Kind::Var(v) => self.point.get(*v),
            Kind::Sum(xs) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in xs {
                    acc += self.eval(x)?;
                }
                acc
            }
            Kind::Product(xs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for x in xs {
                    acc *= self.eval(x)?;
                }
                acc
            }
            Kind::Neg(x) => -self.eval(x)?,
            Kind::Pow(x, n) => {
                let b = self.eval(x)?;
                if n.is_negative() || !n.is_integer() {
                    self.check_divisor(x, b)?;
                }
                pow_value(b, *n)
            }
            Kind::Ln(x) => {
                let b = self.eval(x)?;
                self.check_divisor(x, b)?;
                b.ln()
            }
        };
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(EvalError::NonFinite {
                subtree: e.display_limited(120),
            });
        }
        self.cache.insert(e.node_id(), (e.clone(), value));
        Ok(value)
    }

    fn check_divisor(&self, x: &Expr, b: Complex64) -> Result<(), EvalError> {
        let magnitude = b.norm();
        if magnitude <= self.guard || magnitude == 0.0 {
            return Err(EvalError::Singular {
                subtree: x.display_limited(120),
                magnitude,
            });
        }
        Ok(())
    }
}
