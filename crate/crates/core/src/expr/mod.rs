//! Symbolic scalar expressions in two independent complex variables.
//!
//! `x₊` and `x₋` are treated as independent (polarized) coordinates, so an
//! expression such as `x₊ x₋` is a polynomial in two variables rather than
//! `|x|²`. Structural conjugation swaps the variables and conjugates constants.
//!
//! Expressions are immutable DAGs: nodes are reference counted and shared,
//! and each node memoizes its two partial derivatives and its conjugate, so
//! repeated differentiation of large shared structures stays linear in the
//! number of distinct nodes. The only simplification performed is constant
//! folding (including dropping additive zeros and multiplicative ones).

mod eval;
mod parse;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

pub use eval::{EvalError, EvalPoint, Evaluator};
pub use parse::{parse, ParseError, ParseErrorKind};

/// One of the two independent coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Plus,
    Minus,
}

impl Var {
    pub fn partner(self) -> Var {
        match self {
            Var::Plus => Var::Minus,
            Var::Minus => Var::Plus,
        }
    }

    fn bit(self) -> u8 {
        match self {
            Var::Plus => 1,
            Var::Minus => 2,
        }
    }
}

/// An integer or half-integer exponent, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfInteger(i32);

impl HalfInteger {
    pub const fn int(n: i32) -> Self {
        HalfInteger(2 * n)
    }

    /// `n / 2`.
    pub const fn halves(n: i32) -> Self {
        HalfInteger(n)
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        HalfInteger(self.0 + rhs.0)
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        HalfInteger(self.0 - rhs.0)
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        HalfInteger(-self.0)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "({}/2)", self.0)
        }
    }
}

#[derive(Debug)]
pub enum Kind {
    Const(Complex64),
    Var(Var),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Neg(Expr),
    Pow(Expr, HalfInteger),
    Ln(Expr),
}

struct Node {
    kind: Kind,
    /// Bit 0: depends on x₊, bit 1: depends on x₋.
    deps: u8,
    d_plus: OnceLock<Expr>,
    d_minus: OnceLock<Expr>,
    conj: OnceLock<Expr>,
}

/// A shared, immutable expression node.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self.display_limited(400))
    }
}

impl Expr {
    fn from_kind(kind: Kind) -> Expr {
        let deps = match &kind {
            Kind::Const(_) => 0,
            Kind::Var(v) => v.bit(),
            Kind::Sum(xs) | Kind::Product(xs) => xs.iter().fold(0, |acc, x| acc | x.0.deps),
            Kind::Neg(x) | Kind::Pow(x, _) | Kind::Ln(x) => x.0.deps,
        };
        Expr(Arc::new(Node {
            kind,
            deps,
            d_plus: OnceLock::new(),
            d_minus: OnceLock::new(),
            conj: OnceLock::new(),
        }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub(crate) fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(c: impl Into<Complex64>) -> Expr {
        Expr::from_kind(Kind::Const(c.into()))
    }

    pub fn real(x: f64) -> Expr {
        Expr::constant(Complex64::new(x, 0.0))
    }

    pub fn zero() -> Expr {
        Expr::real(0.0)
    }

    pub fn one() -> Expr {
        Expr::real(1.0)
    }

    pub fn i() -> Expr {
        Expr::constant(Complex64::i())
    }

    pub fn var(v: Var) -> Expr {
        Expr::from_kind(Kind::Var(v))
    }

    pub fn x_plus() -> Expr {
        Expr::var(Var::Plus)
    }

    pub fn x_minus() -> Expr {
        Expr::var(Var::Minus)
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self.kind() {
            Kind::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// True when the node is the literal constant zero.
    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex64::new(0.0, 0.0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(Complex64::new(1.0, 0.0))
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.0.deps & v.bit() != 0
    }

    /// Sum with constant folding: zeros vanish, constants merge.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Complex64::new(0.0, 0.0);
        let mut rest = Vec::new();
        for t in terms {
            match t.kind() {
                Kind::Const(c) => constant += c,
                _ => rest.push(t),
            }
        }
        if constant != Complex64::new(0.0, 0.0) {
            rest.push(Expr::constant(constant));
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Expr::from_kind(Kind::Sum(rest)),
        }
    }

    /// Product with constant folding: any zero annihilates, ones vanish.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut constant = Complex64::new(1.0, 0.0);
        let mut rest = Vec::new();
        for f in factors {
            match f.kind() {
                Kind::Const(c) => {
                    if *c == Complex64::new(0.0, 0.0) {
                        return Expr::zero();
                    }
                    constant *= c;
                }
                _ => rest.push(f),
            }
        }
        if rest.is_empty() {
            return Expr::constant(constant);
        }
        if constant == Complex64::new(-1.0, 0.0) {
            let inner = if rest.len() == 1 {
                rest.pop().unwrap()
            } else {
                Expr::from_kind(Kind::Product(rest))
            };
            return -inner;
        }
        if constant != Complex64::new(1.0, 0.0) {
            rest.insert(0, Expr::constant(constant));
        }
        match rest.len() {
            1 => rest.pop().unwrap(),
            _ => Expr::from_kind(Kind::Product(rest)),
        }
    }

    pub fn pow(&self, exponent: HalfInteger) -> Expr {
        if exponent.twice() == 0 {
            return Expr::one();
        }
        if exponent == HalfInteger::int(1) {
            return self.clone();
        }
        if let Some(c) = self.as_const() {
            if c != Complex64::new(0.0, 0.0) {
                return Expr::constant(eval::pow_value(c, exponent));
            }
            if !exponent.is_negative() {
                return Expr::zero();
            }
        }
        Expr::from_kind(Kind::Pow(self.clone(), exponent))
    }

    pub fn powi(&self, n: i32) -> Expr {
        self.pow(HalfInteger::int(n))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn ln(&self) -> Expr {
        if let Some(c) = self.as_const() {
            if c != Complex64::new(0.0, 0.0) {
                return Expr::constant(c.ln());
            }
        }
        Expr::from_kind(Kind::Ln(self.clone()))
    }

    /// Exact partial derivative with respect to `v`.
    pub fn differentiate(&self, v: Var) -> Expr {
        if !self.depends_on(v) {
            return Expr::zero();
        }
        let cell = match v {
            Var::Plus => &self.0.d_plus,
            Var::Minus => &self.0.d_minus,
        };
        cell.get_or_init(|| self.derive_uncached(v)).clone()
    }

    fn derive_uncached(&self, v: Var) -> Expr {
        match self.kind() {
            Kind::Const(_) => Expr::zero(),
            Kind::Var(w) => {
                if *w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Kind::Sum(terms) => Expr::sum(terms.iter().map(|t| t.differentiate(v))),
            Kind::Product(factors) => {
                let mut terms = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    if !f.depends_on(v) {
                        continue;
                    }
                    let mut parts: Vec<Expr> = Vec::with_capacity(factors.len());
                    for (j, g) in factors.iter().enumerate() {
                        if i == j {
                            parts.push(f.differentiate(v));
                        } else {
                            parts.push(g.clone());
                        }
                    }
                    terms.push(Expr::product(parts));
                }
                Expr::sum(terms)
            }
            Kind::Neg(x) => -x.differentiate(v),
            Kind::Pow(base, n) => {
                let coeff = Expr::real(n.as_f64());
                let lowered = base.pow(*n - HalfInteger::int(1));
                Expr::product([coeff, lowered, base.differentiate(v)])
            }
            Kind::Ln(x) => x.differentiate(v) * x.recip(),
        }
    }

    /// Structural conjugate: swaps x₊ ↔ x₋ and conjugates constants.
    pub fn conj(&self) -> Expr {
        self.0
            .conj
            .get_or_init(|| match self.kind() {
                Kind::Const(c) => Expr::constant(c.conj()),
                Kind::Var(v) => Expr::var(v.partner()),
                Kind::Sum(xs) => Expr::sum(xs.iter().map(Expr::conj)),
                Kind::Product(xs) => Expr::product(xs.iter().map(Expr::conj)),
                Kind::Neg(x) => -x.conj(),
                Kind::Pow(x, n) => x.conj().pow(*n),
                Kind::Ln(x) => x.conj().ln(),
            })
            .clone()
    }

    /// Evaluate with an exact-zero singularity check.
    pub fn evaluate(&self, p: EvalPoint) -> Result<Complex64, EvalError> {
        Evaluator::new(p).eval(self)
    }

    /// Number of distinct nodes reachable from this expression.
    pub fn node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.node_id()) {
                continue;
            }
            match e.kind() {
                Kind::Const(_) | Kind::Var(_) => {}
                Kind::Sum(xs) | Kind::Product(xs) => stack.extend(xs.iter().cloned()),
                Kind::Neg(x) | Kind::Pow(x, _) | Kind::Ln(x) => stack.push(x.clone()),
            }
        }
        seen.len()
    }

    /// Render at most roughly `budget` characters, eliding the rest.
    pub fn display_limited(&self, budget: usize) -> String {
        let mut out = String::new();
        self.write_limited(&mut out, budget);
        out
    }

    fn write_limited(&self, out: &mut String, budget: usize) {
        if out.len() > budget {
            if !out.ends_with('…') {
                out.push('…');
            }
            return;
        }
        match self.kind() {
            Kind::Const(c) => out.push_str(&format_complex(*c)),
            Kind::Var(Var::Plus) => out.push('x'),
            Kind::Var(Var::Minus) => out.push_str("xbar"),
            Kind::Sum(xs) => write_joined(out, xs, " + ", budget),
            Kind::Product(xs) => write_joined(out, xs, " * ", budget),
            Kind::Neg(x) => {
                // the parser binds unary minus tighter than `^`
                out.push_str("(-(");
                x.write_limited(out, budget);
                out.push_str("))");
            }
            Kind::Pow(x, n) => {
                if matches!(x.kind(), Kind::Pow(..)) {
                    out.push('(');
                    x.write_limited(out, budget);
                    out.push(')');
                } else {
                    x.write_limited(out, budget);
                }
                out.push('^');
                if n.is_integer() {
                    out.push_str(&(n.twice() / 2).to_string());
                } else {
                    out.push_str(&n.to_string());
                }
            }
            Kind::Ln(x) => {
                out.push_str("ln(");
                x.write_limited(out, budget);
                out.push(')');
            }
        }
    }
}

fn write_joined(out: &mut String, xs: &[Expr], sep: &str, budget: usize) {
    out.push('(');
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        x.write_limited(out, budget);
        if out.len() > budget {
            break;
        }
    }
    out.push(')');
}

/// Complex constant in the parser's grammar, with round-trip precision.
fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        if c.re < 0.0 || c.re.is_sign_negative() {
            format!("(-{:?})", -c.re)
        } else {
            format!("{:?}", c.re)
        }
    } else {
        let re = if c.re.is_sign_negative() {
            format!("-{:?}", -c.re)
        } else {
            format!("{:?}", c.re)
        };
        let (sign, im) = if c.im.is_sign_negative() {
            ('-', -c.im)
        } else {
            ('+', c.im)
        };
        format!("({re}{sign}{im:?}i)")
    }
}

/// Fully parenthesized rendering; for expressions built from the user
/// grammar (x₊ only, integer powers) the output parses back to an
/// equivalent expression.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_limited(usize::MAX / 2))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.kind() {
            Kind::Const(c) => Expr::constant(-c),
            Kind::Neg(x) => x.clone(),
            _ => Expr::from_kind(Kind::Neg(self.clone())),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum([a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::product([a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::product([a.clone(), b.recip()]));

impl From<f64> for Expr {
    fn from(x: f64) -> Expr {
        Expr::real(x)
    }
}

impl From<Complex64> for Expr {
    fn from(c: Complex64) -> Expr {
        Expr::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(e: &Expr, xp: Complex64, xm: Complex64) -> Complex64 {
        e.evaluate(EvalPoint::new(xp, xm)).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn power_rule() {
        let x = Expr::x_plus();
        let d = x.powi(2).differentiate(Var::Plus);
        assert!((at(&d, c(1.5, -0.5), c(0.0, 0.0)) - c(3.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn independent_variable_gives_literal_zero() {
        let d = Expr::x_plus().powi(2).differentiate(Var::Minus);
        assert!(d.is_zero());
    }

    #[test]
    fn chain_rule_through_log() {
        let u = Expr::one() + Expr::x_plus() * Expr::x_minus();
        let d = u.ln().differentiate(Var::Plus);
        let expected = Expr::x_minus() / &u;
        for (p, q) in [(c(0.3, 0.1), c(-0.2, 0.7)), (c(-0.5, 0.5), c(0.1, 0.0))] {
            assert!((at(&d, p, q) - at(&expected, p, q)).norm() < 1e-14);
        }
    }

    #[test]
    fn conj_examples() {
        let e = Expr::i() * Expr::x_plus();
        let ce = e.conj();
        let expected = Expr::constant(c(0.0, -1.0)) * Expr::x_minus();
        let (p, q) = (c(0.2, 0.4), c(-0.6, 0.1));
        assert!((at(&ce, p, q) - at(&expected, p, q)).norm() < 1e-15);

        let r = (Expr::one() + Expr::x_plus()).recip();
        let cr = r.conj();
        assert!(!cr.depends_on(Var::Plus));
        assert!((at(&cr, p, q) - (c(1.0, 0.0) + q).inv()).norm() < 1e-15);
    }

    #[test]
    fn evaluate_examples() {
        let e = Expr::x_plus() * Expr::x_minus() + Expr::one();
        assert_eq!(at(&e, c(2.0, 0.0), c(3.0, 0.0)), c(7.0, 0.0));

        let pole = Expr::x_plus().recip();
        let err = pole.evaluate(EvalPoint::new(c(0.0, 0.0), c(1.0, 0.0)));
        assert!(matches!(err, Err(EvalError::Singular { .. })));

        let log = Expr::x_plus().ln();
        assert_eq!(at(&log, c(1.0, 0.0), c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn constant_folding() {
        let x = Expr::x_plus();
        assert!((Expr::zero() * &x).is_zero());
        assert!(matches!((Expr::one() * &x).kind(), Kind::Var(Var::Plus)));
        assert!(matches!((Expr::zero() + &x).kind(), Kind::Var(Var::Plus)));
        assert_eq!((Expr::real(2.0) + Expr::real(3.0)).as_const(), Some(c(5.0, 0.0)));
        assert!(matches!((-(-&x)).kind(), Kind::Var(Var::Plus)));
    }

    #[test]
    fn half_integer_powers_use_principal_branch() {
        let e = Expr::x_plus().pow(HalfInteger::halves(-1));
        let v = at(&e, c(4.0, 0.0), c(0.0, 0.0));
        assert!((v - c(0.5, 0.0)).norm() < 1e-15);
        let v = at(&e, c(-4.0, 0.0), c(0.0, 0.0));
        // sqrt(-4) = 2i on the principal branch
        assert!((v - c(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn derivatives_are_memoized() {
        let e = (Expr::one() + Expr::x_plus() * Expr::x_minus()).recip();
        let a = e.differentiate(Var::Plus);
        let b = e.differentiate(Var::Plus);
        assert_eq!(a.node_id(), b.node_id());
    }

    #[test]
    fn printing_round_trips() {
        let e = parse("(1+2i)*x^3 - 1/(1+x) + (-0.25)").unwrap();
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        for p in [c(0.3, 0.2), c(-0.1, 0.9)] {
            let a = at(&e, p, c(0.0, 0.0));
            let b = at(&back, p, c(0.0, 0.0));
            assert!((a - b).norm() < 1e-14, "{printed}");
        }
    }
}
