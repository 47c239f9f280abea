//! Finite Grassmann algebra with [`Expr`] coefficients.
//!
//! Generators are indexed `0..2+2K`: θ₊ = 0, θ₋ = 1, then the pairs
//! (η_k, η̄_k) at `2+2k`, `3+2k`. The hermitian involution pairs index `i`
//! with `i ^ 1`. A monomial is a bitmask read in ascending index order, so
//! the stored coefficient of mask `0b11` multiplies θ₊θ₋ (not θ₋θ₊).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::expr::{EvalPoint, Evaluator, Expr, HalfInteger, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("operands use different generator sets ({0} vs {1} generators)")]
    GeneratorMismatch(usize, usize),
    #[error("{0} generators requested; at most 16 are supported")]
    TooManyGenerators(usize),
    #[error("eta index {index} out of range for {pairs} eta pairs")]
    EtaOutOfRange { index: usize, pairs: usize },
    #[error("series functions need a grade-even argument")]
    OddInput,
    #[error("body of the argument vanishes")]
    BodyVanishes,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// θ₊, θ₋ and `eta_pairs` pairs (η_k, η̄_k).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    eta_pairs: u8,
}

impl Default for GeneratorSet {
    fn default() -> Self {
        GeneratorSet { eta_pairs: 2 }
    }
}

impl GeneratorSet {
    pub const MAX_GENERATORS: usize = 16;
    pub const THETA_PLUS: usize = 0;
    pub const THETA_MINUS: usize = 1;

    pub fn new(eta_pairs: usize) -> Result<Self> {
        let count = 2 + 2 * eta_pairs;
        if count > Self::MAX_GENERATORS {
            return Err(AlgebraError::TooManyGenerators(count));
        }
        Ok(GeneratorSet {
            eta_pairs: eta_pairs as u8,
        })
    }

    pub fn eta_pairs(&self) -> usize {
        self.eta_pairs as usize
    }

    pub fn count(&self) -> usize {
        2 + 2 * self.eta_pairs()
    }

    pub fn partner(index: usize) -> usize {
        index ^ 1
    }

    pub fn eta(&self, k: usize) -> Result<usize> {
        if k >= self.eta_pairs() {
            return Err(AlgebraError::EtaOutOfRange {
                index: k,
                pairs: self.eta_pairs(),
            });
        }
        Ok(2 + 2 * k)
    }

    pub fn eta_bar(&self, k: usize) -> Result<usize> {
        Ok(self.eta(k)? + 1)
    }

    pub fn name(index: usize) -> String {
        match index {
            0 => "θ+".to_string(),
            1 => "θ-".to_string(),
            i if i % 2 == 0 => format!("η{}", (i - 2) / 2),
            i => format!("η{}†", (i - 3) / 2),
        }
    }
}

/// Mask of the two θ generators.
pub const THETA_MASK: u16 = 0b11;

/// Canonically ordered product of distinct generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub u16);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn generator(index: usize) -> Monomial {
        Monomial(1 << index)
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn parity(self) -> Parity {
        if self.degree().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..16).filter(move |i| self.0 & (1 << i) != 0)
    }

    pub fn theta_part(self) -> u16 {
        self.0 & THETA_MASK
    }

    pub fn label(self) -> String {
        if self.0 == 0 {
            return "1".to_string();
        }
        self.indices().map(GeneratorSet::name).collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Sign of `m_a · m_b` rewritten in canonical order; `None` if they overlap.
pub fn merge_sign(a: u16, b: u16) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps.is_multiple_of(2) { 1.0 } else { -1.0 })
}

/// Image of a monomial under the hermitian involution: factors reversed,
/// each generator replaced by its partner, result reordered canonically.
pub fn dagger_monomial(m: u16) -> (u16, f64) {
    let seq: Vec<usize> = Monomial(m)
        .indices()
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .map(GeneratorSet::partner)
        .collect();
    let mut inversions = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    let mask = seq.iter().fold(0u16, |acc, &i| acc | (1 << i));
    (mask, if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Sparse Grassmann element: monomial mask → coefficient function.
#[derive(Clone)]
pub struct SuperScalar {
    gens: GeneratorSet,
    terms: BTreeMap<u16, Expr>,
}

impl fmt::Debug for SuperScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (k, v) in &self.terms {
            m.entry(&Monomial(*k).label(), &v.display_limited(200));
        }
        m.finish()
    }
}

impl SuperScalar {
    pub fn zero(gens: GeneratorSet) -> Self {
        SuperScalar {
            gens,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_expr(gens: GeneratorSet, e: Expr) -> Self {
        Self::monomial(gens, Monomial::ONE, e)
    }

    pub fn one(gens: GeneratorSet) -> Self {
        Self::from_expr(gens, Expr::one())
    }

    pub fn constant(gens: GeneratorSet, c: impl Into<Expr>) -> Self {
        Self::from_expr(gens, c.into())
    }

    pub fn monomial(gens: GeneratorSet, m: Monomial, coefficient: Expr) -> Self {
        let mut s = Self::zero(gens);
        s.add_term(m.0, coefficient);
        s
    }

    /// The bare generator with index `index`.
    pub fn generator(gens: GeneratorSet, index: usize) -> Self {
        Self::monomial(gens, Monomial::generator(index), Expr::one())
    }

    pub fn theta_plus(gens: GeneratorSet) -> Self {
        Self::generator(gens, GeneratorSet::THETA_PLUS)
    }

    pub fn theta_minus(gens: GeneratorSet) -> Self {
        Self::generator(gens, GeneratorSet::THETA_MINUS)
    }

    pub fn generators(&self) -> GeneratorSet {
        self.gens
    }

    fn add_term(&mut self, mask: u16, coefficient: Expr) {
        if coefficient.is_zero() {
            return;
        }
        match self.terms.remove(&mask) {
            Some(existing) => {
                let sum = existing + coefficient;
                if !sum.is_zero() {
                    self.terms.insert(mask, sum);
                }
            }
            None => {
                self.terms.insert(mask, coefficient);
            }
        }
    }

    fn from_grouped(gens: GeneratorSet, grouped: BTreeMap<u16, Vec<Expr>>) -> Self {
        let mut terms = BTreeMap::new();
        for (mask, parts) in grouped {
            let c = Expr::sum(parts);
            if !c.is_zero() {
                terms.insert(mask, c);
            }
        }
        SuperScalar { gens, terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Expr)> {
        self.terms.iter().map(|(k, v)| (Monomial(*k), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: Monomial) -> Expr {
        self.terms.get(&m.0).cloned().unwrap_or_else(Expr::zero)
    }

    /// Coefficient of the empty monomial.
    pub fn body(&self) -> Expr {
        self.coefficient(Monomial::ONE)
    }

    pub fn body_part(&self) -> SuperScalar {
        Self::from_expr(self.gens, self.body())
    }

    pub fn soul(&self) -> SuperScalar {
        self.filter(|m| m.0 != 0)
    }

    pub fn grade_part(&self, parity: Parity) -> SuperScalar {
        self.filter(|m| m.parity() == parity)
    }

    /// `Some(parity)` for homogeneous elements (zero counts as even).
    pub fn parity(&self) -> Option<Parity> {
        let mut seen = None;
        for m in self.terms.keys() {
            let p = Monomial(*m).parity();
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }

    pub fn filter(&self, keep: impl Fn(Monomial) -> bool) -> SuperScalar {
        SuperScalar {
            gens: self.gens,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(Monomial(**k)))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Terms whose θ-content is exactly `theta`, with the θ factor stripped
    /// from the left. θ generators have the lowest indices, so no sign arises.
    pub fn theta_component(&self, theta: u16) -> SuperScalar {
        SuperScalar {
            gens: self.gens,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| *k & THETA_MASK == theta)
                .map(|(k, v)| (*k & !THETA_MASK, v.clone()))
                .collect(),
        }
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> SuperScalar {
        let mut out = Self::zero(self.gens);
        for (k, v) in &self.terms {
            out.add_term(*k, f(v));
        }
        out
    }

    /// Coefficientwise ∂/∂x±.
    pub fn differentiate(&self, v: Var) -> SuperScalar {
        self.map_coefficients(|e| e.differentiate(v))
    }

    /// Multiply every coefficient by an ordinary (even, commuting) function.
    pub fn scale(&self, e: &Expr) -> SuperScalar {
        if e.is_zero() {
            return Self::zero(self.gens);
        }
        self.map_coefficients(|c| c * e)
    }

    fn check(&self, other: &SuperScalar) -> Result<()> {
        if self.gens != other.gens {
            return Err(AlgebraError::GeneratorMismatch(
                self.gens.count(),
                other.gens.count(),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &SuperScalar) -> Result<SuperScalar> {
        self.check(other)?;
        let mut grouped: BTreeMap<u16, Vec<Expr>> = BTreeMap::new();
        for (k, v) in self.terms.iter().chain(other.terms.iter()) {
            grouped.entry(*k).or_default().push(v.clone());
        }
        Ok(Self::from_grouped(self.gens, grouped))
    }

    /// Graded product.
    pub fn try_mul(&self, other: &SuperScalar) -> Result<SuperScalar> {
        self.check(other)?;
        let mut grouped: BTreeMap<u16, Vec<Expr>> = BTreeMap::new();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                if let Some(sign) = merge_sign(*ka, *kb) {
                    let c = if sign > 0.0 { va * vb } else { -(va * vb) };
                    grouped.entry(ka | kb).or_default().push(c);
                }
            }
        }
        Ok(Self::from_grouped(self.gens, grouped))
    }

    /// Hermitian conjugate; an anti-automorphism: (ab)† = b†a†.
    pub fn dagger(&self) -> SuperScalar {
        let mut out = Self::zero(self.gens);
        for (k, v) in &self.terms {
            let (mask, sign) = dagger_monomial(*k);
            let c = v.conj();
            out.add_term(mask, if sign > 0.0 { c } else { -c });
        }
        out
    }

    /// `|a|² = a† a`.
    pub fn norm_squared(&self) -> SuperScalar {
        &self.dagger() * self
    }

    fn series_prelude(&self) -> Result<(Expr, SuperScalar)> {
        if !self.grade_part(Parity::Odd).is_empty() {
            return Err(AlgebraError::OddInput);
        }
        let body = self.body();
        if body.is_zero() {
            return Err(AlgebraError::BodyVanishes);
        }
        let ratio = self.soul().scale(&body.recip());
        Ok((body, ratio))
    }

    /// `a^r` for grade-even `a` by the binomial series in soul/body, which
    /// terminates because the soul is nilpotent.
    pub fn power_even(&self, r: HalfInteger) -> Result<SuperScalar> {
        let (body, ratio) = self.series_prelude()?;
        let mut result = Self::one(self.gens);
        let mut power = Self::one(self.gens);
        let mut binom = 1.0;
        let rf = r.as_f64();
        for j in 1..=self.gens.count() {
            power = &power * &ratio;
            if power.is_empty() {
                break;
            }
            binom *= (rf - (j - 1) as f64) / j as f64;
            if binom == 0.0 {
                break;
            }
            result = &result + &power.scale(&Expr::real(binom));
        }
        Ok(result.scale(&body.pow(r)))
    }

    pub fn inverse(&self) -> Result<SuperScalar> {
        self.power_even(HalfInteger::int(-1))
    }

    /// Natural logarithm of a grade-even element.
    pub fn log_even(&self) -> Result<SuperScalar> {
        let (body, ratio) = self.series_prelude()?;
        let mut result = Self::from_expr(self.gens, body.ln());
        let mut power = Self::one(self.gens);
        for j in 1..=self.gens.count() {
            power = &power * &ratio;
            if power.is_empty() {
                break;
            }
            let c = if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64;
            result = &result + &power.scale(&Expr::real(c));
        }
        Ok(result)
    }

    /// Drop coefficients whose magnitude stays below `threshold` at every
    /// probe point. Points where a coefficient cannot be evaluated keep it.
    pub fn prune_at(&self, points: &[EvalPoint], threshold: f64) -> SuperScalar {
        let mut evaluators: Vec<Evaluator> = points.iter().map(|p| Evaluator::new(*p)).collect();
        let terms = self
            .terms
            .iter()
            .filter(|(_, v)| {
                evaluators
                    .iter_mut()
                    .any(|ev| ev.eval(v).map(|z| z.norm() >= threshold).unwrap_or(true))
            })
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        SuperScalar {
            gens: self.gens,
            terms,
        }
    }
}

impl Add for &SuperScalar {
    type Output = SuperScalar;
    fn add(self, rhs: &SuperScalar) -> SuperScalar {
        self.try_add(rhs).expect("generator set mismatch")
    }
}

impl Sub for &SuperScalar {
    type Output = SuperScalar;
    fn sub(self, rhs: &SuperScalar) -> SuperScalar {
        self.try_add(&-rhs).expect("generator set mismatch")
    }
}

impl Neg for &SuperScalar {
    type Output = SuperScalar;
    fn neg(self) -> SuperScalar {
        self.map_coefficients(|c| -c)
    }
}

impl Mul for &SuperScalar {
    type Output = SuperScalar;
    /// Panics on generator-set mismatch; see [`SuperScalar::try_mul`].
    fn mul(self, rhs: &SuperScalar) -> SuperScalar {
        self.try_mul(rhs).expect("generator set mismatch")
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<SuperScalar> for SuperScalar {
            type Output = SuperScalar;
            fn $m(self, rhs: SuperScalar) -> SuperScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&SuperScalar> for SuperScalar {
            type Output = SuperScalar;
            fn $m(self, rhs: &SuperScalar) -> SuperScalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<SuperScalar> for &SuperScalar {
            type Output = SuperScalar;
            fn $m(self, rhs: SuperScalar) -> SuperScalar {
                self.$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for SuperScalar {
    type Output = SuperScalar;
    fn neg(self) -> SuperScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn gens() -> GeneratorSet {
        GeneratorSet::default()
    }

    fn point() -> EvalPoint {
        EvalPoint::new(Complex64::new(0.31, -0.2), Complex64::new(-0.45, 0.12))
    }

    /// Max |coefficient| over all monomials at a fixed point.
    fn max_abs(s: &SuperScalar) -> f64 {
        let mut ev = Evaluator::new(point());
        s.terms()
            .map(|(_, c)| ev.eval(c).unwrap().norm())
            .fold(0.0, f64::max)
    }

    fn tp() -> SuperScalar {
        SuperScalar::theta_plus(gens())
    }

    fn tm() -> SuperScalar {
        SuperScalar::theta_minus(gens())
    }

    fn eta0() -> SuperScalar {
        SuperScalar::generator(gens(), 2)
    }

    #[test]
    fn anticommutation() {
        let a = &tp() * &tm();
        assert_eq!(a.coefficient(Monomial(0b11)).as_const(), Some(1.0.into()));
        let b = &tm() * &tp();
        assert_eq!(b.coefficient(Monomial(0b11)).as_const(), Some((-1.0).into()));
        assert!((&tp() * &tp()).is_empty());
    }

    #[test]
    fn cross_terms_cancel() {
        let one = SuperScalar::one(gens());
        let t = &tp() * &eta0();
        let a = &one + &t;
        let b = &one - &t;
        let prod = &a * &b;
        assert!(max_abs(&(&prod - &one)) < 1e-15);
    }

    #[test]
    fn dagger_of_generators() {
        let d = tp().dagger();
        assert_eq!(d.coefficient(Monomial(0b10)).as_const(), Some(1.0.into()));
        // (θ₊θ₋)† = θ₋†θ₊† = θ₊θ₋
        let d = (&tp() * &tm()).dagger();
        assert_eq!(d.coefficient(Monomial(0b11)).as_const(), Some(1.0.into()));
    }

    #[test]
    fn auxiliary_component_conjugates_like_phi_dagger() {
        // -½ θ₊θ₋ F  ↦  -½ θ₊θ₋ F†
        let f = Expr::constant(Complex64::new(0.0, 2.0)) * Expr::x_plus();
        let term = (&tp() * &tm()).scale(&(Expr::real(-0.5) * &f));
        let expected = (&tp() * &tm()).scale(&(Expr::real(-0.5) * f.conj()));
        assert!(max_abs(&(&term.dagger() - &expected)) < 1e-15);
    }

    #[test]
    fn body_soul_grade() {
        let a = &SuperScalar::constant(gens(), 3.0) + &(&tp() * &tm());
        assert_eq!(a.body().as_const(), Some(3.0.into()));
        assert_eq!(a.soul().len(), 1);
        assert!(a.soul().coefficient(Monomial(0b11)).is_one());
        let b = &tp() + &(&tp() * &tm());
        let odd = b.grade_part(Parity::Odd);
        assert_eq!(odd.len(), 1);
        assert!(odd.coefficient(Monomial(0b01)).is_one());
    }

    #[test]
    fn power_series_examples() {
        let one = SuperScalar::one(gens());
        let a = &one + &(&tp() * &tm());
        let inv = a.power_even(HalfInteger::int(-1)).unwrap();
        let expected = &one - &(&tp() * &tm());
        assert!(max_abs(&(&inv - &expected)) < 1e-15);

        let rs = a.power_even(HalfInteger::halves(-1)).unwrap();
        let expected = &one - &(&tp() * &tm()).scale(&Expr::real(0.5));
        assert!(max_abs(&(&rs - &expected)) < 1e-15);

        let four = SuperScalar::constant(gens(), 4.0);
        let half = four.power_even(HalfInteger::halves(-1)).unwrap();
        assert_eq!(half.body().as_const(), Some(0.5.into()));
    }

    #[test]
    fn log_examples() {
        let one = SuperScalar::one(gens());
        let a = &one + &(&tp() * &tm());
        let l = a.log_even().unwrap();
        assert!(max_abs(&(&l - &(&tp() * &tm()))) < 1e-15);
        assert!(one.log_even().unwrap().is_empty());

        let u = Expr::one() + Expr::x_plus() * Expr::x_minus();
        let d = SuperScalar::from_expr(gens(), u.clone())
            .log_even()
            .unwrap()
            .differentiate(Var::Plus);
        let expected = SuperScalar::from_expr(gens(), Expr::x_minus() / &u);
        assert!(max_abs(&(&d - &expected)) < 1e-14);
    }

    #[test]
    fn series_errors() {
        assert_eq!(
            tp().power_even(HalfInteger::int(-1)).unwrap_err(),
            AlgebraError::OddInput
        );
        let nil = &tp() * &tm();
        assert_eq!(nil.inverse().unwrap_err(), AlgebraError::BodyVanishes);
        assert_eq!(nil.log_even().unwrap_err(), AlgebraError::BodyVanishes);
    }

    #[test]
    fn generator_mismatch_is_reported() {
        let a = SuperScalar::one(GeneratorSet::new(1).unwrap());
        let b = SuperScalar::one(GeneratorSet::new(2).unwrap());
        assert!(matches!(
            a.try_mul(&b),
            Err(AlgebraError::GeneratorMismatch(4, 6))
        ));
        assert!(GeneratorSet::new(8).is_err());
    }

    #[test]
    fn involution_pairs_are_fixed_point_free() {
        let g = GeneratorSet::new(7).unwrap();
        for i in 0..g.count() {
            let p = GeneratorSet::partner(i);
            assert_ne!(p, i);
            assert_eq!(GeneratorSet::partner(p), i);
        }
    }

    #[test]
    fn soul_is_nilpotent() {
        let g = GeneratorSet::new(1).unwrap();
        let mut s = SuperScalar::zero(g);
        for i in 0..g.count() {
            s = &s + &SuperScalar::generator(g, i).scale(&Expr::real(i as f64 + 1.0));
        }
        let mut p = SuperScalar::one(g);
        for _ in 0..=g.count() {
            p = &p * &s;
        }
        assert!(p.is_empty());
    }

    #[test]
    fn prune_drops_numerically_zero_coefficients() {
        let x = Expr::x_plus();
        let tiny = &x - &x;
        let s = &SuperScalar::from_expr(gens(), Expr::one())
            + &(&tp() * &tm()).scale(&tiny);
        assert_eq!(s.len(), 2);
        let pruned = s.prune_at(&[point()], 1e-14);
        assert_eq!(pruned.len(), 1);
    }
}
