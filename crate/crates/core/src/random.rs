//! Random test inputs: rational functions that are regular on the closed
//! unit polydisk and sparse Grassmann elements built from them.

use num_complex::Complex64;
use rand::Rng;

use crate::expr::Expr;
use crate::grassmann::{GeneratorSet, Monomial, Parity, SuperScalar};

fn coefficient<R: Rng>(rng: &mut R, scale: f64) -> Expr {
    Expr::constant(Complex64::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    ))
}

/// A random function of x₊ and x₋ with no poles or log zeros for |x±| ≤ 1.
pub fn random_expr<R: Rng>(rng: &mut R) -> Expr {
    let xp = Expr::x_plus();
    let xm = Expr::x_minus();
    let mut e = Expr::sum([
        coefficient(rng, 1.0),
        coefficient(rng, 1.0) * &xp,
        coefficient(rng, 1.0) * &xm,
        coefficient(rng, 1.0) * &xp * &xm,
    ]);
    if rng.gen_bool(0.5) {
        // |denominator| >= 2 - 2·0.35 > 1
        let denom = Expr::real(2.0) + coefficient(rng, 0.35) * &xp + coefficient(rng, 0.35) * &xm;
        e = e / denom;
    }
    if rng.gen_bool(0.3) {
        let arg = Expr::real(3.0) + coefficient(rng, 0.7) * &xp * &xm;
        e = e * arg.ln();
    }
    e
}

/// Random sparse element with up to `max_terms` monomials; restricted to one
/// parity when `parity` is given.
pub fn random_superscalar<R: Rng>(
    rng: &mut R,
    gens: GeneratorSet,
    parity: Option<Parity>,
    max_terms: usize,
) -> SuperScalar {
    let full = 1u32 << gens.count();
    let mut s = SuperScalar::zero(gens);
    let terms = rng.gen_range(1..=max_terms.max(1));
    let mut placed = 0;
    while placed < terms {
        let mask = rng.gen_range(0..full) as u16;
        let m = Monomial(mask);
        if parity.is_some_and(|p| m.parity() != p) {
            continue;
        }
        s = &s + &SuperScalar::monomial(gens, m, random_expr(rng));
        placed += 1;
    }
    s
}
