//! Randomized checks of the Grassmann algebra and superderivative rules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::{CheckReport, Expectation, ProbeSet};
use crate::expr::{Expr, HalfInteger, Var};
use crate::grassmann::{GeneratorSet, Parity, SuperScalar};
use crate::random::{random_expr, random_superscalar};
use crate::superspace::{partial, super_derivative};

const MAX_TERMS: usize = 6;

fn random_homogeneous(rng: &mut ChaCha8Rng, gens: GeneratorSet) -> (SuperScalar, Parity) {
    let p = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
    (random_superscalar(rng, gens, Some(p), MAX_TERMS), p)
}

/// Even element whose body has positive real part on the unit polydisk,
/// so principal-branch powers and logs compose without crossing a cut.
fn random_positive_even(rng: &mut ChaCha8Rng, gens: GeneratorSet) -> SuperScalar {
    let soul = random_superscalar(rng, gens, Some(Parity::Even), MAX_TERMS).soul();
    let body = Expr::real(6.0) + random_expr(rng);
    &SuperScalar::from_expr(gens, body) + &soul
}

/// ∂̌±∂̌± + i∂± applied to `count` random elements.
pub fn twice_residuals(gens: GeneratorSet, seed: u64, count: usize) -> Vec<SuperScalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let i = Expr::i();
    let mut out = Vec::new();
    for _ in 0..count {
        let a = random_superscalar(&mut rng, gens, None, MAX_TERMS);
        for v in [Var::Plus, Var::Minus] {
            let dd = super_derivative(&super_derivative(&a, v), v);
            out.push(&dd + &partial(&a, v).scale(&i));
        }
    }
    out
}

/// Conjugation rules for `count` random even and `count` random odd elements:
/// (∂̌±a)† = ±∂̌∓a† by parity and (∂̌₊∂̌₋a)† = ∂̌₊∂̌₋a†.
pub fn conjugation_residuals(gens: GeneratorSet, seed: u64, count: usize) -> Vec<SuperScalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let sign = Expr::real(parity.sign());
        for _ in 0..count {
            let a = random_superscalar(&mut rng, gens, Some(parity), MAX_TERMS);
            let ad = a.dagger();
            for (v, w) in [(Var::Plus, Var::Minus), (Var::Minus, Var::Plus)] {
                let lhs = super_derivative(&a, v).dagger();
                let rhs = super_derivative(&ad, w).scale(&sign);
                out.push(&lhs - &rhs);
            }
            let lhs = super_derivative(&super_derivative(&a, Var::Minus), Var::Plus).dagger();
            let rhs = super_derivative(&super_derivative(&ad, Var::Minus), Var::Plus);
            out.push(&lhs - &rhs);
        }
    }
    out
}

pub fn check_suite(gens: GeneratorSet, seed: u64, points: usize, tol: f64) -> Vec<CheckReport> {
    let probes = ProbeSet::sample(points, seed, &[]).expect("no guards to violate");
    let vanish = Expectation::Vanishes(tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();

    let assoc: Vec<_> = (0..50)
        .map(|_| {
            let a = random_superscalar(&mut rng, gens, None, MAX_TERMS);
            let b = random_superscalar(&mut rng, gens, None, MAX_TERMS);
            let c = random_superscalar(&mut rng, gens, None, MAX_TERMS);
            &(&(&a * &b) * &c) - &(&a * &(&b * &c))
        })
        .collect();
    out.push(CheckReport::evaluate("algebra.associativity", &assoc, &probes, vanish));

    let graded: Vec<_> = (0..20)
        .map(|_| {
            let (a, pa) = random_homogeneous(&mut rng, gens);
            let (b, pb) = random_homogeneous(&mut rng, gens);
            let sign = if pa == Parity::Odd && pb == Parity::Odd { -1.0 } else { 1.0 };
            &(&a * &b) - &(&b * &a).scale(&Expr::real(sign))
        })
        .collect();
    out.push(CheckReport::evaluate("algebra.graded_commutativity", &graded, &probes, vanish));

    let mut dag = Vec::new();
    for _ in 0..20 {
        let a = random_superscalar(&mut rng, gens, None, MAX_TERMS);
        let b = random_superscalar(&mut rng, gens, None, MAX_TERMS);
        dag.push(&(&a * &b).dagger() - &(&b.dagger() * &a.dagger()));
        dag.push(&a.dagger().dagger() - &a);
    }
    out.push(CheckReport::evaluate("algebra.dagger", &dag, &probes, vanish));

    let mut series = Vec::new();
    let one = SuperScalar::one(gens);
    for r in [
        HalfInteger::int(-1),
        HalfInteger::halves(1),
        HalfInteger::halves(-1),
        HalfInteger::int(2),
        HalfInteger::halves(3),
    ] {
        for _ in 0..4 {
            let a = random_positive_even(&mut rng, gens);
            let up = a.power_even(r).expect("even with nonzero body");
            let down = a.power_even(-r).expect("even with nonzero body");
            series.push(&(&up * &down) - &one);
            let lhs = up.log_even().expect("nonzero body");
            let rhs = a.log_even().expect("nonzero body").scale(&Expr::real(r.as_f64()));
            series.push(&lhs - &rhs);
        }
    }
    out.push(CheckReport::evaluate("algebra.power_log", &series, &probes, vanish));

    let mut leibniz = Vec::new();
    for _ in 0..20 {
        let (a, pa) = random_homogeneous(&mut rng, gens);
        let b = random_superscalar(&mut rng, gens, None, MAX_TERMS);
        for v in [Var::Plus, Var::Minus] {
            let lhs = super_derivative(&(&a * &b), v);
            let rhs = &(&super_derivative(&a, v) * &b)
                + &(&a * &super_derivative(&b, v)).scale(&Expr::real(pa.sign()));
            leibniz.push(&lhs - &rhs);
        }
    }
    out.push(CheckReport::evaluate("algebra.leibniz", &leibniz, &probes, vanish));

    out.push(CheckReport::evaluate(
        "algebra.superderivative_twice",
        &twice_residuals(gens, seed, 20),
        &probes,
        vanish,
    ));
    out.push(CheckReport::evaluate(
        "algebra.conjugation_rules",
        &conjugation_residuals(gens, seed, 20),
        &probes,
        vanish,
    ));
    out
}
