//! Weierstrass data (W, Z²) for CP¹ and the nonsupersymmetric limit.

use num_complex::Complex64;

use crate::check::{CheckReport, Expectation, ProbeSet};
use crate::expr::{Evaluator, Expr, HalfInteger, Var};
use crate::grassmann::{AlgebraError, Parity, SuperScalar};
use crate::superspace::{super_derivative, SuperVector};

/// A bosonic W with its fermionic partner Z².
#[derive(Debug, Clone)]
pub struct WeierstrassPair {
    pub w: SuperScalar,
    pub z2: SuperScalar,
}

fn one_plus_norm(w: &SuperScalar) -> SuperScalar {
    &SuperScalar::one(w.generators()) + &w.norm_squared()
}

/// Z² = ∂̌₊W / (1 + |W|²)².
pub fn z_squared_from_w(w: &SuperScalar) -> Result<SuperScalar, AlgebraError> {
    let denom = one_plus_norm(w).power_even(HalfInteger::int(-2))?;
    Ok(&super_derivative(w, Var::Plus) * &denom)
}

impl WeierstrassPair {
    pub fn new(w: SuperScalar) -> Result<Self, AlgebraError> {
        let z2 = z_squared_from_w(&w)?;
        Ok(WeierstrassPair { w, z2 })
    }

    /// W = w₂ w₁⁻¹ for a CP¹ vector, the gauge w = (1, W) up to an overall factor.
    pub fn from_cp1(w: &SuperVector) -> Result<Self, AlgebraError> {
        if w.len() != 2 {
            return Err(AlgebraError::Dimension(format!(
                "Weierstrass data needs 2 components, got {}",
                w.len()
            )));
        }
        Self::new(w.get(1) * &w.get(0).inverse()?)
    }

    pub fn guards(&self) -> Vec<Expr> {
        vec![one_plus_norm(&self.w).body()]
    }

    /// ∂̌₊W − (1 + |W|²)² Z².
    pub fn first_equation(&self) -> SuperScalar {
        let d = one_plus_norm(&self.w);
        &super_derivative(&self.w, Var::Plus) - &(&(&d * &d) * &self.z2)
    }

    /// ∂̌₋Z² + 2W Z̄² Z² (1 + |W|²), with Z̄² = (Z²)†.
    pub fn second_equation(&self) -> SuperScalar {
        let zbar = self.z2.dagger();
        let rhs = &(&(&self.w * &zbar) * &self.z2) * &one_plus_norm(&self.w);
        &super_derivative(&self.z2, Var::Minus) + &rhs.scale(&Expr::real(2.0))
    }

    /// ∂̌₊Z² + 2W Z² Z̄² (1 + |W|²), the second equation with ∂̌₊ and the
    /// factor order W Z² Z̄².
    pub fn second_equation_plus_form(&self) -> SuperScalar {
        let zbar = self.z2.dagger();
        let rhs = &(&(&self.w * &self.z2) * &zbar) * &one_plus_norm(&self.w);
        &super_derivative(&self.z2, Var::Plus) + &rhs.scale(&Expr::real(2.0))
    }

    /// ∂̌₊∂̌₋W − 2W̄ ∂̌₊W ∂̌₋W / (1 + |W|²).
    pub fn equation_of_motion(&self) -> Result<SuperScalar, AlgebraError> {
        let w = &self.w;
        let lhs = super_derivative(&super_derivative(w, Var::Minus), Var::Plus);
        let inv = one_plus_norm(w).inverse()?;
        let rhs = &(&(&w.dagger() * &super_derivative(w, Var::Plus)) * &super_derivative(w, Var::Minus)) * &inv;
        Ok(&lhs - &rhs.scale(&Expr::real(2.0)))
    }

    /// ∂̌₊Z² − ∂̌₊∂̌₊W / (1 + |W|²)².
    pub fn limit_identity(&self) -> Result<SuperScalar, AlgebraError> {
        let dd = super_derivative(&super_derivative(&self.w, Var::Plus), Var::Plus);
        let denom = one_plus_norm(&self.w).power_even(HalfInteger::int(-2))?;
        Ok(&super_derivative(&self.z2, Var::Plus) - &(&dd * &denom))
    }

    /// Bosonic profile V = W at θ = 0, η = 0.
    pub fn bosonic_profile(&self) -> Expr {
        self.w.body()
    }
}

/// φ² = ∂₊V / (1 + |V|²)².
pub fn phi_squared(v: &Expr) -> Expr {
    let d = Expr::one() + v * v.conj();
    v.differentiate(Var::Plus) * d.powi(-2)
}

/// Residuals of the bosonic system for ψ = V φ̄, φ = (∂₊V)^(1/2)/(1 + |V|²):
/// `[∂₊ψ − (|ψ|²+|φ|²)φ, ∂₋φ + (|ψ|²+|φ|²)ψ, ∂₊V − φ²(1+|V|²)², ∂₋φ² + 2|φ|⁴V(1+|V|²)]`.
pub fn bosonic_residuals(v: &Expr) -> [Expr; 4] {
    let vbar = v.conj();
    let d = Expr::one() + v * &vbar;
    let dv = v.differentiate(Var::Plus);
    let phi = dv.pow(HalfInteger::halves(1)) / &d;
    let phibar = phi.conj();
    let psi = v * &phibar;
    let psibar = psi.conj();
    let s = &psi * &psibar + &phi * &phibar;
    let phi2 = &phi * &phi;
    let mod4 = (&phi * &phibar).powi(2);
    [
        psi.differentiate(Var::Plus) - &s * &phi,
        phi.differentiate(Var::Minus) + &s * &psi,
        &dv - &phi2 * d.powi(2),
        phi2.differentiate(Var::Minus) + Expr::real(2.0) * mod4 * v * &d,
    ]
}

fn as_scalars(pair: &WeierstrassPair, es: &[Expr]) -> Vec<SuperScalar> {
    es.iter()
        .map(|e| SuperScalar::from_expr(pair.w.generators(), e.clone()))
        .collect()
}

/// Mean of (θ = 0 part of ∂̌₊Z²) / φ² over probe points where φ² is not small.
pub fn limit_factor(pair: &WeierstrassPair, probes: &ProbeSet) -> Option<Complex64> {
    let lhs = super_derivative(&pair.z2, Var::Plus).theta_component(0).body();
    let rhs = phi_squared(&pair.bosonic_profile());
    let mut sum = Complex64::new(0.0, 0.0);
    let mut count = 0;
    for p in probes.points() {
        let mut ev = Evaluator::new(*p);
        if let (Ok(a), Ok(b)) = (ev.eval(&lhs), ev.eval(&rhs)) {
            if b.norm() > 1e-6 {
                sum += a / b;
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum / count as f64)
}

/// Weierstrass checks: both defining equations, the W equation of motion,
/// the nonsupersymmetric limit, and the bosonic system on `real_probes`.
pub fn check_suite(
    pair: &WeierstrassPair,
    probes: &ProbeSet,
    real_probes: &ProbeSet,
    tol: f64,
) -> Result<Vec<CheckReport>, AlgebraError> {
    let vanish = Expectation::Vanishes(tol);
    let gens = pair.w.generators();
    let mut out = Vec::new();

    let dz = super_derivative(&pair.z2, Var::Plus);
    let wrong_grades = [
        pair.w.grade_part(Parity::Odd),
        pair.z2.grade_part(Parity::Even),
        dz.grade_part(Parity::Odd),
    ];
    out.push(CheckReport::evaluate("weierstrass.grades", &wrong_grades, probes, vanish));
    out.push(CheckReport::evaluate(
        "weierstrass.first",
        [&pair.first_equation()],
        probes,
        vanish,
    ));
    out.push(CheckReport::evaluate(
        "weierstrass.second",
        [&pair.second_equation()],
        probes,
        vanish,
    ));
    out.push(CheckReport::evaluate(
        "weierstrass.second_plus_form",
        [&pair.second_equation_plus_form()],
        probes,
        Expectation::Diagnostic,
    ));
    out.push(CheckReport::evaluate(
        "weierstrass.eom",
        [&pair.equation_of_motion()?],
        probes,
        vanish,
    ));
    out.push(CheckReport::evaluate(
        "weierstrass.limit.identity",
        [&pair.limit_identity()?],
        probes,
        vanish,
    ));
    out.push(CheckReport::evaluate(
        "weierstrass.limit.antiholomorphic_vanishes",
        [&super_derivative(&pair.w.dagger(), Var::Plus)],
        probes,
        vanish,
    ));

    let v = pair.bosonic_profile();
    let phi2 = SuperScalar::from_expr(gens, phi_squared(&v) * -Expr::i());
    let theta0 = dz.theta_component(0);
    let mut r = CheckReport::evaluate(
        "weierstrass.limit.theta_zero",
        [&(&theta0 - &phi2)],
        probes,
        vanish,
    );
    if let Some(c) = limit_factor(pair, probes) {
        r = r.with_value("factor_re", c.re).with_value("factor_im", c.im);
    }
    out.push(r);

    out.push(CheckReport::evaluate(
        "weierstrass.bosonic",
        &as_scalars(pair, &bosonic_residuals(&v)),
        real_probes,
        vanish,
    ));
    Ok(out)
}
