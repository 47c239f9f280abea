//! Surfaces in R^(N²−1) read off the projector, their induced metric and
//! Gaussian curvature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::{CheckReport, Expectation, ProbeSet};
use crate::expr::{Expr, HalfInteger, Var};
use crate::grassmann::{AlgebraError, GeneratorSet, SuperScalar};
use crate::model::Model;
use crate::superspace::{SuperMatrix, SuperVector};

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("scheme {scheme} needs N = {expected}, got N = {got}")]
    WrongDimension {
        scheme: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("singular diagonal coefficient matrix (det = {0})")]
    SingularCoefficients(f64),
    #[error("degenerate metric: {0}")]
    Degenerate(#[from] AlgebraError),
}

/// Sign branch of the CP² coefficient family; `Upper` takes the upper
/// signs of c = ∓sin α − cos α/√3, d = −sin α/√3 ± cos α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

/// How the N diagonal entries of P become N−1 coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagonalScheme {
    /// Generalized Gell-Mann diagonal matrices, X = tr(λP); for N = 2 this is
    /// X₃ = P₁₁ − P₂₂.
    Standard,
    /// N = 3: X₁ = P₁₁ − P₂₂, X₂ = √3(P₁₁ + P₂₂).
    GellMann,
    /// N = 3: P₁₁ = 1/3 + aX₁ + bX₂, P₂₂ = 1/3 + cX₁ + dX₂.
    Family { alpha: f64, branch: Branch },
}

/// The (a, b, c, d) coefficients of the CP² family.
pub fn family_coefficients(alpha: f64, branch: Branch) -> [f64; 4] {
    let s3 = 3f64.sqrt();
    let (sn, cs) = alpha.sin_cos();
    let sign = match branch {
        Branch::Upper => 1.0,
        Branch::Lower => -1.0,
    };
    [
        2.0 / s3 * cs,
        2.0 / s3 * sn,
        -sign * sn - cs / s3,
        -sn / s3 + sign * cs,
    ]
}

/// Coordinates X_i of the surface, all built linearly from entries of P.
#[derive(Debug, Clone)]
pub struct SurfaceVector {
    pub components: Vec<SuperScalar>,
    pub scheme: DiagonalScheme,
    /// Σ∂₊X_i∂₋X_i = kappa · tr(∂₊P∂₋P) for this construction.
    pub kappa: f64,
    /// Number of trailing components that come from the diagonal.
    pub diagonal_count: usize,
}

fn cst(gens: GeneratorSet, c: Complex64) -> SuperScalar {
    SuperScalar::constant(gens, c)
}

/// Off-diagonal pairs (i<j): s(P_ij + P_ji), s·i(P_ij − P_ji).
fn off_diagonal(p: &SuperMatrix, s: f64) -> Vec<SuperScalar> {
    let gens = p.generators();
    let n = p.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let sum = p.get(i, j) + p.get(j, i);
            let dif = p.get(i, j) - p.get(j, i);
            out.push(sum.scale(&Expr::real(s)));
            out.push(&cst(gens, Complex64::new(0.0, s)) * &dif);
        }
    }
    out
}

/// X₁ = P₁₂ + P₂₁, X₂ = i(P₁₂ − P₂₁), X₃ = P₁₁ − P₂₂.
pub fn x_vector_cp1(p: &SuperMatrix) -> Result<SurfaceVector, SurfaceError> {
    if p.dim() != 2 {
        return Err(SurfaceError::WrongDimension {
            scheme: "cp1",
            expected: 2,
            got: p.dim(),
        });
    }
    x_vector(p, DiagonalScheme::Standard)
}

/// X_i = Φ†σ_iΦ with the Pauli matrices.
pub fn x_vector_cp1_from_phi(phi: &SuperVector) -> Result<SurfaceVector, SurfaceError> {
    if phi.len() != 2 {
        return Err(SurfaceError::WrongDimension {
            scheme: "cp1",
            expected: 2,
            got: phi.len(),
        });
    }
    let gens = phi.generators();
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let sigmas = [
        [[zero, one], [one, zero]],
        [[zero, -i], [i, zero]],
        [[one, zero], [zero, -one]],
    ];
    let row = phi.dagger();
    let components = sigmas
        .iter()
        .map(|s| {
            let m = SuperMatrix::from_fn(gens, 2, |a, b| cst(gens, s[a][b]));
            SuperVector::row_times_column(&SuperMatrix::row_times(&row, &m), phi)
        })
        .collect();
    Ok(SurfaceVector {
        components,
        scheme: DiagonalScheme::Standard,
        kappa: 2.0,
        diagonal_count: 1,
    })
}

/// CP² coordinates from the (a, b, c, d) family. The off-diagonal pairs
/// are scaled by ½ so that the diagonal and off-diagonal blocks share the
/// family's constant, Σ∂₊X∂₋X = ½ tr(∂₊P∂₋P).
pub fn x_vector_cp2(p: &SuperMatrix, alpha: f64, branch: Branch) -> Result<SurfaceVector, SurfaceError> {
    x_vector(p, DiagonalScheme::Family { alpha, branch })
}

pub fn x_vector(p: &SuperMatrix, scheme: DiagonalScheme) -> Result<SurfaceVector, SurfaceError> {
    let gens = p.generators();
    let n = p.dim();
    let need3 = |name| {
        if n == 3 {
            Ok(())
        } else {
            Err(SurfaceError::WrongDimension {
                scheme: name,
                expected: 3,
                got: n,
            })
        }
    };
    let (off_scale, kappa, diagonal) = match scheme {
        DiagonalScheme::Standard => {
            let mut diag = Vec::new();
            for l in 1..n {
                let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
                let mut acc = SuperScalar::zero(gens);
                for k in 0..l {
                    acc = &acc + p.get(k, k);
                }
                acc = &acc - &p.get(l, l).scale(&Expr::real(l as f64));
                diag.push(acc.scale(&Expr::real(norm)));
            }
            (1.0, 2.0, diag)
        }
        DiagonalScheme::GellMann => {
            need3("gell-mann")?;
            let x1 = p.get(0, 0) - p.get(1, 1);
            let x2 = (p.get(0, 0) + p.get(1, 1)).scale(&Expr::real(3f64.sqrt()));
            (1.0, 2.0, vec![x1, x2])
        }
        DiagonalScheme::Family { alpha, branch } => {
            need3("family")?;
            let [a, b, c, d] = family_coefficients(alpha, branch);
            let det = a * d - b * c;
            if det.abs() < 1e-12 {
                return Err(SurfaceError::SingularCoefficients(det));
            }
            let third = SuperScalar::constant(gens, 1.0 / 3.0);
            let q1 = p.get(0, 0) - &third;
            let q2 = p.get(1, 1) - &third;
            let x1 = &q1.scale(&Expr::real(d / det)) - &q2.scale(&Expr::real(b / det));
            let x2 = &q2.scale(&Expr::real(a / det)) - &q1.scale(&Expr::real(c / det));
            (0.5, 0.5, vec![x1, x2])
        }
    };
    let mut components = off_diagonal(p, off_scale);
    let diagonal_count = diagonal.len();
    components.extend(diagonal);
    Ok(SurfaceVector {
        components,
        scheme,
        kappa,
        diagonal_count,
    })
}

impl SurfaceVector {
    pub fn generators(&self) -> GeneratorSet {
        self.components[0].generators()
    }

    pub fn diagonal(&self) -> &[SuperScalar] {
        &self.components[self.components.len() - self.diagonal_count..]
    }

    /// Σ ∂_a X_i ∂_b X_i.
    pub fn gradient_product(&self, a: Var, b: Var) -> SuperScalar {
        sum_products(&self.components, a, b)
    }
}

fn sum_products(xs: &[SuperScalar], a: Var, b: Var) -> SuperScalar {
    let gens = xs[0].generators();
    xs.iter().fold(SuperScalar::zero(gens), |acc, x| {
        &acc + &(&x.differentiate(a) * &x.differentiate(b))
    })
}

/// ΣX_i² − 1.
pub fn sphere_residual(x: &SurfaceVector) -> SuperScalar {
    let gens = x.generators();
    let sum = x
        .components
        .iter()
        .fold(SuperScalar::zero(gens), |acc, c| &acc + &(c * c));
    &sum - &SuperScalar::one(gens)
}

/// tr(∂_a P ∂_b P).
pub fn trace_metric(p: &SuperMatrix, a: Var, b: Var) -> SuperScalar {
    (&p.partial(a) * &p.partial(b)).trace()
}

/// (∂₊Φ†)(I − P)∂₋Φ + (∂₋Φ†)(I − P)∂₊Φ.
pub fn metric_from_phi(phi: &SuperVector, p: &SuperMatrix) -> SuperScalar {
    let gens = phi.generators();
    let q = &SuperMatrix::identity(gens, phi.len()) - p;
    let phid = phi.dagger();
    let term = |a: Var, b: Var| {
        SuperVector::row_times_column(&SuperMatrix::row_times(&phid.partial(a), &q), &phi.partial(b))
    };
    &term(Var::Plus, Var::Minus) + &term(Var::Minus, Var::Plus)
}

/// Induced metric of the projector surface.
#[derive(Debug, Clone)]
pub struct MetricReport {
    /// g₊₋ = tr(∂₊P∂₋P).
    pub g_pm: SuperScalar,
    pub g_pp: SuperScalar,
    pub g_mm: SuperScalar,
}

impl MetricReport {
    pub fn new(p: &SuperMatrix) -> Self {
        MetricReport {
            g_pm: trace_metric(p, Var::Plus, Var::Minus),
            g_pp: trace_metric(p, Var::Plus, Var::Plus),
            g_mm: trace_metric(p, Var::Minus, Var::Minus),
        }
    }

    /// Gaussian curvature of the conformal metric g₊₋ dx₊dx₋:
    /// K = −(1/g₊₋) ∂₊∂₋ ln g₊₋.
    pub fn curvature(&self) -> Result<SuperScalar, SurfaceError> {
        let inv = self.g_pm.power_even(HalfInteger::int(-1))?;
        let lap = self
            .g_pm
            .log_even()?
            .differentiate(Var::Minus)
            .differentiate(Var::Plus);
        Ok(-(&inv * &lap))
    }
}

/// Value of every coefficient of `s` at one point, keyed by monomial label.
pub fn coefficients_at(
    s: &SuperScalar,
    point: crate::expr::EvalPoint,
) -> Result<Vec<(String, Complex64)>, crate::expr::EvalError> {
    let mut ev = crate::expr::Evaluator::new(point);
    s.terms().map(|(m, c)| Ok((m.label(), ev.eval(c)?))).collect()
}

/// Closed form of g₊₋ for w = (1, W₁, …): for N = 2 the quotient
/// ∂₊W∂₋W̄/(1+|W|²)², for N = 3 the two-field energy density.
pub fn closed_form_metric(w: &SuperVector) -> Option<SuperScalar> {
    if !w.get(0).soul().is_empty() || w.get(0).body().as_const() != Some(Complex64::new(1.0, 0.0)) {
        return None;
    }
    let gens = w.generators();
    let one = SuperScalar::one(gens);
    let dp = |s: &SuperScalar| s.differentiate(Var::Plus);
    let abs2 = |s: &SuperScalar| &s.dagger() * s;
    match w.len() {
        2 => {
            let wf = w.get(1);
            let denom = (&one + &abs2(wf)).power_even(HalfInteger::int(-2)).ok()?;
            Some(&(&dp(wf) * &wf.dagger().differentiate(Var::Minus)) * &denom)
        }
        3 => {
            let (w1, w2) = (w.get(1), w.get(2));
            let cross = &(w2 * &dp(w1)) - &(w1 * &dp(w2));
            let num = &(&abs2(&dp(w1)) + &abs2(&dp(w2))) + &abs2(&cross);
            let denom = (&(&one + &abs2(w1)) + &abs2(w2)).power_even(HalfInteger::int(-2)).ok()?;
            Some(&num * &denom)
        }
        _ => None,
    }
}

/// Surface checks for a holomorphic model.
pub fn check_suite(
    model: &Model,
    scheme: DiagonalScheme,
    probes: &ProbeSet,
    tol: f64,
) -> Result<Vec<CheckReport>, SurfaceError> {
    let gens = model.generators();
    let n = model.n();
    let p = model.projector();
    let vanish = Expectation::Vanishes(tol);
    let x = x_vector(p, scheme)?;
    let metric = MetricReport::new(p);
    let mut out = Vec::new();

    let herm: Vec<_> = x.components.iter().map(|c| &c.dagger() - c).collect();
    out.push(CheckReport::evaluate("surface.hermitian", &herm, probes, vanish));
    if n == 2 {
        out.push(CheckReport::evaluate(
            "surface.sphere",
            [&sphere_residual(&x)],
            probes,
            vanish,
        ));
        let alt = x_vector_cp1_from_phi(model.phi())?;
        let diff: Vec<_> = x.components.iter().zip(&alt.components).map(|(a, b)| a - b).collect();
        out.push(CheckReport::evaluate("surface.constructions_agree", &diff, probes, vanish));
    }

    // diagonal condition with the scheme's constant
    let diag_entries: Vec<SuperScalar> = (0..n).map(|i| p.get(i, i).clone()).collect();
    let lhs = sum_products(x.diagonal(), Var::Plus, Var::Minus);
    let rhs = sum_products(&diag_entries, Var::Plus, Var::Minus).scale(&Expr::real(x.kappa));
    out.push(
        CheckReport::evaluate("surface.diagonal_condition", [&(&lhs - &rhs)], probes, vanish)
            .with_value("constant", x.kappa),
    );

    out.push(CheckReport::evaluate(
        "surface.metric.g_pp_g_mm",
        [&metric.g_pp, &metric.g_mm],
        probes,
        vanish,
    ));
    let dpp = &p.partial(Var::Plus) * &p.partial(Var::Plus);
    out.push(CheckReport::evaluate(
        "surface.metric.dp_p_squared",
        dpp.entries(),
        probes,
        vanish,
    ));
    let inv_kappa = Expr::real(1.0 / x.kappa);
    let from_x = x.gradient_product(Var::Plus, Var::Minus).scale(&inv_kappa);
    out.push(CheckReport::evaluate(
        "surface.metric.from_x",
        [&(&from_x - &metric.g_pm)],
        probes,
        vanish,
    ));
    let xpp = x.gradient_product(Var::Plus, Var::Plus);
    let xmm = x.gradient_product(Var::Minus, Var::Minus);
    out.push(CheckReport::evaluate("surface.metric.from_x_pp_mm", [&xpp, &xmm], probes, vanish));
    out.push(CheckReport::evaluate(
        "surface.metric.from_phi",
        [&(&metric_from_phi(model.phi(), p) - &metric.g_pm)],
        probes,
        vanish,
    ));
    if let Some(closed) = closed_form_metric(model.w()) {
        out.push(CheckReport::evaluate(
            "surface.metric.closed_form",
            [&(&closed - &metric.g_pm)],
            probes,
            vanish,
        ));
    }

    let k = metric.curvature()?;
    let body_values = body_range(&k, probes);
    let soul = k.soul();
    if n == 2 {
        let two = SuperScalar::constant(gens, 2.0);
        let mut r = CheckReport::evaluate("surface.curvature", [&(&k - &two)], probes, Expectation::Vanishes(tol.max(1e-8)));
        if let Some((lo, hi)) = body_values {
            r = r.with_value("body_min", lo).with_value("body_max", hi);
        }
        out.push(r);
    } else {
        let mut r = CheckReport::evaluate("surface.curvature.soul", [&soul], probes, Expectation::Diagnostic);
        if let Some((lo, hi)) = body_values {
            r = r.with_value("body_min", lo).with_value("body_max", hi);
        }
        out.push(r);
    }
    Ok(out)
}

/// Min and max of the real part of the body over the probes.
pub fn body_range(s: &SuperScalar, probes: &ProbeSet) -> Option<(f64, f64)> {
    let body = s.body();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in probes.points() {
        let v = body.evaluate(*p).ok()?.re;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Some((lo, hi))
}
