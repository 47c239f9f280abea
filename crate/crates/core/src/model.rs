//! The supersymmetric CP^(N-1) model built from a holomorphic vector w.

use thiserror::Error;

use crate::check::{CheckReport, Expectation, ProbeSet};
use crate::expr::{Expr, HalfInteger, Var};
use crate::grassmann::{AlgebraError, GeneratorSet, SuperScalar};
use crate::superspace::{SuperMatrix, SuperVector};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("component {component}: {what} depends on x₋")]
    NotHolomorphic { component: usize, what: &'static str },
    #[error("need at least 2 components, got {0}")]
    TooFewComponents(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Fermionic profile η_k · γ(x₊).
#[derive(Debug, Clone)]
pub struct Fermion {
    pub eta: usize,
    pub profile: Expr,
}

#[derive(Debug, Clone)]
pub struct Component {
    pub f: Expr,
    pub fermion: Option<Fermion>,
}

impl Component {
    pub fn bosonic(f: Expr) -> Self {
        Component { f, fermion: None }
    }

    pub fn with_fermion(f: Expr, eta: usize, profile: Expr) -> Self {
        Component {
            f,
            fermion: Some(Fermion { eta, profile }),
        }
    }
}

/// A holomorphic solution: components w_i = f_i + iθ₊ η_k γ_i.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub gens: GeneratorSet,
    pub components: Vec<Component>,
}

impl ModelSpec {
    pub fn new(gens: GeneratorSet, components: Vec<Component>) -> Self {
        ModelSpec { gens, components }
    }

    pub fn bosonic(fs: impl IntoIterator<Item = Expr>) -> Self {
        ModelSpec {
            gens: GeneratorSet::default(),
            components: fs.into_iter().map(Component::bosonic).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }
}

/// w from a spec, rejecting any x₋ dependence.
pub fn build_w(spec: &ModelSpec) -> Result<SuperVector, ModelError> {
    for (i, c) in spec.components.iter().enumerate() {
        if c.f.depends_on(Var::Minus) {
            return Err(ModelError::NotHolomorphic {
                component: i,
                what: "bosonic profile",
            });
        }
        if let Some(fm) = &c.fermion {
            if fm.profile.depends_on(Var::Minus) {
                return Err(ModelError::NotHolomorphic {
                    component: i,
                    what: "fermionic profile",
                });
            }
        }
    }
    build_w_unchecked(spec)
}

/// As [`build_w`] without the holomorphy check; used for negative controls.
pub fn build_w_unchecked(spec: &ModelSpec) -> Result<SuperVector, ModelError> {
    if spec.n() < 2 {
        return Err(ModelError::TooFewComponents(spec.n()));
    }
    let comps = spec
        .components
        .iter()
        .map(|c| component_superfield(spec.gens, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SuperVector::new(comps)?)
}

/// f + iθ₊η_k γ for one component.
pub fn component_superfield(gens: GeneratorSet, c: &Component) -> Result<SuperScalar, AlgebraError> {
    let mut w = SuperScalar::from_expr(gens, c.f.clone());
    if let Some(fm) = &c.fermion {
        let theta = SuperScalar::theta_plus(gens);
        let eta = SuperScalar::generator(gens, gens.eta(fm.eta)?);
        w = &w + &(&theta * &eta).scale(&(Expr::i() * &fm.profile));
    }
    Ok(w)
}

/// Φ = (w†w)^(-1/2) w.
pub fn phi_from_w(w: &SuperVector) -> Result<SuperVector, ModelError> {
    let norm = SuperVector::inner(w, w).power_even(HalfInteger::halves(-1))?;
    Ok(w.scale_left(&norm))
}

/// P = ΦΦ†.
pub fn projector(phi: &SuperVector) -> SuperMatrix {
    SuperMatrix::outer(phi, &phi.dagger())
}

/// Component fields of a superfield vector in the normalization
/// Φ = z + iθ₊χ₊ + iθ₋χ₋ − ½θ₊θ₋F.
#[derive(Debug, Clone)]
pub struct SuperfieldComponents {
    pub z: SuperVector,
    pub chi_plus: SuperVector,
    pub chi_minus: SuperVector,
    pub f: SuperVector,
}

pub fn superfield_components(phi: &SuperVector) -> SuperfieldComponents {
    let minus_i = -Expr::i();
    SuperfieldComponents {
        z: phi.map(|c| c.theta_component(0b00)),
        chi_plus: phi.map(|c| c.theta_component(0b01).scale(&minus_i)),
        chi_minus: phi.map(|c| c.theta_component(0b10).scale(&minus_i)),
        f: phi.map(|c| c.theta_component(0b11).scale(&Expr::real(-2.0))),
    }
}

/// Residuals of the component form of Φ†Φ = 1.
#[derive(Debug, Clone)]
pub struct ConstraintResiduals {
    /// z†z − 1
    pub z: SuperScalar,
    /// θ₊ and θ₋ components: z†χ₊ + χ₋†z and z†χ₋ + χ₊†z
    pub chi: [SuperScalar; 2],
    /// χ±†z + z†χ± with equal indices
    pub chi_same_index: [SuperScalar; 2],
    /// F†z + z†F − 2(χ₋†χ₋ − χ₊†χ₊)
    pub f: SuperScalar,
}

pub fn constraint_residuals(phi: &SuperVector) -> ConstraintResiduals {
    let c = superfield_components(phi);
    let one = SuperScalar::one(phi.generators());
    let pair = |a: &SuperVector, b: &SuperVector| &SuperVector::inner(&c.z, a) + &SuperVector::inner(b, &c.z);
    let chis = &SuperVector::inner(&c.chi_minus, &c.chi_minus) - &SuperVector::inner(&c.chi_plus, &c.chi_plus);
    ConstraintResiduals {
        z: &SuperVector::inner(&c.z, &c.z) - &one,
        chi: [pair(&c.chi_plus, &c.chi_minus), pair(&c.chi_minus, &c.chi_plus)],
        chi_same_index: [pair(&c.chi_plus, &c.chi_plus), pair(&c.chi_minus, &c.chi_minus)],
        f: &(&SuperVector::inner(&c.f, &c.z) + &SuperVector::inner(&c.z, &c.f)) - &chis.scale(&Expr::real(2.0)),
    }
}

/// The currents of the model.
#[derive(Debug, Clone)]
pub struct Currents {
    /// K = [∂̌₋P, P].
    pub k: SuperMatrix,
    /// Hermitian conjugate of K computed with the algebra's dagger.
    pub k_dagger: SuperMatrix,
    /// [∂̌₊P, P], the commutator that mirrors K with ± exchanged.
    pub k_mirror: SuperMatrix,
    pub m: SuperMatrix,
    pub l: SuperMatrix,
}

/// Everything derived from one w.
#[derive(Debug, Clone)]
pub struct Model {
    w: SuperVector,
    norm_squared: SuperScalar,
    inv_norm_squared: SuperScalar,
    phi: SuperVector,
    p: SuperMatrix,
}

impl Model {
    pub fn new(w: SuperVector) -> Result<Self, ModelError> {
        let norm_squared = SuperVector::inner(&w, &w);
        let inv_norm_squared = norm_squared.inverse()?;
        let phi = w.scale_left(&norm_squared.power_even(HalfInteger::halves(-1))?);
        let p = projector(&phi);
        Ok(Model {
            w,
            norm_squared,
            inv_norm_squared,
            phi,
            p,
        })
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self, ModelError> {
        Self::new(build_w(spec)?)
    }

    pub fn generators(&self) -> GeneratorSet {
        self.w.generators()
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn w(&self) -> &SuperVector {
        &self.w
    }

    pub fn phi(&self) -> &SuperVector {
        &self.phi
    }

    pub fn projector(&self) -> &SuperMatrix {
        &self.p
    }

    /// |w|² = w†w.
    pub fn norm_squared(&self) -> &SuperScalar {
        &self.norm_squared
    }

    /// Expressions whose smallness marks a singular probe point.
    pub fn guards(&self) -> Vec<Expr> {
        vec![self.norm_squared.body()]
    }

    fn identity(&self) -> SuperMatrix {
        SuperMatrix::identity(self.generators(), self.n())
    }

    /// A± = Φ†∂̌±Φ.
    pub fn connection(&self, v: Var) -> SuperScalar {
        SuperVector::inner(&self.phi, &self.phi.super_derivative(v))
    }

    /// Ď±Λ = ∂̌±Λ − ΛA±.
    pub fn covariant_derivative(&self, lambda: &SuperVector, v: Var) -> SuperVector {
        &lambda.super_derivative(v) - &lambda.scale_right(&self.connection(v))
    }

    /// (I − P)∂̌±Φ.
    pub fn covariant_derivative_projected(&self, v: Var) -> SuperVector {
        (&self.identity() - &self.p).mul_vector(&self.phi.super_derivative(v))
    }

    /// 2(|Ď₊Φ|² − |Ď₋Φ|²) with |V|² = V†V.
    pub fn lagrangian_density(&self) -> SuperScalar {
        let dp = self.covariant_derivative(&self.phi, Var::Plus);
        let dm = self.covariant_derivative(&self.phi, Var::Minus);
        let diff = &SuperVector::inner(&dp, &dp) - &SuperVector::inner(&dm, &dm);
        diff.scale(&Expr::real(2.0))
    }

    /// Ď₊Ď₋Φ + |Ď₋Φ|²Φ.
    pub fn eom_residual(&self) -> SuperVector {
        let dm = self.covariant_derivative(&self.phi, Var::Minus);
        let dpdm = self.covariant_derivative(&dm, Var::Plus);
        &dpdm + &self.phi.scale_left(&SuperVector::inner(&dm, &dm))
    }

    /// The equation of motion written in terms of w.
    pub fn eom_residual_w(&self) -> SuperVector {
        let w = &self.w;
        let wd = w.dagger();
        let inv = &self.inv_norm_squared;
        let dp = w.super_derivative(Var::Plus);
        let dm = w.super_derivative(Var::Minus);
        let dpdm = dm.super_derivative(Var::Plus);
        let a_minus = &SuperVector::row_times_column(&wd, &dm) * inv;
        let a_plus = &SuperVector::row_times_column(&wd, &dp) * inv;
        let a_both = &SuperVector::row_times_column(&wd, &dpdm) * inv;
        let last = (&a_plus * &a_minus).scale(&Expr::real(2.0));
        let mut r = &dpdm - &dp.scale_right(&a_minus);
        r = &r - &dm.scale_left(&a_plus);
        r = &r - &w.scale_left(&a_both);
        &r + &w.scale_right(&last)
    }

    pub fn currents(&self) -> Currents {
        let p = &self.p;
        let dm_p = p.super_derivative(Var::Minus);
        let dp_p = p.super_derivative(Var::Plus);
        let k = SuperMatrix::commutator(&dm_p, p);
        let k_dagger = k.dagger();
        let k_mirror = SuperMatrix::commutator(&dp_p, p);
        let i_minus_p = &self.identity() - p;
        let dm_w = self.w.super_derivative(Var::Minus);
        let m = (&i_minus_p * &SuperMatrix::outer(&dm_w, &self.w.dagger()))
            .scale_right(&self.inv_norm_squared);
        let dm_wd = self.w.dagger().super_derivative(Var::Minus);
        let l = (&SuperMatrix::outer(&self.w, &dm_wd) * &i_minus_p)
            .scale_right(&self.inv_norm_squared.scale(&Expr::real(-1.0)));
        Currents {
            k,
            k_dagger,
            k_mirror,
            m,
            l,
        }
    }
}

fn entries(m: &SuperMatrix) -> Vec<SuperScalar> {
    m.entries().to_vec()
}

fn diff(a: &SuperMatrix, b: &SuperMatrix) -> Vec<SuperScalar> {
    entries(&(a - b))
}

/// Every identity a holomorphic solution satisfies, each as a full
/// superfield identity over `probes`.
pub fn check_suite(model: &Model, probes: &ProbeSet, tol: f64) -> Vec<CheckReport> {
    let gens = model.generators();
    let n = model.n();
    let phi = model.phi();
    let p = model.projector();
    let one = SuperScalar::one(gens);
    let vanish = Expectation::Vanishes(tol);
    let mut out = Vec::new();
    let mut push = |name: &str, items: Vec<SuperScalar>, e: Expectation| {
        out.push(CheckReport::evaluate(name, &items, probes, e));
    };

    push(
        "model.normalization",
        vec![&SuperVector::inner(phi, phi) - &one],
        vanish,
    );
    let cons = constraint_residuals(phi);
    push("model.constraint.z", vec![cons.z], vanish);
    push("model.constraint.chi", cons.chi.to_vec(), vanish);
    push(
        "model.constraint.chi_same_index",
        cons.chi_same_index.to_vec(),
        Expectation::Diagnostic,
    );
    push("model.constraint.f", vec![cons.f], vanish);

    push("model.projector.idempotent", diff(&(p * p), p), vanish);
    push("model.projector.hermitian", diff(&p.dagger(), p), vanish);
    push("model.projector.trace", vec![&p.trace() - &one], vanish);
    push(
        "model.projector.fixes_phi",
        (&p.mul_vector(phi) - phi).components().to_vec(),
        vanish,
    );
    if n == 2 {
        push("model.projector.det", vec![p.det()], vanish);
    }

    let dm_phi = model.covariant_derivative(phi, Var::Minus);
    push("model.covariant.minus_vanishes", dm_phi.components().to_vec(), vanish);
    for v in [Var::Plus, Var::Minus] {
        let a = model.covariant_derivative(phi, v);
        let b = model.covariant_derivative_projected(v);
        let name = match v {
            Var::Plus => "model.covariant.forms_agree.plus",
            Var::Minus => "model.covariant.forms_agree.minus",
        };
        push(name, (&a - &b).components().to_vec(), vanish);
    }

    push("model.eom", model.eom_residual().components().to_vec(), vanish);
    push("model.eom_w", model.eom_residual_w().components().to_vec(), vanish);

    let cur = model.currents();
    let dm_p = p.super_derivative(Var::Minus);
    push("model.currents.k_is_m_plus_l", diff(&cur.k, &(&cur.m + &cur.l)), vanish);
    push("model.currents.m_minus_l", diff(&(&cur.m - &cur.l), &dm_p), vanish);
    push("model.currents.m_vanishes", entries(&cur.m), vanish);
    push("model.currents.l_is_minus_dp", diff(&cur.l, &-&dm_p), vanish);

    let superlaw = &cur.k.super_derivative(Var::Plus) + &cur.k_dagger.super_derivative(Var::Minus);
    push("model.conservation.super", entries(&superlaw), vanish);
    let mirrored = &cur.k.super_derivative(Var::Plus) + &cur.k_mirror.super_derivative(Var::Minus);
    push(
        "model.conservation.super_with_mirror_commutator",
        entries(&mirrored),
        Expectation::Diagnostic,
    );

    // bold L = −i∂̌₋𝕃 and its partner built from the mirrored commutator
    let minus_i = SuperScalar::from_expr(gens, -Expr::i());
    let bold_l = cur.l.super_derivative(Var::Minus).scale_left(&minus_i);
    let bold_l_partner = cur.k_mirror.super_derivative(Var::Plus).scale_left(&minus_i);
    let dm_pp = p.partial(Var::Minus);
    let dp_pp = p.partial(Var::Plus);
    push("model.bold_l.definition", diff(&bold_l, &dm_pp), vanish);
    push("model.bold_l.dagger", diff(&bold_l.dagger(), &dp_pp), vanish);
    let law = &bold_l.partial(Var::Plus) + &bold_l_partner.partial(Var::Minus);
    push("model.bold_l.conservation", entries(&law), vanish);
    let law_dagger = &bold_l.partial(Var::Plus) + &bold_l.dagger().partial(Var::Minus);
    push(
        "model.bold_l.conservation_with_dagger",
        entries(&law_dagger),
        Expectation::Diagnostic,
    );
    out
}
