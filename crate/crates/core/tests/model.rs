use susy_cpn::check::{CheckReport, Expectation, ProbeSet};
use susy_cpn::expr::{parse, Evaluator, Expr};
use susy_cpn::grassmann::{GeneratorSet, Monomial};
use susy_cpn::model::{self, build_w, Component, Model, ModelError, ModelSpec};
use susy_cpn::surface::MetricReport;

fn e(s: &str) -> Expr {
    parse(s).unwrap()
}

fn cp1(f: &str, gamma: Option<&str>) -> Model {
    let second = match gamma {
        Some(g) => Component::with_fermion(e(f), 0, e(g)),
        None => Component::bosonic(e(f)),
    };
    let spec = ModelSpec::new(GeneratorSet::default(), vec![Component::bosonic(Expr::one()), second]);
    Model::from_spec(&spec).unwrap()
}

#[test]
fn lagrangian_top_component_is_minus_twice_metric() {
    for m in [cp1("x^2/2", None), cp1("x", Some("1 + x"))] {
        let probes = ProbeSet::sample(10, 7, &m.guards()).unwrap();
        let l = m.lagrangian_density();
        let g = MetricReport::new(m.projector()).g_pm.body();
        let top = l.coefficient(Monomial(0b11));
        for p in probes.points() {
            let mut ev = Evaluator::new(*p);
            let (a, b) = (ev.eval(&top).unwrap(), ev.eval(&g).unwrap());
            assert!((a + 2.0 * b).norm() < 1e-12 * b.norm().max(1.0), "{a} vs {b}");
            assert!(ev.eval(&l.body()).unwrap().norm() < 1e-14);
        }
    }
}

#[test]
fn ill_conditioned_spec_still_satisfies_identities() {
    // 1 + f(x₊) f̄(x₋) gets as small as 0.17 on these probes
    let m = cp1("x^2 + x", Some("1 + x"));
    let probes = ProbeSet::sample(20, 20_240_601, &m.guards()).unwrap();
    for r in model::check_suite(&m, &probes, 1e-7) {
        assert!(r.pass, "{} {:?}", r.name, r.max_residuals);
    }
}

#[test]
fn antiholomorphic_input_is_rejected() {
    let spec = ModelSpec::bosonic([Expr::one(), Expr::x_plus() + Expr::x_minus()]);
    assert!(matches!(build_w(&spec), Err(ModelError::NotHolomorphic { .. })));
}

#[test]
fn single_component_is_rejected() {
    let spec = ModelSpec::bosonic([e("x")]);
    assert!(Model::from_spec(&spec).is_err());
}

#[test]
fn cp3_with_two_fermions() {
    let gens = GeneratorSet::default();
    let spec = ModelSpec::new(
        gens,
        vec![
            Component::bosonic(Expr::one()),
            Component::with_fermion(e("x/2"), 0, Expr::one()),
            Component::with_fermion(e("x^2/3"), 1, e("x")),
            Component::bosonic(e("1/(x - 4)")),
        ],
    );
    let m = Model::from_spec(&spec).unwrap();
    let probes = ProbeSet::sample(8, 11, &m.guards()).unwrap();
    for r in model::check_suite(&m, &probes, 1e-9) {
        assert!(r.pass, "{} {:?}", r.name, r.max_residuals);
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn random_cubic_solves_equations_of_motion(
            c in proptest::array::uniform4(-0.5f64..0.5),
            g in proptest::array::uniform2(-1.0f64..1.0),
        ) {
            let f = format!("{} + {}*x + {}*x^2 + {}*x^3", c[0], c[1], c[2], c[3])
                .replace("+ -", "- ");
            let gamma = format!("{} + {}*x", g[0], g[1]).replace("+ -", "- ");
            let m = cp1(&f, Some(&gamma));
            let probes = ProbeSet::sample(8, 3, &m.guards()).unwrap();
            let eom = CheckReport::evaluate(
                "eom",
                m.eom_residual().components(),
                &probes,
                Expectation::Vanishes(1e-9),
            );
            prop_assert!(eom.pass, "{f}: {:?}", eom.max_residuals);
        }
    }
}
