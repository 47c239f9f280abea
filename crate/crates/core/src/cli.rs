//! Run configuration and the batch commands behind the `susy-cpn` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::check::{CheckReport, ProbeError, ProbeSet, DEFAULT_POINTS, DEFAULT_SEED};
use crate::expr::{parse, EvalPoint, Evaluator, Expr, ParseError};
use crate::grassmann::{AlgebraError, GeneratorSet};
use crate::model::{build_w, build_w_unchecked, Component, Model, ModelError, ModelSpec};
use crate::surface::{self, Branch, DiagonalScheme, MetricReport, SurfaceError};
use crate::weierstrass::{self, WeierstrassPair};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("component {component}, field `{field}`: {source}")]
    Expression {
        component: usize,
        field: &'static str,
        source: ParseError,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("degenerate metric: {0}")]
    Degenerate(String),
}

impl CliError {
    /// 2 for unusable input, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Probe(_) | CliError::Degenerate(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Model,
    Surface,
    Weierstrass,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub f: String,
    /// Fermionic profile γ; absent or null for a purely bosonic component.
    #[serde(default)]
    pub g: Option<String>,
    /// η pair index, as a number or a label such as `"1"`, `"η1"`, `"eta1"`.
    #[serde(default, deserialize_with = "eta_index")]
    pub eta: Option<usize>,
    /// Added to f after conjugation, which makes the component depend on x₋.
    #[serde(default)]
    pub fbar: Option<String>,
}

fn eta_index<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Index(usize),
        Label(String),
    }
    match Option::<Raw>::deserialize(d)? {
        None => Ok(None),
        Some(Raw::Index(k)) => Ok(Some(k)),
        Some(Raw::Label(s)) => {
            let digits = s.trim_start_matches("eta").trim_start_matches('η');
            digits
                .parse()
                .map(Some)
                .map_err(|_| serde::de::Error::custom(format!("bad eta index `{s}`")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    Family,
    #[default]
    GellMann,
    Standard,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cp2Config {
    #[serde(default)]
    pub scheme: SchemeName,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_branch")]
    pub branch: Branch,
}

fn default_branch() -> Branch {
    Branch::Upper
}

impl Default for Cp2Config {
    fn default() -> Self {
        Cp2Config {
            scheme: SchemeName::default(),
            alpha: 0.0,
            branch: Branch::Upper,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x: [f64; 2],
    pub y: [f64; 2],
    /// Samples per axis.
    pub resolution: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub surface: Option<PathBuf>,
    #[serde(default)]
    pub curvature: Option<PathBuf>,
}

fn all_suites() -> Vec<Suite> {
    vec![Suite::Algebra, Suite::Model, Suite::Surface, Suite::Weierstrass]
}

fn default_points() -> usize {
    DEFAULT_POINTS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub n: Option<usize>,
    pub components: Vec<ComponentConfig>,
    #[serde(default = "all_suites")]
    pub suites: Vec<Suite>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub eta_pairs: Option<usize>,
    #[serde(default)]
    pub cp2: Option<Cp2Config>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub tolerance: Option<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = o.points {
            self.points = p;
        }
        if let Some(t) = o.tolerance {
            self.tolerance = t;
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let count = self.components.len();
        if count < 2 {
            return Err(CliError::Invalid(format!("need at least 2 components, got {count}")));
        }
        if let Some(n) = self.n {
            if n != count {
                return Err(CliError::Invalid(format!("n = {n} but {count} components given")));
            }
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(CliError::Invalid("tolerance must be positive".into()));
        }
        if self.points == 0 {
            return Err(CliError::Invalid("points must be positive".into()));
        }
        if let Some(g) = &self.grid {
            if g.resolution == 0 {
                return Err(CliError::Invalid("grid resolution must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    fn holomorphic(&self) -> bool {
        self.components.iter().all(|c| c.fbar.is_none())
    }

    /// The model spec with η indices assigned: explicit `eta` values are
    /// kept, the rest take the lowest unused index in component order.
    pub fn model_spec(&self) -> Result<ModelSpec, CliError> {
        let mut used: Vec<usize> = self.components.iter().filter_map(|c| c.eta).collect();
        let mut next = 0;
        let mut comps = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            let expr = |field: &'static str, text: &str| {
                parse(text).map_err(|source| CliError::Expression {
                    component: i,
                    field,
                    source,
                })
            };
            let mut f = expr("f", &c.f)?;
            if let Some(fb) = &c.fbar {
                f = f + expr("fbar", fb)?.conj();
            }
            let comp = match &c.g {
                None => Component::bosonic(f),
                Some(g) => {
                    let eta = match c.eta {
                        Some(k) => k,
                        None => {
                            while used.contains(&next) {
                                next += 1;
                            }
                            used.push(next);
                            next
                        }
                    };
                    Component::with_fermion(f, eta, expr("g", g)?)
                }
            };
            comps.push(comp);
        }
        let needed = comps
            .iter()
            .filter_map(|c| c.fermion.as_ref().map(|f| f.eta + 1))
            .max()
            .unwrap_or(0);
        let pairs = self.eta_pairs.unwrap_or(2).max(needed);
        let gens = GeneratorSet::new(pairs)?;
        Ok(ModelSpec::new(gens, comps))
    }

    pub fn model(&self) -> Result<Model, CliError> {
        let spec = self.model_spec()?;
        let w = if self.holomorphic() {
            build_w(&spec)?
        } else {
            build_w_unchecked(&spec)?
        };
        Ok(Model::new(w)?)
    }

    pub fn scheme(&self) -> Result<DiagonalScheme, CliError> {
        let cp2 = self.cp2.clone().unwrap_or_default();
        match (self.n(), cp2.scheme) {
            (3, SchemeName::Family) => Ok(DiagonalScheme::Family {
                alpha: cp2.alpha,
                branch: cp2.branch,
            }),
            (3, SchemeName::GellMann) => Ok(DiagonalScheme::GellMann),
            (_, SchemeName::Standard) => Ok(DiagonalScheme::Standard),
            (n, s) if self.cp2.is_some() => Err(CliError::Invalid(format!(
                "scheme {s:?} needs N = 3, got N = {n}"
            ))),
            _ => Ok(DiagonalScheme::Standard),
        }
    }

    /// Hex SHA-256 of the model description.
    pub fn spec_hash(&self) -> String {
        #[derive(Serialize)]
        struct Canonical<'a> {
            components: &'a [ComponentConfig],
            eta_pairs: Option<usize>,
            cp2: Option<&'a Cp2Config>,
        }
        let canonical = Canonical {
            components: &self.components,
            eta_pairs: self.eta_pairs,
            cp2: self.cp2.as_ref(),
        };
        let bytes = serde_json::to_vec(&canonical).expect("plain data serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: u64,
    pub points: usize,
    pub spec_hash: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<CheckReport>,
    pub meta: Meta,
}

impl Report {
    /// True when every gating check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

fn meta(cfg: &RunConfig) -> Meta {
    Meta {
        seed: cfg.seed,
        points: cfg.points,
        spec_hash: cfg.spec_hash(),
        notes: Vec::new(),
    }
}

/// A failing check standing in for a suite that could not run.
fn failed(name: &str) -> CheckReport {
    CheckReport {
        name: name.to_string(),
        max_residuals: BTreeMap::from([("1".to_string(), f64::INFINITY)]),
        pass: false,
        values: BTreeMap::new(),
        diagnostic: false,
    }
}

fn scheme_note(scheme: DiagonalScheme, n: usize) -> Option<String> {
    match scheme {
        DiagonalScheme::Family { alpha, branch } => Some(format!(
            "diagonal scheme: one-parameter family, alpha = {alpha}, branch = {}; off-diagonal pairs scaled by 1/2",
            format!("{branch:?}").to_lowercase()
        )),
        DiagonalScheme::GellMann => Some("diagonal scheme: X1 = P11 - P22, X2 = sqrt(3)(P11 + P22)".into()),
        DiagonalScheme::Standard if n > 2 => Some(format!(
            "diagonal scheme: generalized Gell-Mann; for N = {n} other choices satisfying the diagonal condition exist"
        )),
        DiagonalScheme::Standard => None,
    }
}

fn model_probes(cfg: &RunConfig, model: &Model) -> Result<ProbeSet, CliError> {
    Ok(ProbeSet::sample(cfg.points, cfg.seed, &model.guards())?)
}

fn surface_checks(cfg: &RunConfig, model: &Model, notes: &mut Vec<String>) -> Result<Vec<CheckReport>, CliError> {
    let scheme = cfg.scheme()?;
    notes.extend(scheme_note(scheme, model.n()));
    let metric = MetricReport::new(model.projector());
    let mut guards = model.guards();
    let g_body = metric.g_pm.body();
    if g_body.is_zero() {
        return Err(CliError::Degenerate("g₊₋ vanishes identically".into()));
    }
    guards.push(g_body);
    let probes = ProbeSet::sample(cfg.points, cfg.seed, &guards)?;
    Ok(surface::check_suite(model, scheme, &probes, cfg.tolerance)?)
}

fn weierstrass_checks(cfg: &RunConfig, model: &Model) -> Result<Vec<CheckReport>, CliError> {
    let pair = WeierstrassPair::from_cp1(model.w())?;
    let mut guards = pair.guards();
    let probes = ProbeSet::sample(cfg.points, cfg.seed, &guards)?;
    let dv = pair.bosonic_profile().differentiate(crate::expr::Var::Plus);
    if !dv.is_zero() {
        guards.push(dv);
    }
    let real = ProbeSet::sample_real_slice(cfg.points, cfg.seed, &guards)?;
    Ok(weierstrass::check_suite(&pair, &probes, &real, cfg.tolerance)?)
}

/// Run the configured suites. Build errors (bad expressions, wrong N) are
/// returned; failures inside a suite become failing checks.
pub fn verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    let mut m = meta(cfg);
    let mut checks = Vec::new();
    let needs_model = suites.iter().any(|s| *s != Suite::Algebra);
    let model = if needs_model { Some(cfg.model()?) } else { None };
    if suites.contains(&Suite::Weierstrass) && cfg.n() != 2 {
        return Err(CliError::Invalid("the weierstrass suite needs N = 2".into()));
    }
    for suite in suites {
        match suite {
            Suite::Algebra => {
                let gens = cfg.model_spec()?.gens;
                checks.extend(crate::algebra::check_suite(gens, cfg.seed, cfg.points, cfg.tolerance.min(1e-10)));
            }
            Suite::Model => {
                let model = model.as_ref().expect("built above");
                match model_probes(cfg, model) {
                    Ok(probes) => checks.extend(crate::model::check_suite(model, &probes, cfg.tolerance)),
                    Err(e) => {
                        m.notes.push(format!("model: {e}"));
                        checks.push(failed("model.sampling"));
                    },
                }
            }
            Suite::Surface => {
                let model = model.as_ref().expect("built above");
                match surface_checks(cfg, model, &mut m.notes) {
                    Ok(c) => checks.extend(c),
                    Err(e @ (CliError::Degenerate(_) | CliError::Probe(_) | CliError::Algebra(_))) => {
                        m.notes.push(format!("surface: {e}"));
                        checks.push(failed("surface.metric.regular"));
                    }
                    Err(e) => return Err(e),
                }
            }
            Suite::Weierstrass => {
                let model = model.as_ref().expect("built above");
                match weierstrass_checks(cfg, model) {
                    Ok(c) => checks.extend(c),
                    Err(e @ (CliError::Probe(_) | CliError::Algebra(_))) => {
                        m.notes.push(format!("weierstrass: {e}"));
                        checks.push(failed("weierstrass.regular"));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(Report { checks, meta: m })
}

/// Only the Weierstrass suite.
pub fn weierstrass_report(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut only = cfg.clone();
    only.suites = vec![Suite::Weierstrass];
    verify(&only)
}

fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// CSV of the body of X on the real slice x₊ = x + iy over the grid.
/// Rows where evaluation fails carry NaN coordinates.
pub fn surface_csv(cfg: &RunConfig) -> Result<String, CliError> {
    let grid = cfg
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Invalid("the surface command needs a `grid` section".into()))?;
    let model = cfg.model()?;
    let x = surface::x_vector(model.projector(), cfg.scheme()?)?;
    let bodies: Vec<Expr> = x.components.iter().map(|c| c.body()).collect();
    let mut out = String::from("x,y");
    for i in 1..=bodies.len() {
        write!(out, ",X{i}").unwrap();
    }
    out.push('\n');
    let axis = |r: [f64; 2], k: usize| {
        if grid.resolution == 1 {
            r[0]
        } else {
            r[0] + (r[1] - r[0]) * k as f64 / (grid.resolution - 1) as f64
        }
    };
    for iy in 0..grid.resolution {
        for ix in 0..grid.resolution {
            let (xv, yv) = (axis(grid.x, ix), axis(grid.y, iy));
            let mut ev = Evaluator::new(EvalPoint::real_slice(xv, yv));
            let values: Vec<f64> = match bodies.iter().map(|b| ev.eval(b)).collect::<Result<Vec<_>, _>>() {
                Ok(vs) => vs.iter().map(|v| v.re).collect(),
                Err(_) => vec![f64::NAN; bodies.len()],
            };
            write!(out, "{},{}", fmt_num(xv), fmt_num(yv)).unwrap();
            for v in values {
                write!(out, ",{}", fmt_num(v)).unwrap();
            }
            out.push('\n');
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePoint {
    pub x_plus: [f64; 2],
    pub x_minus: [f64; 2],
    pub body: f64,
    pub body_imag: f64,
    /// |coefficient| of each nilpotent monomial.
    pub soul: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    pub body_min: f64,
    pub body_max: f64,
    pub soul_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub points: Vec<CurvaturePoint>,
    pub summary: CurvatureSummary,
    pub meta: Meta,
}

/// Curvature of the induced metric at each probe point.
pub fn curvature_report(cfg: &RunConfig) -> Result<CurvatureReport, CliError> {
    let model = cfg.model()?;
    let metric = MetricReport::new(model.projector());
    let g_body = metric.g_pm.body();
    if g_body.is_zero() {
        return Err(CliError::Degenerate("g₊₋ vanishes identically".into()));
    }
    let k = metric
        .curvature()
        .map_err(|e| CliError::Degenerate(e.to_string()))?;
    let mut guards = model.guards();
    guards.push(g_body);
    let probes = ProbeSet::sample(cfg.points, cfg.seed, &guards)?;
    let mut points = Vec::new();
    let mut summary = CurvatureSummary {
        body_min: f64::INFINITY,
        body_max: f64::NEG_INFINITY,
        soul_max: 0.0,
    };
    for p in probes.points() {
        let coeffs = surface::coefficients_at(&k, *p).map_err(|e| CliError::Degenerate(e.to_string()))?;
        let mut body = num_complex::Complex64::new(0.0, 0.0);
        let mut soul = BTreeMap::new();
        for (label, v) in coeffs {
            if label == "1" {
                body = v;
            } else {
                summary.soul_max = summary.soul_max.max(v.norm());
                soul.insert(label, v.norm());
            }
        }
        summary.body_min = summary.body_min.min(body.re);
        summary.body_max = summary.body_max.max(body.re);
        points.push(CurvaturePoint {
            x_plus: [p.x_plus.re, p.x_plus.im],
            x_minus: [p.x_minus.re, p.x_minus.im],
            body: body.re,
            body_imag: body.im,
            soul,
        });
    }
    let mut m = meta(cfg);
    m.notes.extend(scheme_note(cfg.scheme()?, cfg.n()));
    Ok(CurvatureReport {
        points,
        summary,
        meta: m,
    })
}
