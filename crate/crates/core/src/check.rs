//! Identity testing by evaluation at random probe points.
//!
//! A check collects SuperScalar residuals, evaluates every coefficient at
//! every probe point, and keeps the maximum magnitude per monomial label.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalPoint, Evaluator, Expr};
use crate::grassmann::SuperScalar;

pub const DEFAULT_POINTS: usize = 20;
pub const DEFAULT_SEED: u64 = 20_240_601;
/// Divisors and log arguments closer to zero than this reject a probe point.
pub const SINGULARITY_GUARD: f64 = 1e-4;
const MAX_DRAWS_PER_POINT: usize = 10_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProbeError {
    #[error("no regular probe point found after {0} draws")]
    Exhausted(usize),
}

/// Fixed, reproducible set of evaluation points.
#[derive(Debug, Clone)]
pub struct ProbeSet {
    points: Vec<EvalPoint>,
}

fn disk_point<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    let t = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, t)
}

fn regular(p: EvalPoint, guards: &[Expr]) -> bool {
    let mut ev = Evaluator::with_guard(p, SINGULARITY_GUARD);
    guards
        .iter()
        .all(|g| matches!(ev.eval(g), Ok(v) if v.norm() >= SINGULARITY_GUARD))
}

impl ProbeSet {
    pub fn from_points(points: Vec<EvalPoint>) -> Self {
        ProbeSet { points }
    }

    /// Polarized points: x₊ and x₋ drawn independently from the unit disk.
    /// A point is redrawn when any guard, or any divisor inside a guard, is
    /// smaller than [`SINGULARITY_GUARD`].
    pub fn sample(count: usize, seed: u64, guards: &[Expr]) -> Result<Self, ProbeError> {
        Self::sample_with(count, seed, guards, |rng| {
            EvalPoint::new(disk_point(rng), disk_point(rng))
        })
    }

    /// Points on the physical slice x₋ = conj(x₊).
    pub fn sample_real_slice(count: usize, seed: u64, guards: &[Expr]) -> Result<Self, ProbeError> {
        Self::sample_with(count, seed, guards, |rng| {
            let z = disk_point(rng);
            EvalPoint::new(z, z.conj())
        })
    }

    fn sample_with(
        count: usize,
        seed: u64,
        guards: &[Expr],
        mut draw: impl FnMut(&mut ChaCha8Rng) -> EvalPoint,
    ) -> Result<Self, ProbeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(count);
        for _ in 0..count {
            let mut found = None;
            for _ in 0..MAX_DRAWS_PER_POINT {
                let p = draw(&mut rng);
                if regular(p, guards) {
                    found = Some(p);
                    break;
                }
            }
            points.push(found.ok_or(ProbeError::Exhausted(MAX_DRAWS_PER_POINT))?);
        }
        Ok(ProbeSet { points })
    }

    pub fn points(&self) -> &[EvalPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn merge_max(mut a: BTreeMap<String, f64>, b: BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    for (k, v) in b {
        let e = a.entry(k).or_insert(0.0);
        if v > *e {
            *e = v;
        }
    }
    a
}

/// Maximum |coefficient| per monomial label over all items and points.
/// An evaluation failure records an infinite residual for that label.
pub fn component_maxima<'a>(
    items: impl IntoIterator<Item = &'a SuperScalar>,
    probes: &ProbeSet,
) -> BTreeMap<String, f64> {
    let mut labelled: Vec<(String, Expr)> = Vec::new();
    for s in items {
        for (m, c) in s.terms() {
            labelled.push((m.label(), c.clone()));
        }
    }
    let mut out = probes
        .points()
        .par_iter()
        .map(|p| {
            let mut ev = Evaluator::new(*p);
            let mut local = BTreeMap::new();
            for (label, e) in &labelled {
                let v = ev.eval(e).map(|z| z.norm()).unwrap_or(f64::INFINITY);
                let slot = local.entry(label.clone()).or_insert(0.0);
                if v > *slot {
                    *slot = v;
                }
            }
            local
        })
        .reduce(BTreeMap::new, merge_max);
    if out.is_empty() {
        out.insert("1".to_string(), 0.0);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    /// Every component stays at or below the tolerance.
    Vanishes(f64),
    /// Some component exceeds the threshold somewhere (negative controls).
    Exceeds(f64),
    /// Reported only; never fails a run.
    Diagnostic,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub max_residuals: BTreeMap<String, f64>,
    pub pass: bool,
    /// Measured quantities that are not residuals (constants, signs).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub diagnostic: bool,
}

impl CheckReport {
    pub fn from_maxima(
        name: impl Into<String>,
        max_residuals: BTreeMap<String, f64>,
        expectation: Expectation,
    ) -> Self {
        let worst = max_residuals.values().copied().fold(0.0, f64::max);
        let pass = match expectation {
            Expectation::Vanishes(tol) => max_residuals.values().all(|v| *v <= tol),
            Expectation::Exceeds(threshold) => worst > threshold,
            Expectation::Diagnostic => true,
        };
        CheckReport {
            name: name.into(),
            max_residuals,
            pass,
            values: BTreeMap::new(),
            diagnostic: expectation == Expectation::Diagnostic,
        }
    }

    pub fn evaluate<'a>(
        name: impl Into<String>,
        items: impl IntoIterator<Item = &'a SuperScalar>,
        probes: &ProbeSet,
        expectation: Expectation,
    ) -> Self {
        Self::from_maxima(name, component_maxima(items, probes), expectation)
    }

    pub fn with_value(mut self, key: impl Into<String>, value: f64) -> Self {
        self.values.insert(key.into(), value);
        self
    }

    /// Largest residual over all components.
    pub fn worst(&self) -> f64 {
        self.max_residuals.values().copied().fold(0.0, f64::max)
    }
}
