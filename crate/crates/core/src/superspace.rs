//! Superderivatives on SuperScalars and the vector/matrix containers that
//! carry superfields.

use std::ops::{Add, Mul, Neg, Sub};

use crate::expr::{Expr, Var};
use crate::grassmann::{AlgebraError, GeneratorSet, Result, SuperScalar};

fn theta_index(v: Var) -> usize {
    match v {
        Var::Plus => GeneratorSet::THETA_PLUS,
        Var::Minus => GeneratorSet::THETA_MINUS,
    }
}

/// Left derivative ∂/∂θ±: strike θ± from each monomial, with sign
/// (−1)^(number of generators standing before it).
pub fn theta_derivative(a: &SuperScalar, v: Var) -> SuperScalar {
    let t = theta_index(v);
    let bit = 1u16 << t;
    let mut out = SuperScalar::zero(a.generators());
    for (m, c) in a.terms() {
        if m.0 & bit == 0 {
            continue;
        }
        let before = (m.0 & (bit - 1)).count_ones();
        let c = if before.is_multiple_of(2) { c.clone() } else { -c };
        out = &out + &SuperScalar::monomial(a.generators(), crate::grassmann::Monomial(m.0 ^ bit), c);
    }
    out
}

/// Ordinary ∂± acting on every coefficient.
pub fn partial(a: &SuperScalar, v: Var) -> SuperScalar {
    a.differentiate(v)
}

/// ∂̌± = −i ∂/∂θ± + θ± ∂±.
pub fn super_derivative(a: &SuperScalar, v: Var) -> SuperScalar {
    let gens = a.generators();
    let theta = SuperScalar::generator(gens, theta_index(v));
    let first = theta_derivative(a, v).scale(&-Expr::i());
    let second = &theta * &partial(a, v);
    &first + &second
}

/// Column of SuperScalars sharing one generator set.
#[derive(Debug, Clone)]
pub struct SuperVector {
    gens: GeneratorSet,
    comps: Vec<SuperScalar>,
}

impl SuperVector {
    pub fn new(comps: Vec<SuperScalar>) -> Result<Self> {
        let gens = comps
            .first()
            .map(|c| c.generators())
            .ok_or_else(|| AlgebraError::Dimension("empty vector".into()))?;
        for c in &comps {
            if c.generators() != gens {
                return Err(AlgebraError::GeneratorMismatch(
                    gens.count(),
                    c.generators().count(),
                ));
            }
        }
        Ok(SuperVector { gens, comps })
    }

    pub fn generators(&self) -> GeneratorSet {
        self.gens
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, i: usize) -> &SuperScalar {
        &self.comps[i]
    }

    pub fn components(&self) -> &[SuperScalar] {
        &self.comps
    }

    pub fn map(&self, f: impl Fn(&SuperScalar) -> SuperScalar) -> SuperVector {
        SuperVector {
            gens: self.gens,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    /// Componentwise conjugate; read as the entries of the row vector v†.
    pub fn dagger(&self) -> SuperVector {
        self.map(SuperScalar::dagger)
    }

    pub fn super_derivative(&self, v: Var) -> SuperVector {
        self.map(|c| super_derivative(c, v))
    }

    pub fn partial(&self, v: Var) -> SuperVector {
        self.map(|c| partial(c, v))
    }

    /// `s · v`, the scalar standing on the left of each component.
    pub fn scale_left(&self, s: &SuperScalar) -> SuperVector {
        self.map(|c| s * c)
    }

    /// `v · s`, the scalar standing on the right of each component.
    pub fn scale_right(&self, s: &SuperScalar) -> SuperVector {
        self.map(|c| c * s)
    }

    fn zip(&self, other: &SuperVector, f: impl Fn(&SuperScalar, &SuperScalar) -> SuperScalar) -> SuperVector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        SuperVector {
            gens: self.gens,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// `Σ rowᵢ colᵢ` where `row` already holds the row entries.
    pub fn row_times_column(row: &SuperVector, col: &SuperVector) -> SuperScalar {
        assert_eq!(row.len(), col.len(), "vector length mismatch");
        row.comps
            .iter()
            .zip(&col.comps)
            .fold(SuperScalar::zero(row.gens), |acc, (a, b)| &acc + &(a * b))
    }

    /// `a† b`.
    pub fn inner(a: &SuperVector, b: &SuperVector) -> SuperScalar {
        Self::row_times_column(&a.dagger(), b)
    }
}

impl Add for &SuperVector {
    type Output = SuperVector;
    fn add(self, rhs: &SuperVector) -> SuperVector {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &SuperVector {
    type Output = SuperVector;
    fn sub(self, rhs: &SuperVector) -> SuperVector {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for &SuperVector {
    type Output = SuperVector;
    fn neg(self) -> SuperVector {
        self.map(|c| -c)
    }
}

/// Square matrix of SuperScalars, row-major.
#[derive(Debug, Clone)]
pub struct SuperMatrix {
    gens: GeneratorSet,
    n: usize,
    entries: Vec<SuperScalar>,
}

impl SuperMatrix {
    pub fn from_fn(gens: GeneratorSet, n: usize, f: impl Fn(usize, usize) -> SuperScalar) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        SuperMatrix { gens, n, entries }
    }

    pub fn zero(gens: GeneratorSet, n: usize) -> Self {
        Self::from_fn(gens, n, |_, _| SuperScalar::zero(gens))
    }

    pub fn identity(gens: GeneratorSet, n: usize) -> Self {
        Self::from_fn(gens, n, |i, j| {
            if i == j {
                SuperScalar::one(gens)
            } else {
                SuperScalar::zero(gens)
            }
        })
    }

    /// `col · row` with entries `colᵢ rowⱼ`; `outer(a, b.dagger())` is `a b†`.
    pub fn outer(col: &SuperVector, row: &SuperVector) -> Self {
        assert_eq!(col.len(), row.len(), "vector length mismatch");
        Self::from_fn(col.gens, col.len(), |i, j| col.get(i) * row.get(j))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> GeneratorSet {
        self.gens
    }

    pub fn get(&self, i: usize, j: usize) -> &SuperScalar {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[SuperScalar] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&SuperScalar) -> SuperScalar) -> SuperMatrix {
        SuperMatrix {
            gens: self.gens,
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    fn check(&self, other: &SuperMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(AlgebraError::Dimension(format!(
                "{0}x{0} vs {1}x{1}",
                self.n, other.n
            )));
        }
        if self.gens != other.gens {
            return Err(AlgebraError::GeneratorMismatch(
                self.gens.count(),
                other.gens.count(),
            ));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        self.check(other)?;
        let n = self.n;
        Ok(Self::from_fn(self.gens, n, |i, j| {
            (0..n).fold(SuperScalar::zero(self.gens), |acc, k| {
                &acc + &(self.get(i, k) * other.get(k, j))
            })
        }))
    }

    pub fn try_add(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        self.check(other)?;
        Ok(Self::from_fn(self.gens, self.n, |i, j| self.get(i, j) + other.get(i, j)))
    }

    pub fn mul_vector(&self, v: &SuperVector) -> SuperVector {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        let comps = (0..self.n)
            .map(|i| {
                (0..self.n).fold(SuperScalar::zero(self.gens), |acc, k| {
                    &acc + &(self.get(i, k) * v.get(k))
                })
            })
            .collect();
        SuperVector {
            gens: self.gens,
            comps,
        }
    }

    /// `row · M` for a row vector given by its entries.
    pub fn row_times(row: &SuperVector, m: &SuperMatrix) -> SuperVector {
        assert_eq!(m.n, row.len(), "dimension mismatch");
        let comps = (0..m.n)
            .map(|j| {
                (0..m.n).fold(SuperScalar::zero(m.gens), |acc, k| &acc + &(row.get(k) * m.get(k, j)))
            })
            .collect();
        SuperVector {
            gens: m.gens,
            comps,
        }
    }

    /// `(A†)ᵢⱼ = (Aⱼᵢ)†`.
    pub fn dagger(&self) -> SuperMatrix {
        Self::from_fn(self.gens, self.n, |i, j| self.get(j, i).dagger())
    }

    pub fn trace(&self) -> SuperScalar {
        (0..self.n).fold(SuperScalar::zero(self.gens), |acc, i| &acc + self.get(i, i))
    }

    pub fn commutator(a: &SuperMatrix, b: &SuperMatrix) -> SuperMatrix {
        &(a * b) - &(b * a)
    }

    pub fn scale_left(&self, s: &SuperScalar) -> SuperMatrix {
        self.map(|c| s * c)
    }

    pub fn scale_right(&self, s: &SuperScalar) -> SuperMatrix {
        self.map(|c| c * s)
    }

    pub fn super_derivative(&self, v: Var) -> SuperMatrix {
        self.map(|c| super_derivative(c, v))
    }

    pub fn partial(&self, v: Var) -> SuperMatrix {
        self.map(|c| partial(c, v))
    }

    /// Laplace expansion along the first row. Only meaningful when the
    /// entries commute, e.g. all grade-even.
    pub fn det(&self) -> SuperScalar {
        fn minor(entries: &[SuperScalar], n: usize, col: usize) -> Vec<SuperScalar> {
            let mut out = Vec::with_capacity((n - 1) * (n - 1));
            for i in 1..n {
                for j in 0..n {
                    if j != col {
                        out.push(entries[i * n + j].clone());
                    }
                }
            }
            out
        }
        fn det(gens: GeneratorSet, entries: &[SuperScalar], n: usize) -> SuperScalar {
            if n == 1 {
                return entries[0].clone();
            }
            let mut acc = SuperScalar::zero(gens);
            for col in 0..n {
                let term = &entries[col] * &det(gens, &minor(entries, n, col), n - 1);
                acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        det(self.gens, &self.entries, self.n)
    }
}

impl Add for &SuperMatrix {
    type Output = SuperMatrix;
    fn add(self, rhs: &SuperMatrix) -> SuperMatrix {
        self.try_add(rhs).expect("matrix mismatch")
    }
}

impl Sub for &SuperMatrix {
    type Output = SuperMatrix;
    fn sub(self, rhs: &SuperMatrix) -> SuperMatrix {
        self.try_add(&-rhs).expect("matrix mismatch")
    }
}

impl Neg for &SuperMatrix {
    type Output = SuperMatrix;
    fn neg(self) -> SuperMatrix {
        self.map(|c| -c)
    }
}

impl Mul for &SuperMatrix {
    type Output = SuperMatrix;
    fn mul(self, rhs: &SuperMatrix) -> SuperMatrix {
        self.try_mul(rhs).expect("matrix mismatch")
    }
}
