//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! [`Poly`] has non-negative exponents and is what vector fields are made of.
//! [`Laurent`] allows negative exponents; curvature expressions live there
//! until a monomial multiplier clears their denominators.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dynamics::linalg::Matrix;
use crate::error::{Error, Result};
use crate::math::powu;

/// Exact rational number.
pub type Rational = BigRational;

/// Builds `num/den` as a [`Rational`].
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exponent type of a polynomial term.
pub trait Exponent: Copy + Ord + Default + fmt::Debug + fmt::Display + Add<Output = Self> {}
impl Exponent for u32 {}
impl Exponent for i32 {}

/// A sparse polynomial in `nvars` variables; a term is an exponent tuple mapped
/// to a non-zero coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct MPoly<E: Exponent> {
    nvars: usize,
    terms: BTreeMap<Vec<E>, Rational>,
}

/// Polynomial with non-negative exponents.
pub type Poly = MPoly<u32>;

/// Laurent polynomial (exponents may be negative).
pub type Laurent = MPoly<i32>;

impl<E: Exponent> MPoly<E> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(vec![E::default(); nvars], c)
    }

    /// `c * x^exps`. The variable count is `exps.len()`.
    pub fn monomial(exps: Vec<E>, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of non-zero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[E], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[E]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c * x^exps` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, exps: Vec<E>, c: Rational) {
        assert_eq!(exps.len(), self.nvars, "exponent tuple length");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v * c))
                .collect(),
        }
    }

    /// Multiplies by the monomial `x^exps`.
    pub fn mul_monomial(&self, exps: &[E]) -> Self {
        assert_eq!(exps.len(), self.nvars);
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (add_exps(e, exps), v.clone()))
                .collect(),
        }
    }

    /// Largest absolute coefficient (zero for the zero polynomial).
    pub fn max_abs_coefficient(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different variable counts");
    }
}

fn add_exps<E: Exponent>(a: &[E], b: &[E]) -> Vec<E> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

impl<E: Exponent> Add for &MPoly<E> {
    type Output = MPoly<E>;
    fn add(self, rhs: Self) -> MPoly<E> {
        self.check_same(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<E: Exponent> Sub for &MPoly<E> {
    type Output = MPoly<E>;
    fn sub(self, rhs: Self) -> MPoly<E> {
        self.check_same(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<E: Exponent> Mul for &MPoly<E> {
    type Output = MPoly<E>;
    fn mul(self, rhs: Self) -> MPoly<E> {
        self.check_same(rhs);
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(add_exps(ea, eb), ca * cb);
            }
        }
        out
    }
}

impl<E: Exponent> Neg for &MPoly<E> {
    type Output = MPoly<E>;
    fn neg(self) -> MPoly<E> {
        self.scale(&-Rational::one())
    }
}

impl<E: Exponent> Add for MPoly<E> {
    type Output = MPoly<E>;
    fn add(self, rhs: Self) -> MPoly<E> {
        &self + &rhs
    }
}

impl<E: Exponent> Sub for MPoly<E> {
    type Output = MPoly<E>;
    fn sub(self, rhs: Self) -> MPoly<E> {
        &self - &rhs
    }
}

impl<E: Exponent> Mul for MPoly<E> {
    type Output = MPoly<E>;
    fn mul(self, rhs: Self) -> MPoly<E> {
        &self * &rhs
    }
}

impl<E: Exponent> fmt::Debug for MPoly<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<E: Exponent> fmt::Display for MPoly<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Lexicographically largest exponent tuple first.
        for (i, (exps, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let has_vars = exps.iter().any(|&e| e != E::default());
            if !mag.is_one() || !has_vars {
                write!(f, "{}", mag)?;
                if has_vars {
                    f.write_str("*")?;
                }
            }
            let mut first = true;
            for (v, &e) in exps.iter().enumerate() {
                if e == E::default() {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                write!(f, "x{}", v + 1)?;
                let power = alloc::format!("{}", e);
                if power != "1" {
                    write!(f, "^{}", power)?;
                }
            }
        }
        Ok(())
    }
}

impl Poly {
    /// The coordinate function `x_i` (0-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self::monomial(exps, Rational::one())
    }

    /// Maximum total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// True when every term has the same total degree.
    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|x| x == d),
        }
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, c * int(e[var] as i64));
        }
        out
    }

    /// Substitutes `x_var = value`; the variable count is unchanged.
    pub fn substitute(&self, var: usize, value: &Rational) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[var] = 0;
            out.add_term(ne, c * num_traits::pow(value.clone(), e[var] as usize));
        }
        out
    }

    /// Drops variable `var` from the variable list. Fails if it still occurs.
    pub fn remove_var(&self, var: usize) -> Option<Poly> {
        let mut out = Poly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            if e[var] != 0 {
                return None;
            }
            let mut ne = e.clone();
            ne.remove(var);
            out.add_term(ne, c.clone());
        }
        Some(out)
    }

    /// Exact divisibility by the coordinate `x_var`.
    pub fn divisible_by_var(&self, var: usize) -> bool {
        self.terms.keys().all(|e| e[var] >= 1)
    }

    pub fn div_by_var(&self, var: usize) -> Option<Poly> {
        if !self.divisible_by_var(var) {
            return None;
        }
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, c.clone());
        }
        Some(out)
    }

    /// Exact evaluation: powers of every variable are tabulated once, then the
    /// terms are summed.
    pub fn eval_exact(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let max_exp = self.terms.keys().flatten().copied().max().unwrap_or(0) as usize;
        let powers: Vec<Vec<Rational>> = point
            .iter()
            .map(|x| {
                let mut row = Vec::with_capacity(max_exp + 1);
                row.push(Rational::one());
                for k in 1..=max_exp {
                    let next = &row[k - 1] * x;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &powers[v][k as usize];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn to_laurent(&self) -> Laurent {
        Laurent {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|&k| k as i32).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            nvars: self.nvars,
            exps: self.terms.keys().flatten().copied().collect(),
            coeffs: self.terms.values().map(to_f64).collect(),
        }
    }
}

impl Laurent {
    /// Converts to a [`Poly`] if no exponent is negative.
    pub fn to_poly(&self) -> Option<Poly> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let ne: Option<Vec<u32>> = e.iter().map(|&k| u32::try_from(k).ok()).collect();
            out.add_term(ne?, c.clone());
        }
        Some(out)
    }

    /// The monomial `x_i^k` with coefficient one.
    pub fn var_pow(nvars: usize, i: usize, k: i32) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = k;
        Self::monomial(exps, Rational::one())
    }

    /// Floating point evaluation; every variable must be non-zero.
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(point).fold(to_f64(c), |acc, (&k, &x)| {
                    if k >= 0 {
                        acc * powu(x, k as u32)
                    } else {
                        acc / powu(x, k.unsigned_abs())
                    }
                })
            })
            .sum()
    }
}

/// A polynomial with coefficients rounded to `f64`, laid out for fast evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    exps: Vec<u32>,
    coeffs: Vec<f64>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.nvars;
        let mut acc = 0.0;
        for (t, &c) in self.coeffs.iter().enumerate() {
            let e = &self.exps[t * n..(t + 1) * n];
            let mut v = c;
            for (k, &xi) in e.iter().zip(x) {
                if *k > 0 {
                    v *= powu(xi, *k);
                }
            }
            acc += v;
        }
        acc
    }

    /// Sum of absolute term values; the natural scale for round-off in `eval`.
    pub fn eval_abs(&self, x: &[f64]) -> f64 {
        let n = self.nvars;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(t, &c)| {
                let e = &self.exps[t * n..(t + 1) * n];
                e.iter()
                    .zip(x)
                    .fold(c.abs(), |acc, (&k, &xi)| acc * powu(xi.abs(), k))
            })
            .sum()
    }
}

/// A polynomial vector field `x' = (P_1(x), ..., P_n(x))` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    components: Vec<Poly>,
    degree: u32,
}

impl PolyVectorField {
    /// Builds a field from its components; all must share the variable count,
    /// and there must be one component per variable.
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidArgument("vector field without components".into()));
        }
        if let Some(bad) = components.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.nvars(),
            });
        }
        let degree = components
            .iter()
            .filter_map(Poly::total_degree)
            .max()
            .unwrap_or(0);
        Ok(Self { components, degree })
    }

    /// The identity (radial) field `x' = x`.
    pub fn radial(n: usize) -> Self {
        Self::new((0..n).map(|i| Poly::var(n, i)).collect()).expect("square by construction")
    }

    pub fn n_vars(&self) -> usize {
        self.components.len()
    }

    /// Maximum total degree over all components.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &Poly {
        &self.components[k]
    }

    pub fn into_components(self) -> Vec<Poly> {
        self.components
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.components.iter().map(|p| p.scale(c)).collect()).expect("same shape")
    }

    fn check_point(&self, len: usize) -> Result<()> {
        if len != self.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars(),
                got: len,
            });
        }
        Ok(())
    }

    /// Evaluates the field at a floating point location. The point is
    /// converted to exact rationals, evaluated exactly and rounded once; use
    /// [`PolyVectorField::compile`] for repeated evaluation.
    pub fn evaluate(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_point(point.len())?;
        let exact = point
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                Rational::from_float(value).ok_or(Error::InvalidArgument(alloc::format!(
                    "coordinate {index} is not finite: {value}"
                )))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.evaluate_exact(&exact)?.iter().map(to_f64).collect())
    }

    /// Evaluates the field exactly at a rational point.
    pub fn evaluate_exact(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.check_point(point.len())?;
        Ok(self.components.iter().map(|p| p.eval_exact(point)).collect())
    }

    /// Symbolic Jacobian: `out[i][j] = dP_i/dx_j`.
    pub fn jacobian_polys(&self) -> Vec<Vec<Poly>> {
        self.components
            .iter()
            .map(|p| (0..self.n_vars()).map(|j| p.derivative(j)).collect())
            .collect()
    }

    pub fn compile(&self) -> CompiledField {
        let n = self.n_vars();
        CompiledField {
            n,
            components: self.components.iter().map(Poly::compile).collect(),
            jacobian: self
                .jacobian_polys()
                .iter()
                .flat_map(|row| row.iter().map(Poly::compile).collect::<Vec<_>>())
                .collect(),
        }
    }

    /// Largest absolute coefficient across all components.
    pub fn max_abs_coefficient(&self) -> Rational {
        self.components
            .iter()
            .map(Poly::max_abs_coefficient)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Terms of every component as `(exponents, numerator, denominator)` strings,
    /// the layout used by the CLI's JSON export.
    pub fn term_table(&self) -> Vec<Vec<(Vec<u32>, String, String)>> {
        self.components
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(e, c)| {
                        (
                            e.to_vec(),
                            alloc::format!("{}", c.numer()),
                            alloc::format!("{}", c.denom()),
                        )
                    })
                    .collect()
            })
            .collect()
    }
}

/// A [`PolyVectorField`] and its Jacobian with `f64` coefficients.
#[derive(Clone, Debug)]
pub struct CompiledField {
    n: usize,
    components: Vec<CompiledPoly>,
    jacobian: Vec<CompiledPoly>,
}

impl CompiledField {
    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.components) {
            *o = p.eval(x);
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.eval_into(x, &mut out);
        out
    }

    /// Per-component sum of absolute term values at `x`.
    pub fn eval_abs(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval_abs(x)).collect()
    }

    pub fn jacobian(&self, x: &[f64]) -> Matrix {
        let n = self.n;
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.jacobian[i * n + j].eval(x);
            }
        }
        m
    }
}
