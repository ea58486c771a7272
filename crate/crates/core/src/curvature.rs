//! Ricci components and scalar curvature of diagonal invariant metrics.
//!
//! Components are the eigenvalues `r_k` of the Ricci operator on each summand,
//! so they are homogeneous of degree −1 in the metric. The sign follows the
//! convention in which the flow reads `ẋ_k = 2x_k r_k + (2S/n)x_k`. The
//! Einstein condition `r₁ = ⋯ = r_s` is the same under either normalization.
//!
//! Two evaluation routes exist: closed forms specialized to two summands and
//! to Type I three-summand spaces, and the generic sum over a full triple
//! table. They must agree; the test-suite checks it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Num, Signed, Zero};

use crate::catalog::{FlagSpace, StructureConstants};
use crate::error::{Error, Result};
use crate::poly::{int, to_f64, Laurent, Rational};

/// Structure constants `[k; ij]` for every ordered triple of summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleTable {
    s: usize,
    entries: Vec<Rational>,
}

impl TripleTable {
    pub fn zeros(s: usize) -> Self {
        Self {
            s,
            entries: vec![Rational::zero(); s * s * s],
        }
    }

    /// Builds a table from `entries[(k·s + i)·s + j] = [k; ij]`, checking that it
    /// is symmetric in all three indices and non-negative.
    pub fn from_entries(s: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != s * s * s {
            return Err(Error::InvalidTriples(format!(
                "expected {} entries for s={s}, got {}",
                s * s * s,
                entries.len()
            )));
        }
        let table = Self { s, entries };
        table.validate()?;
        Ok(table)
    }

    pub fn summands(&self) -> usize {
        self.s
    }

    /// `[k; ij]`, zero-based.
    pub fn get(&self, k: usize, i: usize, j: usize) -> &Rational {
        &self.entries[self.index(k, i, j)]
    }

    /// Sets `[k; ij]` and all its permutations.
    pub fn set_symmetric(&mut self, k: usize, i: usize, j: usize, value: Rational) {
        for (a, b, c) in [(k, i, j), (k, j, i), (i, k, j), (i, j, k), (j, k, i), (j, i, k)] {
            let at = self.index(a, b, c);
            self.entries[at] = value.clone();
        }
    }

    fn index(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.s + i) * self.s + j
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.s;
        for k in 0..s {
            for i in 0..s {
                for j in 0..s {
                    let v = self.get(k, i, j);
                    if v.is_negative() {
                        return Err(Error::InvalidTriples(format!(
                            "[{};{}{}] = {v} is negative",
                            k + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                    if v != self.get(k, j, i) || v != self.get(i, k, j) {
                        return Err(Error::InvalidTriples(format!(
                            "[{};{}{}] is not symmetric in its entries",
                            k + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A diagonal invariant metric `x₁(,)|m₁ + ⋯ + x_s(,)|m_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantMetric {
    x: Vec<f64>,
}

impl InvariantMetric {
    /// Fails unless every coefficient is finite and strictly positive.
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveMetric { index, value });
        }
        Ok(Self { x })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.x.iter().map(|v| v * c).collect())
    }

    /// The same metric rescaled so that `x₁ = 1`.
    pub fn normalized(&self) -> Self {
        let x1 = self.x[0];
        Self {
            x: self.x.iter().map(|v| v / x1).collect(),
        }
    }
}

/// Ricci components and scalar curvature of a metric.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciComponents {
    pub r: Vec<f64>,
    pub scalar: f64,
}

fn check_len(expected: usize, g: &InvariantMetric) -> Result<()> {
    if g.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: g.len(),
        });
    }
    Ok(())
}

/// Ricci components from the closed forms for two summands or Type I.
/// `scalar` is the direct formula, which agrees with `Σ d_k r_k`.
pub fn ricci_components(space: &FlagSpace, g: &InvariantMetric) -> Result<RicciComponents> {
    check_len(space.s(), g)?;
    let form = ClosedForm::new(space);
    let mut r = vec![0.0; space.s()];
    let scalar = form.eval(g.x(), &mut r);
    Ok(RicciComponents { r, scalar })
}

/// The closed forms with structure constants folded to `f64`, for repeated
/// evaluation without allocation.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    d: [f64; 3],
    a: f64,
    b: f64,
    s: usize,
}

impl ClosedForm {
    pub fn new(space: &FlagSpace) -> Self {
        let mut d = [0.0; 3];
        for (slot, &v) in d.iter_mut().zip(space.dims()) {
            *slot = f64::from(v);
        }
        let (a, b) = match space.constants() {
            StructureConstants::Two { triple211 } => (to_f64(triple211), 0.0),
            StructureConstants::Three { c112, c123 } => (to_f64(c112), to_f64(c123)),
        };
        Self { d, a, b, s: space.s() }
    }

    pub fn summands(&self) -> usize {
        self.s
    }

    /// Writes `r` and returns the scalar curvature. `x` and `r` must have
    /// length [`ClosedForm::summands`].
    pub fn eval(&self, x: &[f64], r: &mut [f64]) -> f64 {
        let [d1, d2, d3] = self.d;
        let (a, b) = (self.a, self.b);
        if self.s == 2 {
            let (x1, x2) = (x[0], x[1]);
            r[0] = 1.0 / (2.0 * x1) - a * x2 / (2.0 * d1 * x1 * x1);
            r[1] = 1.0 / (2.0 * x2) + a * (x2 / (4.0 * d2 * x1 * x1) - 1.0 / (2.0 * d2 * x2));
            return 0.5 * (d1 / x1 + d2 / x2) - 0.25 * a * (x2 / (x1 * x1) + 2.0 / x2);
        }
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        let p1 = x1 / (x2 * x3);
        let p2 = x2 / (x1 * x3);
        let p3 = x3 / (x1 * x2);
        r[0] = 1.0 / (2.0 * x1) - a * x2 / (2.0 * d1 * x1 * x1) + b / (2.0 * d1) * (p1 - p2 - p3);
        r[1] = 1.0 / (2.0 * x2)
            + a / (4.0 * d2) * (x2 / (x1 * x1) - 2.0 / x2)
            + b / (2.0 * d2) * (p2 - p1 - p3);
        r[2] = 1.0 / (2.0 * x3) + b / (2.0 * d3) * (p3 - p1 - p2);
        0.5 * (d1 / x1 + d2 / x2 + d3 / x3)
            - a / 4.0 * (x2 / (x1 * x1) + 2.0 / x2)
            - b / 2.0 * (p1 + p2 + p3)
    }
}

fn generic_sums<T, F>(dims: &[u32], table: &TripleTable, x: &[T], lift: F) -> (Vec<T>, T)
where
    T: Num + Clone,
    F: Fn(&Rational) -> T,
{
    let s = dims.len();
    let two = T::one() + T::one();
    let four = two.clone() * two.clone();
    let mut r = Vec::with_capacity(s);
    let mut half_dims = T::zero();
    let mut triple_sum = T::zero();
    for k in 0..s {
        let dk = lift(&int(i64::from(dims[k])));
        let mut plus = T::zero();
        let mut minus = T::zero();
        for i in 0..s {
            for j in 0..s {
                let t = table.get(k, i, j);
                if !t.is_zero() {
                    let t = lift(t);
                    let term = t.clone() * x[k].clone() / (x[i].clone() * x[j].clone());
                    plus = plus + term.clone();
                    triple_sum = triple_sum + term;
                }
                let u = table.get(j, k, i);
                if !u.is_zero() {
                    minus = minus + lift(u) * x[j].clone() / (x[k].clone() * x[i].clone());
                }
            }
        }
        half_dims = half_dims + dk.clone() / x[k].clone();
        r.push(
            T::one() / (two.clone() * x[k].clone()) + plus / (four.clone() * dk.clone())
                - minus / (two.clone() * dk),
        );
    }
    let scalar = half_dims / two - triple_sum / four;
    (r, scalar)
}

fn check_generic(dims: &[u32], table: &TripleTable, len: usize) -> Result<()> {
    if table.summands() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            got: table.summands(),
        });
    }
    if len != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            got: len,
        });
    }
    if dims.contains(&0) {
        return Err(Error::InvalidDimensions(format!("zero dimension in {dims:?}")));
    }
    table.validate()
}

/// Ricci components from the generic structure-constant sum
/// `r_k = 1/(2x_k) + (1/4d_k) Σ [k;ij] x_k/(x_i x_j) − (1/2d_k) Σ [j;ki] x_j/(x_k x_i)`.
/// `scalar` is `½ Σ d_i/x_i − ¼ Σ [k;ij] x_k/(x_i x_j)`.
pub fn ricci_components_generic(
    dims: &[u32],
    table: &TripleTable,
    g: &InvariantMetric,
) -> Result<RicciComponents> {
    check_generic(dims, table, g.len())?;
    let (r, scalar) = generic_sums(dims, table, g.x(), to_f64);
    Ok(RicciComponents { r, scalar })
}

/// The generic sum in exact arithmetic; returns `(r, S)`.
pub fn ricci_components_exact(
    dims: &[u32],
    table: &TripleTable,
    x: &[Rational],
) -> Result<(Vec<Rational>, Rational)> {
    check_generic(dims, table, x.len())?;
    if x.iter().any(|v| !v.is_positive()) {
        return Err(Error::InvalidArgument("metric coefficients must be positive".into()));
    }
    Ok(generic_sums(dims, table, x, Rational::clone))
}

/// The generic sum as Laurent polynomials in `x`; returns `(r, S)`.
pub fn ricci_laurent(dims: &[u32], table: &TripleTable) -> Result<(Vec<Laurent>, Laurent)> {
    check_generic(dims, table, dims.len())?;
    let s = dims.len();
    // Monomial x_a^{e_a} x_b^{e_b} ... with coefficient c.
    let mono = |pairs: &[(usize, i32)], c: Rational| {
        let mut exps = vec![0i32; s];
        for &(v, e) in pairs {
            exps[v] += e;
        }
        Laurent::monomial(exps, c)
    };
    let mut r = Vec::with_capacity(s);
    let mut scalar = Laurent::zero(s);
    for (k, &d) in dims.iter().enumerate() {
        let dk = int(i64::from(d));
        let mut rk = mono(&[(k, -1)], Rational::new(1.into(), 2.into()));
        scalar = scalar + mono(&[(k, -1)], &dk / int(2));
        for i in 0..s {
            for j in 0..s {
                let t = table.get(k, i, j);
                if !t.is_zero() {
                    rk = rk + mono(&[(k, 1), (i, -1), (j, -1)], t / (int(4) * &dk));
                    scalar = scalar - mono(&[(k, 1), (i, -1), (j, -1)], t / int(4));
                }
                let u = table.get(j, k, i);
                if !u.is_zero() {
                    rk = rk - mono(&[(j, 1), (k, -1), (i, -1)], u / (int(2) * &dk));
                }
            }
        }
        r.push(rk);
    }
    Ok((r, scalar))
}

/// Sums of the absolute values of the terms in the generic formulas for each
/// `r_k` and for `S`. The natural scale for rounding errors, since `r_k` and
/// `S` themselves may cancel to zero.
pub fn term_magnitudes(dims: &[u32], table: &TripleTable, g: &InvariantMetric) -> Result<RicciComponents> {
    check_generic(dims, table, g.len())?;
    let s = dims.len();
    let x = g.x();
    let mut r = vec![0.0; s];
    let mut scalar = 0.0;
    for k in 0..s {
        let dk = f64::from(dims[k]);
        r[k] = 0.5 / x[k];
        scalar += 0.5 * dk / x[k];
        for i in 0..s {
            for j in 0..s {
                let t = to_f64(table.get(k, i, j)) * x[k] / (x[i] * x[j]);
                r[k] += t / (4.0 * dk) + to_f64(table.get(j, k, i)) * x[j] / (2.0 * dk * x[k] * x[i]);
                scalar += 0.25 * t;
            }
        }
    }
    Ok(RicciComponents { r, scalar })
}

/// Scalar curvature from the direct formula. Also computes `Σ d_k r_k` and
/// fails if the two disagree beyond `1e-12` of the term magnitude of `S`.
pub fn scalar_curvature(space: &FlagSpace, g: &InvariantMetric) -> Result<f64> {
    let rc = ricci_components(space, g)?;
    let trace = trace(space.dims(), &rc.r);
    let tol = 1e-12 * term_magnitudes(space.dims(), &space.triple_table(), g)?.scalar;
    if (rc.scalar - trace).abs() > tol {
        return Err(Error::Unsupported(format!(
            "scalar curvature routes disagree: direct {} vs trace {}",
            rc.scalar, trace
        )));
    }
    Ok(rc.scalar)
}

/// `Σ d_k r_k`.
pub fn trace(dims: &[u32], r: &[f64]) -> f64 {
    dims.iter().zip(r).map(|(&d, r)| f64::from(d) * r).sum()
}

/// `max_{i,j} |r_i − r_j|`; zero exactly for Einstein metrics.
pub fn einstein_residual(space: &FlagSpace, g: &InvariantMetric) -> Result<f64> {
    let rc = ricci_components(space, g)?;
    Ok(spread(&rc.r))
}

pub(crate) fn spread(r: &[f64]) -> f64 {
    let max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = r.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::find_space;
    use crate::poly::ratio;

    fn metric(x: &[f64]) -> InvariantMetric {
        InvariantMetric::new(x.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * (1.0 + b.abs())
    }

    #[test]
    fn g2_short_values() {
        let g2 = find_space("G2/U(2)-short").unwrap();
        let rc = ricci_components(&g2, &metric(&[1.0, 2.0])).unwrap();
        assert!(close(rc.r[0], 0.375) && close(rc.r[1], 0.375));
        assert!(close(rc.scalar, 3.75));
        let rc = ricci_components(&g2, &metric(&[1.0, 1.0])).unwrap();
        assert!(close(rc.r[0], 7.0 / 16.0) && close(rc.r[1], 0.375));
        assert!(close(einstein_residual(&g2, &metric(&[1.0, 1.0])).unwrap(), 1.0 / 16.0));
    }

    #[test]
    fn g2_long_values() {
        let g2 = find_space("G2/U(2)-long").unwrap();
        let g = metric(&[1.0, 2.0, 3.0]);
        let rc = ricci_components(&g2, &g).unwrap();
        for r in &rc.r {
            assert!(close(*r, 5.0 / 24.0));
        }
        assert!(close(scalar_curvature(&g2, &g).unwrap(), 25.0 / 12.0));
        let generic = ricci_components_generic(g2.dims(), &g2.triple_table(), &g).unwrap();
        for (a, b) in generic.r.iter().zip(&rc.r) {
            assert!(close(*a, *b));
        }
    }

    #[test]
    fn exact_generic_route() {
        let g2 = find_space("G2/U(2)-short").unwrap();
        let (r, s) =
            ricci_components_exact(g2.dims(), &g2.triple_table(), &[int(1), int(2)]).unwrap();
        assert_eq!(r, vec![ratio(3, 8), ratio(3, 8)]);
        assert_eq!(s, ratio(15, 4));
    }

    #[test]
    fn zero_table_gives_free_terms() {
        let g = metric(&[0.5, 2.0, 4.0]);
        let rc = ricci_components_generic(&[3, 5, 7], &TripleTable::zeros(3), &g).unwrap();
        for (r, x) in rc.r.iter().zip(g.x()) {
            assert!(close(*r, 1.0 / (2.0 * x)));
        }
    }

    #[test]
    fn laurent_matches_numeric() {
        let space = find_space("E7/SU(5)xSU(3)xU(1)").unwrap();
        let (r, s) = ricci_laurent(space.dims(), &space.triple_table()).unwrap();
        let x = [0.7, 1.3, 2.9];
        let rc = ricci_components(&space, &metric(&x)).unwrap();
        for (p, v) in r.iter().zip(&rc.r) {
            assert!((p.eval(&x) - v).abs() < 1e-12 * (1.0 + v.abs()));
        }
        assert!((s.eval(&x) - rc.scalar).abs() < 1e-12 * rc.scalar.abs());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            InvariantMetric::new(vec![1.0, -1.0]),
            Err(Error::NonPositiveMetric { index: 1, .. })
        ));
        assert!(InvariantMetric::new(vec![f64::NAN]).is_err());
        let g2 = find_space("G2/U(2)-short").unwrap();
        assert!(matches!(
            ricci_components(&g2, &metric(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
        let mut t = TripleTable::zeros(2);
        t.entries[1] = int(1);
        assert!(t.validate().is_err());
        assert!(TripleTable::from_entries(2, vec![int(-1); 8]).is_err());
    }
}
