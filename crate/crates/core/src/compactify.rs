//! Poincaré compactification of planar and spatial polynomial fields.
//!
//! In the chart `U_k` (`k ≤ n`) the coordinates are `z = (x_m/x_k ..., 1/x_k)`
//! where `m` runs over the other indices in increasing order; the last
//! coordinate vanishes on the equator, i.e. at infinity. With `d` the degree
//! of the field `P`, the chart field is
//!
//! ```text
//! ż_m = z_n^d (−z_m P^k + P^{j_m}),    ż_n = −z_n^{d+1} P^k
//! ```
//!
//! evaluated at `x = (1/z_n, z_1/z_n, ...)` placed back in original order.
//! The positive factor `(Δz)^{1−d}` is dropped; it only reparametrizes time.
//! The last chart `U_{n+1}` is the affine plane: the 2D field is returned
//! unchanged and the 3D one is multiplied by `z₃^{d+1}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{int, Poly, PolyVectorField, Rational};

/// A chart of the Poincaré sphere (northern hemisphere).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    U1,
    U2,
    U3,
    U4,
}

impl Chart {
    /// 1-based chart index.
    pub fn index(self) -> usize {
        match self {
            Self::U1 => 1,
            Self::U2 => 2,
            Self::U3 => 3,
            Self::U4 => 4,
        }
    }

    pub fn from_index(k: usize) -> Option<Self> {
        match k {
            1 => Some(Self::U1),
            2 => Some(Self::U2),
            3 => Some(Self::U3),
            4 => Some(Self::U4),
            _ => None,
        }
    }

    /// Whether this is the affine chart for an `n`-variable field.
    pub fn is_affine(self, n: usize) -> bool {
        self.index() == n + 1
    }

    fn check(self, n: usize) -> Result<()> {
        if !(2..=3).contains(&n) {
            return Err(Error::Unsupported(alloc::format!(
                "compactification is implemented for 2 and 3 variables, got {n}"
            )));
        }
        if self.index() > n + 1 {
            return Err(Error::InvalidArgument(alloc::format!(
                "chart {self} does not exist for {n} variables"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}", self.index())
    }
}

/// A point in chart coordinates; in a projective chart a vanishing last
/// coordinate means the point lies at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    pub chart: Chart,
    pub z: Vec<f64>,
}

impl ChartPoint {
    /// Chart coordinates of a finite point `x` with `x_k > 0`.
    pub fn from_original(x: &[f64], chart: Chart) -> Result<Self> {
        chart.check(x.len())?;
        if chart.is_affine(x.len()) {
            return Ok(Self { chart, z: x.to_vec() });
        }
        let k = chart.index() - 1;
        if !(x[k] > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "chart {chart} needs x{} > 0",
                k + 1
            )));
        }
        let mut z: Vec<f64> = others(x.len(), k).map(|m| x[m] / x[k]).collect();
        z.push(1.0 / x[k]);
        Ok(Self { chart, z })
    }

    /// Whether the point lies on the equator.
    pub fn at_infinity(&self) -> bool {
        !self.chart.is_affine(self.z.len()) && self.z.last() == Some(&0.0)
    }

    /// The finite point this chart point represents, if any.
    pub fn to_original(&self) -> Option<Vec<f64>> {
        let n = self.z.len();
        if self.chart.is_affine(n) {
            return Some(self.z.clone());
        }
        let zn = *self.z.last()?;
        if zn <= 0.0 {
            return None;
        }
        let k = self.chart.index() - 1;
        let mut x = vec![0.0; n];
        x[k] = 1.0 / zn;
        for (m, j) in others(n, k).enumerate() {
            x[j] = self.z[m] / zn;
        }
        Some(x)
    }
}

/// Pushes a tangent vector `v` at the finite point `x` into the chart.
pub fn push_tangent(x: &[f64], v: &[f64], chart: Chart) -> Result<Vec<f64>> {
    chart.check(x.len())?;
    if chart.is_affine(x.len()) {
        return Ok(v.to_vec());
    }
    let k = chart.index() - 1;
    let xk = x[k];
    let mut dz: Vec<f64> = others(x.len(), k)
        .map(|m| (v[m] * xk - x[m] * v[k]) / (xk * xk))
        .collect();
    dz.push(-v[k] / (xk * xk));
    Ok(dz)
}

fn others(n: usize, k: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&m| m != k)
}

/// A polynomial field expressed in one chart of its compactification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactifiedField {
    pub source: PolyVectorField,
    pub chart: Chart,
    pub field: PolyVectorField,
    pub d: u32,
}

/// Compactifies a planar field.
pub fn poincare_2d(field: &PolyVectorField, chart: Chart) -> Result<CompactifiedField> {
    if field.n_vars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: field.n_vars(),
        });
    }
    compactify(field, chart)
}

/// Compactifies a spatial field.
pub fn poincare_3d(field: &PolyVectorField, chart: Chart) -> Result<CompactifiedField> {
    if field.n_vars() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: field.n_vars(),
        });
    }
    compactify(field, chart)
}

/// Compactifies a field in 2 or 3 variables.
pub fn compactify(field: &PolyVectorField, chart: Chart) -> Result<CompactifiedField> {
    let n = field.n_vars();
    chart.check(n)?;
    let d = field.degree();
    let out = if chart.is_affine(n) {
        if n == 2 {
            field.clone()
        } else {
            let lift = Poly::monomial(vec![0, 0, d + 1], Rational::from_integer(1.into()));
            PolyVectorField::new(field.components().iter().map(|p| &lift * p).collect())?
        }
    } else {
        let k = chart.index() - 1;
        let sub: Vec<Poly> = field.components().iter().map(|p| substitute(p, k, d)).collect();
        let last = n - 1;
        let mut comps: Vec<Poly> = others(n, k)
            .enumerate()
            .map(|(m, j)| &sub[j] - &(&Poly::var(n, m) * &sub[k]))
            .collect();
        comps.push(-&(&Poly::var(n, last) * &sub[k]));
        PolyVectorField::new(comps)?
    };
    Ok(CompactifiedField {
        source: field.clone(),
        chart,
        field: out,
        d,
    })
}

/// `z_n^d · P(x(z))` in chart `U_{k+1}`: each term `c·x^a` becomes
/// `c · Π z_m^{a_{j_m}} · z_n^{d−|a|}`.
fn substitute(p: &Poly, k: usize, d: u32) -> Poly {
    let n = p.nvars();
    let mut out = Poly::zero(n);
    for (a, c) in p.terms() {
        let total: u32 = a.iter().sum();
        let mut e: Vec<u32> = others(n, k).map(|j| a[j]).collect();
        e.push(d - total);
        out.add_term(e, c.clone());
    }
    out
}

impl CompactifiedField {
    pub fn n_vars(&self) -> usize {
        self.field.n_vars()
    }

    /// Whether the last component is divisible by the last coordinate, so the
    /// equator `z_last = 0` is invariant.
    pub fn equator_invariant(&self) -> bool {
        let last = self.n_vars() - 1;
        self.field.component(last).divisible_by_var(last)
    }

    /// The field on the equator: sets `z_last = 0` and drops the last
    /// component and variable.
    pub fn boundary_restriction(&self) -> Result<PolyVectorField> {
        let n = self.n_vars();
        if self.chart.is_affine(n) {
            return Err(Error::AffineChart);
        }
        let last = n - 1;
        let comps = self.field.components()[..last]
            .iter()
            .map(|p| {
                p.substitute(last, &Rational::zero())
                    .remove_var(last)
                    .expect("variable eliminated by substitution")
            })
            .collect();
        PolyVectorField::new(comps)
    }

    /// The last component divided by `z_last`, restricted to the equator: the
    /// transverse eigenvalue at an equilibrium on the equator.
    pub fn transverse_polynomial(&self) -> Result<Poly> {
        let n = self.n_vars();
        if self.chart.is_affine(n) {
            return Err(Error::AffineChart);
        }
        let last = n - 1;
        let q = self
            .field
            .component(last)
            .div_by_var(last)
            .ok_or_else(|| Error::Unsupported("equator is not invariant".into()))?;
        Ok(q.substitute(last, &int(0)).remove_var(last).expect("eliminated"))
    }
}
