//! The normalized Ricci flow `ẋ_k = 2x_k r_k + (2S/n) x_k` and its
//! denominator-free polynomial form.
//!
//! The velocity is a rational function, homogeneous of degree 0. Multiplying
//! by the positive monomial
//!
//! * `μ = 2(d₁+d₂)(d₁+4d₂) x₁²x₂` for two summands,
//! * `μ = 2d₁d₂d₃(d₁+d₂+d₃)(d₁+4d₂+9d₃) x₁²x₂x₃` for three,
//!
//! gives a homogeneous polynomial field of degree 3 or 4 with the same
//! oriented orbits on the positive cone.

use alloc::format;
use alloc::vec::Vec;

use num_traits::One;

use crate::catalog::FlagSpace;
use crate::curvature::{ricci_components, ricci_laurent, ClosedForm, InvariantMetric};
use crate::error::{Error, Result};
use crate::math::powu;
use crate::poly::{int, to_f64, Laurent, Poly, PolyVectorField, Rational};

/// Flow velocity at `g`.
pub fn nrf_velocity(space: &FlagSpace, g: &InvariantMetric) -> Result<Vec<f64>> {
    let rc = ricci_components(space, g)?;
    let n = f64::from(space.n());
    Ok(g.x()
        .iter()
        .zip(&rc.r)
        .map(|(x, r)| 2.0 * x * r + 2.0 * rc.scalar / n * x)
        .collect())
}

/// Allocation-free flow velocity, for integrators.
#[derive(Clone, Debug)]
pub struct NrfEvaluator {
    form: ClosedForm,
    n: f64,
}

impl NrfEvaluator {
    pub fn new(space: &FlagSpace) -> Self {
        Self {
            form: ClosedForm::new(space),
            n: f64::from(space.n()),
        }
    }

    pub fn summands(&self) -> usize {
        self.form.summands()
    }

    /// Writes the velocity at `x` (unchecked; `x` must be positive).
    pub fn velocity_into(&self, x: &[f64], out: &mut [f64]) {
        let mut r = [0.0; 3];
        let s = self.form.summands();
        let scalar = self.form.eval(x, &mut r[..s]);
        for k in 0..s {
            out[k] = 2.0 * x[k] * r[k] + 2.0 * scalar / self.n * x[k];
        }
    }
}

/// The scaling monomial `μ` as `(coefficient, exponents)`.
pub fn scaling_monomial(space: &FlagSpace) -> Result<(Rational, Vec<u32>)> {
    let d: Vec<Rational> = space.dims().iter().map(|&v| int(i64::from(v))).collect();
    match d.as_slice() {
        [d1, d2] => Ok((int(2) * (d1 + d2) * (d1 + int(4) * d2), alloc::vec![2, 1])),
        [d1, d2, d3] => Ok((
            int(2) * d1 * d2 * d3 * (d1 + d2 + d3) * (d1 + int(4) * d2 + int(9) * d3),
            alloc::vec![2, 1, 1],
        )),
        _ => Err(Error::Unsupported(format!(
            "no scaling monomial for {} summands",
            space.s()
        ))),
    }
}

/// `μ(x)`.
pub fn scaling_factor(space: &FlagSpace, x: &[f64]) -> Result<f64> {
    let (c, e) = scaling_monomial(space)?;
    if x.len() != e.len() {
        return Err(Error::DimensionMismatch {
            expected: e.len(),
            got: x.len(),
        });
    }
    Ok(x.iter().zip(&e).fold(to_f64(&c), |acc, (v, &k)| acc * powu(*v, k)))
}

/// The flow velocity as Laurent polynomials, derived from the generic
/// structure-constant formula.
pub fn nrf_laurent(space: &FlagSpace) -> Result<Vec<Laurent>> {
    let s = space.s();
    let (r, scalar) = ricci_laurent(space.dims(), &space.triple_table())?;
    let two_over_n = int(2) / int(i64::from(space.n()));
    let normalization = scalar.scale(&two_over_n);
    Ok(r
        .iter()
        .enumerate()
        .map(|(k, rk)| {
            let xk = Laurent::var_pow(s, k, 1);
            &(&xk * rk).scale(&int(2)) + &(&xk * &normalization)
        })
        .collect())
}

/// `μ(x)·nrf(x)` as an exact polynomial vector field.
pub fn scaled_polynomial_field(space: &FlagSpace) -> Result<PolyVectorField> {
    let (c, e) = scaling_monomial(space)?;
    let exps: Vec<i32> = e.iter().map(|&v| v as i32).collect();
    let components = nrf_laurent(space)?
        .iter()
        .map(|v| {
            v.mul_monomial(&exps)
                .scale(&c)
                .to_poly()
                .ok_or_else(|| Error::Unsupported(format!("μ does not clear the denominators for {space}")))
        })
        .collect::<Result<Vec<Poly>>>()?;
    PolyVectorField::new(components)
}

/// The scaled field with component `k` divided by `x_k`. For two summands this
/// is the planar system usually displayed for these spaces; its orbits differ
/// from the flow's, but its zeros at infinity in chart U1 coincide.
pub fn reduced_field(space: &FlagSpace) -> Result<PolyVectorField> {
    let field = scaled_polynomial_field(space)?;
    let components = field
        .components()
        .iter()
        .enumerate()
        .map(|(k, p)| {
            p.div_by_var(k)
                .ok_or_else(|| Error::Unsupported(format!("component {k} is not divisible by x{}", k + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    PolyVectorField::new(components)
}

/// Evaluates a polynomial field at `point` (exact evaluation, rounded once).
pub fn evaluate(field: &PolyVectorField, point: &[f64]) -> Result<Vec<f64>> {
    field.evaluate(point)
}

/// True when every component `k` is divisible by `x_k`.
pub fn coordinate_hyperplanes_invariant(field: &PolyVectorField) -> bool {
    field
        .components()
        .iter()
        .enumerate()
        .all(|(k, p)| p.divisible_by_var(k))
}

/// Coefficient of the largest term, used to normalize residuals.
pub fn coefficient_scale(field: &PolyVectorField) -> f64 {
    let m = field.max_abs_coefficient();
    if m > Rational::one() {
        to_f64(&m)
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::find_space;

    fn metric(x: &[f64]) -> InvariantMetric {
        InvariantMetric::new(x.to_vec()).unwrap()
    }

    #[test]
    fn velocity_on_kahler_rays() {
        let g2 = find_space("G2/U(2)-short").unwrap();
        let v = nrf_velocity(&g2, &metric(&[1.0, 2.0])).unwrap();
        assert!((v[0] - 1.5).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        let g2l = find_space("G2/U(2)-long").unwrap();
        let v = nrf_velocity(&g2l, &metric(&[1.0, 2.0, 3.0])).unwrap();
        for (a, b) in v.iter().zip([5.0 / 6.0, 5.0 / 3.0, 2.5]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn scaled_field_shape() {
        for id in ["G2/U(2)-short", "G2/U(2)-long"] {
            let space = find_space(id).unwrap();
            let f = scaled_polynomial_field(&space).unwrap();
            assert_eq!(f.degree() as usize, space.s() + 1);
            assert!(f.components().iter().all(Poly::is_homogeneous));
            assert!(coordinate_hyperplanes_invariant(&f));
        }
    }

    #[test]
    fn scaled_field_at_kahler_point() {
        let g2 = find_space("G2/U(2)-short").unwrap();
        let f = scaled_polynomial_field(&g2).unwrap();
        assert_eq!(f.evaluate(&[1.0, 2.0]).unwrap(), alloc::vec![960.0, 1920.0]);
        assert_eq!(scaling_factor(&g2, &[1.0, 2.0]).unwrap(), 640.0);
    }
}
