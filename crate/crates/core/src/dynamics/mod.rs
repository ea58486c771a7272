//! Equilibria, linearization and trajectories of polynomial fields.

pub mod classify;
pub mod integrate;
pub mod linalg;
pub mod search;

use alloc::vec::Vec;

pub use classify::{classify, Classification};
pub use integrate::{integrate, IntegrationOptions, StepStats, Termination, Trajectory};
pub use linalg::{eigenvalues, Eigenvalue, Matrix};
pub use search::{find_zeros, SearchBox, SearchOptions, SearchWarning, Zero, ZeroSearch};

use crate::compactify::{Chart, CompactifiedField};
use crate::error::{Error, Result};
use crate::math::{log_grid, norm};
use crate::poly::{to_f64, PolyVectorField, Rational};

/// An equilibrium on the equator of a compactified field.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointRecord {
    pub chart: Chart,
    /// Chart coordinates; the last one is zero.
    pub z: Vec<f64>,
    /// Normalized residual of the boundary system.
    pub residual: f64,
    /// Jacobian of the full chart field.
    pub jacobian: Matrix,
    /// Eigenvalues of the full chart Jacobian.
    pub chart_eigenvalues: Vec<Eigenvalue>,
    /// Eigenvalues of the boundary system's Jacobian.
    pub boundary_eigenvalues: Vec<Eigenvalue>,
    /// Eigenvalue in the direction leaving the equator.
    pub transverse_eigenvalue: f64,
    /// Classification from the boundary eigenvalues.
    pub classification: Classification,
    /// Number of Newton seeds that converged to this point.
    pub seeds: usize,
}

/// Result of [`find_boundary_fixed_points`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySearch {
    pub records: Vec<FixedPointRecord>,
    pub warnings: Vec<SearchWarning>,
}

/// Jacobian of `field` at `point`, from its exact partial derivatives.
pub fn jacobian(field: &PolyVectorField, point: &[f64]) -> Result<Matrix> {
    if point.len() != field.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: field.n_vars(),
            got: point.len(),
        });
    }
    Ok(field.compile().jacobian(point))
}

/// Equilibria of the boundary system of `cf` inside `bx`, with their
/// linearization. The classification uses the boundary eigenvalues only;
/// the transverse eigenvalue and the full chart spectrum are reported beside
/// it.
pub fn find_boundary_fixed_points(
    cf: &CompactifiedField,
    bx: &SearchBox,
    opts: &SearchOptions,
) -> Result<BoundarySearch> {
    let boundary = cf.boundary_restriction()?;
    let found = find_zeros(&boundary, bx, opts)?;
    let transverse = cf.transverse_polynomial()?.compile();
    let boundary_c = boundary.compile();
    let full = cf.field.compile();
    let records = found
        .zeros
        .into_iter()
        .map(|zero| {
            let mut z = zero.point.clone();
            z.push(0.0);
            let jb = boundary_c.jacobian(&zero.point);
            let boundary_eigenvalues = eigenvalues(&jb)?;
            let jacobian = full.jacobian(&z);
            let chart_eigenvalues = eigenvalues(&jacobian)?;
            Ok(FixedPointRecord {
                chart: cf.chart,
                classification: classify(&boundary_eigenvalues, jb.frobenius_norm()),
                z,
                residual: zero.residual,
                jacobian,
                chart_eigenvalues,
                boundary_eigenvalues,
                transverse_eigenvalue: transverse.eval(&zero.point),
                seeds: zero.seeds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundarySearch {
        records,
        warnings: found.warnings,
    })
}

/// Largest relative non-parallelism `‖f⊥‖/‖f‖` of `field(t·v)` to `v` over
/// `t` on a log-grid in `[1e-2, 1e2]`. Zero for an invariant ray.
pub fn verify_invariant_ray(field: &PolyVectorField, v: &[f64]) -> Result<f64> {
    if v.len() != field.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: field.n_vars(),
            got: v.len(),
        });
    }
    if v.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::InvalidArgument("ray direction must be strictly positive".into()));
    }
    let len = norm(v);
    let unit: Vec<f64> = v.iter().map(|c| c / len).collect();
    let mut worst: f64 = 0.0;
    for t in log_grid(1e-2, 1e2, 25) {
        let point: Vec<f64> = v.iter().map(|c| c * t).collect();
        let f = field.evaluate(&point)?;
        let size = norm(&f);
        if size == 0.0 {
            continue;
        }
        let along: f64 = f.iter().zip(&unit).map(|(a, b)| a * b).sum();
        let orth: Vec<f64> = f.iter().zip(&unit).map(|(a, u)| a - along * u).collect();
        worst = worst.max(norm(&orth) / size);
    }
    Ok(worst)
}

/// Exact variant of [`verify_invariant_ray`] for a rational direction: the
/// field at `t·v` for rational `t` must be an exact multiple of `v`.
pub fn ray_is_invariant_exact(field: &PolyVectorField, v: &[Rational]) -> Result<bool> {
    let samples = [1i64, 2, 3, 7];
    for t in samples {
        let point: Vec<Rational> = v.iter().map(|c| c * Rational::from_integer(t.into())).collect();
        let f = field.evaluate_exact(&point)?;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if &f[i] * &v[j] != &f[j] * &v[i] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Converts exact values to `f64`.
pub fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}
