//! Zeros of polynomial systems by grid-seeded, damped Newton iteration.
//!
//! Residuals are measured on the field divided by its largest coefficient,
//! so tolerances mean the same thing for spaces whose scaled fields have
//! coefficients of very different size.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flow::coefficient_scale;
use crate::math::{log_grid, norm};
use crate::poly::{CompiledField, PolyVectorField};

/// An axis-aligned box inside the open positive orthant.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SearchBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidArgument("box bounds must have equal, non-zero length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(0.0 < *a && a < b && b.is_finite())) {
            return Err(Error::InvalidArgument(alloc::format!(
                "box must satisfy 0 < lo < hi, got {lo:?}..{hi:?}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Membership with a relative slack on each side.
    pub fn contains(&self, z: &[f64], slack: f64) -> bool {
        z.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= a * (1.0 - slack) && *v <= b * (1.0 + slack))
    }
}

/// Tuning knobs for [`find_zeros`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    /// Seeds per axis, log-uniformly spaced.
    pub density: usize,
    /// Required normalized residual of a reported zero.
    pub tol: f64,
    /// Points closer than this (max-norm) are the same zero.
    pub dedup_radius: f64,
    pub max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            density: 64,
            tol: 1e-12,
            dedup_radius: 1e-8,
            max_iter: 80,
        }
    }
}

/// A converged zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Zero {
    pub point: Vec<f64>,
    /// `‖F(z)‖ / max |coefficient|`.
    pub residual: f64,
    /// Number of distinct seeds that converged here.
    pub seeds: usize,
}

/// A grid cell where every component changes sign but Newton found nothing.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchWarning {
    pub cell_lo: Vec<f64>,
    pub cell_hi: Vec<f64>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZeroSearch {
    pub zeros: Vec<Zero>,
    pub warnings: Vec<SearchWarning>,
}

struct Newton<'a> {
    field: &'a CompiledField,
    scale: f64,
    opts: &'a SearchOptions,
}

impl Newton<'_> {
    fn residual(&self, z: &[f64]) -> (Vec<f64>, f64) {
        let f = self.field.eval(z);
        let r = norm(&f) / self.scale;
        (f, if r.is_finite() { r } else { f64::INFINITY })
    }

    /// Damped Newton from `z0`; returns the final point and residual when it
    /// meets the tolerance.
    fn run(&self, z0: &[f64]) -> Option<(Vec<f64>, f64)> {
        let mut z = z0.to_vec();
        let (mut f, mut res) = self.residual(&z);
        for _ in 0..self.opts.max_iter {
            if res <= self.opts.tol * 1e-3 {
                break;
            }
            let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
            let step = self.field.jacobian(&z).solve(&rhs)?;
            let mut lambda = 1.0;
            let mut moved = false;
            while lambda >= 1.0 / 1024.0 {
                let cand: Vec<f64> = z.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
                if cand.iter().all(|v| v.is_finite()) {
                    let (fc, rc) = self.residual(&cand);
                    if rc < res {
                        let delta = lambda * norm(&step);
                        z = cand;
                        f = fc;
                        res = rc;
                        moved = delta > 1e-15 * (1.0 + norm(&z));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !moved {
                break;
            }
        }
        (res <= self.opts.tol).then_some((z, res))
    }
}

fn seed_grid(bx: &SearchBox, density: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = (0..bx.dim())
        .map(|i| log_grid(bx.lo[i], bx.hi[i], density))
        .collect();
    let mut seeds = vec![Vec::new()];
    for axis in &axes {
        seeds = seeds
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    seeds
}

fn insert(zeros: &mut Vec<Zero>, point: Vec<f64>, residual: f64, radius: f64) {
    let near = |z: &Zero| z.point.iter().zip(&point).all(|(a, b)| (a - b).abs() <= radius);
    match zeros.iter_mut().find(|z| near(z)) {
        Some(z) => {
            z.seeds += 1;
            if residual < z.residual {
                z.point = point;
                z.residual = residual;
            }
        }
        None => zeros.push(Zero {
            point,
            residual,
            seeds: 1,
        }),
    }
}

/// All zeros of `field` inside `bx`, sorted lexicographically.
///
/// Seeds form a `density^n` log-uniform grid. Converged points are merged
/// within `dedup_radius`. Afterwards every grid cell across whose corners each
/// component changes sign is checked: if it holds no zero and Newton from its
/// center fails, a [`SearchWarning`] is recorded.
pub fn find_zeros(field: &PolyVectorField, bx: &SearchBox, opts: &SearchOptions) -> Result<ZeroSearch> {
    let n = field.n_vars();
    if bx.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bx.dim(),
        });
    }
    if !(1..=3).contains(&n) {
        return Err(Error::Unsupported(alloc::format!("zero search in {n} variables")));
    }
    if opts.density < 2 || !(opts.tol > 0.0) || !(opts.dedup_radius > 0.0) {
        return Err(Error::InvalidArgument("density ≥ 2 and positive tolerances required".into()));
    }
    let compiled = field.compile();
    let newton = Newton {
        field: &compiled,
        scale: coefficient_scale(field),
        opts,
    };
    let slack = 1e-9;
    let seeds = seed_grid(bx, opts.density);
    let mut zeros = Vec::new();
    for seed in &seeds {
        if let Some((z, res)) = newton.run(seed) {
            if bx.contains(&z, slack) {
                insert(&mut zeros, z, res, opts.dedup_radius);
            }
        }
    }

    let signs: Vec<Vec<f64>> = seeds.iter().map(|s| compiled.eval(s)).collect();
    let mut warnings = Vec::new();
    for cell in cells(n, opts.density) {
        let corners: Vec<usize> = cell;
        let changes = (0..n).all(|c| {
            let pos = corners.iter().any(|&i| signs[i][c] >= 0.0);
            let neg = corners.iter().any(|&i| signs[i][c] <= 0.0);
            pos && neg
        });
        if !changes {
            continue;
        }
        let lo: Vec<f64> = (0..n)
            .map(|c| corners.iter().map(|&i| seeds[i][c]).fold(f64::INFINITY, f64::min))
            .collect();
        let hi: Vec<f64> = (0..n)
            .map(|c| corners.iter().map(|&i| seeds[i][c]).fold(0.0, f64::max))
            .collect();
        let cell_box = SearchBox { lo: lo.clone(), hi: hi.clone() };
        if zeros.iter().any(|z: &Zero| cell_box.contains(&z.point, 1e-6)) {
            continue;
        }
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| crate::math::sqrt(a * b)).collect();
        match newton.run(&center) {
            Some((z, res)) => {
                if bx.contains(&z, slack) {
                    insert(&mut zeros, z, res, opts.dedup_radius);
                }
            }
            None => warnings.push(SearchWarning {
                cell_lo: lo,
                cell_hi: hi,
                message: "sign change in every component but Newton did not converge".into(),
            }),
        }
    }
    zeros.sort_by(|a, b| {
        a.point
            .iter()
            .zip(&b.point)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(ZeroSearch { zeros, warnings })
}

/// Corner indices (into the row-major seed list) of every grid cell.
fn cells(n: usize, density: usize) -> Vec<Vec<usize>> {
    let stride = |axis: usize| density.pow((n - 1 - axis) as u32);
    let mut out = Vec::new();
    let total = (density - 1).pow(n as u32);
    for c in 0..total {
        let mut base = 0;
        let mut rem = c;
        for axis in (0..n).rev() {
            base += (rem % (density - 1)) * stride(axis);
            rem /= density - 1;
        }
        let corners = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .filter(|axis| mask >> axis & 1 == 1)
                    .map(stride)
                    .sum::<usize>()
                    + base
            })
            .collect();
        out.push(corners);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, Poly};

    #[test]
    fn univariate_constructed() {
        // z(z - 2)
        let z = Poly::var(1, 0);
        let p = &(&z * &z) - &z.scale(&int(2));
        let field = PolyVectorField::new(vec![p]).unwrap();
        let bx = SearchBox::cube(1, 0.5, 10.0).unwrap();
        let found = find_zeros(&field, &bx, &SearchOptions::default()).unwrap();
        assert_eq!(found.zeros.len(), 1);
        assert!((found.zeros[0].point[0] - 2.0).abs() < 1e-14);
        assert!(found.zeros[0].seeds >= 2);
        assert!(found.warnings.is_empty());
    }

    #[test]
    fn planar_intersection() {
        // (x - y, x y - 4): single positive zero (2, 2).
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let f = PolyVectorField::new(vec![&x - &y, &(&x * &y) - &Poly::constant(2, int(4))]).unwrap();
        let bx = SearchBox::cube(2, 0.01, 10.0).unwrap();
        let opts = SearchOptions { density: 16, ..SearchOptions::default() };
        let found = find_zeros(&f, &bx, &opts).unwrap();
        assert_eq!(found.zeros.len(), 1);
        assert!(found.zeros[0].point.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn cell_corners() {
        let c = cells(2, 3);
        assert_eq!(c.len(), 4);
        assert_eq!(c[0], vec![0, 3, 1, 4]);
        assert_eq!(cells(1, 4), vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn rejects_bad_boxes() {
        assert!(SearchBox::new(vec![0.0], vec![1.0]).is_err());
        assert!(SearchBox::new(vec![2.0], vec![1.0]).is_err());
        assert!(SearchBox::new(vec![1.0, 1.0], vec![2.0]).is_err());
    }
}
