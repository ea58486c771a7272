//! Invariant Einstein metrics, solved directly from `r₁ = ⋯ = r_s`.
//!
//! This path never touches the flow or its compactification, so comparing its
//! output with the equilibria at infinity is a genuine cross-check.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::catalog::{FlagSpace, StructureConstants};
use crate::compactify::Chart;
use crate::curvature::{einstein_residual, InvariantMetric};
use crate::dynamics::{find_zeros, FixedPointRecord, SearchBox, SearchOptions, SearchWarning};
use crate::error::{Error, Result};
use crate::poly::{int, ratio, to_f64, Laurent, Poly, PolyVectorField, Rational};

/// Tolerance for calling a metric Kähler–Einstein.
pub const KAHLER_TOL: f64 = 1e-8;
/// Largest admissible Einstein residual for a solved metric.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-10;
/// Largest admissible Einstein residual for a metric read off a fixed point.
pub const BRIDGE_RESIDUAL_TOL: f64 = 1e-8;
/// Boundary points with a coordinate at or below this are degenerate metrics.
pub const DEGENERATE_COORDINATE: f64 = 1e-6;

/// An Einstein metric normalized to `x₁ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinMetric {
    pub metric: InvariantMetric,
    pub residual: f64,
    pub is_kahler: bool,
    /// Exact coordinates when known in closed form.
    pub exact: Option<Vec<Rational>>,
}

impl EinsteinMetric {
    fn from_coords(space: &FlagSpace, x: Vec<f64>, exact: Option<Vec<Rational>>) -> Result<Self> {
        let metric = InvariantMetric::new(x)?.normalized();
        let residual = einstein_residual(space, &metric)?;
        let is_kahler = metric
            .x()
            .iter()
            .zip(space.kahler_einstein())
            .all(|(a, b)| (a - b).abs() <= KAHLER_TOL);
        Ok(Self {
            metric,
            residual,
            is_kahler,
            exact,
        })
    }

    pub fn x(&self) -> &[f64] {
        self.metric.x()
    }
}

/// Both invariant Einstein metrics of a two-summand space: `(1, 2)` and
/// `(1, 4d₂/(d₁+2d₂))`.
pub fn solve_two_summand(space: &FlagSpace) -> Result<Vec<EinsteinMetric>> {
    let [d1, d2] = match space.dims() {
        &[a, b] => [i64::from(a), i64::from(b)],
        _ => return Err(Error::Unsupported(format!("{space} does not have two summands"))),
    };
    let other = ratio(4 * d2, d1 + 2 * d2);
    [int(2), other]
        .into_iter()
        .map(|x2| {
            let exact = vec![int(1), x2];
            EinsteinMetric::from_coords(space, exact.iter().map(to_f64).collect(), Some(exact))
        })
        .collect()
}

/// The polynomial system `r₁ − r₂ = 0`, `r₂ − r₃ = 0` with `x₁ = 1`, in the
/// unknowns `(x₂, x₃)`, denominators cleared by `x₁²x₂x₃`.
pub fn three_summand_system(space: &FlagSpace) -> Result<PolyVectorField> {
    let (c112, c123) = match space.constants() {
        StructureConstants::Three { c112, c123 } => (c112.clone(), c123.clone()),
        _ => return Err(Error::Unsupported(format!("{space} does not have three summands"))),
    };
    let d: Vec<Rational> = space.dims().iter().map(|&v| int(i64::from(v))).collect();
    let m = |e: [i32; 3], c: Rational| Laurent::monomial(e.to_vec(), c);
    let half = ratio(1, 2);
    // x1/(x2x3), x2/(x1x3), x3/(x1x2)
    let p1 = |c: Rational| m([1, -1, -1], c);
    let p2 = |c: Rational| m([-1, 1, -1], c);
    let p3 = |c: Rational| m([-1, -1, 1], c);
    let b1 = &c123 / (int(2) * &d[0]);
    let b2 = &c123 / (int(2) * &d[1]);
    let b3 = &c123 / (int(2) * &d[2]);
    let a2 = &c112 / (int(4) * &d[1]);
    let r1 = m([-1, 0, 0], half.clone()) - m([-2, 1, 0], &c112 / (int(2) * &d[0]))
        + p1(b1.clone())
        - p2(b1.clone())
        - p3(b1);
    let r2 = m([0, -1, 0], half.clone()) + m([-2, 1, 0], a2.clone()) - m([0, -1, 0], int(2) * a2)
        + p2(b2.clone())
        - p1(b2.clone())
        - p3(b2);
    let r3 = m([0, 0, -1], half) + p3(b3.clone()) - p1(b3.clone()) - p2(b3);
    let clear = [2, 1, 1];
    let reduce = |e: Laurent| -> Result<Poly> {
        let p = e
            .mul_monomial(&clear)
            .to_poly()
            .ok_or_else(|| Error::Unsupported("denominators not cleared".into()))?;
        Ok(p.substitute(0, &int(1)).remove_var(0).expect("x1 eliminated"))
    };
    PolyVectorField::new(vec![reduce(&r1 - &r2)?, reduce(&r2 - &r3)?])
}

/// The three invariant Einstein metrics of a Type I space, found by grid
/// Newton on [`three_summand_system`] over `[1e-2, 10]²`. The Kähler–Einstein
/// metric comes first, then the others by decreasing `x₃`.
pub fn solve_three_summand(space: &FlagSpace, opts: &SearchOptions) -> Result<Vec<EinsteinMetric>> {
    Ok(solve_three_summand_report(space, opts)?.0)
}

/// As [`solve_three_summand`], also returning search warnings.
pub fn solve_three_summand_report(
    space: &FlagSpace,
    opts: &SearchOptions,
) -> Result<(Vec<EinsteinMetric>, Vec<SearchWarning>)> {
    let system = three_summand_system(space)?;
    let found = find_zeros(&system, &SearchBox::cube(2, 1e-2, 10.0)?, opts)?;
    let mut metrics = found
        .zeros
        .iter()
        .map(|z| EinsteinMetric::from_coords(space, vec![1.0, z.point[0], z.point[1]], None))
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = metrics.iter().find(|m| m.residual > SOLVE_RESIDUAL_TOL) {
        return Err(Error::Unsupported(format!(
            "Einstein solve for {space} left residual {} at {:?}",
            bad.residual,
            bad.x()
        )));
    }
    if metrics.len() != 3 || metrics.iter().filter(|m| m.is_kahler).count() != 1 {
        return Err(Error::EinsteinCount {
            space: format!("{space}"),
            expected: 3,
            found: metrics.len(),
        });
    }
    metrics.sort_by(|a, b| b.is_kahler.cmp(&a.is_kahler).then(b.x()[2].total_cmp(&a.x()[2])));
    if let Some(k) = metrics.first_mut() {
        k.exact = Some(vec![int(1), int(2), int(3)]);
    }
    Ok((metrics, found.warnings))
}

/// Einstein metrics of any catalog space.
pub fn solve(space: &FlagSpace, opts: &SearchOptions) -> Result<Vec<EinsteinMetric>> {
    match space.s() {
        2 => solve_two_summand(space),
        3 => solve_three_summand(space, opts),
        s => Err(Error::Unsupported(format!("{s} summands"))),
    }
}

/// Outcome of reading metrics off equilibria at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct Bridge {
    /// `(record index, metric)` for records that are Einstein.
    pub matched: Vec<(usize, EinsteinMetric)>,
    /// `(record index, residual)` for positive records that are not Einstein.
    pub discrepancies: Vec<(usize, f64)>,
    /// Records with a coordinate at or below [`DEGENERATE_COORDINATE`].
    pub excluded: Vec<usize>,
}

impl Bridge {
    pub fn metrics(&self) -> Vec<EinsteinMetric> {
        self.matched.iter().map(|(_, m)| m.clone()).collect()
    }
}

/// Maps boundary equilibria in chart U1 to metrics: `z` becomes `(1, z₁, …)`.
pub fn fixed_points_to_metrics(space: &FlagSpace, records: &[FixedPointRecord]) -> Result<Bridge> {
    let mut bridge = Bridge {
        matched: Vec::new(),
        discrepancies: Vec::new(),
        excluded: Vec::new(),
    };
    for (i, rec) in records.iter().enumerate() {
        if rec.chart != Chart::U1 {
            return Err(Error::InvalidArgument(format!(
                "fixed point {i} is in chart {}, expected U1",
                rec.chart
            )));
        }
        let boundary = &rec.z[..rec.z.len() - 1];
        if boundary.len() + 1 != space.s() || rec.z.last().is_some_and(|v| !v.is_zero()) {
            return Err(Error::InvalidArgument(format!(
                "fixed point {i} is not a boundary point of a {}-summand space",
                space.s()
            )));
        }
        if boundary.iter().any(|v| *v <= DEGENERATE_COORDINATE) {
            bridge.excluded.push(i);
            continue;
        }
        let mut x = vec![1.0];
        x.extend_from_slice(boundary);
        let metric = EinsteinMetric::from_coords(space, x, None)?;
        if metric.residual <= BRIDGE_RESIDUAL_TOL {
            bridge.matched.push((i, metric));
        } else {
            bridge.discrepancies.push((i, metric.residual));
        }
    }
    Ok(bridge)
}

/// Whether two metric lists are equal as sets, coordinatewise within `tol`.
pub fn same_metric_set(a: &[EinsteinMetric], b: &[EinsteinMetric], tol: f64) -> bool {
    let close = |p: &EinsteinMetric, q: &EinsteinMetric| {
        p.x().len() == q.x().len() && p.x().iter().zip(q.x()).all(|(u, v)| (u - v).abs() <= tol)
    };
    a.len() == b.len()
        && a.iter().all(|p| b.iter().filter(|q| close(p, q)).count() == 1)
        && b.iter().all(|q| a.iter().filter(|p| close(p, q)).count() == 1)
}
