//! Per-space invariant checks behind the `verify` command.

use flagricci_core::compactify::Chart;
use flagricci_core::curvature::{
    einstein_residual, ricci_components, ricci_components_generic, term_magnitudes, trace, InvariantMetric,
};
use flagricci_core::dynamics::{verify_invariant_ray, Classification};
use flagricci_core::flow::{nrf_velocity, scaled_polynomial_field, scaling_factor};
use flagricci_core::FlagSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::commands::Analysis;
use crate::config::RunConfig;
use crate::error::Result;

/// How a check's value is compared with its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `value ≤ tol`. Overridden by `--tol`.
    AtMost,
    /// Passes when `value ≥ tol`.
    AtLeast,
    /// Passes when `value == tol`; used for counts.
    Exactly,
}

impl Bound {
    fn symbol(self) -> &'static str {
        match self {
            Self::AtMost => "<=",
            Self::AtLeast => ">=",
            Self::Exactly => "==",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub bound: Bound,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.tol,
            Bound::AtLeast => self.value >= self.tol,
            Bound::Exactly => self.value == self.tol,
        }
    }

    fn json(&self) -> Value {
        json!({
            "name": self.name,
            "value": self.value,
            "bound": self.bound.symbol(),
            "tol": self.tol,
            "pass": self.passed(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceReport {
    pub space: String,
    pub checks: Vec<Check>,
}

impl SpaceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Random points per sampled check.
const SAMPLES: usize = 50;

fn sample(rng: &mut ChaCha8Rng, s: usize) -> Vec<f64> {
    (0..s).map(|_| 10f64.powf(rng.gen_range(-1.5..1.5))).collect()
}

fn gap(a: &[f64], b: &[f64], scale: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(scale)
        .map(|((x, y), w)| (x - y).abs() / w)
        .fold(0.0, f64::max)
}

/// Runs every check on one space.
pub fn verify_space(space: &FlagSpace, cfg: &RunConfig) -> Result<SpaceReport> {
    let s = space.s();
    let table = space.triple_table();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut homogeneity, mut trace_err, mut routes, mut proportional): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let field = scaled_polynomial_field(space)?;
    let compiled = field.compile();
    for _ in 0..SAMPLES {
        let g = InvariantMetric::new(sample(&mut rng, s))?;
        let c = 10f64.powf(rng.gen_range(-2.0..2.0));
        let gc = g.scaled(c)?;
        let terms = term_magnitudes(space.dims(), &table, &g)?;
        let terms_c = term_magnitudes(space.dims(), &table, &gc)?;
        let a = ricci_components(space, &g)?;
        let b = ricci_components(space, &gc)?;
        let expect: Vec<f64> = a.r.iter().map(|r| r / c).collect();
        homogeneity = homogeneity
            .max(gap(&b.r, &expect, &terms_c.r))
            .max((b.scalar - a.scalar / c).abs() / terms_c.scalar);
        trace_err = trace_err.max((trace(space.dims(), &a.r) - a.scalar).abs() / terms.scalar);
        let generic = ricci_components_generic(space.dims(), &table, &g)?;
        routes = routes
            .max(gap(&generic.r, &a.r, &terms.r))
            .max((generic.scalar - a.scalar).abs() / terms.scalar);

        let mu = scaling_factor(space, g.x())?;
        let v: Vec<f64> = nrf_velocity(space, &g)?.iter().map(|v| v * mu).collect();
        let size: f64 = compiled.eval_abs(g.x()).iter().fold(0.0, |m, v| m.max(*v));
        let f = compiled.eval(g.x());
        let p = f.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / size;
        proportional = proportional.max(if mu > 0.0 { p } else { f64::INFINITY });
    }

    let violating = field
        .components()
        .iter()
        .enumerate()
        .filter(|(k, c)| !c.divisible_by_var(*k))
        .count();
    let kahler = einstein_residual(space, &InvariantMetric::new(space.kahler_einstein())?)?;

    let analysis = Analysis::run(space, cfg)?;
    let records = &analysis.search.records;
    let mut rays: f64 = 0.0;
    for m in &analysis.metrics {
        rays = rays.max(verify_invariant_ray(&field, m.x())?);
    }
    let oracle = if analysis.agreement() {
        analysis
            .bridge
            .matched
            .iter()
            .map(|(_, m)| {
                analysis
                    .metrics
                    .iter()
                    .map(|e| e.x().iter().zip(m.x()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let kahler_point: Vec<f64> = space.kahler_einstein()[1..].to_vec();
    let misclassified = records
        .iter()
        .enumerate()
        .filter(|(i, _)| !analysis.bridge.excluded.contains(i))
        .filter(|(_, r)| {
            let is_kahler = r.z[..s - 1].iter().zip(&kahler_point).all(|(a, b)| (a - b).abs() < 1e-8);
            let want = match (s, is_kahler) {
                (_, true) => Classification::RepellingNode,
                (2, false) => Classification::AttractingNode,
                _ => Classification::Saddle,
            };
            r.classification != want || r.chart != Chart::U1
        })
        .count();
    let max_residual = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    let min_seeds = records.iter().map(|r| r.seeds).min().unwrap_or(0);
    let equator_metrics = records.len() - analysis.bridge.excluded.len();

    let at_most = cfg.check_tol;
    let le = |name, value, tol| Check {
        name,
        value,
        bound: Bound::AtMost,
        tol: at_most.unwrap_or(tol),
    };
    let checks = vec![
        le("homogeneity", homogeneity, 1e-12),
        le("trace identity", trace_err, 1e-12),
        le("route agreement", routes, 1e-13),
        le("proportionality", proportional, 1e-12),
        Check {
            name: "divisibility",
            value: violating as f64,
            bound: Bound::Exactly,
            tol: 0.0,
        },
        le("kahler residual", kahler, 1e-12),
        le("ray invariance", rays, 1e-12),
        le("fixed point residual", max_residual, 1e-10),
        Check {
            name: "fixed point seeds",
            value: min_seeds as f64,
            bound: Bound::AtLeast,
            tol: 2.0,
        },
        Check {
            name: "fixed point count",
            value: equator_metrics as f64,
            bound: Bound::Exactly,
            tol: s as f64,
        },
        Check {
            name: "einstein count",
            value: analysis.metrics.len() as f64,
            bound: Bound::Exactly,
            tol: s as f64,
        },
        Check {
            name: "classification",
            value: misclassified as f64,
            bound: Bound::Exactly,
            tol: 0.0,
        },
        le("oracle agreement", oracle, 1e-6),
        Check {
            name: "no interior zeros",
            value: interior_margin(&compiled, s),
            bound: Bound::AtLeast,
            tol: 1e-10,
        },
        Check {
            name: "search warnings",
            value: analysis.search.warnings.len() as f64,
            bound: Bound::Exactly,
            tol: 0.0,
        },
    ];
    Ok(SpaceReport {
        space: space.id().to_string(),
        checks,
    })
}

/// Smallest `‖F‖ / ‖|F|‖` over a `20^s` log-grid on `[1e-2, 1e2]^s`, where
/// `|F|` sums absolute term values. Zero would mean an interior equilibrium.
fn interior_margin(field: &flagricci_core::poly::CompiledField, s: usize) -> f64 {
    let axis: Vec<f64> = (0..20).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 19.0)).collect();
    let mut worst = f64::INFINITY;
    let mut idx = vec![0usize; s];
    let mut x = vec![0.0; s];
    loop {
        for (xi, &i) in x.iter_mut().zip(&idx) {
            *xi = axis[i];
        }
        let f = field.eval(&x);
        let size = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        let terms = field.eval_abs(&x).iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.min(size / terms);
        let Some(k) = idx.iter().position(|&i| i + 1 < axis.len()) else {
            return worst;
        };
        idx[k] += 1;
        idx[..k].iter_mut().for_each(|i| *i = 0);
    }
}

/// Verifies every space concurrently, keeping the input order.
pub fn verify_all(spaces: &[FlagSpace], cfg: &RunConfig) -> Vec<Result<SpaceReport>> {
    spaces.par_iter().map(|s| verify_space(s, cfg)).collect()
}

/// The JSON report and whether everything passed.
pub fn summarize(results: &[Result<SpaceReport>], spaces: &[FlagSpace], cfg: &RunConfig) -> (Value, bool) {
    let mut all_pass = true;
    let mut failures = Vec::new();
    let entries: Vec<Value> = results
        .iter()
        .zip(spaces)
        .map(|(r, space)| match r {
            Ok(rep) => {
                all_pass &= rep.passed();
                for c in rep.failures() {
                    failures.push(format!(
                        "{}: {} = {:e} violates {} {:e}",
                        rep.space,
                        c.name,
                        c.value,
                        c.bound.symbol(),
                        c.tol
                    ));
                }
                json!({
                    "space": rep.space,
                    "pass": rep.passed(),
                    "checks": rep.checks.iter().map(Check::json).collect::<Vec<_>>(),
                })
            }
            Err(e) => {
                all_pass = false;
                failures.push(format!("{}: error: {e}", space.id()));
                json!({ "space": space.id(), "pass": false, "error": e.to_string() })
            }
        })
        .collect();
    (
        json!({
            "pass": all_pass,
            "tol_override": cfg.check_tol,
            "seed": cfg.seed,
            "spaces": entries,
            "failures": failures,
        }),
        all_pass,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use flagricci_core::catalog::find_space;

    #[test]
    fn g2_long_passes() {
        let rep = verify_space(&find_space("G2/U(2)-long").unwrap(), &RunConfig::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert!(rep.checks.iter().any(|c| c.name == "oracle agreement"));
    }

    #[test]
    fn override_breaks_float_checks_only() {
        let cfg = RunConfig {
            check_tol: Some(1e-30),
            ..RunConfig::default()
        };
        let rep = verify_space(&find_space("G2/U(2)-short").unwrap(), &cfg).unwrap();
        assert!(!rep.passed());
        assert!(rep.failures().all(|c| c.bound == Bound::AtMost));
    }
}
