use std::path::{Path, PathBuf};

use flagricci_core::catalog::{default_sweep, instantiate_classical};
use flagricci_core::compactify::{compactify, Chart};
use flagricci_core::curvature::InvariantMetric;
use flagricci_core::dynamics::{find_boundary_fixed_points, integrate, BoundarySearch, SearchBox, Termination};
use flagricci_core::einstein::{fixed_points_to_metrics, same_metric_set, solve, Bridge, EinsteinMetric};
use flagricci_core::flow::{reduced_field, scaled_polynomial_field, scaling_monomial, NrfEvaluator};
use flagricci_core::{ClassicalFamily, Error as CoreError, FlagSpace, PolyVectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{OutputFormat, RunConfig};
use crate::error::{CliError, Result};
use crate::report;

/// Search box for boundary equilibria and Einstein solves, per axis.
pub const SEARCH_RANGE: (f64, f64) = (1e-2, 10.0);
/// Tolerance for pairing a fixed point with a solved Einstein metric.
pub const MATCH_TOL: f64 = 1e-6;

/// A command's output, ready to print.
pub enum Output {
    Json(Value),
    Csv(String),
}

impl Output {
    pub fn render(self) -> Result<String> {
        match self {
            Self::Json(v) => report::render(v),
            Self::Csv(s) => Ok(s),
        }
    }
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ListFilter {
    pub type_one: bool,
    pub family: Option<(ClassicalFamily, u32, u32)>,
}

/// The fixed catalog plus the smallest classical instances, or one classical
/// instance when `filter.family` is set.
pub fn list(filter: ListFilter, cfg: &RunConfig) -> Result<Output> {
    let spaces = match filter.family {
        Some((f, l, p)) => vec![instantiate_classical(f, l, p)?],
        None => default_sweep(),
    };
    let spaces: Vec<FlagSpace> = spaces.into_iter().filter(|s| !filter.type_one || s.s() == 3).collect();
    Ok(match cfg.format {
        OutputFormat::Json => Output::Json(Value::Array(spaces.iter().map(report::space).collect())),
        OutputFormat::Csv => {
            let header = ["id", "group", "s", "n", "dims", "constants"].map(String::from);
            let rows: Vec<Vec<String>> = spaces
                .iter()
                .map(|s| {
                    let dims: Vec<String> = s.dims().iter().map(u32::to_string).collect();
                    let constants: Vec<String> =
                        s.constants().named().iter().map(|(n, q)| format!("{n}={q}")).collect();
                    vec![
                        s.id().to_string(),
                        s.group().to_string(),
                        s.s().to_string(),
                        s.n().to_string(),
                        dims.join(";"),
                        constants.join(";"),
                    ]
                })
                .collect();
            Output::Csv(csv_string(&header, &rows)?)
        }
    })
}

/// Boundary equilibria in chart U1 together with the directly solved metrics.
pub struct Analysis {
    pub space: FlagSpace,
    pub search_box: SearchBox,
    pub search: BoundarySearch,
    pub bridge: Bridge,
    pub metrics: Vec<EinsteinMetric>,
}

impl Analysis {
    pub fn run(space: &FlagSpace, cfg: &RunConfig) -> Result<Self> {
        let cf = compactify(&scaled_polynomial_field(space)?, Chart::U1)?;
        let search_box = SearchBox::cube(space.s() - 1, SEARCH_RANGE.0, SEARCH_RANGE.1)?;
        let search = find_boundary_fixed_points(&cf, &search_box, &cfg.search())?;
        let bridge = fixed_points_to_metrics(space, &search.records)?;
        let metrics = solve(space, &cfg.search())?;
        Ok(Self {
            space: space.clone(),
            search_box,
            search,
            bridge,
            metrics,
        })
    }

    /// Index into `metrics` of the metric read off record `i`.
    pub fn metric_of_record(&self, i: usize) -> Option<usize> {
        let (_, m) = self.bridge.matched.iter().find(|(j, _)| *j == i)?;
        self.metrics.iter().position(|e| close(e.x(), m.x(), MATCH_TOL))
    }

    /// Id of the record whose metric is `metrics[k]`.
    pub fn record_of_metric(&self, k: usize) -> Option<String> {
        (0..self.search.records.len())
            .find(|&i| self.metric_of_record(i) == Some(k))
            .map(fixed_point_id)
    }

    pub fn agreement(&self) -> bool {
        same_metric_set(&self.bridge.metrics(), &self.metrics, MATCH_TOL)
    }

    fn warnings(&self) -> Value {
        Value::Array(
            self.search
                .warnings
                .iter()
                .map(|w| json!({ "cell_lo": w.cell_lo, "cell_hi": w.cell_hi, "message": w.message }))
                .collect(),
        )
    }
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

pub fn fixed_point_id(i: usize) -> String {
    format!("U1-{i}")
}

pub fn metric_id(k: usize) -> String {
    format!("g{k}")
}

/// Einstein metrics from the direct solver, each linked to its fixed point.
pub fn einstein(space: &FlagSpace, cfg: &RunConfig) -> Result<Output> {
    let a = Analysis::run(space, cfg)?;
    let links: Vec<Option<String>> = (0..a.metrics.len()).map(|k| a.record_of_metric(k)).collect();
    Ok(match cfg.format {
        OutputFormat::Json => {
            let metrics: Vec<Value> = a
                .metrics
                .iter()
                .zip(&links)
                .enumerate()
                .map(|(k, (m, link))| {
                    let mut v = report::metric(m, link.as_deref());
                    v["id"] = json!(metric_id(k));
                    v
                })
                .collect();
            Output::Json(json!({
                "space": space.id(),
                "count": a.metrics.len(),
                "metrics": metrics,
                "agreement": a.agreement(),
                "warnings": a.warnings(),
            }))
        }
        OutputFormat::Csv => {
            let mut header = vec!["id".to_string()];
            header.extend(numbered("x", space.s()));
            header.extend(["residual", "is_kahler", "fixed_point"].map(String::from));
            let rows: Vec<Vec<String>> = a
                .metrics
                .iter()
                .zip(&links)
                .enumerate()
                .map(|(k, (m, link))| {
                    let mut row = vec![metric_id(k)];
                    row.extend(m.x().iter().map(f64::to_string));
                    row.push(m.residual.to_string());
                    row.push(m.is_kahler.to_string());
                    row.push(link.clone().unwrap_or_default());
                    row
                })
                .collect();
            Output::Csv(csv_string(&header, &rows)?)
        }
    })
}

fn record_status(a: &Analysis, i: usize) -> (&'static str, Option<f64>) {
    if a.bridge.excluded.contains(&i) {
        ("degenerate", None)
    } else if let Some((_, r)) = a.bridge.discrepancies.iter().find(|(j, _)| *j == i) {
        ("discrepancy", Some(*r))
    } else {
        let residual = a.bridge.matched.iter().find(|(j, _)| *j == i).map(|(_, m)| m.residual);
        ("einstein", residual)
    }
}

/// Equilibria at infinity in chart U1, with linearization and metric.
pub fn fixed_points(space: &FlagSpace, cfg: &RunConfig) -> Result<Output> {
    let a = Analysis::run(space, cfg)?;
    Ok(match cfg.format {
        OutputFormat::Json => {
            let points: Vec<Value> = a
                .search
                .records
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let (status, residual) = record_status(&a, i);
                    let metric = a.metric_of_record(i).map(|k| {
                        let mut v = report::metric(&a.metrics[k], Some(&fixed_point_id(i)));
                        v["id"] = json!(metric_id(k));
                        v
                    });
                    json!({
                        "id": fixed_point_id(i),
                        "chart": r.chart.to_string(),
                        "z": r.z,
                        "residual": r.residual,
                        "seeds": r.seeds,
                        "classification": r.classification.as_str(),
                        "boundary_eigenvalues": report::eigenvalues(&r.boundary_eigenvalues),
                        "chart_eigenvalues": report::eigenvalues(&r.chart_eigenvalues),
                        "transverse_eigenvalue": r.transverse_eigenvalue,
                        "status": status,
                        "einstein_residual": residual,
                        "metric": metric,
                    })
                })
                .collect();
            Output::Json(json!({
                "space": space.id(),
                "chart": Chart::U1.to_string(),
                "search_box": { "lo": a.search_box.lo, "hi": a.search_box.hi },
                "density": cfg.density,
                "fixed_points": points,
                "agreement": a.agreement(),
                "warnings": a.warnings(),
            }))
        }
        OutputFormat::Csv => {
            let mut header = vec!["id".to_string()];
            header.extend(numbered("z", space.s()));
            header.extend(["classification", "residual", "seeds", "status", "metric"].map(String::from));
            let rows: Vec<Vec<String>> = a
                .search
                .records
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut row = vec![fixed_point_id(i)];
                    row.extend(r.z.iter().map(f64::to_string));
                    row.push(r.classification.to_string());
                    row.push(r.residual.to_string());
                    row.push(r.seeds.to_string());
                    row.push(record_status(&a, i).0.to_string());
                    row.push(a.metric_of_record(i).map(metric_id).unwrap_or_default());
                    row
                })
                .collect();
            Output::Csv(csv_string(&header, &rows)?)
        }
    })
}

/// Which polynomial field `flow-field` prints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldForm {
    /// `μ·nrf`, the field every other command uses.
    Scaled,
    /// `μ·nrf` with component `k` divided by `x_k`.
    Reduced,
    /// `μ·nrf` in a Poincaré chart.
    Chart(Chart),
}

pub fn parse_chart(text: &str) -> Result<Chart> {
    text.trim()
        .strip_prefix(['U', 'u'])
        .and_then(|k| k.parse().ok())
        .and_then(Chart::from_index)
        .ok_or_else(|| CliError::Usage(format!("unknown chart `{text}`; expected U1 to U4")))
}

/// Term list of a polynomial field.
pub fn flow_field(space: &FlagSpace, form: FieldForm, cfg: &RunConfig) -> Result<Output> {
    let scaled = scaled_polynomial_field(space)?;
    let (field, label, var): (PolyVectorField, String, &str) = match form {
        FieldForm::Scaled => (scaled, "scaled".into(), "x"),
        FieldForm::Reduced => (reduced_field(space)?, "reduced".into(), "x"),
        FieldForm::Chart(chart) => (compactify(&scaled, chart)?.field, chart.to_string(), "z"),
    };
    let (mu, mu_exps) = scaling_monomial(space)?;
    let table = field.term_table();
    Ok(match cfg.format {
        OutputFormat::Json => {
            let components: Vec<Value> = table
                .into_iter()
                .map(|terms| {
                    Value::Array(
                        terms
                            .into_iter()
                            .map(|(e, n, d)| {
                                json!({ "exponents": e, "numerator": report::big_integer(n), "denominator": report::big_integer(d) })
                            })
                            .collect(),
                    )
                })
                .collect();
            Output::Json(json!({
                "space": space.id(),
                "form": label,
                "variables": numbered(var, field.n_vars()),
                "degree": field.degree(),
                "scaling": { "coefficient": report::rational(&mu), "exponents": mu_exps },
                "components": components,
            }))
        }
        OutputFormat::Csv => {
            let header = ["component", "exponents", "numerator", "denominator"].map(String::from);
            let rows: Vec<Vec<String>> = table
                .into_iter()
                .enumerate()
                .flat_map(|(k, terms)| {
                    terms.into_iter().map(move |(e, n, d)| {
                        let e: Vec<String> = e.iter().map(u32::to_string).collect();
                        vec![(k + 1).to_string(), e.join(";"), n, d]
                    })
                })
                .collect();
            Output::Csv(csv_string(&header, &rows)?)
        }
    })
}

/// Parses `"1,2"` or `"1, 2, 3"`.
pub fn parse_point(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse `{}` in point `{text}`", t.trim())))
        })
        .collect()
}

/// One point per non-empty line; `#` starts a comment.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(parse_point)
        .collect()
}

/// `count` initial metrics with coordinates log-uniform in `[0.1, 10]`.
pub fn sample_points(s: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..s).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect())
        .collect()
}

fn slug(id: &str) -> String {
    let mut out = String::new();
    for c in id.chars() {
        let c = if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' };
        if !(c == '_' && out.ends_with('_')) {
            out.push(c);
        }
    }
    out.trim_matches('_').to_string()
}

fn unit(x: &[f64]) -> Vec<f64> {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / n).collect()
}

fn termination(t: &Termination) -> Value {
    match t {
        Termination::Completed => json!({ "kind": "completed" }),
        Termination::NonPositive { index, t } => json!({ "kind": "non_positive", "index": index, "t": t }),
        Termination::BlowUp { t, .. } => json!({ "kind": "blow_up", "t": t }),
        Termination::MaxSteps { t } => json!({ "kind": "max_steps", "t": t }),
        Termination::StepUnderflow { t, h } => json!({ "kind": "step_underflow", "t": t, "h": h }),
    }
}

/// Integrates the flow from each initial metric and writes one CSV per
/// trajectory into the output directory. Returns the summary.
pub fn portrait(space: &FlagSpace, initial: &[Vec<f64>], cfg: &RunConfig) -> Result<Output> {
    for x in initial {
        if x.len() != space.s() {
            return Err(CoreError::DimensionMismatch {
                expected: space.s(),
                got: x.len(),
            }
            .into());
        }
        InvariantMetric::new(x.clone())?;
    }
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let einstein = solve(space, &cfg.search())?;
    let directions: Vec<Vec<f64>> = einstein.iter().map(|m| unit(m.x())).collect();
    let nrf = NrfEvaluator::new(space);
    let s = space.s();
    let mut header = vec!["t".to_string()];
    header.extend(numbered("x", s));
    header.push("norm".into());
    header.extend(numbered("d", s));

    let mut summaries = Vec::new();
    for (i, x0) in initial.iter().enumerate() {
        let traj = integrate(|x, out| nrf.velocity_into(x, out), x0, cfg.horizon, &cfg.integration())?;
        let rows: Vec<Vec<String>> = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(t, x)| {
                let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let mut row = vec![t.to_string()];
                row.extend(x.iter().map(f64::to_string));
                row.push(n.to_string());
                row.extend(x.iter().map(|v| (v / n).to_string()));
                row
            })
            .collect();
        let path: PathBuf = dir.join(format!("{}_{i:03}.csv", slug(space.id())));
        std::fs::write(&path, csv_string(&header, &rows)?).map_err(|e| CliError::io(&path, e))?;

        let end = unit(traj.last_state());
        let (nearest, distance) = directions
            .iter()
            .map(|d| d.iter().zip(&end).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("every space has Einstein metrics");
        let drift = traj
            .states
            .iter()
            .flat_map(|x| (1..s).map(move |k| ((x[k] / x[0]) / (x0[k] / x0[0]) - 1.0).abs()))
            .fold(0.0, f64::max);
        summaries.push(json!({
            "file": path.display().to_string(),
            "initial": x0,
            "steps": traj.step_stats.accepted,
            "final_time": traj.last_time(),
            "final_state": traj.last_state(),
            "final_direction": end,
            "termination": termination(&traj.termination),
            "nearest_einstein": metric_id(nearest),
            "direction_distance": distance,
            "max_ratio_drift": drift,
        }));
    }
    let metrics: Vec<Value> = einstein
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let mut v = report::metric(m, None);
            v["id"] = json!(metric_id(k));
            v
        })
        .collect();
    Ok(Output::Json(json!({
        "space": space.id(),
        "horizon": cfg.horizon,
        "directory": dir.display().to_string(),
        "einstein": metrics,
        "trajectories": summaries,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use flagricci_core::catalog::find_space;

    #[test]
    fn points_and_charts() {
        assert_eq!(parse_point("1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_point("1,x").unwrap_err().exit_code(), 2);
        assert_eq!(parse_chart("u3").unwrap(), Chart::U3);
        assert!(parse_chart("U7").is_err());
        assert_eq!(slug("G2/U(2)-short"), "G2_U_2_-short");
        let pts = sample_points(3, 4, 9);
        assert_eq!(pts, sample_points(3, 4, 9));
        assert!(pts.iter().flatten().all(|v| (0.1..=10.0).contains(v)));
    }

    #[test]
    fn analysis_links_metrics_and_fixed_points() {
        let space = find_space("G2/U(2)-short").unwrap();
        let a = Analysis::run(&space, &RunConfig::default()).unwrap();
        assert!(a.agreement());
        // Records are sorted by z: 2/3 first, then 2. Metrics: Kähler first.
        assert_eq!(a.record_of_metric(0).as_deref(), Some("U1-1"));
        assert_eq!(a.record_of_metric(1).as_deref(), Some("U1-0"));
    }

    #[test]
    fn csv_outputs_have_headers() {
        let cfg = RunConfig {
            format: OutputFormat::Csv,
            ..RunConfig::default()
        };
        let space = find_space("G2/U(2)-long").unwrap();
        let Output::Csv(text) = einstein(&space, &cfg).unwrap() else {
            panic!("expected csv")
        };
        assert!(text.starts_with("id,x1,x2,x3,residual,is_kahler,fixed_point\n"));
        assert_eq!(text.lines().count(), 4);
        let Output::Csv(text) = flow_field(&space, FieldForm::Scaled, &cfg).unwrap() else {
            panic!("expected csv")
        };
        assert!(text.starts_with("component,exponents,numerator,denominator\n"));
    }
}
