use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use flagricci::commands::{self, FieldForm, ListFilter, Output};
use flagricci::config::{OutputFormat, RunConfig, Target};
use flagricci::error::{CliError, EXIT_FAILURE};
use flagricci::report;
use flagricci::verify;
use flagricci_core::catalog::{default_sweep, find_space};
use flagricci_core::ClassicalFamily;

/// Normalized Ricci flow on flag manifolds with two or three isotropy
/// summands: Einstein metrics, fixed points at infinity, phase portraits.
#[derive(Parser, Debug)]
#[command(name = "flagricci", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Relative tolerance of the integrator.
    #[arg(long, global = true, default_value_t = 1e-10)]
    rel_tol: f64,

    /// Absolute tolerance of the integrator.
    #[arg(long, global = true, default_value_t = 1e-12)]
    abs_tol: f64,

    /// Integration horizon in flow time.
    #[arg(long, global = true, default_value_t = 50.0)]
    horizon: f64,

    /// Newton seeds per axis for fixed-point and Einstein searches.
    #[arg(long, global = true, default_value_t = 64)]
    density: usize,

    /// Output file; for `portrait`, the output directory
    /// (default: $FLAGRICCI_OUTPUT_DIR, else the working directory).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TargetArgs {
    /// Catalog id such as `G2/U(2)-long`, or `C(2,1)`.
    space: Option<String>,

    /// Classical family B, C or D (with --l and --p).
    #[arg(long)]
    family: Option<char>,

    #[arg(long)]
    l: Option<u32>,

    #[arg(long)]
    p: Option<u32>,
}

impl TargetArgs {
    fn target(&self) -> flagricci::Result<Target> {
        Target::from_parts(self.space.as_deref(), self.family, self.l, self.p)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the catalog.
    List {
        /// Only the three-summand spaces of Type I.
        #[arg(long = "type-I", alias = "type-i", conflicts_with = "family")]
        type_one: bool,

        /// One classical instance, e.g. `--family C --l 2 --p 1`.
        #[arg(long, requires_all = ["l", "p"])]
        family: Option<char>,

        #[arg(long)]
        l: Option<u32>,

        #[arg(long)]
        p: Option<u32>,
    },

    /// Solve for the invariant Einstein metrics.
    Einstein(TargetArgs),

    /// Find and classify the fixed points at infinity in chart U1.
    FixedPoints {
        #[command(flatten)]
        target: TargetArgs,

        /// Also write the JSON report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },

    /// Print the polynomial vector field as a term list.
    FlowField {
        #[command(flatten)]
        target: TargetArgs,

        /// The field with component k divided by x_k.
        #[arg(long, conflicts_with = "chart")]
        reduced: bool,

        /// The field in a Poincaré chart, U1 to U4.
        #[arg(long)]
        chart: Option<String>,
    },

    /// Integrate the flow and write one CSV per trajectory.
    Portrait {
        /// Space id (default: G2/U(2)-short).
        space: Option<String>,

        /// Number of random initial metrics.
        #[arg(long)]
        samples: Option<usize>,

        /// An initial metric such as `1,2`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        from: Vec<String>,

        /// File with one initial metric per line.
        #[arg(long)]
        initial: Option<PathBuf>,

        /// Seed for --samples.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Run the invariant checks.
    Verify {
        /// Space id; omit with --all.
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        space: Option<String>,

        /// Every catalog space plus the smallest classical instances, in parallel.
        #[arg(long)]
        all: bool,

        /// Replace the tolerance of every `<=` check.
        #[arg(long)]
        tol: Option<f64>,

        /// Seed for sampled points.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

const DEFAULT_PORTRAIT_SPACE: &str = "G2/U(2)-short";
const DEFAULT_PORTRAIT_SAMPLES: usize = 20;

fn config(cli: &Cli) -> RunConfig {
    RunConfig {
        format: cli.format,
        rel_tol: cli.rel_tol,
        abs_tol: cli.abs_tol,
        horizon: cli.horizon,
        density: cli.density,
        output: cli.out.clone(),
        ..RunConfig::default()
    }
}

fn print(output: Output, cfg: &RunConfig) -> anyhow::Result<()> {
    let text = output.render()?;
    report::emit(&text, cfg.output.as_deref())?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = config(&cli);
    cfg.validate()?;
    match cli.command {
        Command::List { type_one, family, l, p } => {
            let family = match family {
                Some(c) => {
                    let f = ClassicalFamily::from_letter(c)
                        .ok_or_else(|| CliError::Usage(format!("unknown family `{c}`; expected B, C or D")))?;
                    Some((f, l.unwrap_or_default(), p.unwrap_or_default()))
                }
                None => None,
            };
            print(commands::list(ListFilter { type_one, family }, &cfg)?, &cfg)
        }
        Command::Einstein(t) => {
            let space = t.target()?.resolve()?;
            print(commands::einstein(&space, &cfg)?, &cfg)
        }
        Command::FixedPoints { target, json } => {
            let space = target.target()?.resolve()?;
            let text = commands::fixed_points(&space, &cfg)?.render()?;
            if let Some(path) = json {
                let json_cfg = RunConfig {
                    format: OutputFormat::Json,
                    ..cfg.clone()
                };
                let json_text = commands::fixed_points(&space, &json_cfg)?.render()?;
                report::emit(&json_text, Some(&path)).with_context(|| "writing the fixed-point report")?;
            }
            report::emit(&text, cfg.output.as_deref())?;
            Ok(())
        }
        Command::FlowField { target, reduced, chart } => {
            let space = target.target()?.resolve()?;
            let form = match (reduced, chart) {
                (true, _) => FieldForm::Reduced,
                (false, Some(c)) => FieldForm::Chart(commands::parse_chart(&c)?),
                (false, None) => FieldForm::Scaled,
            };
            print(commands::flow_field(&space, form, &cfg)?, &cfg)
        }
        Command::Portrait {
            space,
            samples,
            from,
            initial,
            seed,
        } => {
            let space = find_space(space.as_deref().unwrap_or(DEFAULT_PORTRAIT_SPACE)).map_err(CliError::from)?;
            let mut points = Vec::new();
            for f in &from {
                points.push(commands::parse_point(f)?);
            }
            if let Some(path) = &initial {
                points.extend(commands::read_points(path)?);
            }
            if samples.is_some() || points.is_empty() {
                let n = samples.unwrap_or(DEFAULT_PORTRAIT_SAMPLES);
                points.extend(commands::sample_points(space.s(), n, seed));
            }
            let summary = commands::portrait(&space, &points, &cfg)?.render()?;
            report::emit(&summary, None)?;
            Ok(())
        }
        Command::Verify { space, all, tol, seed } => {
            cfg.check_tol = tol;
            cfg.seed = seed;
            cfg.validate()?;
            let spaces = if all {
                default_sweep()
            } else {
                vec![find_space(space.as_deref().unwrap_or_default()).map_err(CliError::from)?]
            };
            let results = verify::verify_all(&spaces, &cfg);
            let (value, pass) = verify::summarize(&results, &spaces, &cfg);
            report::emit(&report::render(value.clone())?, cfg.output.as_deref())?;
            if pass {
                Ok(())
            } else {
                let failures: Vec<String> = value["failures"]
                    .as_array()
                    .map(|a| a.iter().filter_map(|f| f.as_str().map(String::from)).collect())
                    .unwrap_or_default();
                Err(CliError::ChecksFailed(format!("{} check(s) failed:\n  {}", failures.len(), failures.join("\n  "))).into())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(EXIT_FAILURE, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}
