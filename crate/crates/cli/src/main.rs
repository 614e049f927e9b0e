use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bergman_cli::config::{self, Experiment, ExperimentConfig, Point};
use bergman_cli::report::{suite_table, RunReport};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bergman", version, about = "Weighted Bergman kernel experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config; defaults to the shipped config for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the kernel degree N.
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Directory for `<name>.json` and `<name>-<table>.csv`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print tables as CSV on stdout.
    #[arg(long, global = true)]
    csv: bool,
    /// Print the JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel evaluation and convergence tables.
    Kernel {
        #[command(subcommand)]
        what: KernelCmd,
    },
    /// Convexity probes of log K and its relatives.
    Convexity {
        #[command(subcommand)]
        what: ConvexityCmd,
    },
    /// Fibred families over a t-domain.
    Family {
        #[command(subcommand)]
        what: FamilyCmd,
    },
    /// One-variable checks.
    Classic {
        #[command(subcommand)]
        what: ClassicCmd,
    },
    /// Runs every shipped config and prints a summary table.
    Suite {
        /// List the shipped configs and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum KernelCmd {
    Eval,
    Converge,
}

#[derive(Subcommand)]
enum ConvexityCmd {
    /// log K on a convex domain with a convex weight.
    Logk,
    /// Negative and sanity controls.
    Control,
    /// The Gaussian-weight counterexample for -1/sqrt(K).
    Counterexample,
    /// Exploratory probe of -1/sqrt(K); reports no verdict.
    Question,
}

#[derive(Subcommand)]
enum FamilyCmd {
    Sweep,
    Identity,
    Theorem31,
    Joint,
}

#[derive(Subcommand)]
enum ClassicCmd {
    Hyperbolic,
    Univalent {
        /// JSON array of coefficients a_0, a_1, ...; each a number or [re, im].
        #[arg(long)]
        coeffs: Option<String>,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',')]
        r_grid: Option<Vec<f64>>,
        #[arg(long)]
        theta_count: Option<usize>,
    },
}

fn parse_coeffs(text: &str) -> Result<Vec<Point>> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(text).context("--coeffs must be a JSON array")?;
    raw.iter()
        .map(|v| match v {
            serde_json::Value::Number(n) => Ok([n.as_f64().unwrap_or(f64::NAN), 0.0]),
            other => serde_json::from_value::<Point>(other.clone()).context("coefficient must be a number or [re, im]"),
        })
        .collect()
}

/// Shipped config name and expected experiment kind for each subcommand.
fn defaults(cmd: &Command) -> (&'static str, &'static [&'static str]) {
    match cmd {
        Command::Kernel { what: KernelCmd::Eval } => ("disk-oracle", &["kernel_eval"]),
        Command::Kernel { what: KernelCmd::Converge } => ("disk-converge", &["kernel_converge"]),
        Command::Convexity { what } => match what {
            ConvexityCmd::Logk => ("thm1-square-zero", &["theorem1"]),
            ConvexityCmd::Control => ("control-l-shape", &["negative_control"]),
            ConvexityCmd::Counterexample => ("remark", &["remark_counterexample"]),
            ConvexityCmd::Question => ("question-square", &["question_explorer"]),
        },
        Command::Family { what } => match what {
            FamilyCmd::Sweep => ("family-ball-sweep", &["family_sweep"]),
            FamilyCmd::Identity => ("family-oka-identity", &["family_identity"]),
            FamilyCmd::Theorem31 => ("family-ball-theorem31", &["family_theorem31"]),
            FamilyCmd::Joint => ("family-ball-joint", &["family_joint"]),
        },
        Command::Classic { what } => match what {
            ClassicCmd::Hyperbolic => ("classic-hyperbolic", &["classic_hyperbolic"]),
            ClassicCmd::Univalent { .. } => ("classic-koebe", &["classic_univalent"]),
        },
        Command::Suite { .. } => ("", &[]),
    }
}

fn emit(report: &RunReport, common: &Common) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if common.json {
        writeln!(out, "{}", report.to_json()?)?;
    } else {
        write!(out, "{}", report.summary())?;
    }
    if common.csv {
        for t in &report.tables {
            writeln!(out, "# {}", t.name)?;
            t.write_csv(&mut out)?;
        }
    }
    if let Some(dir) = &common.out {
        report.write_to(dir)?;
    }
    Ok(())
}

fn apply_overrides(cfg: &mut ExperimentConfig, cli: &Cli) -> Result<()> {
    if let Some(s) = cli.common.seed {
        cfg.seed = s;
    }
    if let Some(d) = cli.common.degree {
        cfg.degree = d;
    }
    if let Command::Classic {
        what: ClassicCmd::Univalent {
            coeffs,
            r_grid,
            theta_count,
        },
    } = &cli.command
    {
        let Experiment::ClassicUnivalent {
            coeffs: c,
            r_grid: r,
            theta_count: t,
            expect,
            witness_near,
            witness_radius,
        } = &mut cfg.experiment
        else {
            unreachable!()
        };
        if let Some(text) = coeffs {
            *c = parse_coeffs(text)?;
            // A user-supplied map has no expectation attached.
            *expect = config::Expectation::Unasserted;
            *witness_near = None;
            *witness_radius = None;
        }
        if let Some(g) = r_grid {
            *r = g.clone();
        }
        if let Some(n) = theta_count {
            *t = *n;
        }
    }
    Ok(())
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    if let Command::Suite { list } = cli.command {
        let configs = config::shipped_all()?;
        if list {
            for c in &configs {
                println!("{}\t{}", c.name, c.experiment.kind());
            }
            return Ok(true);
        }
        let mut reports = Vec::with_capacity(configs.len());
        for mut c in configs {
            if let Some(s) = cli.common.seed {
                c.seed = s;
            }
            let r = bergman_cli::run(&c)?;
            eprint!("{}", r.summary());
            if let Some(dir) = &cli.common.out {
                r.write_to(dir)?;
            }
            reports.push(r);
        }
        let table = suite_table(&reports);
        table.write_csv(std::io::stdout().lock())?;
        if let Some(dir) = &cli.common.out {
            table.write_csv(std::fs::File::create(dir.join("summary.csv"))?)?;
            std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&table)? + "\n")?;
        }
        return Ok(reports.iter().all(RunReport::passed));
    }

    let (default_name, kinds) = defaults(&cli.command);
    let mut cfg = match &cli.common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => config::shipped(default_name)?,
    };
    if !kinds.contains(&cfg.experiment.kind()) {
        bail!(
            "config experiment `{}` does not match this subcommand (expected {})",
            cfg.experiment.kind(),
            kinds.join(" or ")
        );
    }
    apply_overrides(&mut cfg, &cli)?;
    let report = bergman_cli::run(&cfg)?;
    emit(&report, &cli.common)?;
    Ok(report.passed())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
