//! `thz-order` — command-line front end for the classification toolkit.
//!
//! Three subcommands cover the workflows the library supports end to end:
//! `table` regenerates the pulse descriptor table, `classify` runs a single
//! seeded trial and prints the decision as JSON, and `sweep` runs the Monte
//! Carlo TPR experiments and writes CSV plus a gnuplot script. Every failure
//! path exits nonzero with a single `error[category]: …` line on stderr so
//! wrapping scripts can branch on the category without parsing prose.

mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{load_config, RunConfig};
use std::fmt::Write as _;
use std::path::PathBuf;
use thz_order::experiment::{
    emit_report, sweep_preset, tpr_sweep, AbsorptionSource, PresetRun, SweepVariable, TrialRunner,
};
use thz_order::pulse::PulseSpec;
use thz_order::{Error, Result, DEFAULT_BAND};

#[derive(Parser)]
#[command(
    name = "thz-order",
    version,
    about = "Classify the derivative order of terahertz Gaussian pulses at an antenna array"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pulse descriptor table (orders 1..10 at 3 and 6 THz) as CSV
    Table(TableArgs),
    /// Run one seeded classification trial and print the result as JSON
    Classify(ClassifyArgs),
    /// Run a TPR sweep and write results CSV plus a gnuplot script
    Sweep(SweepArgs),
}

#[derive(Args)]
struct TableArgs {
    /// Also write the table to <DIR>/descriptor_table.csv
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Run configuration file (flat key = value with [section] headers)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Transmitted derivative order
    #[arg(long)]
    order: u32,
    /// Seed for the molecular noise draw
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable molecular absorption noise
    #[arg(long)]
    no_noise: bool,
    /// Override the absorption table (builtin:NAME or file:PATH)
    #[arg(long, value_name = "SRC")]
    absorption: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Run configuration file (flat key = value with [section] headers)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Stock experiment preset (fig5, fig6, fig8)
    #[arg(long, value_name = "NAME", conflicts_with_all = ["variable", "values"])]
    preset: Option<String>,
    /// Variable to sweep when not using a preset
    #[arg(long, value_enum, requires = "values")]
    variable: Option<CliVariable>,
    /// Comma-separated sweep values in SI units (meters, seconds, or element count)
    #[arg(long, value_name = "LIST", requires = "variable")]
    values: Option<String>,
    /// Output directory for CSV and plot script
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override the base seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Disable molecular absorption noise
    #[arg(long)]
    no_noise: bool,
    /// Override the absorption table (builtin:NAME or file:PATH)
    #[arg(long, value_name = "SRC")]
    absorption: Option<String>,
    /// Validate the whole sweep without running any trials
    #[arg(long)]
    dry_run: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliVariable {
    PathLength,
    SnapshotDuration,
    NumElements,
}

impl From<CliVariable> for SweepVariable {
    fn from(v: CliVariable) -> Self {
        match v {
            CliVariable::PathLength => SweepVariable::PathLength,
            CliVariable::SnapshotDuration => SweepVariable::SnapshotDuration,
            CliVariable::NumElements => SweepVariable::NumElements,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Table(args) => cmd_table(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    if let Err(err) = outcome {
        eprintln!("error[{}]: {err}", err.category());
        std::process::exit(1);
    }
}

fn base_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    match path {
        Some(path) => load_config(path),
        None => Ok(RunConfig::default()),
    }
}

/// The descriptor table as CSV text: half-power edges, 3 dB bandwidth and
/// RMS spread over the [1, 10] THz band, one row per (order, center).
fn render_descriptor_table() -> Result<String> {
    let mut text =
        String::from("order,center_frequency_thz,f_low_thz,f_high_thz,bandwidth_3db_thz,rms_spread_thz\n");
    for fc in [3.0e12, 6.0e12] {
        for order in 1..=PulseSpec::MAX_ORDER {
            let spec = PulseSpec::new(order, fc, 1.0e-6)?;
            let band = spec.half_power_band()?;
            let spread = spec.analytic_rms_spread(DEFAULT_BAND.0, DEFAULT_BAND.1)?;
            // `{}` keeps full f64 precision, so the CSV parses back losslessly
            writeln!(
                text,
                "{order},{},{},{},{},{}",
                fc / 1.0e12,
                band.f_low / 1.0e12,
                band.f_high / 1.0e12,
                band.bandwidth_3db / 1.0e12,
                spread / 1.0e12
            )
            .expect("string write");
        }
    }
    Ok(text)
}

fn cmd_table(args: TableArgs) -> Result<()> {
    let text = render_descriptor_table()?;
    print!("{text}");
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        let path = dir.join("descriptor_table.csv");
        std::fs::write(&path, &text)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_classify(args: ClassifyArgs) -> Result<()> {
    let mut run = base_config(args.config.as_ref())?;
    if args.no_noise {
        run.trial.include_noise = false;
    }
    if let Some(source) = &args.absorption {
        run.trial.absorption = AbsorptionSource::parse(source)?;
    }
    let runner = TrialRunner::new(&run.trial, args.order)?;
    let result = runner.run(args.seed)?;
    // One JSON record per trial; correctness of the decision is the
    // caller's business, so the exit code only reflects whether it ran.
    println!("{}", serde_json::to_string(&result).expect("serializable result"));
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let run_config = base_config(args.config.as_ref())?;
    let mut trial = run_config.trial.clone();
    if args.no_noise {
        trial.include_noise = false;
    }
    if let Some(source) = &args.absorption {
        trial.absorption = AbsorptionSource::parse(source)?;
    }
    if let Some(seed) = args.seed {
        trial.base_seed = seed;
    }

    let runs: Vec<PresetRun> = match (&args.preset, args.variable) {
        (Some(name), None) => sweep_preset(name)?,
        (None, Some(variable)) => vec![PresetRun {
            label: String::new(),
            variable: variable.into(),
            values: parse_values(args.values.as_deref().expect("required by clap"))?,
            distance: None,
        }],
        (None, None) => {
            return Err(Error::Config(
                "nothing to sweep: pass --preset NAME or --variable VAR --values LIST".into(),
            ));
        }
        (Some(_), Some(_)) => unreachable!("clap rejects --preset with --variable"),
    };

    let out_dir = args
        .out
        .or(run_config.output_dir)
        .unwrap_or_else(|| PathBuf::from("out"));

    if args.dry_run {
        let mut points = 0usize;
        for run in &runs {
            let mut config = trial.clone();
            if let Some(distance) = run.distance {
                config.distance = distance;
            }
            for &value in &run.values {
                run.variable.apply(&config, value)?;
                points += 1;
            }
        }
        let labels: Vec<&str> = runs
            .iter()
            .map(|r| if r.label.is_empty() { "(unlabelled)" } else { r.label.as_str() })
            .collect();
        println!(
            "dry run OK — {} run(s) [{}], {points} sweep point(s) validated, output dir {}",
            runs.len(),
            labels.join(", "),
            out_dir.display()
        );
        return Ok(());
    }

    for run in &runs {
        let mut config = trial.clone();
        if let Some(distance) = run.distance {
            config.distance = distance;
        }
        let target = if run.label.is_empty() {
            out_dir.clone()
        } else {
            out_dir.join(&run.label)
        };
        if run_config.verbose {
            eprintln!(
                "sweeping {} over {} value(s), {} trial(s) per order...",
                run.variable,
                run.values.len(),
                config.trials_per_order
            );
        }
        let report = tpr_sweep(&config, run.variable, &run.values)?;
        let (csv, gp) = emit_report(&report, &target)?;
        println!("wrote {}", csv.display());
        println!("wrote {}", gp.display());
    }
    Ok(())
}

fn parse_values(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|part| {
            part.trim().parse().map_err(|_| {
                Error::Config(format!("sweep value {:?} is not a number", part.trim()))
            })
        })
        .collect()
}
