use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use outlier_perf::{run_pipeline, OutputFormat, RunConfig};
use outlier_perf_core::{
    derive_tta_profile, parse_dataset, validate_dataset, write_writer, DatasetConfig, Direction,
    KurtosisBasis, MomentConventions, ShapeMode, StdevMode,
};
use outlier_perf_fixtures::{generate, FixtureSpec};

#[derive(Parser)]
#[command(
    name = "outlier-perf",
    version,
    about = "k-sigma outlier screening of firm performance-efficiency ratios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write tables, report and figure data.
    Analyze(AnalyzeArgs),
    /// Parse and check a panel file without writing anything.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        years: YearArgs,
    },
    /// Write a seeded synthetic panel.
    Fixtures {
        #[arg(long)]
        firms: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Exact direction counts as `increase,decrease,flat`.
        #[arg(long, value_delimiter = ',')]
        directions: Option<Vec<usize>>,
        #[command(flatten)]
        years: YearArgs,
    },
}

#[derive(Args)]
struct YearArgs {
    /// Pre-window year labels (column suffixes of `tta_*`).
    #[arg(long, value_delimiter = ',', default_values_t = ["2006".to_string(), "2007".to_string()])]
    pre_years: Vec<String>,
    /// Post-window year labels.
    #[arg(long, value_delimiter = ',', default_values_t = ["2008".to_string(), "2009".to_string(), "2010".to_string()])]
    post_years: Vec<String>,
}

impl YearArgs {
    fn config(&self) -> Result<DatasetConfig, outlier_perf_core::IngestError> {
        DatasetConfig::new(self.pre_years.clone(), self.post_years.clone())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StdevArg {
    Sample,
    Population,
}

#[derive(Clone, Copy, ValueEnum)]
enum MomentsArg {
    Adjusted,
    Population,
}

#[derive(Clone, Copy, ValueEnum)]
enum KurtosisArg {
    Excess,
    Raw,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Markdown,
    Csv,
    Json,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Interval half-width in standard deviations.
    #[arg(long, default_value_t = 2.0)]
    k: f64,
    #[arg(long, value_enum, default_value = "sample")]
    stdev: StdevArg,
    #[arg(long, value_enum, default_value = "adjusted")]
    moments: MomentsArg,
    #[arg(long, value_enum, default_value = "excess")]
    kurtosis: KurtosisArg,
    #[arg(long, default_value_t = 6)]
    systematic_threshold: usize,
    #[arg(long, default_value_t = 0.5)]
    near_miss_margin: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["markdown", "json"])]
    format: Vec<FormatArg>,
    /// Also write the five scatter data files.
    #[arg(long)]
    scatter: bool,
    /// Render each scatter series as SVG too.
    #[arg(long)]
    svg: bool,
    /// Write stacked pre-window TTA per firm.
    #[arg(long)]
    stacked_tta: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Replace the output directory if it is not empty.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    years: YearArgs,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OUTLIER_PERF_LOG", "warn"))
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Validate { input, years } => validate(&input, &years),
        Command::Fixtures {
            firms,
            seed,
            out,
            directions,
            years,
        } => {
            if directions.as_ref().is_some_and(|d| d.len() != 3) {
                eprintln!("error: --directions takes exactly three counts: increase,decrease,flat");
                return ExitCode::from(2);
            }
            match fixtures(firms, seed, &out, directions, &years) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
    }
}

fn analyze(args: AnalyzeArgs) -> ExitCode {
    let dataset = match args.years.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let config = RunConfig {
        input: args.input,
        dataset,
        k: args.k,
        conventions: MomentConventions {
            stdev_mode: match args.stdev {
                StdevArg::Sample => StdevMode::Sample,
                StdevArg::Population => StdevMode::Population,
            },
            shape_mode: match args.moments {
                MomentsArg::Adjusted => ShapeMode::Adjusted,
                MomentsArg::Population => ShapeMode::Population,
            },
            kurtosis_basis: match args.kurtosis {
                KurtosisArg::Excess => KurtosisBasis::Excess,
                KurtosisArg::Raw => KurtosisBasis::Raw,
            },
        },
        systematic_threshold: args.systematic_threshold,
        near_miss_margin: args.near_miss_margin,
        out: args.out,
        formats: args
            .format
            .iter()
            .map(|f| match f {
                FormatArg::Markdown => OutputFormat::Markdown,
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            })
            .collect::<BTreeSet<_>>(),
        scatter: args.scatter,
        svg: args.svg,
        stacked_tta: args.stacked_tta,
        force: args.force,
    };
    match run_pipeline(&config) {
        Ok(summary) => {
            println!(
                "{} firms, {} with outliers, {} systematic; wrote {} files to {}",
                summary.firms,
                summary.outlier_firms,
                summary.systematic,
                summary.files.len(),
                config.out.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn validate(input: &Path, years: &YearArgs) -> ExitCode {
    let config = match years.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let records = match parse_dataset(input, &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let violations = validate_dataset(&records, &config);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        return ExitCode::from(1);
    }
    let mut counts = [0usize; 3];
    for r in &records {
        let d = derive_tta_profile(&r.tta_pre).expect("validated").direction;
        counts[Direction::ALL.iter().position(|x| *x == d).unwrap()] += 1;
    }
    println!(
        "ok: {} firms ({} increase, {} decrease, {} flat)",
        records.len(),
        counts[0],
        counts[1],
        counts[2]
    );
    ExitCode::SUCCESS
}

fn fixtures(
    firms: usize,
    seed: u64,
    out: &Path,
    directions: Option<Vec<usize>>,
    years: &YearArgs,
) -> anyhow::Result<()> {
    let mut spec = FixtureSpec::new(firms, seed);
    spec.config = years.config()?;
    if let Some(d) = directions {
        spec = spec.with_directions(d[0], d[1], d[2]);
    }
    let records = generate(&spec)?;
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
    write_writer(tmp.as_file_mut(), &records, &spec.config)?;
    tmp.persist(out)
        .with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {} firms to {}", records.len(), out.display());
    Ok(())
}
