use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lenori::events::{EventOptions, GapTolerance, SummerMonths};
use lenori::metrics::{DEFAULT_N_MAX, DEFAULT_RSE_MAX, DEFAULT_THRESHOLD};
use lenori::render::{self, Format};
use lenori::report::{log_transform_panels, Partition, PmfScope};
use lenori::synth::SyntheticSpec;
use lenori::{
    decompose, filter_forced, group_events_with, parse_outages, pmf_table, select_large, sliding_window,
    validate_rse_formulas, CauseGrouping, EventCatalog, MetricsReport, MomentSource, ReportOptions, Schema,
    TailModel,
};

#[derive(Parser)]
#[command(name = "lenori", version, about = "Large-event resilience metrics from outage records")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Large-event threshold N_L.
    #[arg(long = "n-l", global = true, default_value_t = DEFAULT_THRESHOLD)]
    n_l: u64,
    /// Largest blackout size N_max for the bounded model.
    #[arg(long, global = true, default_value_t = DEFAULT_N_MAX)]
    n_max: u64,
    /// Target relative standard error.
    #[arg(long, global = true, default_value_t = DEFAULT_RSE_MAX)]
    rse_max: f64,
    /// Gap allowed between chained outages, in minutes, or `inf`.
    #[arg(long, global = true, default_value = "0")]
    gap_minutes: GapTolerance,
    /// Comma-separated summer months.
    #[arg(long, global = true, default_value = "6,7,8,9")]
    summer_months: SummerMonths,
    /// Declared coverage span in years; defaults to the observed span.
    #[arg(long, global = true)]
    years: Option<f64>,
    /// Random seed for synthetic data.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Table)]
    format: OutFormat,
    /// Column mapping for raw outage files, `field=column`.
    #[arg(long = "schema", global = true, value_parser = parse_mapping)]
    schema: Vec<(String, String)>,
    /// Cause-code grouping file (`code -> group` per line).
    #[arg(long, global = true)]
    grouping: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Table,
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Table => Format::Table,
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum By {
    Season,
    Cause,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a raw outage file and write it in canonical form.
    Ingest { input: PathBuf },
    /// Group forced outages into resilience events and export the catalog.
    Events { input: PathBuf },
    /// Full metrics report for an outage file or event catalog.
    Metrics {
        input: PathBuf,
        /// Use sample moments instead of the fitted power law.
        #[arg(long)]
        empirical: bool,
    },
    /// Metrics per season or cause group.
    Decompose {
        input: PathBuf,
        #[arg(long, value_enum)]
        by: By,
    },
    /// Metrics over sliding windows of whole years.
    Track {
        input: PathBuf,
        #[arg(long)]
        window: u32,
    },
    /// Empirical PMF of event sizes.
    Pmf {
        input: PathBuf,
        /// Tail only, with the idealized power law at the fitted tail index.
        #[arg(long)]
        tail: bool,
        /// Log-transform panel data for the fitted tail, up to N_max.
        #[arg(long, conflicts_with = "tail")]
        panels: bool,
    },
    /// Generate an event catalog from a JSON spec file.
    Synth { spec: PathBuf },
    /// Monte Carlo check of the RSE formulas.
    Validate {
        /// JSON spec file; defaults to α = 1.3 with 93 large events a year for 6 years.
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
}

fn parse_mapping(raw: &str) -> std::result::Result<(String, String), String> {
    let (k, v) = raw
        .split_once('=')
        .ok_or_else(|| format!("expected field=column, got `{raw}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn schema(g: &Global) -> Result<Schema> {
    let mut s = Schema::default();
    for (field, column) in &g.schema {
        s.set(field, column.as_str())?;
    }
    Ok(s)
}

fn event_options(g: &Global) -> Result<EventOptions> {
    let grouping = match &g.grouping {
        Some(p) => CauseGrouping::read(open(p)?)?,
        None => CauseGrouping::new(),
    };
    Ok(EventOptions {
        gap: g.gap_minutes,
        summer_months: g.summer_months.clone(),
        grouping,
        n_year: g.years,
    })
}

fn group_file(path: &Path, g: &Global) -> Result<EventCatalog> {
    let parsed = parse_outages(open(path)?, &schema(g)?)?;
    for r in &parsed.rejects {
        log::warn!("rejected {r}");
    }
    Ok(group_events_with(&filter_forced(&parsed.records), &event_options(g)?))
}

/// An exported catalog (recognized by its `size_N` column) or a raw
/// outage file, which is grouped first.
fn load_catalog(path: &Path, g: &Global) -> Result<EventCatalog> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text)?;
    let header = text.lines().next().unwrap_or("");
    if header.split(',').any(|h| h.trim() == "size_N") {
        Ok(EventCatalog::read(text.as_bytes(), g.years)?)
    } else {
        group_file(path, g)
    }
}

fn report_options(g: &Global, empirical: bool) -> ReportOptions {
    ReportOptions {
        n_max: g.n_max,
        rse_max: g.rse_max,
        moments: if empirical {
            MomentSource::Empirical
        } else {
            MomentSource::Analytic
        },
    }
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> lenori::Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(String::from_utf8(buf)?)
}

fn run(cli: &Cli) -> Result<(String, bool)> {
    let g = &cli.global;
    let format = Format::from(g.format);
    let out = match &cli.command {
        Command::Ingest { input } => {
            let parsed = parse_outages(open(input)?, &schema(g)?)?;
            for r in &parsed.rejects {
                log::warn!("rejected {r}");
            }
            csv_bytes(|b| lenori::ingest::write_outages(&parsed.records, b))?
        }
        Command::Events { input } => {
            let catalog = group_file(input, g)?;
            csv_bytes(|b| catalog.write(b))?
        }
        Command::Metrics { input, empirical } => {
            let catalog = load_catalog(input, g)?;
            let report = MetricsReport::compute(&select_large(&catalog, g.n_l)?, &report_options(g, *empirical))?;
            render::report(&report, format)?
        }
        Command::Decompose { input, by } => {
            let catalog = load_catalog(input, g)?;
            let partition = match by {
                By::Season => Partition::Season,
                By::Cause => Partition::Cause,
            };
            let d = decompose(&catalog, partition, g.n_l, &report_options(g, false))?;
            render::decomposition(&d, format)?
        }
        Command::Track { input, window } => {
            let catalog = load_catalog(input, g)?;
            let t = sliding_window(&catalog, *window, g.n_l, &report_options(g, false))?;
            render::tracking(&t, format)?
        }
        Command::Pmf { input, tail, panels } => {
            let catalog = load_catalog(input, g)?;
            if *panels {
                let slice = select_large(&catalog, g.n_l)?;
                let model = TailModel::new(slice.tail_index_estimate()?, g.n_l)?;
                let rows = log_transform_panels(&model, slice.large_event_frequency(), g.n_max)?;
                render::panels(&rows, format)?
            } else {
                let scope = if *tail {
                    PmfScope::Tail { threshold: g.n_l }
                } else {
                    PmfScope::AllEvents
                };
                render::pmf(&pmf_table(&catalog, scope)?, format)?
            }
        }
        Command::Synth { spec } => {
            let mut spec: SyntheticSpec = serde_json::from_reader(open(spec)?)?;
            if let Some(seed) = g.seed {
                spec.seed = seed;
            }
            if let Some(years) = g.years {
                spec.years = years;
            }
            let catalog = lenori::synth_catalog(&spec)?;
            csv_bytes(|b| catalog.write(b))?
        }
        Command::Validate { spec, trials } => {
            let mut spec = match spec {
                Some(p) => serde_json::from_reader(open(p)?)?,
                None => SyntheticSpec::new(TailModel::bounded(1.3, g.n_l, g.n_max)?, 93.0, 6.0, 1),
            };
            if let Some(seed) = g.seed {
                spec.seed = seed;
            }
            let checks = validate_rse_formulas(&spec, *trials)?;
            let all_passed = checks.iter().all(|c| c.passed);
            let text = if matches!(format, Format::Json) {
                serde_json::to_string_pretty(&checks)? + "\n"
            } else {
                let mut s = String::new();
                for c in &checks {
                    s += &format!(
                        "{} {:<13} analytic {:.5}  empirical {:.5}  rel.err {:+.4}  tol {:.2}\n",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.name,
                        c.expected,
                        c.observed,
                        c.relative_error(),
                        c.tolerance
                    );
                }
                s
            };
            return Ok((text, all_passed));
        }
    };
    Ok((out, true))
}

/// Writes to a temporary file beside the target and renames it into place.
fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        None => match io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("cannot write to {}", dir.display()))?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(path)
                .with_context(|| format!("cannot write {}", path.display()))?;
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<lenori::Error>() {
        Some(e) if e.is_numeric() => 3,
        Some(lenori::Error::InvalidArgument(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(&cli).and_then(|(text, passed)| {
        emit(&text, cli.global.out.as_deref())?;
        if !passed {
            bail!(lenori::Error::NonConvergence(
                "Monte Carlo estimates fell outside tolerance".into()
            ));
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lenori: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
