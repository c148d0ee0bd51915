//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 numerical abort.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analyze::{characterize, default_metrics, CharacterizeOptions, Metrics};
use crate::error::{Error, Result};
use crate::scenario_io::{self, catalog, CatalogEntry, Scenario, SweepSpec};
use crate::simulate::run_scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pvfreq", version, about = "Grid frequency response with PV frequency-support controls")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output directory for written files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the integration step, s.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Override the noise seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Maximum worker threads for sweeps and comparisons.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Reject unknown keys in input documents (default).
    #[arg(long, global = true, overrides_with = "lenient")]
    pub strict: bool,
    /// Warn about unknown keys instead of rejecting them.
    #[arg(long, global = true, overrides_with = "strict")]
    pub lenient: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl GlobalOpts {
    fn strict(&self) -> bool {
        !self.lenient
    }

    fn apply(&self, s: &mut Scenario) {
        if let Some(dt) = self.dt {
            s.sim.dt = dt;
        }
        if let Some(seed) = self.seed {
            s.sim.rng_seed = seed;
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario file or catalog id; writes the time series and metrics.
    Run { scenario: String },
    /// Drive a plant's inertia controller with a constant-RoCoF ramp.
    Characterize {
        /// Plant JSON file or catalog plant id.
        plant: String,
        /// Ramp RoCoF, Hz/s.
        #[arg(long)]
        rocof: f64,
        #[arg(long, default_value_t = 60.0)]
        f_nominal: f64,
    },
    /// Run a one-parameter sweep and tabulate metrics.
    Sweep { spec: String },
    /// Metrics of several scenarios side by side.
    Compare {
        #[arg(required = true, num_args = 1..)]
        scenarios: Vec<String>,
    },
    /// List built-in entries, or print one as JSON.
    Catalog {
        #[arg(long)]
        show: Option<String>,
    },
}

pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parse `args` and execute; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn out_path(g: &GlobalOpts, name: &str) -> Option<PathBuf> {
    g.out.as_ref().map(|d| d.join(name))
}

fn series_json(result: &crate::simulate::SimResult) -> Result<String> {
    let (header, cols) = scenario_io::read_timeseries_csv(&scenario_io::timeseries_csv_string(result))?;
    let map: serde_json::Map<String, serde_json::Value> = header
        .into_iter()
        .zip(cols)
        .map(|(h, c)| (h, serde_json::Value::from(c)))
        .collect();
    Ok(serde_json::to_string(&map).expect("series serializes") + "\n")
}

fn load_plant(arg: &str, strict: bool) -> Result<crate::pv_control::PvPlant> {
    let path = Path::new(arg);
    if path.exists() {
        return scenario_io::parse_plant(&scenario_io::read_text(path)?, strict);
    }
    match catalog::get(arg)? {
        CatalogEntry::Plant(p) => Ok(*p),
        other => Err(Error::invalid(arg, format!("is a {}, not a plant", other.kind()))),
    }
}

fn load_sweep(arg: &str, strict: bool) -> Result<SweepSpec> {
    let path = Path::new(arg);
    if path.exists() {
        return scenario_io::parse_json(&scenario_io::read_text(path)?, strict);
    }
    match catalog::get(arg)? {
        CatalogEntry::Sweep(s) => Ok(*s),
        other => Err(Error::invalid(arg, format!("is a {}, not a sweep", other.kind()))),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Run { scenario } => {
            let mut s = scenario_io::load_scenario(scenario, g.strict())?;
            g.apply(&mut s);
            let result = run_scenario(&s, &s.sim)?;
            let metrics = default_metrics(&result)?;
            let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
            match g.format {
                Format::Csv => scenario_io::write_timeseries_csv(&result, &dir.join(format!("{}.csv", s.id)))?,
                Format::Json => scenario_io::output::write_file(
                    &dir.join(format!("{}.json", s.id)),
                    &series_json(&result)?,
                )?,
            }
            scenario_io::write_metrics_json(&metrics, &dir.join(format!("{}.metrics.json", s.id)))?;
            emit(out, &(scenario_io::metrics_json_string(&metrics) + "\n"))
        }
        Command::Characterize { plant, rocof, f_nominal } => {
            let p = load_plant(plant, g.strict())?;
            let mut opts = CharacterizeOptions {
                f_n: *f_nominal,
                ..CharacterizeOptions::default()
            };
            if let Some(dt) = g.dt {
                opts.dt = dt;
            }
            let c = characterize(&p, *rocof, &opts)?;
            if let Some(path) = out_path(g, &format!("{}.characterize.json", p.id)) {
                scenario_io::write_metrics_json(&c, &path)?;
            }
            emit(out, &(scenario_io::metrics_json_string(&c) + "\n"))
        }
        Command::Sweep { spec } => {
            let spec = load_sweep(spec, g.strict())?;
            let table = scenario_io::run_sweep(&spec, g.strict(), g.jobs, |s| g.apply(s))?;
            let (text, ext) = match g.format {
                Format::Csv => (table.to_csv(), "csv"),
                Format::Json => (table.to_json() + "\n", "json"),
            };
            let name = if spec.id.is_empty() { "sweep" } else { spec.id.as_str() };
            if let Some(path) = out_path(g, &format!("{name}.{ext}")) {
                scenario_io::output::write_file(&path, &text)?;
            }
            emit(out, &text)
        }
        Command::Compare { scenarios } => {
            let mut list = scenarios
                .iter()
                .map(|a| scenario_io::load_scenario(a, g.strict()))
                .collect::<Result<Vec<_>>>()?;
            list.iter_mut().for_each(|s| g.apply(s));
            let metrics = crate::parallel::map(&list, g.jobs, |s| {
                run_scenario(s, &s.sim).and_then(|r| default_metrics(&r))
            });
            let rows: Vec<(String, Metrics)> = list
                .iter()
                .zip(metrics)
                .map(|(s, m)| m.map(|m| (s.id.clone(), m)))
                .collect::<Result<_>>()?;
            let (text, ext) = match g.format {
                Format::Csv => (scenario_io::compare_table_csv(&rows), "csv"),
                Format::Json => {
                    let obj: serde_json::Map<String, serde_json::Value> = rows
                        .iter()
                        .map(|(id, m)| (id.clone(), serde_json::to_value(m).expect("metrics serialize")))
                        .collect();
                    (serde_json::to_string_pretty(&obj).expect("serializes") + "\n", "json")
                }
            };
            if let Some(path) = out_path(g, &format!("compare.{ext}")) {
                scenario_io::output::write_file(&path, &text)?;
            }
            emit(out, &text)
        }
        Command::Catalog { show } => match show {
            Some(id) => emit(out, &(catalog::get(id)?.to_json() + "\n")),
            None => {
                let mut text = String::new();
                for id in catalog::IDS {
                    let e = catalog::get(id)?;
                    text.push_str(&format!("{id:<16} {:<9} {}\n", e.kind(), e.description()));
                }
                emit(out, &text)
            }
        },
    }
}
