//! `bertrand-flow`: command-line front end for chart analysis, simulation,
//! reduction and classification.
//!
//! Exit codes: 0 on success, 2 for configuration and usage errors, 3 for
//! domain and numerical failures.

mod commands;
mod config;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use bertrand_flow::dynamics::Method;
use bertrand_flow::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::Output;
use config::{ChartSource, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "bertrand-flow", version, about = "Magnetic geodesic flows on surfaces of revolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Chart: `builtin:NAME` or a chart definition JSON file
    #[arg(long, global = true)]
    chart: Option<String>,
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: standard output)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for grid computations
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Tolerance for the constant-curvature test
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Points in latitude grids
    #[arg(long, global = true)]
    grid_size: Option<usize>,
    /// Record the wall-clock time in the metadata
    #[arg(long, global = true)]
    stamp: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scalar curvature over the chart grid
    Curvature,
    /// Integrate the original equations of motion
    Simulate(SimulateArgs),
    /// Turning points, radial period and apsidal angle over (eps, Ehat, kappa)
    Reduce(ReduceArgs),
    /// Bertrand classification with supporting evidence
    Classify(ReduceArgs),
    /// The fourth-order coefficient of the apsidal expansion
    H4(H4Args),
    /// Fit the longitude advance in powers of the latitude half-width
    SweepH(SweepArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Initial latitude (default: the interval midpoint)
    #[arg(long, allow_hyphen_values = true)]
    a0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pa0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pphi0: Option<f64>,
    /// Start from slow data moving in this direction with speed `eps`
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Speed of the slow data (default 0.1)
    #[arg(long)]
    eps: Option<f64>,
    /// Time step (default 1e-3)
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    /// Final time (default 10)
    #[arg(long, allow_hyphen_values = true)]
    t_end: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// Comma-separated values
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eps: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ehat: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    kappa: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct H4Args {
    /// Latitudes (default: the chart grid)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    c: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Centre latitude (default: the interval midpoint)
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Half-widths
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    ImplicitMidpoint,
    Rk4,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ImplicitMidpoint => Method::ImplicitMidpoint,
            MethodArg::Rk4 => Method::Rk4,
        }
    }
}

impl Cli {
    fn name(&self) -> &'static str {
        match self.command {
            Command::Curvature => "curvature",
            Command::Simulate(_) => "simulate",
            Command::Reduce(_) => "reduce",
            Command::Classify(_) => "classify",
            Command::H4(_) => "h4",
            Command::SweepH(_) => "sweep-h",
        }
    }

    fn flags(&self) -> RunConfig {
        let c = &self.common;
        let mut flags = RunConfig {
            chart: c.chart.clone().map(ChartSource::Spec),
            out: c.out.clone(),
            format: c.format,
            jobs: c.jobs,
            tol: c.tol,
            grid_size: c.grid_size,
            ..Default::default()
        };
        match &self.command {
            Command::Curvature => {}
            Command::Simulate(s) => {
                flags.a0 = s.a0;
                flags.phi0 = s.phi0;
                flags.pa0 = s.pa0;
                flags.pphi0 = s.pphi0;
                flags.theta = s.theta;
                flags.eps = s.eps.map(|e| vec![e]);
                flags.dt = s.dt;
                flags.t_end = s.t_end;
                flags.method = s.method.map(Method::from);
            }
            Command::Reduce(r) | Command::Classify(r) => {
                flags.eps = r.eps.clone();
                flags.ehat = r.ehat.clone();
                flags.kappa = r.kappa.clone();
            }
            Command::H4(h) => flags.c = h.c.clone(),
            Command::SweepH(s) => {
                flags.c = s.c.map(|c| vec![c]);
                flags.h = s.h.clone();
            }
        }
        flags
    }
}

fn write_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    text
}

fn emit(output: Output, meta: Value, config: &RunConfig) -> Result<()> {
    let out = config.out.as_deref();
    match config.format_or(output.default_format) {
        Format::Json => write_to(out, &pretty(&json!({ "meta": meta, "result": output.result }))),
        Format::Csv => {
            let table = output
                .table
                .ok_or_else(|| Error::InvalidInput("this command has no CSV form; use --format json".into()))?;
            write_to(out, &table)?;
            match out {
                Some(path) => {
                    let mut side = path.as_os_str().to_owned();
                    side.push(".meta.json");
                    write_to(Some(Path::new(&side)), &pretty(&json!({ "meta": meta, "summary": output.summary })))
                }
                None => {
                    eprintln!("{}", serde_json::to_string(&output.summary).expect("JSON values serialize"));
                    Ok(())
                }
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let config = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    }
    .overridden_by(cli.flags());
    let (source, chart) = config.chart()?;
    let dispatch = || match cli.command {
        Command::Curvature => commands::curvature(&chart, &config),
        Command::Simulate(_) => commands::simulate(&chart, &config),
        Command::Reduce(_) => commands::reduce(&chart, &config),
        Command::Classify(_) => commands::classify_chart(&chart, &config),
        Command::H4(_) => commands::h4(&chart, &config),
        Command::SweepH(_) => commands::sweep_h(&chart, &config),
    };
    let output = match config.jobs {
        None => dispatch(),
        Some(0) => return Err(Error::InvalidInput("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(dispatch),
    }?;
    let mut meta = json!({
        "command": cli.name(),
        "chart": source,
        "chart_label": chart.label(),
        "interval": [chart.interval().lo, chart.interval().hi],
        "parameters": output.parameters,
        "version": env!("CARGO_PKG_VERSION"),
    });
    if cli.common.stamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        meta["timestamp"] = json!(secs);
    }
    emit(output, meta, &config)
}

fn exit_code(error: &Error) -> u8 {
    match error.root() {
        Error::InvalidInput(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
