use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use mzi_cli::figure::{FigureId, FigureJob};
use mzi_cli::sweep::{evaluate, write_csv, Axis, AxisRange, RowStatus, SweepSpec};
use mzi_cli::validate::{self, GridLevel, Mutation, ValidateOptions};
use mzi_cli::Config;
use mzi_core::{Detector, ExperimentParams, Scheme};
use serde_json::json;

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SINGULAR: u8 = 3;

/// Phase estimation with photon-added coherent and squeezed-vacuum light in a
/// lossy Mach–Zehnder interferometer.
#[derive(Debug, Parser)]
#[command(name = "mzi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sensitivity and quantum Fisher information of one configuration.
    Point(PointArgs),
    /// One CSV row per (axis value, scheme, m, detector).
    Sweep(SweepArgs),
    /// Write the datasets behind the published figures.
    Figure(FigureArgs),
    /// Cross-check the moment engine against the Fock-space oracle.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Coherent amplitude |α|.
    #[arg(long)]
    alpha: Option<f64>,
    /// Phase of α.
    #[arg(long = "theta-alpha", allow_negative_numbers = true)]
    theta_alpha: Option<f64>,
    /// Squeezing parameter.
    #[arg(long)]
    r: Option<f64>,
    /// Phase shift [default: π/2].
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Arm transmittance [default: 1].
    #[arg(long = "T")]
    t: Option<f64>,
    /// Mode-a transmittance of the lossy QFI [default: 1].
    #[arg(long)]
    eta: Option<f64>,
    /// Added photons (comma-separated list for sweeps).
    #[arg(long, value_delimiter = ',')]
    m: Vec<u32>,
    /// original, a or b (comma-separated list for sweeps).
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<Scheme>,
    /// idiff or homodyne (comma-separated list for sweeps).
    #[arg(long, value_delimiter = ',')]
    detector: Vec<Detector>,
    /// Minimize Δφ over φ ∈ (0, π) instead of using --phi.
    #[arg(long = "optimize-phi")]
    optimize_phi: bool,
    /// key=value file with defaults for any of these flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// phi, alpha, r, T, eta or m.
    #[arg(long)]
    axis: Option<String>,
    /// `start:stop:steps` or a comma-separated list of values.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// CSV destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// Figure ids (F2..F9, F11) or `all`.
    #[arg(required = true)]
    ids: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value = "quick")]
    grid: GridLevel,
    /// Corrupt one coefficient of W or Q, e.g. `w:x1s1` (the suite must fail).
    #[arg(long)]
    mutate: Option<Mutation>,
    /// Stop at the first violation.
    #[arg(long = "fail-fast")]
    fail_fast: bool,
}

/// Errors that map to the usage exit code.
#[derive(Debug)]
struct Usage(anyhow::Error);

fn usage(e: impl Into<anyhow::Error>) -> Usage {
    Usage(e.into())
}

impl ParamArgs {
    fn config(&self) -> Result<Config, Usage> {
        match &self.config {
            Some(path) => Config::load(path).map_err(usage),
            None => Ok(Config::default()),
        }
    }

    fn scalar(&self, cfg: &Config, flag: Option<f64>, key: &str) -> Result<Option<f64>, Usage> {
        cfg.or_flag(flag, key).map_err(usage)
    }

    fn list<T>(&self, cfg: &Config, flag: &[T], key: &str) -> Result<Vec<T>, Usage>
    where
        T: FromStr + Clone,
        T::Err: std::fmt::Display,
    {
        if !flag.is_empty() {
            return Ok(flag.to_vec());
        }
        let Some(raw) = cfg.raw(key) else {
            return Ok(Vec::new());
        };
        raw.split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|e: T::Err| usage(anyhow!("config key `{key}`: cannot parse `{v}`: {e}")))
            })
            .collect()
    }

    fn optimize(&self, cfg: &Config) -> Result<bool, Usage> {
        Ok(self.optimize_phi || cfg.get::<bool>("optimize-phi").map_err(usage)?.unwrap_or(false))
    }

    /// Baseline parameters; `except` names a field supplied by a sweep axis.
    fn baseline(&self, cfg: &Config, except: Option<Axis>) -> Result<ExperimentParams, Usage> {
        let required = |flag, key: &str, axis| -> Result<f64, Usage> {
            match self.scalar(cfg, flag, key)? {
                Some(v) => Ok(v),
                None if except == Some(axis) => Ok(0.0),
                None => Err(usage(anyhow!("missing required --{key}"))),
            }
        };
        Ok(ExperimentParams {
            alpha_mag: required(self.alpha, "alpha", Axis::Alpha)?,
            r: required(self.r, "r", Axis::R)?,
            theta_alpha: self.scalar(cfg, self.theta_alpha, "theta-alpha")?.unwrap_or(0.0),
            phi: self.scalar(cfg, self.phi, "phi")?.unwrap_or(FRAC_PI_2),
            transmittance: self.scalar(cfg, self.t, "T")?.unwrap_or(1.0),
            eta: self.scalar(cfg, self.eta, "eta")?.unwrap_or(1.0),
            m: 0,
            scheme: Scheme::Original,
        })
    }
}

fn single<T: Copy + std::fmt::Debug>(values: &[T], name: &str) -> Result<Option<T>, Usage> {
    match values {
        [] => Ok(None),
        [v] => Ok(Some(*v)),
        _ => Err(usage(anyhow!("`point` takes a single --{name}, got {values:?}"))),
    }
}

fn cmd_point(args: &PointArgs) -> Result<ExitCode, Usage> {
    let a = &args.params;
    let cfg = a.config()?;
    let mut params = a.baseline(&cfg, None)?;
    params.scheme = single(&a.list(&cfg, &a.scheme, "scheme")?, "scheme")?
        .ok_or_else(|| usage(anyhow!("missing required --scheme")))?;
    params.m = match (params.scheme, single(&a.list(&cfg, &a.m, "m")?, "m")?) {
        (_, Some(m)) => m,
        (Scheme::Original, None) => 0,
        (_, None) => return Err(usage(anyhow!("missing required --m for scheme {}", params.scheme))),
    };
    let detector = single(&a.list(&cfg, &a.detector, "detector")?, "detector")?.unwrap_or(Detector::IntensityDiff);
    params.validate().map_err(usage)?;

    let e = evaluate(&params, detector, a.optimize(&cfg)?).map_err(usage)?;
    let p = e.params;
    println!(
        "scheme={} m={} alpha={} theta_alpha={} r={} T={} eta={} detector={} phi={}",
        p.scheme,
        p.added_photons(),
        p.alpha_mag,
        p.theta_alpha,
        p.r,
        p.transmittance,
        p.eta,
        detector,
        p.phi
    );
    if let Some(s) = &e.sensitivity {
        println!(
            "delta_phi={} sigma={} slope={} N={} SQL={} HL={}",
            s.delta_phi, s.sigma, s.slope, s.n_total, s.sql, s.hl
        );
    }
    println!(
        "qfi={} qfi_lossy={} qcrb={} qcrb_lossy={}",
        e.qfi.f_ideal, e.qfi.f_lossy, e.qfi.qcrb_ideal, e.qfi.qcrb_lossy
    );
    let record = json!({
        "params": p,
        "detector": detector,
        "status": e.status,
        "sensitivity": e.sensitivity,
        "qfi": e.qfi,
    });
    println!("{record}");
    if e.status != RowStatus::Ok {
        eprintln!(
            "error: Δφ is undefined here ({}): the signal ⟨O⟩ does not depend on φ",
            e.status.as_str()
        );
        return Ok(ExitCode::from(EXIT_SINGULAR));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<Result<ExitCode, Usage>> {
    let spec = match sweep_spec(args) {
        Ok(s) => s,
        Err(u) => return Ok(Err(u)),
    };
    if let Err(e) = spec.validate() {
        return Ok(Err(usage(e)));
    }
    let rows = spec.run()?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            write_csv(&rows, BufWriter::new(file))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => write_csv(&rows, io::stdout().lock())?,
    }
    Ok(Ok(ExitCode::SUCCESS))
}

fn sweep_spec(args: &SweepArgs) -> Result<SweepSpec, Usage> {
    let a = &args.params;
    let cfg = a.config()?;
    let axis: Axis = match args.axis.clone().or_else(|| cfg.raw("axis").map(str::to_string)) {
        Some(s) => s.parse().map_err(usage)?,
        None => return Err(usage(anyhow!("missing required --axis"))),
    };
    let range: AxisRange = match args.range.clone().or_else(|| cfg.raw("range").map(str::to_string)) {
        Some(s) => s.parse().map_err(usage)?,
        None => return Err(usage(anyhow!("missing required --range"))),
    };
    let schemes = a.list(&cfg, &a.scheme, "scheme")?;
    if schemes.is_empty() {
        return Err(usage(anyhow!("missing required --scheme")));
    }
    let mut detectors = a.list(&cfg, &a.detector, "detector")?;
    if detectors.is_empty() {
        detectors = Detector::ALL.to_vec();
    }
    let ms = a.list(&cfg, &a.m, "m")?;
    if ms.is_empty() && axis != Axis::M && schemes.iter().any(|&s| s != Scheme::Original) {
        return Err(usage(anyhow!("missing required --m for schemes a and b")));
    }
    Ok(SweepSpec {
        axis,
        range,
        fixed: a.baseline(&cfg, Some(axis))?,
        schemes,
        ms,
        detectors,
        optimize_phi: a.optimize(&cfg)?,
    })
}

fn cmd_figure(args: &FigureArgs) -> anyhow::Result<Result<ExitCode, Usage>> {
    let mut ids = Vec::new();
    for s in &args.ids {
        if s.eq_ignore_ascii_case("all") {
            ids.extend(FigureId::ALL);
        } else {
            match s.parse::<FigureId>() {
                Ok(id) => ids.push(id),
                Err(e) => return Ok(Err(usage(e))),
            }
        }
    }
    for id in ids {
        let job = FigureJob {
            figure_id: id,
            output_dir: args.out.clone(),
        };
        for path in job.run()? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(Ok(ExitCode::SUCCESS))
}

fn cmd_validate(args: &ValidateArgs) -> ExitCode {
    let opts = ValidateOptions {
        level: args.grid,
        mutation: args.mutate,
        fail_fast: args.fail_fast,
    };
    if let Some(m) = &opts.mutation {
        println!("mutation: {m}");
    }
    let report = validate::run(&opts);
    println!("{report}");
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATION)
    }
}

fn run(cli: Cli) -> anyhow::Result<Result<ExitCode, Usage>> {
    match &cli.command {
        Command::Point(a) => Ok(cmd_point(a)),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Validate(a) => Ok(Ok(cmd_validate(a))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let code = match run(cli) {
        Ok(Ok(code)) => code,
        Ok(Err(Usage(e))) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    };
    let _ = io::stdout().flush();
    code
}
