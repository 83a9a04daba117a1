//! Scans, diagnostics and figure presets for the prime spectrum, written as CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use prime_spectrum::csv_out::{
    write_compare, write_envelope, write_phase, write_positivity, write_samples, write_stabilization, write_zeros, CompareRow, PhaseRow,
};
use prime_spectrum::equivalence::DEFAULT_STEP;
use prime_spectrum::oracle::windowed_phase_slope_oracle;
use prime_spectrum::spectrum::{default_scan_step, smooth_moving_window, uniform_grid, zero_locate, zero_locate_with_step};
use prime_spectrum::xi_eval::default_phase_step;
use prime_spectrum::{positivity_scan, z_approx, z_phase_slope, CriticalStripPoint, SpectrumEngine, SpectrumParams};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] prime_spectrum::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use prime_spectrum::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(E::Capacity(_)) => 4,
            CliError::Compute(E::Io(_) | E::Csv(_) | E::Format(_)) | CliError::Io(_) => 1,
            CliError::Compute(_) => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Spectrum over a t-grid for every eps
    Scan,
    /// Spectrum at one t against growing p_max checkpoints
    Stabilize,
    /// Per-oscillation envelope sums at one t
    Envelope,
    /// Critical-line zeros of the Z approximation
    Zeros,
    /// Discriminant positivity scan
    CheckPositivity,
    /// Spectrum against the windowed zeta oracle
    Compare,
    /// Run a named figure preset
    Reproduce { figure: Figure },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Figure {
    #[value(name = "fig1-2")]
    Fig1_2,
    #[value(name = "fig3-4")]
    Fig3_4,
    #[value(name = "fig5")]
    Fig5,
    #[value(name = "fig6-7")]
    Fig6_7,
    #[value(name = "appB1")]
    AppB1,
}

#[derive(clap::Args, Debug, Default, Clone)]
struct Opts {
    /// key=value file; flags given on the command line take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    t_min: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true)]
    t_step: Option<f64>,
    /// Single height for stabilize, envelope and compare
    #[arg(long, global = true)]
    t: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    eps: Option<Vec<f64>>,
    #[arg(long, global = true)]
    p_star: Option<u64>,
    #[arg(long, global = true)]
    p_max: Option<u64>,
    #[arg(long, global = true)]
    j_max: Option<usize>,
    /// Smooth scans with a moving window of width 2 pi / ln p_max
    #[arg(long, global = true)]
    window: bool,
    #[arg(long, global = true, value_delimiter = ',')]
    checkpoints: Option<Vec<u64>>,
    /// Grid step of the zero search
    #[arg(long, global = true)]
    zero_step: Option<f64>,
    /// Finite-difference step of the discriminant
    #[arg(long, global = true)]
    h: Option<f64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("config: bad value for {key}: {x}")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("config: bad value for {key}: {v}")))
}

impl Opts {
    fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return usage(format!("{}:{}: expected key=value", path.display(), i + 1));
            };
            map.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        let mut o = Opts::default();
        for (k, v) in &map {
            match k.as_str() {
                "t-min" => o.t_min = Some(parse_one(k, v)?),
                "t-max" => o.t_max = Some(parse_one(k, v)?),
                "t-step" => o.t_step = Some(parse_one(k, v)?),
                "t" => o.t = Some(parse_one(k, v)?),
                "eps" => o.eps = Some(parse_list(k, v)?),
                "p-star" => o.p_star = Some(parse_one(k, v)?),
                "p-max" => o.p_max = Some(parse_one(k, v)?),
                "j-max" => o.j_max = Some(parse_one(k, v)?),
                "window" => o.window = parse_one(k, v)?,
                "checkpoints" => o.checkpoints = Some(parse_list(k, v)?),
                "zero-step" => o.zero_step = Some(parse_one(k, v)?),
                "h" => o.h = Some(parse_one(k, v)?),
                "threads" => o.threads = Some(parse_one(k, v)?),
                "output" => o.output = Some(PathBuf::from(v)),
                _ => return usage(format!("config: unknown key {k}")),
            }
        }
        Ok(o)
    }

    /// `self` wins over `base` field by field.
    fn over(self, base: Opts) -> Opts {
        Opts {
            config: self.config,
            t_min: self.t_min.or(base.t_min),
            t_max: self.t_max.or(base.t_max),
            t_step: self.t_step.or(base.t_step),
            t: self.t.or(base.t),
            eps: self.eps.or(base.eps),
            p_star: self.p_star.or(base.p_star),
            p_max: self.p_max.or(base.p_max),
            j_max: self.j_max.or(base.j_max),
            window: self.window || base.window,
            checkpoints: self.checkpoints.or(base.checkpoints),
            zero_step: self.zero_step.or(base.zero_step),
            h: self.h.or(base.h),
            threads: self.threads.or(base.threads),
            output: self.output.or(base.output),
        }
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone)]
struct RunConfig {
    command: Command,
    t_min: f64,
    t_max: f64,
    t_step: Option<f64>,
    t: Option<f64>,
    eps_list: Vec<f64>,
    p_star: u64,
    p_max: u64,
    j_max: usize,
    window: bool,
    checkpoints: Option<Vec<u64>>,
    zero_step: Option<f64>,
    h: f64,
    threads: Option<usize>,
    output: Option<PathBuf>,
}

const DEFAULT_P_STAR: u64 = 1_000_000;

impl RunConfig {
    fn resolve(command: Command, o: Opts) -> Result<Self> {
        let p_star = o.p_star.unwrap_or(DEFAULT_P_STAR);
        let cfg = RunConfig {
            command,
            t_min: o.t_min.unwrap_or(f64::NAN),
            t_max: o.t_max.unwrap_or(f64::NAN),
            t_step: o.t_step,
            t: o.t,
            eps_list: o.eps.unwrap_or_else(|| vec![0.0]),
            p_star,
            p_max: o.p_max.unwrap_or(p_star),
            j_max: o.j_max.unwrap_or(3),
            window: o.window,
            checkpoints: o.checkpoints,
            zero_step: o.zero_step,
            h: o.h.unwrap_or(DEFAULT_STEP),
            threads: o.threads,
            output: o.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn preset(figure: Figure, o: Opts) -> Result<Self> {
        let mut base = Opts::default();
        let command = match figure {
            Figure::Fig1_2 => {
                base.eps = Some(vec![-0.05, 0.0, 0.05, 0.1]);
                base.t_min = Some(1644.0);
                base.t_max = Some(1650.0);
                base.t_step = Some(0.005);
                Command::Reproduce { figure }
            }
            Figure::Fig3_4 => {
                base.eps = Some(vec![0.1]);
                base.p_star = Some(30_000_000);
                base.p_max = Some(30_000_000);
                base.t_min = Some(690.0);
                base.t_max = Some(730.0);
                Command::Scan
            }
            Figure::Fig5 => {
                base.eps = Some(vec![-0.05, 0.0, 0.05]);
                base.p_star = Some(6_000_000);
                base.p_max = Some(60_000_000);
                base.t_min = Some(350.0);
                base.t_max = Some(360.0);
                base.window = true;
                Command::Scan
            }
            Figure::Fig6_7 => {
                base.eps = Some(vec![0.0, 0.05, 0.1]);
                base.p_star = Some(280);
                base.p_max = Some(280 * 280 * 280);
                base.t_min = Some(30.0);
                base.t_max = Some(90.0);
                Command::Scan
            }
            Figure::AppB1 => {
                base.eps = Some(vec![0.0, 0.05]);
                base.p_star = Some(10_000_000);
                base.p_max = Some(10_000_000);
                base.t = Some(644.2);
                Command::Envelope
            }
        };
        Self::resolve(command, o.over(base))
    }

    fn needs_range(&self) -> bool {
        matches!(
            self.command,
            Command::Scan | Command::Zeros | Command::CheckPositivity | Command::Reproduce { .. }
        ) || (matches!(self.command, Command::Compare) && self.t.is_none())
    }

    fn validate(&self) -> Result<()> {
        if self.needs_range() {
            if !(self.t_min.is_finite() && self.t_max.is_finite()) {
                return usage("--t-min and --t-max are required");
            }
            if !(self.t_min < self.t_max) {
                return usage(format!("t_min = {} must be below t_max = {}", self.t_min, self.t_max));
            }
        } else if self.t.is_none() {
            return usage("--t is required");
        }
        if let Some(s) = self.t_step {
            if !(s > 0.0) {
                return usage("t_step must be positive");
            }
        }
        if self.eps_list.is_empty() {
            return usage("eps list is empty");
        }
        if self.p_star < 11 {
            return usage("p_star must be at least 11");
        }
        if self.threads == Some(0) {
            return usage("threads must be positive");
        }
        Ok(())
    }

    fn grid(&self, default_step: f64) -> Vec<f64> {
        uniform_grid(self.t_min, self.t_max, self.t_step.unwrap_or(default_step))
    }

    fn params(&self, t: f64, eps: f64) -> Result<SpectrumParams> {
        Ok(SpectrumParams::new(t, eps, self.p_star, self.p_max, self.j_max)?)
    }

    fn zeros(&self) -> Result<Vec<f64>> {
        let found = match self.zero_step {
            Some(step) => zero_locate_with_step(self.t_min, self.t_max, step)?,
            None => zero_locate(self.t_min, self.t_max)?,
        };
        Ok(found.iter().map(|z| z.t_star).collect())
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Output for the `i`-th of `n` tables; several tables go to suffixed files.
fn table_output(cfg: &RunConfig, eps: f64, n: usize) -> Result<Box<dyn Write>> {
    match (&cfg.output, n) {
        (Some(p), n) if n > 1 => {
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
            let ext = p.extension().and_then(|s| s.to_str()).unwrap_or("csv");
            open_output(Some(&p.with_file_name(format!("{stem}-eps{eps}.{ext}"))))
        }
        (p, _) => open_output(p.as_deref()),
    }
}

fn run_scan(cfg: &RunConfig) -> Result<()> {
    let engine = SpectrumEngine::<f64>::new(cfg.p_max)?;
    let ts = cfg.grid(default_scan_step(cfg.p_max));
    let zeros = cfg.zeros()?;
    let mut all = Vec::new();
    for &eps in &cfg.eps_list {
        let mut samples = engine.scan(&cfg.params(cfg.t_min, eps)?, &ts, &zeros)?;
        if cfg.window {
            smooth_moving_window(&mut samples, cfg.p_max)?;
        }
        all.extend(samples);
    }
    write_samples(open_output(cfg.output.as_deref())?, &all)?;
    Ok(())
}

fn run_stabilize(cfg: &RunConfig) -> Result<()> {
    let t = cfg.t.unwrap();
    let checkpoints = cfg.checkpoints.clone().unwrap_or_else(|| {
        let mut c: Vec<u64> = std::iter::successors(Some(10u64), |x| Some(x * 10))
            .take_while(|&x| x < cfg.p_max)
            .collect();
        c.push(cfg.p_max);
        c
    });
    let top = checkpoints.iter().copied().max().unwrap_or(0);
    let engine = SpectrumEngine::<f64>::new(top)?;
    let matrix = engine.stabilization_scan(t, &cfg.eps_list, cfg.p_star, &checkpoints)?;
    write_stabilization(open_output(cfg.output.as_deref())?, &cfg.eps_list, &checkpoints, &matrix)?;
    Ok(())
}

fn run_envelope(cfg: &RunConfig) -> Result<()> {
    let engine = SpectrumEngine::<f64>::new(cfg.p_max)?;
    let t = cfg.t.unwrap();
    for &eps in &cfg.eps_list {
        let records = engine.envelope_scan(&cfg.params(t, eps)?)?;
        write_envelope(table_output(cfg, eps, cfg.eps_list.len())?, &records)?;
    }
    Ok(())
}

fn run_zeros(cfg: &RunConfig) -> Result<()> {
    let found = match cfg.zero_step {
        Some(step) => zero_locate_with_step(cfg.t_min, cfg.t_max, step)?,
        None => zero_locate(cfg.t_min, cfg.t_max)?,
    };
    write_zeros(open_output(cfg.output.as_deref())?, &found)?;
    Ok(())
}

fn run_positivity(cfg: &RunConfig) -> Result<()> {
    let report = positivity_scan(cfg.t_min, cfg.t_max, cfg.t_step.unwrap_or(0.05), cfg.h)?;
    write_positivity(open_output(cfg.output.as_deref())?, &report.samples)?;
    if let (Some(min), Some(at)) = (report.min_value, report.argmin) {
        eprintln!(
            "min normalized value {min:.6e} at t = {at:.6}; {} violations",
            report.violations.len()
        );
    }
    Ok(())
}

fn run_compare(cfg: &RunConfig) -> Result<()> {
    let engine = SpectrumEngine::<f64>::new(cfg.p_max)?;
    let ts = match cfg.t {
        Some(t) => vec![t],
        None => cfg.grid(default_scan_step(cfg.p_max)),
    };
    let mut rows = Vec::new();
    for &eps in &cfg.eps_list {
        for &t in &ts {
            let spectrum = engine.spectrum_value(&cfg.params(t, eps)?)?.value;
            let oracle = windowed_phase_slope_oracle(0.5 + eps, t, cfg.p_star)?;
            rows.push(CompareRow {
                t,
                eps,
                p_star: cfg.p_star,
                p_max: cfg.p_max,
                spectrum,
                oracle,
            });
        }
    }
    write_compare(open_output(cfg.output.as_deref())?, &rows)?;
    Ok(())
}

fn run_phase(cfg: &RunConfig) -> Result<()> {
    let ts = cfg.grid(0.005);
    let mut rows = Vec::new();
    for &eps in &cfg.eps_list {
        for &t in &ts {
            let pt = CriticalStripPoint::new(t, eps);
            let z = z_approx(pt)?;
            let phase_slope = if eps == 0.0 {
                None
            } else {
                match z_phase_slope(pt, default_phase_step(t)) {
                    Ok(v) => Some(v),
                    Err(prime_spectrum::Error::NearZero { .. }) => None,
                    Err(e) => return Err(e.into()),
                }
            };
            rows.push(PhaseRow { t, eps, z, phase_slope });
        }
    }
    write_phase(open_output(cfg.output.as_deref())?, &rows)?;
    Ok(())
}

fn dispatch(cfg: &RunConfig) -> Result<()> {
    match cfg.command {
        Command::Scan => run_scan(cfg),
        Command::Stabilize => run_stabilize(cfg),
        Command::Envelope => run_envelope(cfg),
        Command::Zeros => run_zeros(cfg),
        Command::CheckPositivity => run_positivity(cfg),
        Command::Compare => run_compare(cfg),
        Command::Reproduce { .. } => run_phase(cfg),
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.opts.config {
        Some(path) => Opts::from_file(path)?,
        None => Opts::default(),
    };
    let opts = cli.opts.over(file);
    let cfg = match cli.command {
        Command::Reproduce { figure } => RunConfig::preset(figure, opts)?,
        command => RunConfig::resolve(command, opts)?,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(&cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
