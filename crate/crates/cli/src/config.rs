//! Command-line and config-file parsing.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use pqec::codes::CodeParams;
use pqec::metrology::DEFAULT_FIT_WINDOW;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SAMPLES: u64 = 10_000;
pub const DEFAULT_SHARDS: usize = 4;
pub const DEFAULT_N_START: usize = 3;

/// Directory used for output files when `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "PQEC_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Fqx,
    Fqz,
    FitDelta,
    Adaptive,
    OptimalShape,
    Theorem1,
    DecodeTrace,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fqx => "fqx",
            Command::Fqz => "fqz",
            Command::FitDelta => "fit-delta",
            Command::Adaptive => "adaptive",
            Command::OptimalShape => "optimal-shape",
            Command::Theorem1 => "theorem1",
            Command::DecodeTrace => "decode-trace",
        }
    }

    fn needs_code(self) -> bool {
        !matches!(self, Command::Adaptive | Command::OptimalShape)
    }

    fn default_method(self) -> Method {
        match self {
            Command::Fqx => Method::Analytic,
            _ => Method::MonteCarlo,
        }
    }

    fn allows(self, method: Method) -> bool {
        match self {
            Command::Fqx => matches!(method, Method::Analytic | Method::Pair | Method::Enumeration),
            Command::Fqz => matches!(method, Method::Analytic | Method::MonteCarlo | Method::Exhaustive),
            Command::FitDelta | Command::Theorem1 => {
                matches!(method, Method::MonteCarlo | Method::Exhaustive)
            }
            Command::Adaptive | Command::OptimalShape | Command::DecodeTrace => method == Method::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Ghz,
    ToricSquare,
    ToricHoneycomb,
    BaconShor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// How a QFI value is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Closed form.
    Analytic,
    /// Pairwise counting over imprinter stabilizers.
    Pair,
    /// Sum over every perpendicular error pattern.
    Enumeration,
    MonteCarlo,
    /// Sum over every parallel error pattern through the decoder.
    Exhaustive,
}

/// Flags that may also come from a TOML config file (same names, kebab-case).
#[derive(Debug, Clone, Default, PartialEq, clap::Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub lx: Option<usize>,
    #[arg(long)]
    pub ly: Option<usize>,
    /// Honeycomb only: x shift applied when wrapping in y.
    #[arg(long)]
    pub twist: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Bacon-Shor columns, or GHZ qubit count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Qubit budgets for the Bacon-Shor shape commands.
    #[arg(long, value_delimiter = ',')]
    pub qubits: Option<Vec<usize>>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub p_start: Option<f64>,
    #[arg(long)]
    pub p_stop: Option<f64>,
    #[arg(long)]
    pub p_step: Option<f64>,
    #[arg(long)]
    pub px: Option<f64>,
    #[arg(long)]
    pub py: Option<f64>,
    #[arg(long)]
    pub pz: Option<f64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Part of the reproducibility key together with the seed.
    #[arg(long)]
    pub shards: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Exhaustive and enumeration sums in rational arithmetic.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exact: Option<bool>,
    #[arg(long)]
    pub window_min: Option<f64>,
    #[arg(long)]
    pub window_max: Option<f64>,
    #[arg(long)]
    pub n_start: Option<usize>,
}

impl Settings {
    /// Fields set here win; the rest come from `fallback`.
    pub fn or(self, fallback: Settings) -> Settings {
        Settings {
            family: self.family.or(fallback.family),
            lx: self.lx.or(fallback.lx),
            ly: self.ly.or(fallback.ly),
            twist: self.twist.or(fallback.twist),
            m: self.m.or(fallback.m),
            n: self.n.or(fallback.n),
            qubits: self.qubits.or(fallback.qubits),
            p: self.p.or(fallback.p),
            p_start: self.p_start.or(fallback.p_start),
            p_stop: self.p_stop.or(fallback.p_stop),
            p_step: self.p_step.or(fallback.p_step),
            px: self.px.or(fallback.px),
            py: self.py.or(fallback.py),
            pz: self.pz.or(fallback.pz),
            samples: self.samples.or(fallback.samples),
            seed: self.seed.or(fallback.seed),
            shards: self.shards.or(fallback.shards),
            output: self.output.or(fallback.output),
            format: self.format.or(fallback.format),
            method: self.method.or(fallback.method),
            exact: self.exact.or(fallback.exact),
            window_min: self.window_min.or(fallback.window_min),
            window_max: self.window_max.or(fallback.window_max),
            n_start: self.n_start.or(fallback.n_start),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pqec", version, about = "Partial error correction metrology experiments")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML file with default flag values; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    Single { p: f64 },
    Range { start: f64, stop: f64, step: f64 },
}

impl Grid {
    /// Grid points, rounded to 12 decimals so that repeated steps do not
    /// accumulate binary noise.
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Grid::Single { p } => vec![p],
            Grid::Range { start, stop, step } => {
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub code: Option<CodeParams>,
    pub qubits: Vec<usize>,
    pub grid: Option<Grid>,
    pub channel: Option<ChannelSpec>,
    pub n_samples: u64,
    pub seed: u64,
    pub shard_count: usize,
    pub method: Method,
    pub exact: bool,
    pub window: (f64, f64),
    pub n_start: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn code_params(s: &Settings) -> Result<CodeParams, CliError> {
    let family = s.family.ok_or_else(|| usage("missing --family"))?;
    let need =
        |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("--family {family:?} needs --{flag}")));
    let params = match family {
        FamilyArg::Ghz => CodeParams::Ghz { n: need(s.n, "n")? },
        FamilyArg::ToricSquare => CodeParams::ToricSquare { lx: need(s.lx, "lx")?, ly: need(s.ly, "ly")? },
        FamilyArg::ToricHoneycomb => CodeParams::ToricHoneycomb {
            lx: need(s.lx, "lx")?,
            ly: need(s.ly, "ly")?,
            twist: s.twist.unwrap_or(0),
        },
        FamilyArg::BaconShor => CodeParams::BaconShor { m: need(s.m, "m")?, n: need(s.n, "n")? },
    };
    if s.twist.is_some_and(|t| t > 0) && family != FamilyArg::ToricHoneycomb {
        return Err(usage("--twist applies to toric-honeycomb only"));
    }
    Ok(params)
}

fn grid(s: &Settings) -> Result<Option<Grid>, CliError> {
    let range = (s.p_start, s.p_stop, s.p_step);
    let g = match (s.p, range) {
        (Some(_), (Some(_), _, _) | (_, Some(_), _) | (_, _, Some(_))) => {
            return Err(usage("use either --p or --p-start/--p-stop/--p-step"))
        }
        (Some(p), _) => Grid::Single { p },
        (None, (Some(start), Some(stop), Some(step))) => {
            if !(step > 0.0) || !(stop >= start) {
                return Err(usage("grid needs --p-step > 0 and --p-stop >= --p-start"));
            }
            Grid::Range { start, stop, step }
        }
        (None, (None, None, None)) => return Ok(None),
        _ => return Err(usage("--p-start, --p-stop and --p-step go together")),
    };
    if g.points().iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(usage("probabilities must lie in [0, 1]"));
    }
    Ok(Some(g))
}

/// Applies defaults and checks that the command has what it needs.
pub fn resolve(command: Command, s: Settings) -> Result<ExperimentConfig, CliError> {
    let code = if command.needs_code() { Some(code_params(&s)?) } else { None };
    let grid = grid(&s)?;
    let channel = match (s.px, s.py, s.pz) {
        (None, None, None) => None,
        (px, py, pz) => {
            Some(ChannelSpec { px: px.unwrap_or(0.0), py: py.unwrap_or(0.0), pz: pz.unwrap_or(0.0) })
        }
    };
    let method = s.method.unwrap_or(command.default_method());
    if !command.allows(method) {
        return Err(usage(format!("--method {method:?} does not apply to {}", command.name())));
    }
    let qubits = s.qubits.clone().unwrap_or_default();
    if channel.is_some() && !matches!(command, Command::Theorem1 | Command::DecodeTrace) {
        return Err(usage("--px/--py/--pz apply to theorem1 and decode-trace only"));
    }
    if command == Command::DecodeTrace && channel.is_some() && grid.is_some() {
        return Err(usage("decode-trace takes either --p or a channel"));
    }
    match command {
        Command::Theorem1 if channel.is_none() => return Err(usage("theorem1 needs --px/--py/--pz")),
        Command::Theorem1 => {}
        Command::DecodeTrace if grid.is_none() && channel.is_none() => {
            return Err(usage("decode-trace needs --p or a channel"))
        }
        Command::DecodeTrace => {}
        _ if grid.is_none() => return Err(usage(format!("{} needs --p or a p grid", command.name()))),
        _ => {}
    }
    if matches!(command, Command::Adaptive | Command::OptimalShape) && qubits.is_empty() {
        return Err(usage(format!("{} needs --qubits", command.name())));
    }
    let n_samples = s.samples.unwrap_or(DEFAULT_SAMPLES);
    if n_samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let shard_count = s.shards.unwrap_or(DEFAULT_SHARDS);
    if shard_count == 0 {
        return Err(usage("--shards must be at least 1"));
    }
    Ok(ExperimentConfig {
        command,
        code,
        qubits,
        grid,
        channel,
        n_samples,
        seed: s.seed.unwrap_or(0),
        shard_count,
        method,
        exact: s.exact.unwrap_or(false),
        window: (s.window_min.unwrap_or(DEFAULT_FIT_WINDOW.0), s.window_max.unwrap_or(DEFAULT_FIT_WINDOW.1)),
        n_start: s.n_start.unwrap_or(DEFAULT_N_START),
        output: s.output,
        format: s.format.unwrap_or_default(),
    })
}

/// Parses `argv` (including the program name), merging a `--config` file
/// underneath the explicit flags.
pub fn parse_config<I, T>(argv: I) -> Result<ExperimentConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str::<Settings>(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => Settings::default(),
    };
    resolve(args.command, args.settings.or(file))
}

pub(crate) fn value_name<V: ValueEnum>(v: V) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

/// Argument vector (without program name) that parses back to `config`.
pub fn to_args(config: &ExperimentConfig) -> Vec<String> {
    let mut out = vec![config.command.name().to_string()];
    let mut push = |flag: &str, value: String| {
        out.push(format!("--{flag}"));
        out.push(value);
    };
    match config.code {
        Some(CodeParams::Ghz { n }) => {
            push("family", value_name(FamilyArg::Ghz));
            push("n", n.to_string());
        }
        Some(CodeParams::ToricSquare { lx, ly }) => {
            push("family", value_name(FamilyArg::ToricSquare));
            push("lx", lx.to_string());
            push("ly", ly.to_string());
        }
        Some(CodeParams::ToricHoneycomb { lx, ly, twist }) => {
            push("family", value_name(FamilyArg::ToricHoneycomb));
            push("lx", lx.to_string());
            push("ly", ly.to_string());
            push("twist", twist.to_string());
        }
        Some(CodeParams::BaconShor { m, n }) => {
            push("family", value_name(FamilyArg::BaconShor));
            push("m", m.to_string());
            push("n", n.to_string());
        }
        None => {}
    }
    if !config.qubits.is_empty() {
        push("qubits", config.qubits.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    }
    match config.grid {
        Some(Grid::Single { p }) => push("p", p.to_string()),
        Some(Grid::Range { start, stop, step }) => {
            push("p-start", start.to_string());
            push("p-stop", stop.to_string());
            push("p-step", step.to_string());
        }
        None => {}
    }
    if let Some(c) = config.channel {
        push("px", c.px.to_string());
        push("py", c.py.to_string());
        push("pz", c.pz.to_string());
    }
    push("samples", config.n_samples.to_string());
    push("seed", config.seed.to_string());
    push("shards", config.shard_count.to_string());
    push("method", value_name(config.method));
    push("exact", config.exact.to_string());
    push("window-min", config.window.0.to_string());
    push("window-max", config.window.1.to_string());
    push("n-start", config.n_start.to_string());
    if let Some(path) = &config.output {
        push("output", path.display().to_string());
    }
    push("format", value_name(config.format));
    out
}
