//! Run configuration: command-line flags merged over an optional
//! `key = value` file.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use crate::{Error, Result};

pub const OUT_DIR_ENV: &str = "WRIGHT_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Wright,
    FoodLimitation,
    Allee,
    Custom,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Wright => "wright",
            ModelKind::FoodLimitation => "food-limitation",
            ModelKind::Allee => "allee",
            ModelKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Check,
    Certify,
    Simulate,
    Returnmap,
    Scan,
    VerifyLemmas,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Check => "check",
            CommandKind::Certify => "certify",
            CommandKind::Simulate => "simulate",
            CommandKind::Returnmap => "returnmap",
            CommandKind::Scan => "scan",
            CommandKind::VerifyLemmas => "verify-lemmas",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "check" => CommandKind::Check,
            "certify" => CommandKind::Certify,
            "simulate" => CommandKind::Simulate,
            "returnmap" => CommandKind::Returnmap,
            "scan" => CommandKind::Scan,
            "verify-lemmas" => CommandKind::VerifyLemmas,
            _ => return None,
        })
    }
}

/// Every knob, unset unless given. Defaults are applied by the accessors
/// on [`RunConfig`].
#[derive(Args, Debug, Clone, Default, PartialEq)]
pub struct Settings {
    /// key = value file; flags given on the command line take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Nonlinearity [default: wright; verify-lemmas without a model uses --a/--b as f'(0), f''(0)/2]
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Wright parameter [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Food-limitation rate [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Food-limitation or Allee parameter c [default: 0 / 1]
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Allee parameter a, or f'(0) for verify-lemmas without a model [default: 1 / -1.5]
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Allee parameter b, or f''(0)/2 for verify-lemmas without a model [default: 0 / 0.75]
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Delay of the original equation [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Expression in x for --model custom, e.g. "p*(exp(-x)-1)"
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,

    /// Integrator steps per unit of time [default: 256]
    #[arg(long)]
    pub steps_per_unit: Option<usize>,
    /// Simulation horizon [default: 50]
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    /// Time discarded before measuring amplitudes [default: 400]
    #[arg(long, allow_negative_numbers = true)]
    pub transient: Option<f64>,
    /// Length of the amplitude window [default: 50]
    #[arg(long, allow_negative_numbers = true)]
    pub window: Option<f64>,
    /// Constant initial history [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub z: Option<f64>,
    /// Extremum index for the return map [default: 1]
    #[arg(long)]
    pub k: Option<usize>,
    /// Return-map grid start [default: 0.1]
    #[arg(long, allow_negative_numbers = true)]
    pub z_from: Option<f64>,
    /// Return-map grid end [default: 2]
    #[arg(long, allow_negative_numbers = true)]
    pub z_to: Option<f64>,
    /// Return-map grid size [default: 20]
    #[arg(long)]
    pub z_count: Option<usize>,
    /// Parameter swept by scan [default: p]
    #[arg(long)]
    pub param: Option<String>,
    /// Scan start [default: 1.3]
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    /// Scan end [default: 1.8]
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Scan step [default: 0.05]
    #[arg(long, allow_negative_numbers = true)]
    pub step: Option<f64>,
    /// Extra seeded constant histories for simulate [default: 0]
    #[arg(long)]
    pub histories: Option<usize>,
    /// Seed for random histories [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Hypothesis window left end [default: -10]
    #[arg(long, allow_negative_numbers = true)]
    pub grid_lo: Option<f64>,
    /// Hypothesis window right end [default: 10]
    #[arg(long, allow_negative_numbers = true)]
    pub grid_hi: Option<f64>,
    /// Hypothesis grid size [default: 2000]
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Points per lemma grid [default: 10000]
    #[arg(long)]
    pub points: Option<usize>,
    /// Right end for lemma grids on (0, X] [default: 50]
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    /// Starting amplitude for the contraction certificate [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub m0: Option<f64>,
    /// Iteration cap for the contraction certificate [default: 10000]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Output directory [default: $WRIGHT_OUT_DIR, else .]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Data file format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

macro_rules! fields {
    ($m:ident) => {
        $m! {
            num: p, r, c, a, b, h, t_end, transient, window, z, z_from, z_to, from, to, step,
                grid_lo, grid_hi, x_max, m0;
            int: steps_per_unit, k, z_count, histories, seed, grid_n, points, max_iter;
        }
    };
}

fn key_of(field: &str) -> String {
    field.replace('_', "-")
}

impl Settings {
    /// Fields of `self` that are set override those of `base`.
    pub fn over(self, base: Settings) -> Settings {
        macro_rules! merge {
            (num: $($n:ident),*; int: $($i:ident),*;) => {
                Settings {
                    config: self.config.or(base.config),
                    model: self.model.or(base.model),
                    expr: self.expr.or(base.expr),
                    param: self.param.or(base.param),
                    out: self.out.or(base.out),
                    format: self.format.or(base.format),
                    $($n: self.$n.or(base.$n),)*
                    $($i: self.$i.or(base.$i),)*
                }
            };
        }
        fields!(merge)
    }

    /// Parses `key = value` lines; `#` starts a comment. Keys are the flag
    /// names without the leading dashes. Returns the command if present.
    pub fn parse_kv(text: &str) -> Result<(Settings, Option<CommandKind>)> {
        let mut s = Settings::default();
        let mut command = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config(format!("line {}: invalid {what} '{value}' for {key}", lineno + 1));
            macro_rules! assign {
                (num: $($n:ident),*; int: $($i:ident),*;) => {
                    match key {
                        "command" => command = Some(CommandKind::from_name(value).ok_or_else(|| bad("command"))?),
                        "model" => s.model = Some(ModelKind::from_str(value, false).map_err(|_| bad("model"))?),
                        "format" => s.format = Some(Format::from_str(value, false).map_err(|_| bad("format"))?),
                        "expr" => s.expr = Some(value.to_string()),
                        "param" => s.param = Some(value.to_string()),
                        "out" => s.out = Some(PathBuf::from(value)),
                        $(k if k == key_of(stringify!($n)) => s.$n = Some(value.parse().map_err(|_| bad("number"))?),)*
                        $(k if k == key_of(stringify!($i)) => s.$i = Some(value.parse().map_err(|_| bad("integer"))?),)*
                        _ => return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1))),
                    }
                };
            }
            fields!(assign);
        }
        Ok((s, command))
    }

    /// Serializes the set fields, one `key = value` per line. Floats use
    /// the shortest representation that parses back exactly.
    pub fn to_kv(&self, command: Option<CommandKind>) -> String {
        let mut out = String::new();
        if let Some(c) = command {
            let _ = writeln!(out, "command = {}", c.as_str());
        }
        if let Some(m) = self.model {
            let _ = writeln!(out, "model = {}", m.as_str());
        }
        if let Some(e) = &self.expr {
            let _ = writeln!(out, "expr = {e}");
        }
        if let Some(p) = &self.param {
            let _ = writeln!(out, "param = {p}");
        }
        macro_rules! emit {
            (num: $($n:ident),*; int: $($i:ident),*;) => {
                $(if let Some(v) = self.$n { let _ = writeln!(out, "{} = {:?}", key_of(stringify!($n)), v); })*
                $(if let Some(v) = self.$i { let _ = writeln!(out, "{} = {}", key_of(stringify!($i)), v); })*
            };
        }
        fields!(emit);
        if let Some(o) = &self.out {
            let _ = writeln!(out, "out = {}", o.display());
        }
        if let Some(f) = self.format {
            let _ = writeln!(out, "format = {}", f.as_str());
        }
        out
    }
}

/// Settings after merging the config file, with defaults on access.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub settings: Settings,
}

macro_rules! getter {
    ($name:ident: $ty:ty = $default:expr) => {
        pub fn $name(&self) -> $ty {
            self.settings.$name.unwrap_or($default)
        }
    };
}

impl RunConfig {
    /// Reads the config file named in `flags`, if any, and lays the flags
    /// over it.
    pub fn resolve(command: CommandKind, flags: Settings) -> Result<Self> {
        let settings = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                let (file, _) = Settings::parse_kv(&text)?;
                flags.over(file)
            }
            None => flags,
        };
        Ok(Self { command, settings })
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let (settings, command) = Settings::parse_kv(text)?;
        let command = command.ok_or_else(|| Error::Config("missing key 'command'".into()))?;
        Ok(Self { command, settings })
    }

    pub fn to_kv(&self) -> String {
        self.settings.to_kv(Some(self.command))
    }

    getter!(steps_per_unit: usize = crate::dde::DEFAULT_STEPS_PER_UNIT);
    getter!(t_end: f64 = 50.0);
    getter!(transient: f64 = 400.0);
    getter!(window: f64 = 50.0);
    getter!(z: f64 = 1.0);
    getter!(k: usize = 1);
    getter!(z_from: f64 = 0.1);
    getter!(z_to: f64 = 2.0);
    getter!(z_count: usize = 20);
    getter!(from: f64 = 1.3);
    getter!(to: f64 = 1.8);
    getter!(step: f64 = 0.05);
    getter!(histories: usize = 0);
    getter!(seed: u64 = 42);
    getter!(grid_lo: f64 = -10.0);
    getter!(grid_hi: f64 = 10.0);
    getter!(grid_n: usize = 2000);
    getter!(points: usize = crate::bounds::DEFAULT_POINTS);
    getter!(x_max: f64 = crate::bounds::DEFAULT_X_MAX);
    getter!(m0: f64 = 1.0);
    getter!(max_iter: usize = crate::bounds::DEFAULT_MAX_ITER);

    pub fn format(&self) -> Format {
        self.settings.format.unwrap_or_default()
    }

    pub fn param(&self) -> String {
        self.settings.param.clone().unwrap_or_else(|| "p".to_string())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.settings
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}
