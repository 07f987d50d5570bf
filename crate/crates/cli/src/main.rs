// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! `emech`: parameter tables, cooling sweeps, Fock and GHZ preparation and
//! Wigner maps from the command line.
//!
//! Exit codes: 0 ok, 2 usage or configuration error, 3 finished with
//! warnings or unconverged points, 4 numerical failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "emech", version, about = "Transmon-cavity-mechanics hybrid simulator")]
struct Cli {
    /// Worker threads for sweep points (default: all cores).
    #[arg(long, global = true, env = "EMECH_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print raw, derived and polariton parameters.
    Params(commands::ParamsArgs),
    /// Stationary phonon number versus drive detuning.
    Cool(commands::CoolArgs),
    /// Prepare a mechanical Fock state.
    Fock(commands::FockArgs),
    /// Prepare GHZ/cat states for several pulse counts.
    Ghz(commands::GhzArgs),
    /// Wigner map of one mode of a saved state.
    Wigner(commands::WignerArgs),
}

/// Where the system parameters come from.
#[derive(Args, Clone, Debug)]
pub struct Source {
    /// Built-in parameter set (set1, set2).
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// JSON configuration file; may name a preset and override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Switch off every dissipation channel.
    #[arg(long)]
    pub lossless: bool,
}

#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Re-run and compare output checksums with the existing manifest.
    #[arg(long)]
    pub verify: bool,
}

/// `lo:hi:n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got '{s}'"));
        };
        let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound '{lo}'"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound '{hi}'"))?;
        let n: usize = n.trim().parse().map_err(|_| format!("bad point count '{n}'"))?;
        if !(lo.is_finite() && hi.is_finite()) || hi < lo || n == 0 {
            return Err(format!("need finite lo ≤ hi and n ≥ 1, got '{s}'"));
        }
        Ok(Range { lo, hi, n })
    }
}

/// `t,c,m` truncations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dims(pub usize, pub usize, pub usize);

impl FromStr for Dims {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<usize> = s
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad dimension '{x}'")))
            .collect::<Result<_, _>>()?;
        match v[..] {
            [t, c, m] if t >= 1 && c >= 1 && m >= 1 => Ok(Dims(t, c, m)),
            _ => Err(format!("expected three positive dims t,c,m, got '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<emech::Error> for CliError {
    fn from(e: emech::Error) -> Self {
        Self {
            code: if e.is_numerical() { 4 } else { 2 },
            message: e.to_string(),
        }
    }
}

/// Successful run; warnings turn the exit code into 3.
#[derive(Default)]
pub struct Outcome {
    pub warnings: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be ≥ 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Params(a) => commands::params(a),
        Command::Cool(a) => commands::cool(a),
        Command::Fock(a) => commands::fock(a),
        Command::Ghz(a) => commands::ghz(a),
        Command::Wigner(a) => commands::wigner(a),
    };
    match result {
        Ok(o) if o.warnings.is_empty() => ExitCode::SUCCESS,
        Ok(o) => {
            for w in &o.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
