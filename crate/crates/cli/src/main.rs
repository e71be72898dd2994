use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;
mod svg;

#[derive(Parser, Debug)]
#[command(name = "eoscorr", version, about = "Electro-optic vacuum and source field correlations")]
pub struct Cli {
    /// Run configuration (TOML); the bundled defaults when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Also write SVG line plots.
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Delay traces and spectra of the vacuum and/or source signal.
    Simulate {
        #[arg(long, value_enum, default_value_t = Kind::Both)]
        kind: Kind,
    },
    /// Fluctuation-dissipation checks; exits 1 if any fails.
    FdtCheck {
        /// Directory holding traces and spectra from `simulate --kind both`;
        /// computed on the fly when absent.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Vacuum spectra and zero crossings over beam distances.
    Sweep {
        /// Beam distances [µm]; the configured list when absent.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        distances: Option<Vec<f64>>,
    },
    /// Processes a trace set described by a JSON manifest.
    Analyze { manifest: PathBuf },
    /// Writes a synthetic trace set with ground truth.
    Synth {
        #[arg(long, value_enum, default_value_t = SynthKind::Vacuum)]
        kind: SynthKind,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Vacuum,
    Source,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    Vacuum,
    Source,
}

pub enum Outcome {
    Pass,
    CheckFailed,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
