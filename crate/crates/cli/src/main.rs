use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use panel_flutter::config::SweepSection;
use panel_flutter::{load_config, run_convergence, run_flutter, run_modes, run_sweep, Outputs, RunConfig, RunError};

/// Supersonic flutter of laminated composite panels.
#[derive(Parser)]
#[command(name = "panel-flutter", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Natural frequencies.
    Modes(Common),
    /// Flutter boundary and coarse-sweep trace.
    Flutter(Common),
    /// Flutter boundary over a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// aspect_ratio, flow_angle or thickness (a/h); overrides [sweep].
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated grid; overrides [sweep].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
    },
    /// Frequencies and flutter boundary over a mesh ladder.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated square mesh sizes; overrides mesh.ladder.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<usize>>,
        /// Skip the flutter search on each mesh.
        #[arg(long)]
        no_flutter: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    threads: Option<usize>,
    /// Override flow.damped.
    #[arg(long)]
    damped: Option<bool>,
    /// Override mesh.nx and mesh.ny.
    #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
    mesh: Option<Vec<usize>>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, RunError> {
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(invalid("--threads", "must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| invalid("--threads", &e.to_string()))?;
        }
        let mut config = load_config(&self.config)?;
        if let Some(d) = self.damped {
            config.flow.damped = d;
        }
        if let Some(m) = &self.mesh {
            config.mesh.nx = m[0];
            config.mesh.ny = m[1];
        }
        Ok(config)
    }
}

fn invalid(key: &str, message: &str) -> RunError {
    RunError::Config(panel_flutter::ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    })
}

fn execute(cli: Cli) -> Result<Outputs, RunError> {
    match cli.command {
        Command::Modes(c) => run_modes(&c.load()?, &c.out),
        Command::Flutter(c) => run_flutter(&c.load()?, &c.out),
        Command::Sweep { common, axis, values } => {
            let mut config = common.load()?;
            if axis.is_some() || values.is_some() {
                let current = config.sweep.take();
                config.sweep = Some(SweepSection {
                    axis: axis.or(current.as_ref().map(|s| s.axis.clone())).ok_or_else(|| invalid("--axis", "no sweep axis given"))?,
                    values: values.or(current.map(|s| s.values)).ok_or_else(|| invalid("--values", "no sweep values given"))?,
                });
            }
            run_sweep(&config, &common.out)
        }
        Command::Convergence { common, ladder, no_flutter } => {
            let mut config = common.load()?;
            if let Some(l) = ladder {
                config.mesh.ladder = l;
            }
            run_convergence(&config, &common.out, !no_flutter)
        }
    }
}

fn report(files: &[PathBuf]) {
    for f in files {
        eprintln!("wrote {}", f.display());
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(out) => {
            report(&out.files);
            println!("{}", out.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let RunError::Solver { files, .. } = &e {
                report(files);
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
