mod analyze;
mod concentration;
mod running_example;
mod volume;

use std::path::Path;

pub use analyze::{analyze, ModelSpec};
pub use concentration::concentration;
pub use running_example::running_example;
pub use volume::volume;

use advrobust_core::robustness::NoiseConfig;

use crate::cli::{Cli, Command, NoiseArgs};
use crate::error::{CliError, Result};
use crate::parallel::Workers;

/// Runs one parsed command and returns the paths it wrote.
pub fn run(cli: &Cli) -> Result<Vec<std::path::PathBuf>> {
    match &cli.command {
        Command::RunningExample(a) => running_example(a, &Workers::new(a.common.threads)?),
        Command::Analyze(a) => analyze(a, &Workers::new(a.common.threads)?),
        Command::Concentration(a) => concentration(a, &Workers::new(a.common.threads)?),
        Command::Volume(a) => volume(a),
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn noise_config(n: &NoiseArgs) -> Result<NoiseConfig> {
    let cfg = NoiseConfig {
        epsilon: n.epsilon,
        samples: n.samples_j,
        ..NoiseConfig::default()
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// Shortest representation that parses back to the same `f64`.
fn fmt(v: f64) -> String {
    format!("{v:?}")
}
