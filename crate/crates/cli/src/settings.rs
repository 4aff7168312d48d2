use std::fs;

use cacomm_core::{Config, Error};

use crate::GlobalArgs;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 2 for bad input, 3 when a result could not be computed or written.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_resource() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Defaults, then the configuration file, then flags.
pub fn load(args: &GlobalArgs) -> Result<Config, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| {
                CliError::Usage(format!("bad configuration {}: {e}", path.display()))
            })?
        }
        None => Config::default(),
    };
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(b) = args.budget {
        cfg.memory_budget_bytes = b;
    }
    if let Some(p) = &args.primes {
        cfg.primes = p.clone();
    }
    if let Some(c) = args.rank_work_cap {
        cfg.rank_work_cap = c;
    }
    cfg.validate()?;
    Ok(cfg)
}
