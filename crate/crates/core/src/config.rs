use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default memory budget per matrix or table: 1 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

/// Primes used for the modular rank lower bound.
pub const DEFAULT_PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

pub const DEFAULT_N_MAX: usize = 12;

/// Odd-prime eliminations costing more than this many multiply-adds are
/// skipped when a rank bound is computed as part of a profile.
pub const DEFAULT_RANK_WORK_CAP: u64 = 1 << 34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::invalid(format!("unknown output format `{other}`"))),
        }
    }
}

/// Run configuration shared by the library and the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub memory_budget_bytes: u64,
    pub primes: Vec<u32>,
    pub n_max: usize,
    /// Worker threads; 0 means the available parallelism.
    pub workers: usize,
    pub format: OutputFormat,
    pub rank_work_cap: u64,
    pub growth: GrowthThresholds,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            memory_budget_bytes: DEFAULT_MEMORY_BUDGET,
            primes: DEFAULT_PRIMES.to_vec(),
            n_max: DEFAULT_N_MAX,
            workers: 0,
            format: OutputFormat::Json,
            rank_work_cap: DEFAULT_RANK_WORK_CAP,
            growth: GrowthThresholds::default(),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.memory_budget_bytes == 0 {
            return Err(Error::invalid("memory budget must be positive"));
        }
        if self.primes.is_empty() {
            return Err(Error::invalid("prime list is empty"));
        }
        for &p in &self.primes {
            crate::rank::check_prime(p)?;
        }
        self.growth.validate()
    }

    pub fn budget(&self) -> Budget {
        Budget::new(self.memory_budget_bytes)
    }

    /// Resolved worker count.
    pub fn worker_count(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        }
    }
}

/// Parameters of the growth classification of worst-split `d` sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthThresholds {
    /// Minimum number of sampled `n`.
    pub min_points: usize,
    /// Trailing equal values needed for the bounded label.
    pub plateau: usize,
    /// Allowed distance of the log-log exponent from 1 or 2.
    pub exponent_tolerance: f64,
    /// Exponent above which a sequence may be called superquadratic.
    pub superquadratic_exponent: f64,
    /// Minimum coefficient of determination of the log-log fit for the
    /// superquadratic label.
    pub min_r_squared: f64,
}

impl Default for GrowthThresholds {
    fn default() -> Self {
        GrowthThresholds {
            min_points: 5,
            plateau: 4,
            exponent_tolerance: 0.25,
            superquadratic_exponent: 2.5,
            min_r_squared: 0.95,
        }
    }
}

impl GrowthThresholds {
    pub fn validate(&self) -> Result<()> {
        if self.plateau < 2 || self.min_points < self.plateau.max(3) {
            return Err(Error::invalid(
                "growth thresholds need plateau >= 2 and min_points >= max(plateau, 3)",
            ));
        }
        let finite = [
            self.exponent_tolerance,
            self.superquadratic_exponent,
            self.min_r_squared,
        ];
        if finite.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(
                "growth thresholds must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

/// A memory ceiling checked before every large allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    bytes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_MEMORY_BUDGET)
    }
}

impl Budget {
    pub const fn new(bytes: u64) -> Self {
        Budget { bytes }
    }

    pub const fn bytes(&self) -> u64 {
        self.bytes
    }

    /// Fails with [`Error::Budget`] when `required` exceeds the budget.
    pub fn check(&self, what: impl FnOnce() -> String, required: u128) -> Result<()> {
        if required > u128::from(self.bytes) {
            Err(Error::Budget {
                what: what(),
                required,
                budget: self.bytes,
            })
        } else {
            Ok(())
        }
    }
}

/// `base^exp` without overflow, saturating at `u128::MAX`.
pub(crate) fn checked_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base as u128) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}
