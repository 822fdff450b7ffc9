//! Command implementations behind the `hypotest` binary.
//!
//! Every command returns its full output as a string so it can be tested
//! without spawning a process; `main` only prints and maps errors to exit
//! codes.

pub mod commands;
pub mod format;
pub mod row;

use std::str::FromStr;

use hypotest::dist::FiniteDistribution;

/// Exit status for each failure class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const DOMAIN: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] hypotest::error::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Library(e) if e.is_domain() => exit::DOMAIN,
            CliError::Library(_) => exit::USAGE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// `bernoulli:<p>` or `probs:<c0,c1,...>`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec(pub FiniteDistribution);

impl FromStr for DistributionSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, body) = s.split_once(':').ok_or_else(|| format!("expected bernoulli:<p> or probs:<list>, got {s:?}"))?;
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
        let dist = match kind.trim() {
            "bernoulli" => FiniteDistribution::bernoulli(num(body)?),
            "probs" => FiniteDistribution::new(body.split(',').map(num).collect::<Result<_, _>>()?),
            other => return Err(format!("unknown distribution kind {other:?}")),
        };
        dist.map(DistributionSpec).map_err(|e| e.to_string())
    }
}

/// Second-error levels of the comparison table for `Bern(0.6)` vs
/// `Bern(0.25)` at `n = 50`, as printed (five decimals).
pub const TABLE_EPSILONS: [f64; 7] = [0.00006, 0.00018, 0.00052, 0.00137, 0.00336, 0.00762, 0.01604];
