//! Resource caps shared by the builders and verifiers.
//!
//! Caps are checked before any construction starts. The hard limits baked
//! into the parity and block builders are absolute; the caps here may be
//! tightened or (for interval counts and inclusion–exclusion range width)
//! loosened through environment variables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable overriding [`Caps::max_intervals`].
pub const ENV_MAX_INTERVALS: &str = "LIMSUP_MAX_INTERVALS";
/// Environment variable overriding [`Caps::max_range_width`].
pub const ENV_MAX_RANGE_WIDTH: &str = "LIMSUP_MAX_RANGE_WIDTH";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Most intervals a single explicit nested level may hold.
    pub max_intervals: u64,
    /// Widest range `n - k + 1` accepted by inclusion–exclusion.
    pub max_range_width: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_intervals: 1_000_000,
            max_range_width: 20,
        }
    }
}

impl Caps {
    /// Defaults, overridden by any of the `LIMSUP_*` variables that are set.
    pub fn from_env() -> Result<Self> {
        let mut caps = Caps::default();
        if let Some(v) = read_var(ENV_MAX_INTERVALS)? {
            caps.max_intervals = v;
        }
        if let Some(v) = read_var(ENV_MAX_RANGE_WIDTH)? {
            caps.max_range_width =
                usize::try_from(v).map_err(|_| Error::InvalidParameter(format!("{ENV_MAX_RANGE_WIDTH} too large")))?;
        }
        Ok(caps)
    }
}

fn read_var(name: &str) -> Result<Option<u64>> {
    match std::env::var(name) {
        Ok(raw) => raw
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidParameter(format!("{name}={raw:?} is not a nonnegative integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::InvalidParameter(format!("{name}: {e}"))),
    }
}
