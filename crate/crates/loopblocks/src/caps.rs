//! Enumeration caps.

use std::env;

/// Environment variable overriding every enumeration cap at once.
pub const CAP_ENV: &str = "LOOPBLOCKS_CAP";

/// Upper bounds on brute-force work. Exceeding one is an error, never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Assignments tried by the homomorphism search.
    pub homs: u128,
    /// Explicit tuples materialized in a list.
    pub list: u128,
    /// Flat configurations generated on a lattice.
    pub lattice: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            homs: 100_000_000,
            list: 1_000_000,
            lattice: 10_000_000,
        }
    }
}

impl Caps {
    /// Defaults, overridden by `LOOPBLOCKS_CAP` when it parses as an integer.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Some(v) = env::var(CAP_ENV).ok().and_then(|s| s.trim().parse::<u128>().ok()) {
            caps = Caps::uniform(v);
        }
        caps
    }

    pub fn uniform(v: u128) -> Self {
        Caps {
            homs: v,
            list: v,
            lattice: v,
        }
    }
}
