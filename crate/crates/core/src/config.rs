//! Resource guards shared by every exhaustive routine.

/// Environment variable that overrides [`Guards::enumeration`].
pub const GUARD_ENV: &str = "CODE_DENSITY_GUARD";

/// Limits that keep exhaustive oracles at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    /// Maximum number of codes (subsets or subspaces) enumerated.
    pub enumeration: u64,
    /// Maximum ambient size `q^{mn}` walked by brute-force volume oracles
    /// and weight tables.
    pub space: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            enumeration: 1_000_000,
            space: 1 << 16,
        }
    }
}

impl Guards {
    /// Defaults, with the enumeration guard taken from `CODE_DENSITY_GUARD`
    /// when it is set to a positive integer.
    pub fn from_env() -> Self {
        let mut guards = Guards::default();
        if let Some(v) = std::env::var(GUARD_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
        {
            guards.enumeration = v;
        }
        guards
    }

    pub fn with_enumeration(mut self, limit: u64) -> Self {
        self.enumeration = limit;
        self
    }

    pub fn with_space(mut self, limit: u64) -> Self {
        self.space = limit;
        self
    }
}
