use crate::error::{Error, Result};

/// Default cap on elementary window steps for a single computation.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Environment variable that overrides the default work budget.
pub const BUDGET_ENV: &str = "REPET2D_BUDGET";

/// Work budget counted in elementary steps (one step per window visited,
/// per search node expanded, ...). Exceeding it is an error, never a
/// silent subsample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    limit: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { limit: DEFAULT_BUDGET }
    }
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit }
    }

    pub fn unlimited() -> Self {
        Budget { limit: u64::MAX }
    }

    /// Reads [`BUDGET_ENV`], falling back to [`DEFAULT_BUDGET`].
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Budget::new)
            .unwrap_or_default()
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn meter(&self) -> Meter {
        Meter { used: 0, limit: self.limit }
    }

    /// Fails up front when a known amount of work is over the limit.
    pub fn check(&self, work: u64) -> Result<()> {
        if work > self.limit {
            Err(Error::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Running counter against a [`Budget`].
#[derive(Debug, Clone)]
pub struct Meter {
    used: u64,
    limit: u64,
}

impl Meter {
    #[inline]
    pub fn charge(&mut self, steps: u64) -> Result<()> {
        self.used = self.used.saturating_add(steps);
        if self.used > self.limit {
            Err(Error::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}
