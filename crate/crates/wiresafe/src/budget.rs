//! Budgets for exhaustive enumeration.
//!
//! Every "enumerate everything" operation in this crate is gated by an
//! explicit budget so a typo in parameters fails fast with a clear
//! message instead of spinning for hours. The CLI exposes the limit via
//! `--budget` / the `WIRESAFE_BUDGET` environment variable.

use crate::error::{Error, Result};

/// Caps on the three flavours of exhaustive work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Max size of a plain enumeration (matrices, codewords, minors).
    pub enumeration: u64,
    /// Max number of (message, randomness) pairs in a secrecy audit.
    pub joint_pairs: u64,
    /// Max number of wiretap subsets audited in one network sweep.
    pub wiretap_sets: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            enumeration: 1 << 24,
            joint_pairs: 1 << 20,
            wiretap_sets: 100_000,
        }
    }
}

impl Budget {
    /// One limit for every category, e.g. from `--budget`.
    pub fn with_limit(limit: u64) -> Self {
        Budget {
            enumeration: limit,
            joint_pairs: limit,
            wiretap_sets: limit,
        }
    }

    pub fn check_enumeration(&self, required: u64) -> Result<()> {
        Self::check(required, self.enumeration)
    }

    pub fn check_joint_pairs(&self, required: u64) -> Result<()> {
        Self::check(required, self.joint_pairs)
    }

    pub fn check_wiretap_sets(&self, required: u64) -> Result<()> {
        Self::check(required, self.wiretap_sets)
    }

    fn check(required: u64, budget: u64) -> Result<()> {
        if required > budget {
            Err(Error::BudgetExceeded { required, budget })
        } else {
            Ok(())
        }
    }
}

/// `base^exp` saturating at `u64::MAX`, for budget arithmetic.
pub fn pow_saturating(base: u64, exp: u32) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Binomial coefficient saturating at `u64::MAX`, for budget arithmetic.
pub fn binomial_saturating(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // Multiply before dividing to stay exact: (acc * (n-i)) is always
        // divisible by (i+1) at this point of the product.
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    acc
}
