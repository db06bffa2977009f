//! Tolerance Principle arithmetic.
//!
//! A rule whose scope holds `n` items, `e` of which do not follow it, is
//! productive iff `e <= n / ln n`. The threshold is undefined below two
//! items; a scope of zero or one item is productive exactly when it has no
//! exceptions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a productivity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpVerdict {
    pub n: usize,
    pub e: usize,
    /// `n / ln n`, or `None` when `n < 2`.
    pub threshold: Option<f64>,
    pub productive: bool,
}

/// `n / ln n`. Callers must pass `n >= 2`; use [`is_productive`] for
/// arbitrary scopes.
pub fn threshold(n: usize) -> f64 {
    assert!(n >= 2, "tolerance threshold is undefined for n = {n}");
    let n = n as f64;
    n / n.ln()
}

pub fn is_productive(n: usize, e: usize) -> Result<TpVerdict> {
    if e > n {
        return Err(Error::InvalidArgument(format!(
            "exception count {e} exceeds scope size {n}"
        )));
    }
    Ok(verdict(n, e))
}

/// Same as [`is_productive`] for callers that already guarantee `e <= n`.
pub(crate) fn verdict(n: usize, e: usize) -> TpVerdict {
    debug_assert!(e <= n);
    if n < 2 {
        return TpVerdict {
            n,
            e,
            threshold: None,
            productive: e == 0,
        };
    }
    let threshold = threshold(n);
    TpVerdict {
        n,
        e,
        threshold: Some(threshold),
        productive: e as f64 <= threshold,
    }
}

#[inline]
pub(crate) fn tolerates(n: usize, e: usize) -> bool {
    verdict(n, e).productive
}
