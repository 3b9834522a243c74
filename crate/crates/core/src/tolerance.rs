//! Scale-relative zero tests.
//!
//! A quantity `x` produced from inputs whose norms multiply to `scale` is
//! treated as zero when `|x| <= abs + rel * scale`. Singular values below
//! `rank * sigma_max` are discarded in rank decisions, pseudo-inverses and
//! range partial isometries; `span` is the relative cutoff used when growing
//! subspaces by Gram-Schmidt.

use std::sync::RwLock;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
    pub rank: f64,
    pub span: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-9,
            rank: 1e-10,
            span: 1e-9,
        }
    }
}

static GLOBAL: RwLock<Tolerances> = RwLock::new(Tolerances {
    abs: 1e-12,
    rel: 1e-9,
    rank: 1e-10,
    span: 1e-9,
});

impl Tolerances {
    /// Tolerances currently in effect for the process.
    pub fn current() -> Self {
        *GLOBAL.read().unwrap_or_else(|e| e.into_inner())
    }

    /// Replace the process-wide tolerances. Intended for binaries; library
    /// code reads them through [`Tolerances::current`].
    pub fn set_global(tol: Tolerances) {
        *GLOBAL.write().unwrap_or_else(|e| e.into_inner()) = tol;
    }

    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [
            ("abs", self.abs),
            ("rel", self.rel),
            ("rank", self.rank),
            ("span", self.span),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::InvalidInput(format!(
                    "tolerance `{name}` must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }

    #[inline]
    pub fn is_zero(&self, value: f64, scale: f64) -> bool {
        value <= self.threshold(scale)
    }
}
