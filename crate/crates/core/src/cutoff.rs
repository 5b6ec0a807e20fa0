//! Smooth radial cutoffs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equal to 1 on `|x| <= inner`, 0 on `|x| >= outer`, smooth in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub inner: f64,
    pub outer: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self { inner: 1.0, outer: 2.0 }
    }
}

fn flat(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

impl CutoffSpec {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        let spec = Self { inner, outer };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner > 0.0 && self.outer > self.inner && self.outer.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cutoff radii must satisfy 0 < inner < outer, got ({}, {})",
                self.inner, self.outer
            )));
        }
        Ok(())
    }

    /// Value at radius `r`.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= self.inner {
            return 1.0;
        }
        if r >= self.outer {
            return 0.0;
        }
        let s = (r - self.inner) / (self.outer - self.inner);
        let a = flat(1.0 - s);
        a / (a + flat(s))
    }
}
