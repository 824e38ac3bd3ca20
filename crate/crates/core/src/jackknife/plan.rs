use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the `m` sub-samples are drawn from the full series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Consecutive disjoint blocks `[(i-1)l, il)`.
    #[serde(rename = "no", alias = "non-overlapping")]
    NonOverlapping,
    /// Windows `[i-1, i-1+l)` shifted by one observation.
    #[serde(rename = "mb", alias = "moving-block")]
    MovingBlock,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::NonOverlapping => "no",
            Scheme::MovingBlock => "mb",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "no" | "non-overlapping" | "nonoverlapping" => Ok(Scheme::NonOverlapping),
            "mb" | "moving-block" | "movingblock" => Ok(Scheme::MovingBlock),
            other => Err(Error::Config(format!("unknown sub-sampling scheme '{other}'"))),
        }
    }
}

/// `m` sub-samples of common length `l = n / m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsamplePlan {
    pub scheme: Scheme,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    /// Zero-based start index of each sub-sample.
    pub offsets: Vec<usize>,
}

impl SubsamplePlan {
    pub fn new(scheme: Scheme, n: usize, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config(format!("need at least 2 sub-samples, got m = {m}")));
        }
        if !n.is_multiple_of(m) {
            return Err(Error::Config(format!("n = {n} is not divisible by m = {m}")));
        }
        let l = n / m;
        let offsets = match scheme {
            Scheme::NonOverlapping => (0..m).map(|i| i * l).collect(),
            Scheme::MovingBlock => (0..m).collect(),
        };
        Ok(Self { scheme, n, m, l, offsets })
    }

    pub fn block<'a>(&self, series: &'a [f64], i: usize) -> &'a [f64] {
        &series[self.offsets[i]..self.offsets[i] + self.l]
    }
}

/// The `m` sub-series defined by `plan`.
pub fn subsample<'a>(series: &'a [f64], plan: &SubsamplePlan) -> Result<Vec<&'a [f64]>> {
    if series.len() != plan.n {
        return Err(Error::LengthMismatch { expected: plan.n, got: series.len() });
    }
    Ok((0..plan.m).map(|i| plan.block(series, i)).collect())
}
