//! Sliding windows of `window` pieces advanced by `step` pieces.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::split::CodePiece;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailPolicy {
    /// `floor((n - w) / s) + 1` blocks; pieces past the last full window are dropped.
    #[default]
    Floor,
    /// One extra block covering the trailing pieces when the floor count misses them.
    Include,
}

impl fmt::Display for TailPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TailPolicy::Floor => "floor",
            TailPolicy::Include => "include",
        })
    }
}

impl FromStr for TailPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" => Ok(TailPolicy::Floor),
            "include" => Ok(TailPolicy::Include),
            other => Err(Error::InvalidConfig(format!("unknown tail policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowConfig {
    pub window: usize,
    pub step: usize,
    pub tail: TailPolicy,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            window: 32,
            step: 16,
            tail: TailPolicy::Floor,
        }
    }
}

impl WindowConfig {
    pub fn new(window: usize, step: usize, tail: TailPolicy) -> Result<Self> {
        let cfg = WindowConfig { window, step, tail };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.step == 0 {
            return Err(Error::InvalidConfig("window and step must be positive".into()));
        }
        if self.step > self.window {
            return Err(Error::InvalidConfig(format!(
                "step {} exceeds window {}; blocks would skip pieces",
                self.step, self.window
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeBlock {
    pub index: usize,
    pub piece_range: Range<usize>,
    pub text: String,
}

/// Number of blocks for `n` pieces. Fewer pieces than one window still give
/// a single block.
pub fn block_count(n: usize, cfg: &WindowConfig) -> usize {
    block_ranges(n, cfg).len()
}

/// Piece ranges of each block.
pub fn block_ranges(n: usize, cfg: &WindowConfig) -> Vec<Range<usize>> {
    if n == 0 {
        return Vec::new();
    }
    if n < cfg.window {
        return std::iter::once(0..n).collect();
    }
    let full = (n - cfg.window) / cfg.step + 1;
    let mut ranges: Vec<Range<usize>> = (0..full)
        .map(|j| j * cfg.step..j * cfg.step + cfg.window)
        .collect();
    let covered = ranges.last().map_or(0, |r| r.end);
    if cfg.tail == TailPolicy::Include && covered < n {
        ranges.push(full * cfg.step..n);
    }
    ranges
}

pub fn window(pieces: &[CodePiece], cfg: &WindowConfig) -> Vec<CodeBlock> {
    block_ranges(pieces.len(), cfg)
        .into_iter()
        .enumerate()
        .map(|(index, range)| CodeBlock {
            index,
            text: pieces[range.clone()]
                .iter()
                .map(|p| p.text.as_str())
                .collect::<Vec<_>>()
                .join("\n"),
            piece_range: range,
        })
        .collect()
}
