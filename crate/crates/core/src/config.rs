//! Run configuration shared by the command-line tools.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encode::{Encoder, HashingEncoder, TableEncoder, DEFAULT_DIM};
use crate::error::{Error, Result};
use crate::fusion::{FusionMethod, FusionParams};
use crate::pipeline::Pipeline;
use crate::scalar::Scalar;
use crate::split::{Grammars, SplitStrategy, Splitter};
use crate::window::{TailPolicy, WindowConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum EncoderChoice {
    Builtin,
    Table(PathBuf),
}

impl fmt::Display for EncoderChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncoderChoice::Builtin => f.write_str("builtin"),
            EncoderChoice::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

impl FromStr for EncoderChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "builtin" => Ok(EncoderChoice::Builtin),
            Some(("table", path)) if !path.is_empty() => Ok(EncoderChoice::Table(PathBuf::from(path))),
            _ => Err(Error::InvalidConfig(format!("unknown encoder `{s}`, expected builtin or table:PATH"))),
        }
    }
}

impl From<EncoderChoice> for String {
    fn from(e: EncoderChoice) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for EncoderChoice {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub split: SplitStrategy,
    pub window: usize,
    pub step: usize,
    pub tail: TailPolicy,
    pub encoder: EncoderChoice,
    /// Builtin encoder dimension; tables carry their own.
    pub dim: usize,
    pub fusion: FusionMethod,
    pub params: Option<PathBuf>,
    /// Encode only the first N tokens instead of splitting.
    pub truncate: Option<usize>,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let w = WindowConfig::default();
        PipelineConfig {
            split: SplitStrategy::default(),
            window: w.window,
            step: w.step,
            tail: w.tail,
            encoder: EncoderChoice::Builtin,
            dim: DEFAULT_DIM,
            fusion: FusionMethod::default(),
            params: None,
            truncate: None,
            batch_size: 64,
            seed: 42,
        }
    }
}

impl PipelineConfig {
    pub fn window_config(&self) -> WindowConfig {
        WindowConfig {
            window: self.window,
            step: self.step,
            tail: self.tail,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.window_config().validate()?;
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be positive".into()));
        }
        if self.dim < 2 {
            return Err(Error::InvalidConfig("dimension must be at least 2".into()));
        }
        if self.truncate == Some(0) {
            return Err(Error::InvalidConfig("truncation length must be positive".into()));
        }
        Ok(())
    }

    pub fn encoder<T: Scalar>(&self) -> Result<Box<dyn Encoder<T>>> {
        Ok(match &self.encoder {
            EncoderChoice::Builtin => Box::new(HashingEncoder::new(self.dim)?),
            EncoderChoice::Table(path) => Box::new(TableEncoder::<T>::open(path)?),
        })
    }

    /// Saved parameters if a path is set, otherwise the all-zero head.
    pub fn fusion_params<T: Scalar>(&self, dim: usize) -> Result<FusionParams<T>> {
        let Some(path) = &self.params else {
            return Ok(FusionParams::zeros(self.fusion, dim));
        };
        let params = FusionParams::load(path)?;
        if params.method != self.fusion {
            return Err(Error::InvalidConfig(format!(
                "params file holds a {} head, configured fusion is {}",
                params.method, self.fusion
            )));
        }
        Ok(params)
    }

    pub fn build<T: Scalar>(&self) -> Result<Pipeline<T, Box<dyn Encoder<T>>>> {
        self.validate()?;
        let encoder = self.encoder::<T>()?;
        if let Some(n) = self.truncate {
            return Ok(Pipeline::truncated(encoder, n));
        }
        let params = self.fusion_params(encoder.dim())?;
        let splitter = Splitter::new(self.split, Grammars::from_env()?);
        Pipeline::new(splitter, self.window_config(), encoder, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoder_choice_parses() {
        assert_eq!("builtin".parse::<EncoderChoice>().unwrap(), EncoderChoice::Builtin);
        assert_eq!(
            "table:/tmp/e.tsv".parse::<EncoderChoice>().unwrap(),
            EncoderChoice::Table("/tmp/e.tsv".into())
        );
        assert!("table:".parse::<EncoderChoice>().is_err());
        assert!("bert".parse::<EncoderChoice>().is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = PipelineConfig { step: 40, ..PipelineConfig::default() };
        assert!(bad.validate().is_err());
        let bad = PipelineConfig { batch_size: 0, ..PipelineConfig::default() };
        assert!(bad.build::<f64>().is_err());
    }

    #[test]
    fn default_build_fingerprint() {
        let p = PipelineConfig::default().build::<f64>().unwrap();
        let fp = p.fingerprint();
        assert_eq!(fp.window, Some(32));
        assert_eq!(fp.step, Some(16));
        assert_eq!(fp.encoder.dim, 256);
        let json: serde_json::Value = serde_json::to_value(PipelineConfig::default()).unwrap();
        assert_eq!(json["encoder"], "builtin");
    }
}
