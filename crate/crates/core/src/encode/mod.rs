//! Block and query encoders.

mod hashing;
mod table;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use hashing::{bucket_hash, sign_hash, HashingEncoder};
pub use table::{content_key, load_embedding_table, write_table, EmbeddingTable, TableEncoder};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tokenize::TokenizerRule;

/// Queries keep only their first this-many tokens.
pub const QUERY_MAX_TOKENS: usize = 128;
pub const DEFAULT_DIM: usize = 256;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding<T>(pub Vec<T>);

impl<T: Scalar> Embedding<T> {
    pub fn zeros(dim: usize) -> Self {
        Embedding(vec![T::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| v.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: T) -> Self {
        Embedding(self.0.iter().map(|&v| v * c).collect())
    }

    /// Cosine similarity; `None` when either side is the zero vector.
    pub fn cosine(&self, other: &Self) -> Option<T> {
        let denom = self.norm() * other.norm();
        if denom.is_zero() {
            None
        } else {
            Some(self.dot(other) / denom)
        }
    }

    pub fn euclidean(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    pub fn l2_normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            None
        } else {
            Some(Embedding(self.0.iter().map(|&v| v / n).collect()))
        }
    }

    pub fn cast<U: Scalar>(&self) -> Embedding<U> {
        Embedding(self.0.iter().map(|v| U::of(v.as_f64())).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    L2,
    None,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(Normalization::L2),
            "none" => Ok(Normalization::None),
            other => Err(Error::InvalidConfig(format!("unknown normalization `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EncoderKind {
    BuiltinHash,
    /// Precomputed embeddings; `digest` identifies the table contents.
    ExternalTable { digest: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub kind: EncoderKind,
    pub dim: usize,
    pub tokenizer: TokenizerRule,
    pub normalization: Normalization,
}

impl EncoderSpec {
    pub fn builtin(dim: usize) -> Self {
        EncoderSpec {
            kind: EncoderKind::BuiltinHash,
            dim,
            tokenizer: TokenizerRule::Subword,
            normalization: Normalization::L2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidConfig(format!("encoder dim must be >= 2, got {}", self.dim)));
        }
        Ok(())
    }
}

impl fmt::Display for EncoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            EncoderKind::BuiltinHash => write!(f, "builtin(dim={})", self.dim),
            EncoderKind::ExternalTable { digest } => {
                write!(f, "table(dim={}, {})", self.dim, &digest[..digest.len().min(12)])
            }
        }
    }
}

/// One block handed to an encoder. `key` is `<snippet_id>#<block_index>`.
#[derive(Debug, Clone, Copy)]
pub struct BlockInput<'a> {
    pub key: &'a str,
    pub text: &'a str,
}

/// Maps block and query text to fixed-dimension embeddings. Implementations
/// hold no mutable state, so blocks may be encoded concurrently.
pub trait Encoder<T: Scalar>: Send + Sync {
    fn spec(&self) -> EncoderSpec;

    fn dim(&self) -> usize;

    fn encode_block(&self, block: BlockInput<'_>) -> Result<Embedding<T>>;

    /// `key` names the query in external tables; the built-in encoder ignores it.
    fn encode_query(&self, key: Option<&str>, text: &str) -> Result<Embedding<T>>;

    /// Encode a whole block batch in one call. Output order matches input order.
    fn encode_blocks(&self, blocks: &[BlockInput<'_>]) -> Vec<Result<Embedding<T>>> {
        blocks.par_iter().map(|b| self.encode_block(*b)).collect()
    }
}

impl<T: Scalar, E: Encoder<T> + ?Sized> Encoder<T> for &E {
    fn spec(&self) -> EncoderSpec {
        (**self).spec()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn encode_block(&self, block: BlockInput<'_>) -> Result<Embedding<T>> {
        (**self).encode_block(block)
    }
    fn encode_query(&self, key: Option<&str>, text: &str) -> Result<Embedding<T>> {
        (**self).encode_query(key, text)
    }
    fn encode_blocks(&self, blocks: &[BlockInput<'_>]) -> Vec<Result<Embedding<T>>> {
        (**self).encode_blocks(blocks)
    }
}

impl<T: Scalar, E: Encoder<T> + ?Sized> Encoder<T> for Box<E> {
    fn spec(&self) -> EncoderSpec {
        (**self).spec()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn encode_block(&self, block: BlockInput<'_>) -> Result<Embedding<T>> {
        (**self).encode_block(block)
    }
    fn encode_query(&self, key: Option<&str>, text: &str) -> Result<Embedding<T>> {
        (**self).encode_query(key, text)
    }
    fn encode_blocks(&self, blocks: &[BlockInput<'_>]) -> Vec<Result<Embedding<T>>> {
        (**self).encode_blocks(blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_and_norms() {
        let a = Embedding(vec![3.0f64, 4.0]);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.cosine(&a.scaled(2.0)).unwrap(), 1.0);
        assert!(a.cosine(&Embedding::zeros(2)).is_none());
        assert_eq!(a.l2_normalized().unwrap(), Embedding(vec![0.6, 0.8]));
        assert_eq!(a.euclidean(&Embedding(vec![0.0, 0.0])), 5.0);
    }

    #[test]
    fn spec_validation() {
        assert!(EncoderSpec::builtin(1).validate().is_err());
        assert!(EncoderSpec::builtin(2).validate().is_ok());
    }
}
