//! Signed feature hashing over code-aware tokens.
//!
//! Every token adds `sign(token)` to bucket `bucket(token) mod D`. Both hashes
//! are 64-bit FNV-1a with different offset bases, so results are stable across
//! processes and platforms.

use std::hash::Hasher;

use fnv::FnvHasher;

use super::{BlockInput, Embedding, EncoderKind, EncoderSpec, Normalization, QUERY_MAX_TOKENS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tokenize::{tokenize, TokenizerRule};

const SIGN_BASIS: u64 = 0x6c62_272e_07bb_0142;

pub fn bucket_hash(token: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(token.as_bytes());
    h.finish()
}

pub fn sign_hash(token: &str) -> u64 {
    let mut h = FnvHasher::with_key(SIGN_BASIS);
    h.write(token.as_bytes());
    h.finish()
}

#[derive(Debug, Clone)]
pub struct HashingEncoder {
    dim: usize,
    tokenizer: TokenizerRule,
    normalization: Normalization,
}

impl HashingEncoder {
    pub fn new(dim: usize) -> Result<Self> {
        HashingEncoder::with_options(dim, TokenizerRule::Subword, Normalization::L2)
    }

    pub fn with_options(dim: usize, tokenizer: TokenizerRule, normalization: Normalization) -> Result<Self> {
        let enc = HashingEncoder {
            dim,
            tokenizer,
            normalization,
        };
        enc.spec().validate()?;
        Ok(enc)
    }

    pub fn spec(&self) -> EncoderSpec {
        EncoderSpec {
            kind: EncoderKind::BuiltinHash,
            dim: self.dim,
            tokenizer: self.tokenizer,
            normalization: self.normalization,
        }
    }

    /// Signed bucket counts before normalization.
    pub fn raw_counts<T: Scalar>(&self, text: &str, max_tokens: Option<usize>) -> Embedding<T> {
        let mut v = Embedding::zeros(self.dim);
        let tokens = tokenize(text, self.tokenizer);
        let limit = max_tokens.unwrap_or(usize::MAX);
        for tok in tokens.iter().take(limit) {
            let bucket = (bucket_hash(&tok.text) % self.dim as u64) as usize;
            if sign_hash(&tok.text) >> 63 == 0 {
                v.0[bucket] += T::one();
            } else {
                v.0[bucket] -= T::one();
            }
        }
        v
    }

    pub fn embed<T: Scalar>(&self, text: &str, max_tokens: Option<usize>) -> Result<Embedding<T>> {
        let raw = self.raw_counts::<T>(text, max_tokens);
        if raw.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(match self.normalization {
            Normalization::L2 => raw.l2_normalized().ok_or(Error::ZeroVector)?,
            Normalization::None => raw,
        })
    }
}

impl<T: Scalar> super::Encoder<T> for HashingEncoder {
    fn spec(&self) -> EncoderSpec {
        HashingEncoder::spec(self)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn encode_block(&self, block: BlockInput<'_>) -> Result<Embedding<T>> {
        self.embed(block.text, None)
    }

    fn encode_query(&self, _key: Option<&str>, text: &str) -> Result<Embedding<T>> {
        self.embed(text, Some(QUERY_MAX_TOKENS))
    }
}

#[cfg(test)]
mod tests {
    use super::super::Encoder;
    use super::*;

    /// Straight FNV-1a, written out independently of the `fnv` crate.
    fn fnv1a(basis: u64, bytes: &[u8]) -> u64 {
        let mut h = basis;
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
        h
    }

    fn block(text: &str) -> BlockInput<'_> {
        BlockInput { key: "s#0", text }
    }

    #[test]
    fn hashes_match_reference_fnv() {
        for t in ["read", "image", "file", "", "größe"] {
            assert_eq!(bucket_hash(t), fnv1a(0xcbf2_9ce4_8422_2325, t.as_bytes()));
            assert_eq!(sign_hash(t), fnv1a(SIGN_BASIS, t.as_bytes()));
        }
    }

    #[test]
    fn counts_match_reference_for_three_tokens() {
        let enc = HashingEncoder::with_options(8, TokenizerRule::Subword, Normalization::None).unwrap();
        let mut expected = [0.0f64; 8];
        for t in ["read", "image", "file"] {
            let b = (fnv1a(0xcbf2_9ce4_8422_2325, t.as_bytes()) % 8) as usize;
            let s = if fnv1a(SIGN_BASIS, t.as_bytes()) >> 63 == 0 { 1.0 } else { -1.0 };
            expected[b] += s;
        }
        let got: Embedding<f64> = enc.raw_counts("read_image_file", None);
        assert_eq!(got.0, expected);
    }

    #[test]
    fn additive_counts() {
        let enc = HashingEncoder::with_options(16, TokenizerRule::Subword, Normalization::None).unwrap();
        let once: Embedding<f64> = enc.raw_counts("x = tensor", None);
        let twice: Embedding<f64> = enc.raw_counts("x = tensor\nx = tensor", None);
        assert_eq!(twice, once.scaled(2.0));
    }

    #[test]
    fn query_matches_identical_block() {
        let enc = HashingEncoder::new(256).unwrap();
        let q: Embedding<f64> = enc.encode_query(None, "read image file").unwrap();
        let c: Embedding<f64> = enc.encode_block(block("readImageFile")).unwrap();
        assert!((q.cosine(&c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn query_truncated_to_128_tokens() {
        let enc = HashingEncoder::new(64).unwrap();
        let words: Vec<String> = (0..200).map(|i| format!("w{i}")).collect();
        let long = words.join(" ");
        let first = words[..128].join(" ");
        let q: Embedding<f64> = enc.encode_query(None, &long).unwrap();
        let p: Embedding<f64> = enc.encode_query(None, &first).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn zero_vector_for_tokenless_text() {
        let enc = HashingEncoder::new(32).unwrap();
        let r: Result<Embedding<f64>> = enc.encode_query(None, "___");
        assert!(matches!(r, Err(Error::ZeroVector)));
    }

    #[test]
    fn unit_norm_and_f32_agrees() {
        let enc = HashingEncoder::new(128).unwrap();
        let e64: Embedding<f64> = enc.encode_block(block("for x in range(10): print(x)")).unwrap();
        assert!((e64.norm() - 1.0).abs() < 1e-9);
        let e32: Embedding<f32> = enc.encode_block(block("for x in range(10): print(x)")).unwrap();
        for (a, b) in e64.0.iter().zip(&e32.0) {
            assert!((a - *b as f64).abs() < 1e-6);
        }
    }
}
