//! Long-code retrieval: split source into pieces, window pieces into blocks,
//! encode blocks, fuse block embeddings into one code vector, and search.

pub mod batch;
pub mod config;
pub mod corpus;
pub mod encode;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod index;
pub mod pipeline;
pub mod scalar;
pub mod split;
pub mod synthetic;
pub mod tokenize;
pub mod train;
pub mod window;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Embedding32 = encode::Embedding<f32>;
pub type Embedding64 = encode::Embedding<f64>;
pub type FusionParams32 = fusion::FusionParams<f32>;
pub type FusionParams64 = fusion::FusionParams<f64>;
pub type CodeIndex32 = index::CodeIndex<f32>;
pub type CodeIndex64 = index::CodeIndex<f64>;
