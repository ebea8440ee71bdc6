//! Split -> window -> encode -> fuse for single snippets, plus the
//! truncation baseline that encodes only a snippet's leading tokens.

use serde::{Deserialize, Serialize};

use crate::encode::{BlockInput, Embedding, Encoder, EncoderSpec};
use crate::error::{Error, Result};
use crate::fusion::{fuse, FusionMethod, FusionParams};
use crate::scalar::Scalar;
use crate::split::{SourceSnippet, SplitStrategy, Splitter};
use crate::tokenize::{tokenize, TokenizerRule};
use crate::window::{window, CodeBlock, TailPolicy, WindowConfig};

/// Code tokens a standard pretrained encoder sees before truncating.
pub const CODE_MAX_TOKENS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PipelineMode {
    /// Split into pieces, window into blocks, encode every block, fuse.
    Blocks,
    /// Encode only the first `max_tokens` tokens of the snippet as one block.
    Truncate { max_tokens: usize },
}

/// Everything that determines the vectors an index holds. Searching requires
/// the query side to produce an identical fingerprint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    #[serde(flatten)]
    pub mode: PipelineMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitStrategy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailPolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fusion: Option<FusionMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params_digest: Option<String>,
    pub encoder: EncoderSpec,
}

impl Fingerprint {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fingerprint serializes")
    }
}

pub struct Pipeline<T: Scalar, E> {
    mode: PipelineMode,
    splitter: Splitter,
    window: WindowConfig,
    encoder: E,
    params: FusionParams<T>,
}

impl<T: Scalar, E: Encoder<T>> Pipeline<T, E> {
    pub fn new(splitter: Splitter, window: WindowConfig, encoder: E, params: FusionParams<T>) -> Result<Self> {
        window.validate()?;
        if params.method.attention().is_some() && params.dim != encoder.dim() {
            return Err(Error::ShapeMismatch(format!(
                "fusion params have dim {}, encoder produces {}",
                params.dim,
                encoder.dim()
            )));
        }
        params.validate()?;
        Ok(Pipeline {
            mode: PipelineMode::Blocks,
            splitter,
            window,
            encoder,
            params,
        })
    }

    /// Baseline that keeps only the first `max_tokens` code tokens.
    pub fn truncated(encoder: E, max_tokens: usize) -> Self {
        let dim = encoder.dim();
        Pipeline {
            mode: PipelineMode::Truncate { max_tokens },
            splitter: Splitter::builtin(SplitStrategy::Line),
            window: WindowConfig::default(),
            encoder,
            params: FusionParams::zeros(FusionMethod::Mean, dim),
        }
    }

    pub fn mode(&self) -> PipelineMode {
        self.mode
    }

    pub fn encoder(&self) -> &E {
        &self.encoder
    }

    pub fn params(&self) -> &FusionParams<T> {
        &self.params
    }

    pub fn splitter(&self) -> &Splitter {
        &self.splitter
    }

    pub fn window_config(&self) -> &WindowConfig {
        &self.window
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let encoder = self.encoder.spec();
        match self.mode {
            PipelineMode::Truncate { .. } => Fingerprint {
                mode: self.mode,
                split: None,
                window: None,
                step: None,
                tail: None,
                fusion: None,
                params_digest: None,
                encoder,
            },
            PipelineMode::Blocks => Fingerprint {
                mode: self.mode,
                split: Some(self.splitter.strategy()),
                window: Some(self.window.window),
                step: Some(self.window.step),
                tail: Some(self.window.tail),
                fusion: Some(self.params.method),
                params_digest: self.params.method.attention().map(|_| self.params.digest()),
                encoder,
            },
        }
    }

    /// Blocks for one snippet, in order.
    pub fn blocks(&self, snippet: &SourceSnippet) -> Result<Vec<CodeBlock>> {
        match self.mode {
            PipelineMode::Truncate { max_tokens } => {
                if snippet.text.trim().is_empty() {
                    return Err(Error::EmptySource);
                }
                Ok(vec![CodeBlock {
                    index: 0,
                    piece_range: 0..1,
                    text: truncate_tokens(&snippet.text, max_tokens).to_string(),
                }])
            }
            PipelineMode::Blocks => {
                let out = self.splitter.split(snippet)?;
                Ok(window(&out.pieces, &self.window))
            }
        }
    }

    /// Fuse encoded blocks. Blocks that encoded to the zero vector are
    /// dropped; other encoder errors are returned.
    pub fn fuse_encoded(&self, encoded: Vec<Result<Embedding<T>>>) -> Result<Embedding<T>> {
        let mut kept = Vec::with_capacity(encoded.len());
        for e in encoded {
            match e {
                Ok(e) => kept.push(e),
                Err(Error::ZeroVector) => {}
                Err(e) => return Err(e),
            }
        }
        if kept.is_empty() {
            return Err(Error::ZeroVector);
        }
        match self.mode {
            PipelineMode::Truncate { .. } => Ok(kept.swap_remove(0)),
            PipelineMode::Blocks => fuse(&kept, &self.params),
        }
    }

    /// Embeddings of one snippet's blocks, encoded one at a time. Blocks that
    /// encode to the zero vector are dropped.
    pub fn block_embeddings(&self, snippet: &SourceSnippet) -> Result<Vec<Embedding<T>>> {
        let blocks = self.blocks(snippet).map_err(|e| Error::for_snippet(&snippet.id, e))?;
        let mut out = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let key = block_key(&snippet.id, b.index);
            match self.encoder.encode_block(BlockInput { key: &key, text: &b.text }) {
                Ok(e) => out.push(e),
                Err(Error::ZeroVector) => {}
                Err(e) => return Err(Error::for_snippet(&snippet.id, e)),
            }
        }
        if out.is_empty() {
            return Err(Error::for_snippet(&snippet.id, Error::ZeroVector));
        }
        Ok(out)
    }

    /// Code representation of one snippet, encoding its blocks one at a time.
    pub fn represent(&self, snippet: &SourceSnippet) -> Result<Embedding<T>> {
        let embs = self.block_embeddings(snippet)?;
        self.fuse_encoded(embs.into_iter().map(Ok).collect())
            .map_err(|e| Error::for_snippet(&snippet.id, e))
    }

    pub fn encode_query(&self, key: Option<&str>, text: &str) -> Result<Embedding<T>> {
        self.encoder.encode_query(key, text)
    }
}

pub fn block_key(snippet_id: &str, block_index: usize) -> String {
    format!("{snippet_id}#{block_index}")
}

/// Prefix of `text` ending with its `max_tokens`-th token.
pub fn truncate_tokens(text: &str, max_tokens: usize) -> &str {
    let tokens = tokenize(text, TokenizerRule::Subword);
    match tokens.get(max_tokens.saturating_sub(1)) {
        Some(t) if tokens.len() > max_tokens => &text[..t.span.end],
        _ => text,
    }
}
