//! Combine-divide batching.
//!
//! Snippets yield different numbers of blocks, so a batch of snippets is
//! flattened into one block batch with a map from snippet position to its
//! contiguous block range. The block batch goes to the encoder in a single
//! call, and the embeddings are divided back per snippet for fusion. The
//! schedule never changes the result: every snippet sees exactly the block
//! embeddings and fusion it would see alone.

use std::ops::Range;

use rayon::prelude::*;

use crate::encode::{BlockInput, Embedding, Encoder};
use crate::error::{Error, Result};
use crate::pipeline::{block_key, Pipeline};
use crate::scalar::Scalar;
use crate::split::SourceSnippet;

/// Snippet position -> half-open range into the flattened block list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeIndexMap {
    ranges: Vec<Range<usize>>,
}

impl CodeIndexMap {
    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn total(&self) -> usize {
        self.ranges.last().map_or(0, |r| r.end)
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

/// Flatten per-code block lists into one list plus the code -> block map.
pub fn combine<B>(groups: Vec<Vec<B>>) -> Result<(Vec<B>, CodeIndexMap)> {
    if groups.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if let Some(i) = groups.iter().position(Vec::is_empty) {
        return Err(Error::InvalidConfig(format!("code {i} in the batch has no blocks")));
    }
    let mut ranges = Vec::with_capacity(groups.len());
    let mut flat = Vec::new();
    for group in groups {
        let lo = flat.len();
        flat.extend(group);
        ranges.push(lo..flat.len());
    }
    Ok((flat, CodeIndexMap { ranges }))
}

/// Regroup a flattened list according to `map`.
pub fn divide<E>(items: Vec<E>, map: &CodeIndexMap) -> Result<Vec<Vec<E>>> {
    if items.len() != map.total() {
        return Err(Error::LengthMismatch {
            expected: map.total(),
            found: items.len(),
        });
    }
    let mut items = items.into_iter();
    Ok(map
        .ranges
        .iter()
        .map(|r| items.by_ref().take(r.len()).collect())
        .collect())
}

/// Code representations for a corpus, `batch_size` snippets per encoder call.
/// Output order follows the corpus; a failing snippet yields an error tagged
/// with its id without affecting the others.
pub fn encode_corpus<T: Scalar, E: Encoder<T>>(
    pipeline: &Pipeline<T, E>,
    corpus: &[SourceSnippet],
    batch_size: usize,
) -> Result<Vec<Result<Embedding<T>>>> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput);
    }
    if batch_size == 0 {
        return Err(Error::InvalidConfig("batch size must be positive".into()));
    }
    let n_batches = corpus.len().div_ceil(batch_size);
    let mut out = Vec::with_capacity(corpus.len());
    for (b, chunk) in corpus.chunks(batch_size).enumerate() {
        out.extend(encode_batch(pipeline, chunk));
        log::info!("encoded batch {}/{} ({} snippets)", b + 1, n_batches, out.len());
    }
    Ok(out)
}

fn encode_batch<T: Scalar, E: Encoder<T>>(
    pipeline: &Pipeline<T, E>,
    chunk: &[SourceSnippet],
) -> Vec<Result<Embedding<T>>> {
    let blocks: Vec<_> = chunk.par_iter().map(|s| pipeline.blocks(s)).collect();

    let mut results: Vec<Option<Result<Embedding<T>>>> = Vec::with_capacity(chunk.len());
    let mut members = Vec::new();
    let mut groups = Vec::new();
    for (i, (snippet, b)) in chunk.iter().zip(blocks).enumerate() {
        match b {
            Ok(b) if !b.is_empty() => {
                let keyed: Vec<(String, String)> = b
                    .into_iter()
                    .map(|blk| (block_key(&snippet.id, blk.index), blk.text))
                    .collect();
                groups.push(keyed);
                members.push(i);
                results.push(None);
            }
            Ok(_) => results.push(Some(Err(Error::for_snippet(&snippet.id, Error::EmptySource)))),
            Err(e) => results.push(Some(Err(Error::for_snippet(&snippet.id, e)))),
        }
    }
    if members.is_empty() {
        return results.into_iter().map(|r| r.expect("filled")).collect();
    }

    let (flat, map) = combine(groups).expect("non-empty groups");
    let inputs: Vec<BlockInput<'_>> = flat
        .iter()
        .map(|(key, text)| BlockInput { key, text })
        .collect();
    let encoded = pipeline.encoder().encode_blocks(&inputs);
    let grouped = divide(encoded, &map).expect("encoder returns one result per block");

    let fused: Vec<Result<Embedding<T>>> = grouped
        .into_par_iter()
        .zip(members.par_iter())
        .map(|(embs, &i)| {
            pipeline
                .fuse_encoded(embs)
                .map_err(|e| Error::for_snippet(&chunk[i].id, e))
        })
        .collect();
    for (r, i) in fused.into_iter().zip(members) {
        results[i] = Some(r);
    }
    results.into_iter().map(|r| r.expect("filled")).collect()
}
