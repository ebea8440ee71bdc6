//! Precomputed embeddings.
//!
//! File layout: a header line `dim=<D> count=<N>`, then `N` lines of
//! `<id>\t<f1> <f2> ... <fD>`. Block ids are `<snippet_id>#<block_index>`,
//! query ids are the query's own id; rows may also be keyed by
//! [`content_key`] of the text.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{BlockInput, Embedding, EncoderKind, EncoderSpec, Normalization};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tokenize::TokenizerRule;

/// Content-addressed key for a piece of text.
pub fn content_key(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T> {
    dim: usize,
    rows: Vec<(String, Embedding<T>)>,
    by_id: HashMap<String, usize>,
}

impl<T: Scalar> EmbeddingTable<T> {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            rows: Vec::new(),
            by_id: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn insert(&mut self, id: impl Into<String>, emb: Embedding<T>) -> Result<()> {
        let id = id.into();
        if emb.dim() != self.dim {
            return Err(Error::DimMismatch {
                id,
                expected: self.dim,
                found: emb.dim(),
            });
        }
        if self.by_id.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.by_id.insert(id.clone(), self.rows.len());
        self.rows.push((id, emb));
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Embedding<T>> {
        self.by_id.get(id).map(|&i| &self.rows[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Embedding<T>)> {
        self.rows.iter().map(|(id, e)| (id.as_str(), e))
    }
}

pub fn load_embedding_table<T: Scalar>(path: &Path) -> Result<EmbeddingTable<T>> {
    let file = std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().transpose()?.ok_or_else(|| malformed(1, "missing header"))?;
    let (dim, count) = parse_header(&header)?;
    let mut table = EmbeddingTable::new(dim);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, values) = line
            .split_once('\t')
            .ok_or_else(|| malformed(lineno, "expected `<id>\\t<values>`"))?;
        let values = values
            .split_whitespace()
            .map(|v| v.parse::<T>().map_err(|_| malformed(lineno, &format!("bad float `{v}`"))))
            .collect::<Result<Vec<T>>>()?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(malformed(lineno, "non-finite value"));
        }
        table.insert(id, Embedding(values)).map_err(|e| match e {
            Error::DuplicateId(id) => malformed(lineno, &format!("duplicate id `{id}`")),
            e => e,
        })?;
    }
    if table.len() != count {
        return Err(malformed(1, &format!("header declares {count} rows, found {}", table.len())));
    }
    Ok(table)
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let mut dim = None;
    let mut count = None;
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("dim", v)) => dim = v.parse::<usize>().ok(),
            Some(("count", v)) => count = v.parse::<usize>().ok(),
            _ => return Err(malformed(1, &format!("unexpected header field `{field}`"))),
        }
    }
    match (dim, count) {
        (Some(d), Some(c)) if d > 0 => Ok((d, c)),
        _ => Err(malformed(1, "header must be `dim=<D> count=<N>`")),
    }
}

fn malformed(line: usize, reason: &str) -> Error {
    Error::MalformedFile {
        line,
        reason: reason.to_string(),
    }
}

pub fn write_table<T: Scalar>(path: &Path, table: &EmbeddingTable<T>) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "dim={} count={}", table.dim(), table.len())?;
    let mut line = String::new();
    for (id, emb) in table.iter() {
        line.clear();
        line.push_str(id);
        line.push('\t');
        for (i, v) in emb.as_slice().iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            write!(line, "{v}").expect("writing to a String");
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Encoder that looks embeddings up in a precomputed table: first by explicit
/// id, then by [`content_key`].
#[derive(Debug, Clone)]
pub struct TableEncoder<T> {
    table: EmbeddingTable<T>,
    digest: String,
}

impl<T: Scalar> TableEncoder<T> {
    pub fn new(table: EmbeddingTable<T>, digest: impl Into<String>) -> Self {
        TableEncoder {
            table,
            digest: digest.into(),
        }
    }

    /// Load a table file; the encoder is identified by the file's SHA-256.
    pub fn open(path: &Path) -> Result<Self> {
        let table = load_embedding_table(path)?;
        let digest = hex::encode(Sha256::digest(std::fs::read(path)?));
        Ok(TableEncoder::new(table, digest))
    }

    fn lookup(&self, key: Option<&str>, text: &str) -> Result<Embedding<T>> {
        if let Some(e) = key.and_then(|k| self.table.get(k)) {
            return Ok(e.clone());
        }
        let ck = content_key(text);
        self.table
            .get(&ck)
            .cloned()
            .ok_or_else(|| Error::MissingEmbedding(key.map_or(ck, str::to_string)))
    }
}

impl<T: Scalar> super::Encoder<T> for TableEncoder<T> {
    fn spec(&self) -> EncoderSpec {
        EncoderSpec {
            kind: EncoderKind::ExternalTable {
                digest: self.digest.clone(),
            },
            dim: self.table.dim(),
            tokenizer: TokenizerRule::Subword,
            normalization: Normalization::None,
        }
    }

    fn dim(&self) -> usize {
        self.table.dim()
    }

    fn encode_block(&self, block: BlockInput<'_>) -> Result<Embedding<T>> {
        self.lookup(Some(block.key), block.text)
    }

    fn encode_query(&self, key: Option<&str>, text: &str) -> Result<Embedding<T>> {
        self.lookup(key, text)
    }
}
