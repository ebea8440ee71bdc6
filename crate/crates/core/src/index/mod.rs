//! Exhaustive vector index over fused code representations, and the BM25
//! text-matching baseline.
//!
//! Index file layout (little-endian):
//!
//! ```text
//! magic  b"LCRI"
//! u32    version (1)
//! u32    dim
//! u64    count
//! u32    fingerprint length, then fingerprint JSON bytes
//! count x { u32 id length, id bytes, dim x f32 }
//! ```

mod bm25;

use std::collections::HashSet;
use std::fmt;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bm25::{bm25_search, Bm25Index, BM25_B, BM25_K1};

use crate::batch::encode_corpus;
use crate::encode::{Embedding, Encoder};
use crate::error::{Error, Result};
use crate::pipeline::{Fingerprint, Pipeline};
use crate::scalar::Scalar;
use crate::split::SourceSnippet;

const MAGIC: &[u8; 4] = b"LCRI";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Similarity {
    #[default]
    Cosine,
    /// Negated Euclidean distance, so larger is still better.
    Euclidean,
}

impl FromStr for Similarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Similarity::Cosine),
            "euclidean" => Ok(Similarity::Euclidean),
            other => Err(Error::InvalidConfig(format!("unknown similarity `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub hits: Vec<Hit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth_rank: Option<usize>,
}

/// Anything that scores every candidate in a fixed pool for a query.
pub trait Ranker {
    fn ids(&self) -> &[String];

    /// One score per entry of [`Ranker::ids`]; higher is better.
    fn score_all(&self, query_id: Option<&str>, query: &str) -> Result<Vec<f64>>;
}

/// Candidates ordered by score descending, ties by ascending id.
pub fn ranking(ids: &[String], scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then_with(|| ids[a].cmp(&ids[b])));
    order
}

/// 1-based position of candidate `target` under [`ranking`]'s order.
pub fn rank_of(ids: &[String], scores: &[f64], target: usize) -> usize {
    let (ts, tid) = (scores[target], &ids[target]);
    1 + scores
        .iter()
        .zip(ids)
        .filter(|&(&s, id)| s > ts || (s == ts && id < tid))
        .count()
}

pub fn search_ranker<R: Ranker + ?Sized>(
    ranker: &R,
    query_id: Option<&str>,
    query: &str,
    top_k: usize,
    ground_truth: Option<&str>,
) -> Result<SearchResult> {
    let ids = ranker.ids();
    let scores = ranker.score_all(query_id, query)?;
    let ground_truth_rank = match ground_truth {
        Some(gt) => {
            let pos = ids
                .iter()
                .position(|id| id == gt)
                .ok_or_else(|| Error::MissingGroundTruth(gt.to_string()))?;
            Some(rank_of(ids, &scores, pos))
        }
        None => None,
    };
    let hits = ranking(ids, &scores)
        .into_iter()
        .take(top_k)
        .map(|i| Hit {
            id: ids[i].clone(),
            score: scores[i],
        })
        .collect();
    Ok(SearchResult { hits, ground_truth_rank })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeIndex<T> {
    fingerprint: Fingerprint,
    dim: usize,
    ids: Vec<String>,
    vectors: Vec<Embedding<T>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SkippedSnippet {
    pub id: String,
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub entries: usize,
    pub skipped: Vec<SkippedSnippet>,
}

impl<T: Scalar> CodeIndex<T> {
    pub fn from_entries(fingerprint: Fingerprint, entries: Vec<(String, Embedding<T>)>) -> Result<Self> {
        let dim = fingerprint.encoder.dim;
        let mut seen = HashSet::new();
        let mut ids = Vec::with_capacity(entries.len());
        let mut vectors = Vec::with_capacity(entries.len());
        for (id, v) in entries {
            if v.dim() != dim {
                return Err(Error::DimMismatch {
                    id,
                    expected: dim,
                    found: v.dim(),
                });
            }
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            ids.push(id);
            vectors.push(v);
        }
        Ok(CodeIndex {
            fingerprint,
            dim,
            ids,
            vectors,
        })
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vectors(&self) -> &[Embedding<T>] {
        &self.vectors
    }

    pub fn check_fingerprint(&self, query_side: &Fingerprint) -> Result<()> {
        if &self.fingerprint != query_side {
            return Err(Error::FingerprintMismatch {
                index: self.fingerprint.to_json(),
                query: query_side.to_json(),
            });
        }
        Ok(())
    }

    pub fn scores(&self, query: &Embedding<T>, similarity: Similarity) -> Result<Vec<f64>> {
        if query.dim() != self.dim {
            return Err(Error::DimMismatch {
                id: "<query>".into(),
                expected: self.dim,
                found: query.dim(),
            });
        }
        if query.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(self
            .vectors
            .iter()
            .map(|v| match similarity {
                Similarity::Cosine => query.cosine(v).map_or(0.0, Scalar::as_f64),
                Similarity::Euclidean => -query.euclidean(v).as_f64(),
            })
            .collect())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let fp = self.fingerprint.to_json();
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.ids.len() as u64).to_le_bytes())?;
        w.write_all(&(fp.len() as u32).to_le_bytes())?;
        w.write_all(fp.as_bytes())?;
        for (id, v) in self.ids.iter().zip(&self.vectors) {
            w.write_all(&(id.len() as u32).to_le_bytes())?;
            w.write_all(id.as_bytes())?;
            for x in v.as_slice() {
                w.write_all(&x.as_f32().to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let bad = |reason: &str| Error::MalformedFile {
            line: 0,
            reason: reason.to_string(),
        };
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not an index file"));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(bad(&format!("unsupported index version {version}")));
        }
        let dim = read_u32(&mut r)? as usize;
        let count = read_u64(&mut r)? as usize;
        let fp_len = read_u32(&mut r)? as usize;
        let mut fp = vec![0u8; fp_len];
        r.read_exact(&mut fp)?;
        let fingerprint: Fingerprint = serde_json::from_slice(&fp)?;
        if fingerprint.encoder.dim != dim {
            return Err(bad("header dim disagrees with fingerprint"));
        }
        let mut entries = Vec::with_capacity(count);
        let mut buf = [0u8; 4];
        for _ in 0..count {
            let len = read_u32(&mut r)? as usize;
            let mut id = vec![0u8; len];
            r.read_exact(&mut id)?;
            let id = String::from_utf8(id).map_err(|_| bad("id is not UTF-8"))?;
            let mut v = Vec::with_capacity(dim);
            for _ in 0..dim {
                r.read_exact(&mut buf)?;
                v.push(T::of(f32::from_le_bytes(buf) as f64));
            }
            entries.push((id, Embedding(v)));
        }
        CodeIndex::from_entries(fingerprint, entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::FileNotFound(path.to_path_buf()));
        }
        CodeIndex::read_from(BufReader::new(std::fs::File::open(path)?))
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Encode a corpus into an index. Snippets that fail are reported and left out.
pub fn build_index<T: Scalar, E: Encoder<T>>(
    corpus: &[SourceSnippet],
    pipeline: &Pipeline<T, E>,
    batch_size: usize,
) -> Result<(CodeIndex<T>, BuildReport)> {
    let mut seen = HashSet::new();
    if let Some(dup) = corpus.iter().find(|s| !seen.insert(s.id.as_str())) {
        return Err(Error::DuplicateId(dup.id.clone()));
    }
    let reps = encode_corpus(pipeline, corpus, batch_size)?;
    let mut entries = Vec::with_capacity(corpus.len());
    let mut report = BuildReport::default();
    for (snippet, rep) in corpus.iter().zip(reps) {
        match rep {
            Ok(v) => entries.push((snippet.id.clone(), v)),
            Err(e) => {
                log::warn!("skipping snippet `{}`: {e}", snippet.id);
                report.skipped.push(SkippedSnippet {
                    id: snippet.id.clone(),
                    error: e.code().to_string(),
                    message: e.to_string(),
                });
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::AllSnippetsFailed(corpus.len()));
    }
    report.entries = entries.len();
    Ok((CodeIndex::from_entries(pipeline.fingerprint(), entries)?, report))
}

/// An index paired with a fingerprint-compatible query encoder.
pub struct Searcher<'a, T: Scalar, E> {
    index: &'a CodeIndex<T>,
    pipeline: &'a Pipeline<T, E>,
    similarity: Similarity,
}

impl<'a, T: Scalar, E: Encoder<T>> Searcher<'a, T, E> {
    pub fn new(index: &'a CodeIndex<T>, pipeline: &'a Pipeline<T, E>, similarity: Similarity) -> Result<Self> {
        index.check_fingerprint(&pipeline.fingerprint())?;
        Ok(Searcher {
            index,
            pipeline,
            similarity,
        })
    }

    pub fn search(&self, query: &str, top_k: usize) -> Result<SearchResult> {
        search_ranker(self, None, query, top_k, None)
    }
}

impl<T: Scalar, E: Encoder<T>> Ranker for Searcher<'_, T, E> {
    fn ids(&self) -> &[String] {
        self.index.ids()
    }

    fn score_all(&self, query_id: Option<&str>, query: &str) -> Result<Vec<f64>> {
        let q = self.pipeline.encode_query(query_id, query)?;
        self.index.scores(&q, self.similarity)
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Similarity::Cosine => "cosine",
            Similarity::Euclidean => "euclidean",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::HashingEncoder;
    use crate::fusion::{FusionMethod, FusionParams};
    use crate::split::{SplitStrategy, Splitter};
    use crate::window::WindowConfig;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pipeline() -> Pipeline<f64, HashingEncoder> {
        Pipeline::new(
            Splitter::builtin(SplitStrategy::Ast),
            WindowConfig::default(),
            HashingEncoder::new(128).unwrap(),
            FusionParams::zeros(FusionMethod::Attn1Mean, 128),
        )
        .unwrap()
    }

    fn toy() -> Vec<SourceSnippet> {
        vec![
            SourceSnippet::new("a", "python", "def read_image_file(path):\n    return open(path)\n"),
            SourceSnippet::new("b", "python", "def parse_json(text):\n    return json.loads(text)\n"),
            SourceSnippet::new("c", "python", "def sort_items(xs):\n    return sorted(xs)\n"),
        ]
    }

    #[test]
    fn build_and_search_toy_corpus() {
        let p = pipeline();
        let (idx, report) = build_index(&toy(), &p, 2).unwrap();
        assert_eq!(idx.len(), 3);
        assert!(report.skipped.is_empty());
        assert_eq!(idx.fingerprint(), &p.fingerprint());
        let s = Searcher::new(&idx, &p, Similarity::Cosine).unwrap();
        let r = s.search("parse json text", 10).unwrap();
        assert_eq!(r.hits.len(), 3);
        assert_eq!(r.hits[0].id, "b");
        assert!(r.hits.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn exact_token_match_scores_one() {
        let p = pipeline();
        let corpus = vec![
            SourceSnippet::new("only", "python", "load_tensor_patches"),
            SourceSnippet::new("other", "python", "x = compute(y)"),
        ];
        let (idx, _) = build_index(&corpus, &p, 8).unwrap();
        let r = Searcher::new(&idx, &p, Similarity::Cosine)
            .unwrap()
            .search("load tensor patches", 1)
            .unwrap();
        assert_eq!(r.hits[0].id, "only");
        assert!((r.hits[0].score - 1.0).abs() < 1e-9);
    }

    #[test]
    fn skips_are_reported() {
        let p = pipeline();
        let mut corpus = toy();
        corpus.push(SourceSnippet::new("bad", "fortran", "x = 1"));
        let (idx, report) = build_index(&corpus, &p, 2).unwrap();
        assert_eq!(idx.len(), 3);
        assert_eq!(report.skipped[0].id, "bad");
        assert_eq!(report.skipped[0].error, "UnsupportedLanguage");
        let all_bad = vec![SourceSnippet::new("bad", "fortran", "x = 1")];
        assert!(matches!(build_index(&all_bad, &p, 2), Err(Error::AllSnippetsFailed(1))));
    }

    #[test]
    fn fingerprint_mismatch_is_rejected() {
        let p = pipeline();
        let (idx, _) = build_index(&toy(), &p, 2).unwrap();
        let other = Pipeline::new(
            Splitter::builtin(SplitStrategy::Line),
            WindowConfig::default(),
            HashingEncoder::new(128).unwrap(),
            FusionParams::zeros(FusionMethod::Attn1Mean, 128),
        )
        .unwrap();
        assert!(matches!(
            Searcher::new(&idx, &other, Similarity::Cosine),
            Err(Error::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn file_round_trip_is_byte_stable() {
        let p = pipeline();
        let (idx, _) = build_index(&toy(), &p, 2).unwrap();
        let (idx2, _) = build_index(&toy(), &p, 1).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        idx.write_to(&mut a).unwrap();
        idx2.write_to(&mut b).unwrap();
        assert_eq!(a, b);
        let back = CodeIndex::<f64>::read_from(a.as_slice()).unwrap();
        assert_eq!(back.ids(), idx.ids());
        for (x, y) in back.vectors().iter().zip(idx.vectors()) {
            for (u, v) in x.as_slice().iter().zip(y.as_slice()) {
                assert_eq!(*u, *v as f32 as f64);
            }
        }
        let mut c = Vec::new();
        back.write_to(&mut c).unwrap();
        assert_eq!(a, c);
        assert!(CodeIndex::<f64>::read_from(&b"XXXX"[..]).is_err());
    }

    #[test]
    fn tie_break_by_id() {
        let ids: Vec<String> = ["b", "a", "c"].iter().map(|s| s.to_string()).collect();
        let scores = [0.5, 0.5, 0.9];
        assert_eq!(ranking(&ids, &scores), [2, 1, 0]);
        assert_eq!(rank_of(&ids, &scores, 0), 3);
        assert_eq!(rank_of(&ids, &scores, 1), 2);
    }

    fn random_index(rng: &mut ChaCha8Rng, n: usize, d: usize) -> CodeIndex<f64> {
        let fp = pipeline().fingerprint();
        let fp = Fingerprint {
            encoder: crate::encode::EncoderSpec::builtin(d),
            ..fp
        };
        let entries = (0..n)
            .map(|i| {
                let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                (format!("id{:03}", (i * 7919) % n), Embedding(v))
            })
            .collect();
        CodeIndex::from_entries(fp, entries).unwrap()
    }

    #[test]
    fn ranking_equals_brute_force_cosine_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let idx = random_index(&mut rng, 20, 16);
        let q = Embedding((0..16).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>());
        let scores = idx.scores(&q, Similarity::Cosine).unwrap();
        // Oracle: explicit cosine formula and a comparison sort on (-score, id).
        let mut oracle: Vec<(f64, String)> = idx
            .vectors()
            .iter()
            .zip(idx.ids())
            .map(|(v, id)| {
                let dot: f64 = v.0.iter().zip(&q.0).map(|(a, b)| a * b).sum();
                let nv = v.0.iter().map(|a| a * a).sum::<f64>().sqrt();
                let nq = q.0.iter().map(|a| a * a).sum::<f64>().sqrt();
                (dot / (nv * nq), id.clone())
            })
            .collect();
        oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let got: Vec<&String> = ranking(idx.ids(), &scores).into_iter().map(|i| &idx.ids()[i]).collect();
        let want: Vec<&String> = oracle.iter().map(|(_, id)| id).collect();
        assert_eq!(got, want);
        for (i, id) in idx.ids().iter().enumerate() {
            let pos = want.iter().position(|w| *w == id).unwrap() + 1;
            assert_eq!(rank_of(idx.ids(), &scores, i), pos);
        }
    }

    proptest! {
        #[test]
        fn ranking_is_scale_invariant(seed in 0u64..1000, c in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let idx = random_index(&mut rng, 30, 8);
            let scaled = CodeIndex::from_entries(
                idx.fingerprint().clone(),
                idx.ids().iter().cloned().zip(idx.vectors().iter().map(|v| v.scaled(c))).collect(),
            ).unwrap();
            let q = Embedding((0..8).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>());
            let a = ranking(idx.ids(), &idx.scores(&q, Similarity::Cosine).unwrap());
            let b = ranking(scaled.ids(), &scaled.scores(&q, Similarity::Cosine).unwrap());
            // Rounding can only reorder exact ties, which id order then settles.
            let s1 = idx.scores(&q, Similarity::Cosine).unwrap();
            let s2 = scaled.scores(&q, Similarity::Cosine).unwrap();
            for (x, y) in s1.iter().zip(&s2) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert_eq!(a, b);
        }
    }
}
