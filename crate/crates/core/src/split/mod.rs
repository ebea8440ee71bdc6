//! Splitting a snippet into an ordered set of code pieces.

pub mod ast;
pub mod grammar;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use grammar::{BodyLocator, CompositeRule, GrammarTable, Grammars, Language};

use crate::error::{Error, Result};
use crate::tokenize::{tokenize, TokenizerRule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSnippet {
    pub id: String,
    pub language: String,
    pub text: String,
}

impl SourceSnippet {
    pub fn new(id: impl Into<String>, language: impl Into<String>, text: impl Into<String>) -> Self {
        SourceSnippet {
            id: id.into(),
            language: language.into(),
            text: text.into(),
        }
    }
}

/// A contiguous fragment of a snippet; `span` is a byte range into the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodePiece {
    pub index: usize,
    pub span: Range<usize>,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SplitStrategy {
    Space,
    Token(TokenizerRule),
    Line,
    #[default]
    Ast,
}

impl fmt::Display for SplitStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitStrategy::Space => f.write_str("space"),
            SplitStrategy::Token(TokenizerRule::Subword) => f.write_str("token"),
            SplitStrategy::Token(TokenizerRule::Word) => f.write_str("token:word"),
            SplitStrategy::Line => f.write_str("line"),
            SplitStrategy::Ast => f.write_str("ast"),
        }
    }
}

impl FromStr for SplitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "space" => Ok(SplitStrategy::Space),
            "token" | "token:subword" => Ok(SplitStrategy::Token(TokenizerRule::Subword)),
            "token:word" => Ok(SplitStrategy::Token(TokenizerRule::Word)),
            "line" => Ok(SplitStrategy::Line),
            "ast" => Ok(SplitStrategy::Ast),
            other => Err(Error::InvalidConfig(format!("unknown split strategy `{other}`"))),
        }
    }
}

impl Serialize for SplitStrategy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SplitStrategy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitOutput {
    pub pieces: Vec<CodePiece>,
    /// Set when the syntax-aware split could not parse the snippet and line
    /// splitting was used instead.
    pub fallback: Option<String>,
}

/// A split strategy bound to a grammar registry.
#[derive(Debug, Clone)]
pub struct Splitter {
    strategy: SplitStrategy,
    grammars: Grammars,
}

impl Splitter {
    pub fn new(strategy: SplitStrategy, grammars: Grammars) -> Self {
        Splitter { strategy, grammars }
    }

    pub fn builtin(strategy: SplitStrategy) -> Self {
        Splitter::new(strategy, grammar::builtin_grammars().clone())
    }

    pub fn strategy(&self) -> SplitStrategy {
        self.strategy
    }

    pub fn grammars(&self) -> &Grammars {
        &self.grammars
    }

    pub fn split(&self, snippet: &SourceSnippet) -> Result<SplitOutput> {
        if snippet.text.trim().is_empty() {
            return Err(Error::EmptySource);
        }
        let text = snippet.text.as_str();
        let pieces = match self.strategy {
            SplitStrategy::Space => split_space(text),
            SplitStrategy::Token(rule) => split_tokens(text, rule),
            SplitStrategy::Line => split_lines(text),
            SplitStrategy::Ast => return self.split_ast(snippet),
        };
        Ok(SplitOutput { pieces, fallback: None })
    }

    fn split_ast(&self, snippet: &SourceSnippet) -> Result<SplitOutput> {
        let lang: Language = snippet.language.parse()?;
        match ast::partition(lang, &snippet.text, self.grammars.table(lang)) {
            Ok(pieces) => Ok(SplitOutput { pieces, fallback: None }),
            Err(Error::ParseFailure(why)) => {
                log::warn!("snippet `{}`: {why}; falling back to line splitting", snippet.id);
                Ok(SplitOutput {
                    pieces: split_lines(&snippet.text),
                    fallback: Some(why),
                })
            }
            Err(e) => Err(e),
        }
    }
}

/// Split with the built-in grammar tables.
pub fn split(snippet: &SourceSnippet, strategy: SplitStrategy) -> Result<Vec<CodePiece>> {
    Splitter::builtin(strategy).split(snippet).map(|o| o.pieces)
}

/// Syntax-aware partition with the built-in grammar tables. Unlike [`split`]
/// this reports `ParseFailure` instead of falling back.
pub fn ast_partition(snippet: &SourceSnippet) -> Result<Vec<CodePiece>> {
    if snippet.text.trim().is_empty() {
        return Err(Error::EmptySource);
    }
    let lang: Language = snippet.language.parse()?;
    ast::partition(lang, &snippet.text, grammar::builtin_grammars().table(lang))
}

fn piece(text: &str, index: usize, span: Range<usize>) -> CodePiece {
    CodePiece {
        index,
        text: text[span.clone()].to_string(),
        span,
    }
}

/// Maximal whitespace-free runs.
fn split_space(text: &str) -> Vec<CodePiece> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(piece(text, out.len(), s..i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(piece(text, out.len(), s..text.len()));
    }
    out
}

fn split_tokens(text: &str, rule: TokenizerRule) -> Vec<CodePiece> {
    tokenize(text, rule)
        .into_iter()
        .enumerate()
        .map(|(i, t)| piece(text, i, t.span))
        .collect()
}

/// Physical lines without their line terminator; whitespace-only lines dropped.
fn split_lines(text: &str) -> Vec<CodePiece> {
    let mut out = Vec::new();
    let mut start = 0;
    for line in text.split_inclusive('\n') {
        let end = start + line.len();
        let content = line.trim_end_matches('\n').trim_end_matches('\r');
        if !content.trim().is_empty() {
            out.push(piece(text, out.len(), start..start + content.len()));
        }
        start = end;
    }
    out
}

/// Cut `text` at the given sorted offsets, trim each segment of surrounding
/// whitespace and drop the empty ones.
pub(crate) fn pieces_from_cuts(text: &str, cuts: impl Iterator<Item = usize>) -> Vec<CodePiece> {
    let mut bounds: Vec<usize> = std::iter::once(0)
        .chain(cuts)
        .chain(std::iter::once(text.len()))
        .collect();
    bounds.sort_unstable();
    bounds.dedup();
    let mut out = Vec::new();
    for w in bounds.windows(2) {
        let seg = &text[w[0]..w[1]];
        let lead = seg.len() - seg.trim_start().len();
        let trimmed = seg.trim();
        if !trimmed.is_empty() {
            let start = w[0] + lead;
            out.push(piece(text, out.len(), start..start + trimmed.len()));
        }
    }
    out
}

/// Rebuild the source from pieces, restoring the gap bytes between spans.
pub fn reconstruct(source: &str, pieces: &[CodePiece]) -> String {
    let mut out = String::with_capacity(source.len());
    let mut cursor = 0;
    for p in pieces {
        out.push_str(&source[cursor..p.span.start]);
        out.push_str(&p.text);
        cursor = p.span.end;
    }
    out.push_str(&source[cursor..]);
    out
}
