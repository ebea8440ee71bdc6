//! Code-aware tokenizer shared by the splitter, the hashing encoder and BM25.
//!
//! Words are maximal runs of alphanumerics and `_`. Every other non-whitespace
//! character is a one-character punctuation token. Under [`TokenizerRule::Subword`]
//! words are further broken at underscores and camelCase boundaries
//! (`readImageFile` -> `read`, `image`, `file`; `HTTPServer` -> `http`, `server`).
//! Token text is always lowercased.

use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenizerRule {
    /// snake_case and camelCase identifiers split into lowercase subwords.
    #[default]
    Subword,
    /// Whole identifiers, lowercased.
    Word,
}

impl FromStr for TokenizerRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "subword" => Ok(Self::Subword),
            "word" => Ok(Self::Word),
            other => Err(Error::InvalidConfig(format!("unknown tokenizer rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Byte range of the token in the source text.
    pub span: Range<usize>,
    /// Normalized (lowercased) token text.
    pub text: String,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str, rule: TokenizerRule) -> Vec<Token> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if !is_word_char(c) {
            out.push(Token {
                span: start..start + c.len_utf8(),
                text: c.to_lowercase().collect(),
            });
            continue;
        }
        let mut end = start + c.len_utf8();
        while let Some(&(i, c)) = chars.peek() {
            if !is_word_char(c) {
                break;
            }
            end = i + c.len_utf8();
            chars.next();
        }
        match rule {
            TokenizerRule::Word => out.push(Token {
                span: start..end,
                text: text[start..end].to_lowercase(),
            }),
            TokenizerRule::Subword => push_subwords(text, start..end, &mut out),
        }
    }
    out
}

/// Number of tokens `text` produces; this is the "token length" used for
/// truncation and length bucketing.
pub fn token_count(text: &str, rule: TokenizerRule) -> usize {
    tokenize(text, rule).len()
}

fn push_subwords(text: &str, word: Range<usize>, out: &mut Vec<Token>) {
    let chars: Vec<(usize, char)> = text[word.clone()]
        .char_indices()
        .map(|(i, c)| (i + word.start, c))
        .collect();
    let mut seg_start: Option<usize> = None;
    let emit = |from: usize, to: usize, out: &mut Vec<Token>| {
        if from < to {
            out.push(Token {
                span: from..to,
                text: text[from..to].to_lowercase(),
            });
        }
    };
    for (k, &(i, c)) in chars.iter().enumerate() {
        if c == '_' {
            if let Some(s) = seg_start.take() {
                emit(s, i, out);
            }
            continue;
        }
        match seg_start {
            None => seg_start = Some(i),
            Some(s) => {
                let prev = chars[k - 1].1;
                let next = chars.get(k + 1).map(|&(_, c)| c);
                let lower_to_upper = (prev.is_lowercase() || prev.is_numeric()) && c.is_uppercase();
                let acronym_end = prev.is_uppercase()
                    && c.is_uppercase()
                    && next.is_some_and(|n| n.is_lowercase());
                if lower_to_upper || acronym_end {
                    emit(s, i, out);
                    seg_start = Some(i);
                }
            }
        }
    }
    if let Some(s) = seg_start {
        emit(s, word.end, out);
    }
}
