//! JSON-lines corpus files: one object per line with `id`, `language`,
//! `code`, and optional `query` and `token_length`.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::QueryRecord;
use crate::split::{Language, SourceSnippet};
use crate::tokenize::{token_count, TokenizerRule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub language: String,
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_length: Option<usize>,
}

impl CorpusRecord {
    pub fn snippet(&self) -> SourceSnippet {
        SourceSnippet::new(&self.id, &self.language, &self.code)
    }

    /// The supplied length, or a count with the builtin tokenizer.
    pub fn code_length(&self) -> usize {
        self.token_length
            .unwrap_or_else(|| token_count(&self.code, TokenizerRule::default()))
    }

    pub fn query_record(&self) -> Option<QueryRecord> {
        let query = self.query.as_deref().filter(|q| !q.trim().is_empty())?;
        Some(QueryRecord {
            query: query.to_string(),
            ground_truth: self.id.clone(),
            token_length: self.code_length(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedLine {
    /// 1-based line number in the file.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records: usize,
    pub malformed: Vec<SkippedLine>,
    /// Well-formed records dropped for lacking a query.
    pub filtered: usize,
}

/// Parse JSON lines, skipping malformed ones. Blank lines are ignored.
pub fn parse_corpus<R: BufRead>(reader: R, require_query: bool) -> Result<(Vec<CorpusRecord>, IngestReport)> {
    let mut records = Vec::new();
    let mut report = IngestReport::default();
    let mut seen = HashSet::new();
    let mut nonblank = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        nonblank += 1;
        let lineno = i + 1;
        let record = match serde_json::from_str::<CorpusRecord>(&line) {
            Ok(r) => r,
            Err(e) => {
                report.malformed.push(SkippedLine { line: lineno, reason: e.to_string() });
                continue;
            }
        };
        if let Err(e) = record.language.parse::<Language>() {
            report.malformed.push(SkippedLine { line: lineno, reason: e.to_string() });
            continue;
        }
        if !seen.insert(record.id.clone()) {
            report.malformed.push(SkippedLine {
                line: lineno,
                reason: format!("duplicate id `{}`", record.id),
            });
            continue;
        }
        if require_query && record.query.as_deref().is_none_or(|q| q.trim().is_empty()) {
            report.filtered += 1;
            continue;
        }
        records.push(record);
    }
    for s in &report.malformed {
        log::warn!("skipping line {}: {}", s.line, s.reason);
    }
    if nonblank > 0 && report.malformed.len() == nonblank {
        return Err(Error::AllLinesMalformed(nonblank));
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    report.records = records.len();
    Ok((records, report))
}

pub fn ingest_corpus(path: &Path, require_query: bool) -> Result<(Vec<CorpusRecord>, IngestReport)> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    parse_corpus(BufReader::new(std::fs::File::open(path)?), require_query)
}

pub fn write_corpus<W: Write>(records: &[CorpusRecord], writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"id":"a","language":"python","code":"x = 1","query":"set x"}"#;

    #[test]
    fn well_formed_lines() {
        let text = [GOOD, GOOD.replace("\"a\"", "\"b\"").as_str(), GOOD.replace("\"a\"", "\"c\"").as_str()].join("\n");
        let (recs, report) = parse_corpus(text.as_bytes(), false).unwrap();
        assert_eq!(recs.len(), 3);
        assert!(report.malformed.is_empty());
    }

    #[test]
    fn malformed_line_is_reported() {
        let mut lines = vec!["{not json".to_string()];
        for i in 0..9 {
            lines.push(GOOD.replace("\"a\"", &format!("\"r{i}\"")));
        }
        let (recs, report) = parse_corpus(lines.join("\n").as_bytes(), false).unwrap();
        assert_eq!(recs.len(), 9);
        assert_eq!(report.malformed.len(), 1);
        assert_eq!(report.malformed[0].line, 1);
    }

    #[test]
    fn all_malformed_and_missing_file() {
        assert!(matches!(parse_corpus("x\ny\n".as_bytes(), false), Err(Error::AllLinesMalformed(2))));
        assert!(matches!(
            ingest_corpus(Path::new("/nonexistent/corpus.jsonl"), false),
            Err(Error::FileNotFound(_))
        ));
    }

    #[test]
    fn query_filter_and_unsupported_language() {
        let text = format!(
            "{GOOD}\n{}\n{}\n",
            r#"{"id":"b","language":"python","code":"y"}"#,
            r#"{"id":"c","language":"cobol","code":"y","query":"q"}"#
        );
        let (recs, report) = parse_corpus(text.as_bytes(), true).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(report.filtered, 1);
        assert_eq!(report.malformed[0].line, 3);
    }
}
