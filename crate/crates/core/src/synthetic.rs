//! Seeded synthetic data.
//!
//! [`gen_synthetic`] writes functions in all six languages, each paired with a
//! query made of pseudo-words that occur in exactly one function. For a chosen
//! fraction of records those words appear only after code token 256, so a
//! truncating encoder never sees them.
//!
//! [`gen_planted`] builds block-level training data: each code is a list of
//! blocks, exactly one of which shares words with the query.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusRecord;
use crate::error::{Error, Result};
use crate::pipeline::CODE_MAX_TOKENS;
use crate::split::Language;
use crate::tokenize::{token_count, TokenizerRule};

const FILLER: &[&str] = &[
    "value", "result", "index", "count", "buffer", "item", "data", "node", "config", "size", "offset",
    "name", "path", "key", "total", "state", "cache", "queue", "input", "output", "parse", "load",
    "update", "compute", "check", "build", "read", "write", "format", "merge", "list", "map", "entry",
    "field", "token", "record", "limit", "start", "end", "step", "score", "weight", "range", "page",
    "row", "column", "batch", "chunk", "frame", "event", "task", "job", "user", "group", "client",
    "server", "request", "response", "header", "body", "stream", "file", "line", "text", "char",
    "byte", "flag", "mode", "level", "target", "source", "filter", "sort", "find", "insert", "remove",
];

/// Boilerplate words for the non-matching blocks of [`gen_planted`].
const BOILERPLATE: &[&str] = &[
    "log", "debug", "info", "warn", "trace", "import", "export", "self", "this", "none", "null",
    "init", "close", "open", "flush", "lock", "unlock", "assert", "print", "emit",
];

/// Logic words for the matching block of [`gen_planted`].
const LOGIC: &[&str] = &[
    "sum", "diff", "ratio", "pivot", "swap", "split", "join", "scan", "walk", "fold", "reduce",
    "rank", "match", "bound", "delta", "prime", "root", "leaf", "edge", "path",
];

const SYLLABLES: &[&str] = &[
    "ka", "zo", "vu", "ri", "mex", "pol", "dra", "quin", "sef", "tor", "lum", "bax", "yel", "gri",
    "nop", "wix", "fen", "jad", "hov", "cus",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n: usize,
    pub seed: u64,
    /// Share of records whose query words sit past the truncation limit.
    pub long_fraction: f64,
    pub keywords_per_query: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n: 500,
            seed: 7,
            long_fraction: 0.5,
            keywords_per_query: 3,
        }
    }
}

struct Words {
    used: HashSet<String>,
}

impl Words {
    fn new() -> Self {
        Words {
            used: FILLER.iter().chain(BOILERPLATE).chain(LOGIC).map(|s| s.to_string()).collect(),
        }
    }

    /// A fresh lowercase pseudo-word never handed out before.
    fn fresh(&mut self, rng: &mut impl Rng) -> String {
        loop {
            let n = rng.random_range(3..=4);
            let w: String = (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }
}

fn filler_ident(rng: &mut impl Rng) -> [&'static str; 2] {
    [*FILLER.choose(rng).unwrap(), *FILLER.choose(rng).unwrap()]
}

fn ident(lang: Language, parts: &[&str]) -> String {
    match lang {
        Language::Java | Language::JavaScript | Language::Go => {
            let mut s = parts[0].to_string();
            for p in &parts[1..] {
                let mut c = p.chars();
                if let Some(first) = c.next() {
                    s.extend(first.to_uppercase());
                    s.push_str(c.as_str());
                }
            }
            s
        }
        _ => parts.join("_"),
    }
}

fn var(lang: Language, name: &str) -> String {
    if lang == Language::Php {
        format!("${name}")
    } else {
        name.to_string()
    }
}

fn call_stmt(lang: Language, target: &str, func: &str, args: &[String]) -> String {
    let t = var(lang, target);
    let args = args.join(", ");
    match lang {
        Language::Python | Language::Ruby | Language::Go => format!("{t} = {func}({args})"),
        _ => format!("{t} = {func}({args});"),
    }
}

fn if_open(lang: Language, a: &str, b: &str) -> String {
    let (a, b) = (var(lang, a), var(lang, b));
    match lang {
        Language::Python => format!("if {a} > {b}:"),
        Language::Ruby => format!("if {a} > {b}"),
        Language::Go => format!("if {a} > {b} {{"),
        _ => format!("if ({a} > {b}) {{"),
    }
}

fn if_close(lang: Language) -> Option<&'static str> {
    match lang {
        Language::Python => None,
        Language::Ruby => Some("end"),
        _ => Some("}"),
    }
}

/// A statement as (depth, line) pairs, relative to the function body.
type Stmt = Vec<(usize, String)>;

fn filler_stmt(lang: Language, rng: &mut impl Rng) -> Stmt {
    let target = ident(lang, &filler_ident(rng));
    let func = ident(lang, &filler_ident(rng));
    let args: Vec<String> = (0..rng.random_range(1..=3))
        .map(|_| var(lang, &ident(lang, &filler_ident(rng))))
        .collect();
    let line = call_stmt(lang, &target, &func, &args);
    if rng.random_bool(0.25) {
        let a = ident(lang, &filler_ident(rng));
        let b = ident(lang, &filler_ident(rng));
        let mut s = vec![(0, if_open(lang, &a, &b)), (1, line)];
        if let Some(c) = if_close(lang) {
            s.push((0, c.to_string()));
        }
        s
    } else {
        vec![(0, line)]
    }
}

/// One call per keyword, each passing the remaining keywords as arguments.
fn keyword_stmt(lang: Language, keywords: &[String], rng: &mut impl Rng) -> Stmt {
    (0..keywords.len())
        .map(|i| {
            let target = ident(lang, &filler_ident(rng));
            let args: Vec<String> = (1..keywords.len().max(2))
                .map(|j| var(lang, &keywords[(i + j) % keywords.len()]))
                .collect();
            (0, call_stmt(lang, &target, &keywords[i], &args))
        })
        .collect()
}

struct Frame {
    head: String,
    indent: &'static str,
    footer: &'static str,
}

fn frame(lang: Language, name: &str, param: &str) -> Frame {
    let p = var(lang, param);
    let (head, indent, footer) = match lang {
        Language::Python => (format!("def {name}({p}):\n"), "    ", ""),
        Language::Ruby => (format!("def {name}({p})\n"), "  ", "end\n"),
        Language::JavaScript => (format!("function {name}({p}) {{\n"), "  ", "}\n"),
        Language::Go => (format!("package main\n\nfunc {name}({p} int) int {{\n"), "\t", "}\n"),
        Language::Java => (format!("class Task {{\n  int {name}(int {p}) {{\n"), "    ", "  }\n}\n"),
        Language::Php => (format!("<?php\nfunction {name}({p}) {{\n"), "    ", "}\n"),
    };
    Frame { head, indent, footer }
}

fn render(lang: Language, name: &str, param: &str, body: &[Stmt]) -> String {
    let f = frame(lang, name, param);
    let mut out = f.head;
    for stmt in body {
        for (depth, line) in stmt {
            for _ in 0..=*depth {
                out.push_str(f.indent);
            }
            out.push_str(line);
            out.push('\n');
        }
    }
    let p = var(lang, param);
    let ret = match lang {
        Language::Python | Language::Ruby | Language::Go => format!("return {p}"),
        _ => format!("return {p};"),
    };
    out.push_str(f.indent);
    out.push_str(&ret);
    out.push('\n');
    out.push_str(f.footer);
    out
}

fn stmt_tokens(stmt: &Stmt) -> usize {
    stmt.iter().map(|(_, l)| token_count(l, TokenizerRule::default())).sum()
}

/// Corpus of functions with pseudo-word queries; see the module docs.
pub fn gen_synthetic(cfg: &SyntheticConfig) -> Result<Vec<CorpusRecord>> {
    if cfg.n == 0 || cfg.keywords_per_query == 0 {
        return Err(Error::InvalidConfig("n and keywords per query must be positive".into()));
    }
    if !(0.0..=1.0).contains(&cfg.long_fraction) {
        return Err(Error::InvalidConfig("long fraction must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut words = Words::new();
    let n_long = (cfg.n as f64 * cfg.long_fraction).round() as usize;
    let mut long_flags: Vec<bool> = (0..cfg.n).map(|i| i < n_long).collect();
    for i in (1..long_flags.len()).rev() {
        long_flags.swap(i, rng.random_range(0..=i));
    }
    let mut out = Vec::with_capacity(cfg.n);
    for (i, &long) in long_flags.iter().enumerate() {
        let lang = Language::ALL[rng.random_range(0..Language::ALL.len())];
        let keywords: Vec<String> = (0..cfg.keywords_per_query).map(|_| words.fresh(&mut rng)).collect();
        let name = ident(lang, &filler_ident(&mut rng));
        let param = ident(lang, &filler_ident(&mut rng));
        let target = if long {
            rng.random_range(CODE_MAX_TOKENS + 150..CODE_MAX_TOKENS + 500)
        } else {
            rng.random_range(40..CODE_MAX_TOKENS + 400)
        };
        let head = token_count(&frame(lang, &name, &param).head, TokenizerRule::default());
        let kw = keyword_stmt(lang, &keywords, &mut rng);
        let kw_len = stmt_tokens(&kw);
        let mut body: Vec<Stmt> = Vec::new();
        let mut total = head + kw_len;
        while total < target {
            let s = filler_stmt(lang, &mut rng);
            total += stmt_tokens(&s);
            body.push(s);
        }
        // Token offset at which each insertion slot starts.
        let mut prefix = Vec::with_capacity(body.len() + 1);
        let mut at = head;
        for s in &body {
            prefix.push(at);
            at += stmt_tokens(s);
        }
        prefix.push(at);
        let slots: Vec<usize> = (0..prefix.len())
            .filter(|&j| {
                if long {
                    prefix[j] >= CODE_MAX_TOKENS
                } else {
                    prefix[j] + kw_len <= CODE_MAX_TOKENS
                }
            })
            .collect();
        let slot = *slots.choose(&mut rng).expect("lengths leave a valid slot");
        body.insert(slot, kw);
        let code = render(lang, &name, &param, &body);
        out.push(CorpusRecord {
            id: format!("syn-{i:05}"),
            language: lang.name().to_string(),
            token_length: Some(token_count(&code, TokenizerRule::default())),
            query: Some(keywords.join(" ")),
            code,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCode {
    pub query: String,
    pub blocks: Vec<String>,
    /// Index of the block that shares words with the query.
    pub planted: usize,
}

/// Block-level training data: 3 to 6 blocks per code. The matching block mixes
/// the query's pseudo-words with logic words; the rest are boilerplate.
pub fn gen_planted(n: usize, seed: u64) -> Vec<PlantedCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = Words::new();
    let block_len = 24;
    (0..n)
        .map(|_| {
            let k = rng.random_range(3..=6);
            let planted = rng.random_range(0..k);
            let keywords: Vec<String> = (0..4).map(|_| words.fresh(&mut rng)).collect();
            let blocks = (0..k)
                .map(|b| {
                    let vocab = if b == planted { LOGIC } else { BOILERPLATE };
                    let mut toks: Vec<String> = (0..block_len)
                        .map(|_| vocab.choose(&mut rng).unwrap().to_string())
                        .collect();
                    if b == planted {
                        for (slot, kw) in toks.iter_mut().step_by(2).zip(&keywords) {
                            *slot = kw.clone();
                        }
                    }
                    toks.join(" ")
                })
                .collect();
            PlantedCode {
                query: keywords.join(" "),
                blocks,
                planted,
            }
        })
        .collect()
}
