use lcr_core::batch::encode_corpus;
use lcr_core::corpus::{parse_corpus, write_corpus};
use lcr_core::encode::{BlockInput, Encoder, HashingEncoder};
use lcr_core::fusion::{fuse, FusionMethod, FusionParams};
use lcr_core::index::build_index;
use lcr_core::pipeline::Pipeline;
use lcr_core::split::{split, SourceSnippet, SplitStrategy, Splitter};
use lcr_core::synthetic::{gen_synthetic, SyntheticConfig};
use lcr_core::window::{window, TailPolicy, WindowConfig};
use lcr_core::{Embedding64, Error};

fn corpus(n: usize) -> Vec<SourceSnippet> {
    let cfg = SyntheticConfig { n, seed: 11, ..SyntheticConfig::default() };
    gen_synthetic(&cfg).unwrap().iter().map(|r| r.snippet()).collect()
}

#[test]
fn index_entries_match_stepwise_composition() {
    let snippets = corpus(30);
    let win = WindowConfig::new(6, 3, TailPolicy::Include).unwrap();
    let enc = HashingEncoder::new(64).unwrap();
    let params = FusionParams::init_uniform(FusionMethod::Attn2Max, 64, 2);
    let pipeline = Pipeline::new(Splitter::builtin(SplitStrategy::Ast), win, enc.clone(), params.clone()).unwrap();
    let (index, report) = build_index(&snippets, &pipeline, 7).unwrap();
    assert!(report.skipped.is_empty());
    for (s, v) in snippets.iter().zip(index.vectors()) {
        let pieces = split(s, SplitStrategy::Ast).unwrap();
        let blocks: Vec<Embedding64> = window(&pieces, &win)
            .iter()
            .map(|b| enc.encode_block(BlockInput { key: "", text: &b.text }).unwrap())
            .collect();
        assert_eq!(v, &fuse(&blocks, &params).unwrap());
    }
}

#[test]
fn bad_snippet_does_not_abort_batch() {
    let mut snippets = corpus(10);
    snippets.insert(4, SourceSnippet::new("blank", "python", "   \n"));
    snippets.insert(7, SourceSnippet::new("cobol", "cobol", "MOVE A TO B."));
    let pipeline = Pipeline::new(
        Splitter::builtin(SplitStrategy::Ast),
        WindowConfig::default(),
        HashingEncoder::new(64).unwrap(),
        lcr_core::FusionParams64::zeros(FusionMethod::Attn1Mean, 64),
    )
    .unwrap();
    let out = encode_corpus(&pipeline, &snippets, 4).unwrap();
    assert_eq!(out.len(), 12);
    for (i, r) in out.iter().enumerate() {
        match i {
            4 => assert!(matches!(r, Err(Error::Snippet { id, .. }) if id == "blank")),
            7 => {
                let e = r.as_ref().unwrap_err();
                assert_eq!(e.code(), "UnsupportedLanguage");
                assert!(e.to_string().contains("cobol"));
            }
            _ => assert!(r.is_ok()),
        }
    }
}

#[test]
fn corpus_round_trips_through_jsonl() {
    let records = gen_synthetic(&SyntheticConfig { n: 100, seed: 3, ..SyntheticConfig::default() }).unwrap();
    let mut buf = Vec::new();
    write_corpus(&records, &mut buf).unwrap();
    let (back, report) = parse_corpus(buf.as_slice(), false).unwrap();
    assert_eq!(back, records);
    assert!(report.malformed.is_empty());
    let mut again = Vec::new();
    write_corpus(&back, &mut again).unwrap();
    assert_eq!(buf, again);
}
