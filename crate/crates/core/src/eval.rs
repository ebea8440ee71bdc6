//! MRR, recall@k and length-bucketed reports.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{search_ranker, Ranker};

pub const RECALL_KS: [usize; 4] = [1, 5, 10, 100];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub query: String,
    pub ground_truth: String,
    pub token_length: usize,
}

pub fn mrr(ranks: &[usize]) -> Result<f64> {
    if ranks.is_empty() {
        return Err(Error::EmptyInput);
    }
    if ranks.contains(&0) {
        return Err(Error::InvalidConfig("ranks are 1-based".into()));
    }
    Ok(ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / ranks.len() as f64)
}

pub fn recall_at_k(ranks: &[usize], k: usize) -> Result<f64> {
    if ranks.is_empty() {
        return Err(Error::EmptyInput);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    Ok(ranks.iter().filter(|&&r| r <= k).count() as f64 / ranks.len() as f64)
}

/// Sizes of `n_buckets` near-equal groups over `n` items, larger groups first.
pub fn bucket_sizes(n: usize, n_buckets: usize) -> Vec<usize> {
    let (q, r) = (n / n_buckets, n % n_buckets);
    (0..n_buckets).map(|i| q + usize::from(i < r)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    /// Smallest token length in the bucket.
    pub min_len: usize,
    /// One past the largest token length in the bucket.
    pub max_len: usize,
    /// Positions in the original query list.
    pub members: Vec<usize>,
}

/// Sort by token length (stable) and cut into near-equal quantile groups.
/// Empty groups are dropped when there are fewer queries than buckets.
pub fn bucket_by_length(queries: &[QueryRecord], n_buckets: usize) -> Vec<Bucket> {
    let mut order: Vec<usize> = (0..queries.len()).collect();
    order.sort_by_key(|&i| queries[i].token_length);
    let mut rest = order.as_slice();
    let mut out = Vec::new();
    for size in bucket_sizes(queries.len(), n_buckets.max(1)) {
        if size == 0 {
            continue;
        }
        let (head, tail) = rest.split_at(size);
        rest = tail;
        out.push(Bucket {
            min_len: queries[head[0]].token_length,
            max_len: queries[head[size - 1]].token_length + 1,
            members: head.to_vec(),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketReport {
    pub min_len: usize,
    pub max_len: usize,
    pub queries: usize,
    pub mrr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub label: String,
    pub queries: usize,
    pub mrr: f64,
    pub recall_at_1: f64,
    pub recall_at_5: f64,
    pub recall_at_10: f64,
    pub recall_at_100: f64,
    pub buckets: Vec<BucketReport>,
    pub ranks: Vec<usize>,
}

impl EvalReport {
    pub fn from_ranks(label: &str, queries: &[QueryRecord], ranks: Vec<usize>, n_buckets: usize) -> Result<Self> {
        if queries.len() != ranks.len() {
            return Err(Error::LengthMismatch {
                expected: queries.len(),
                found: ranks.len(),
            });
        }
        let buckets = bucket_by_length(queries, n_buckets)
            .into_iter()
            .map(|b| {
                let rs: Vec<usize> = b.members.iter().map(|&i| ranks[i]).collect();
                Ok(BucketReport {
                    min_len: b.min_len,
                    max_len: b.max_len,
                    queries: rs.len(),
                    mrr: mrr(&rs)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalReport {
            label: label.to_string(),
            queries: ranks.len(),
            mrr: mrr(&ranks)?,
            recall_at_1: recall_at_k(&ranks, 1)?,
            recall_at_5: recall_at_k(&ranks, 5)?,
            recall_at_10: recall_at_k(&ranks, 10)?,
            recall_at_100: recall_at_k(&ranks, 100)?,
            buckets,
            ranks,
        })
    }
}

/// Rank every query's ground truth against the ranker's full candidate pool.
pub fn evaluate<R: Ranker + Sync + ?Sized>(
    label: &str,
    ranker: &R,
    queries: &[QueryRecord],
    n_buckets: usize,
) -> Result<EvalReport> {
    if queries.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ranks = queries
        .par_iter()
        .map(|q| {
            let r = search_ranker(ranker, Some(&q.ground_truth), &q.query, 0, Some(&q.ground_truth))?;
            Ok(r.ground_truth_rank.expect("ground truth was given"))
        })
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_ranks(label, queries, ranks, n_buckets)
}

/// Text table with one row per length bucket and one MRR column per report.
/// Reports are expected to share the same query set.
pub fn render_table(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    let mut header = format!("{:<14}{:>10}", "Token length", "#Queries");
    for r in reports {
        write!(header, "{:>16}", r.label).unwrap();
    }
    writeln!(out, "{header}").unwrap();
    if let Some(first) = reports.first() {
        for (b, bucket) in first.buckets.iter().enumerate() {
            write!(out, "{:<14}{:>10}", format!("[{},{})", bucket.min_len, bucket.max_len), bucket.queries).unwrap();
            for r in reports {
                let v = r.buckets.get(b).map_or(f64::NAN, |x| x.mrr);
                write!(out, "{v:>16.4}").unwrap();
            }
            out.push('\n');
        }
        write!(out, "{:<14}{:>10}", "All", first.queries).unwrap();
        for r in reports {
            write!(out, "{:>16.4}", r.mrr).unwrap();
        }
        out.push('\n');
        out.push('\n');
        writeln!(out, "{:<16}{:>8}{:>8}{:>8}{:>8}{:>8}", "", "MRR", "R@1", "R@5", "R@10", "R@100").unwrap();
        for r in reports {
            writeln!(
                out,
                "{:<16}{:>8.4}{:>7.1}%{:>7.1}%{:>7.1}%{:>7.1}%",
                r.label,
                r.mrr,
                100.0 * r.recall_at_1,
                100.0 * r.recall_at_5,
                100.0 * r.recall_at_10,
                100.0 * r.recall_at_100
            )
            .unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mrr_examples() {
        assert_eq!(mrr(&[1]).unwrap(), 1.0);
        assert!((mrr(&[1, 2, 4]).unwrap() - 7.0 / 12.0).abs() < 1e-15);
        assert!(matches!(mrr(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn recall_examples() {
        assert!((recall_at_k(&[1, 6, 11], 5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(recall_at_k(&[1, 6, 11], 100).unwrap(), 1.0);
        assert!(matches!(recall_at_k(&[], 1), Err(Error::EmptyInput)));
    }

    fn records(lengths: &[usize]) -> Vec<QueryRecord> {
        lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| QueryRecord {
                query: format!("q{i}"),
                ground_truth: format!("c{i}"),
                token_length: l,
            })
            .collect()
    }

    #[test]
    fn fourteen_thousand_split() {
        assert_eq!(bucket_sizes(14918, 5), [2984, 2984, 2984, 2983, 2983]);
        let b = bucket_by_length(&records(&(0..14918).rev().collect::<Vec<_>>()), 5);
        assert_eq!(b.iter().map(|x| x.members.len()).collect::<Vec<_>>(), [2984, 2984, 2984, 2983, 2983]);
        assert_eq!((b[0].min_len, b[0].max_len), (0, 2984));
    }

    #[test]
    fn five_queries_give_singletons() {
        let b = bucket_by_length(&records(&[50, 10, 40, 20, 30]), 5);
        assert!(b.iter().all(|x| x.members.len() == 1));
        assert_eq!(b[0].members, [1]);
        assert_eq!(b[4].members, [0]);
    }

    #[test]
    fn report_and_table() {
        let qs = records(&[10, 20, 30, 40, 50]);
        let r = EvalReport::from_ranks("blocks", &qs, vec![1, 2, 4, 1, 200], 5).unwrap();
        assert!(r.recall_at_1 <= r.recall_at_5 && r.recall_at_5 <= r.recall_at_10 && r.recall_at_10 <= r.recall_at_100);
        assert_eq!(r.buckets.iter().map(|b| b.queries).sum::<usize>(), 5);
        assert_eq!(r.buckets[1].mrr, 0.5);
        let table = render_table(&[r]);
        assert!(table.contains("[20,21)"));
        assert!(table.contains("blocks"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn buckets_are_ordered_and_balanced(lengths in prop::collection::vec(0usize..2000, 1..300), n in 1usize..8) {
            let b = bucket_by_length(&records(&lengths), n);
            let sizes: Vec<usize> = b.iter().map(|x| x.members.len()).collect();
            prop_assert_eq!(sizes.iter().sum::<usize>(), lengths.len());
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            let mut sorted = lengths.clone();
            sorted.sort();
            let mut at = 0;
            for (i, x) in b.iter().enumerate() {
                let got: Vec<usize> = x.members.iter().map(|&m| lengths[m]).collect();
                prop_assert_eq!(&got[..], &sorted[at..at + got.len()]);
                at += got.len();
                if i + 1 < b.len() {
                    prop_assert!(x.max_len - 1 <= b[i + 1].min_len);
                }
            }
        }

        #[test]
        fn recall_is_monotone_in_k(ranks in prop::collection::vec(1usize..500, 1..100)) {
            let mut prev = 0.0;
            for k in 1..=500 {
                let r = recall_at_k(&ranks, k).unwrap();
                prop_assert!(r >= prev);
                prev = r;
            }
            prop_assert!(mrr(&ranks).unwrap() >= recall_at_k(&ranks, 1).unwrap());
        }
    }
}
