//! In-batch contrastive training of the fusion head over frozen block
//! embeddings.
//!
//! For a batch of N pairs, `s_ij = cos(q_i, c_j) / tau` and the loss is the
//! mean cross-entropy of each query row against its own code. Gradients flow
//! analytically through the cosine and then through [`fuse_backward`].

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusRecord;
use crate::encode::{Embedding, Encoder};
use crate::pipeline::Pipeline;
use crate::error::{Error, Result};
use crate::fusion::{fuse, fuse_backward, FusionParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_blocks_per_code: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub temperature: f64,
    pub seed: u64,
    /// Add the code-to-query direction to the loss.
    pub symmetric: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 64,
            max_blocks_per_code: 6,
            epochs: 10,
            learning_rate: 0.1,
            temperature: 0.05,
            seed: 42,
            symmetric: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("{what} must be positive")));
        if self.batch_size == 0 {
            return bad("batch size");
        }
        if self.max_blocks_per_code == 0 {
            return bad("max blocks per code");
        }
        if self.epochs == 0 {
            return bad("epochs");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be finite and non-negative".into()));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad("temperature");
        }
        Ok(())
    }
}

/// A labelled query with every block embedding of its code.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainExample<T> {
    pub query: Embedding<T>,
    pub blocks: Vec<Embedding<T>>,
}

/// Encode every record that has a query. Records that fail are logged and
/// returned by id with their error.
pub fn examples_from_corpus<T: Scalar, E: Encoder<T>>(
    pipeline: &Pipeline<T, E>,
    records: &[CorpusRecord],
) -> (Vec<TrainExample<T>>, Vec<(String, Error)>) {
    let mut examples = Vec::new();
    let mut failed = Vec::new();
    for r in records {
        let Some(q) = r.query.as_deref() else { continue };
        let built = pipeline.block_embeddings(&r.snippet()).and_then(|blocks| {
            let query = pipeline.encode_query(Some(&r.id), q)?;
            Ok(TrainExample { query, blocks })
        });
        match built {
            Ok(ex) => examples.push(ex),
            Err(e) => {
                log::warn!("skipping `{}` for training: {e}", r.id);
                failed.push((r.id.clone(), e));
            }
        }
    }
    (examples, failed)
}

/// A query paired with the block subset actually fed to the head.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainPair<T> {
    pub query: Embedding<T>,
    pub blocks: Vec<Embedding<T>>,
}

/// Sorted indices of a uniform `max`-subset of `0..n`, or all of them when `n <= max`.
pub fn sample_indices<R: Rng + ?Sized>(n: usize, max: usize, rng: &mut R) -> Vec<usize> {
    if n <= max {
        return (0..n).collect();
    }
    let mut picked = rand::seq::index::sample(rng, n, max).into_vec();
    picked.sort_unstable();
    picked
}

pub fn sample_blocks<B: Clone, R: Rng + ?Sized>(blocks: &[B], max: usize, rng: &mut R) -> Vec<B> {
    sample_indices(blocks.len(), max, rng)
        .into_iter()
        .map(|i| blocks[i].clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossOutput<T> {
    pub loss: T,
    /// dLoss/dc_j for every fused code.
    pub code_grads: Vec<Vec<T>>,
}

/// In-batch softmax cross-entropy over scaled cosine similarities.
pub fn contrastive_loss<T: Scalar>(
    codes: &[Embedding<T>],
    queries: &[Embedding<T>],
    temperature: T,
    symmetric: bool,
) -> Result<LossOutput<T>> {
    let n = codes.len();
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    if queries.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: queries.len(),
        });
    }
    let code_norms: Vec<T> = codes.iter().map(Embedding::norm).collect();
    let query_norms: Vec<T> = queries.iter().map(Embedding::norm).collect();
    if code_norms.iter().chain(&query_norms).any(|x| x.is_zero()) {
        return Err(Error::ZeroVector);
    }
    let cos: Vec<Vec<T>> = queries
        .iter()
        .zip(&query_norms)
        .map(|(q, &nq)| {
            codes
                .iter()
                .zip(&code_norms)
                .map(|(c, &nc)| q.dot(c) / (nq * nc))
                .collect()
        })
        .collect();
    let s = |i: usize, j: usize| cos[i][j] / temperature;
    let nt = T::of(n as f64);

    // d_s[i][j] = dLoss/ds_ij
    let mut d_s = vec![vec![T::zero(); n]; n];
    let mut loss = T::zero();
    let directions: &[bool] = if symmetric { &[false, true] } else { &[false] };
    let weight = T::one() / T::of(directions.len() as f64);
    for &by_column in directions {
        for a in 0..n {
            let at = |b: usize| if by_column { (b, a) } else { (a, b) };
            let row: Vec<T> = (0..n).map(|b| { let (i, j) = at(b); s(i, j) }).collect();
            let m = row.iter().copied().fold(T::neg_infinity(), T::max);
            let exps: Vec<T> = row.iter().map(|&x| (x - m).exp()).collect();
            let z: T = exps.iter().copied().sum();
            loss += weight * (z.ln() + m - row[a]) / nt;
            for (b, &e) in exps.iter().enumerate() {
                let p = e / z;
                let target = if a == b { T::one() } else { T::zero() };
                let (i, j) = at(b);
                d_s[i][j] += weight * (p - target) / nt;
            }
        }
    }

    // dcos(q, c)/dc = q / (|q||c|) - cos * c / |c|^2
    let code_grads = (0..n)
        .map(|j| {
            let c = &codes[j].0;
            let nc = code_norms[j];
            let mut g = vec![T::zero(); c.len()];
            for i in 0..n {
                let coef = d_s[i][j] / temperature;
                if coef.is_zero() {
                    continue;
                }
                let q = &queries[i].0;
                let a = coef / (query_norms[i] * nc);
                let b = coef * cos[i][j] / (nc * nc);
                for ((gk, &qk), &ck) in g.iter_mut().zip(q).zip(c) {
                    *gk += a * qk - b * ck;
                }
            }
            g
        })
        .collect();
    Ok(LossOutput { loss, code_grads })
}

/// Batch loss and its gradient with respect to the fusion parameters.
pub fn loss_and_grad<T: Scalar>(
    pairs: &[TrainPair<T>],
    params: &FusionParams<T>,
    temperature: T,
    symmetric: bool,
) -> Result<(T, FusionParams<T>)> {
    let codes = pairs
        .iter()
        .map(|p| fuse(&p.blocks, params))
        .collect::<Result<Vec<_>>>()?;
    let queries: Vec<Embedding<T>> = pairs.iter().map(|p| p.query.clone()).collect();
    let out = contrastive_loss(&codes, &queries, temperature, symmetric)?;
    let mut grads = FusionParams::zeros(params.method, params.dim);
    for (pair, g) in pairs.iter().zip(&out.code_grads) {
        fuse_backward(&pair.blocks, params, g, &mut grads)?;
    }
    Ok((out.loss, grads))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome<T> {
    pub params: FusionParams<T>,
    /// Mean per-pair loss of each epoch, measured before each batch's update.
    pub epoch_losses: Vec<f64>,
}

impl<T> TrainOutcome<T> {
    pub fn loss_csv(&self) -> String {
        let mut out = String::from("epoch,loss\n");
        for (e, l) in self.epoch_losses.iter().enumerate() {
            out.push_str(&format!("{},{}\n", e + 1, l));
        }
        out
    }
}

/// Plain SGD on the fusion head. Each epoch shuffles the examples, draws a
/// fresh block subset per example, and steps once per batch.
pub fn train<T: Scalar>(
    examples: &[TrainExample<T>],
    initial: FusionParams<T>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    initial.validate()?;
    if examples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = examples.iter().position(|e| e.blocks.is_empty()) {
        return Err(Error::ShapeMismatch(format!("training example {bad} has no blocks")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = initial;
    let tau = T::of(cfg.temperature);
    let step = T::of(-cfg.learning_rate);
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for (batch, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let pairs: Vec<TrainPair<T>> = chunk
                .iter()
                .map(|&i| TrainPair {
                    query: examples[i].query.clone(),
                    blocks: sample_blocks(&examples[i].blocks, cfg.max_blocks_per_code, &mut rng),
                })
                .collect();
            let (loss, grads) = loss_and_grad(&pairs, &params, tau, cfg.symmetric)?;
            if !loss.is_finite() || grads.flat().iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteLoss { epoch, batch });
            }
            total += loss.as_f64() * chunk.len() as f64;
            params.add_scaled(&grads, step);
        }
        let mean = total / examples.len() as f64;
        log::info!("epoch {}: loss {mean:.6}", epoch + 1);
        epoch_losses.push(mean);
    }
    Ok(TrainOutcome { params, epoch_losses })
}
