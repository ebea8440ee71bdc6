//! Fusing the k block embeddings of one snippet into a single code vector.
//!
//! Pooling takes the element-wise mean or max. Attention scores every block
//! with a small linear head (one layer `w·e + b`, or two layers
//! `w2·tanh(W1·e + b1) + b2` with a 128-wide hidden layer), softmaxes the
//! scores into weights and returns the weighted sum. The combined variants
//! add the pooled vector to the weighted sum.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::encode::Embedding;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const ATTENTION_HIDDEN: usize = 128;
const PARAMS_FORMAT: &str = "lcr-fusion-params";
const PARAMS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolMode {
    Mean,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttentionDepth {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FusionMethod {
    Mean,
    Max,
    Attn1,
    Attn2,
    #[default]
    Attn1Mean,
    Attn2Mean,
    Attn1Max,
    Attn2Max,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 8] = [
        FusionMethod::Mean,
        FusionMethod::Max,
        FusionMethod::Attn1,
        FusionMethod::Attn2,
        FusionMethod::Attn1Mean,
        FusionMethod::Attn2Mean,
        FusionMethod::Attn1Max,
        FusionMethod::Attn2Max,
    ];

    pub fn attention(self) -> Option<AttentionDepth> {
        use FusionMethod::*;
        match self {
            Mean | Max => None,
            Attn1 | Attn1Mean | Attn1Max => Some(AttentionDepth::One),
            Attn2 | Attn2Mean | Attn2Max => Some(AttentionDepth::Two),
        }
    }

    pub fn pooling(self) -> Option<PoolMode> {
        use FusionMethod::*;
        match self {
            Mean | Attn1Mean | Attn2Mean => Some(PoolMode::Mean),
            Max | Attn1Max | Attn2Max => Some(PoolMode::Max),
            Attn1 | Attn2 => None,
        }
    }

    pub fn name(self) -> &'static str {
        use FusionMethod::*;
        match self {
            Mean => "mean",
            Max => "max",
            Attn1 => "attn1",
            Attn2 => "attn2",
            Attn1Mean => "attn1+mean",
            Attn2Mean => "attn2+mean",
            Attn1Max => "attn1+max",
            Attn2Max => "attn2+max",
        }
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.replace('_', "+");
        FusionMethod::ALL
            .into_iter()
            .find(|m| m.name() == normalized)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown fusion method `{s}`")))
    }
}

impl Serialize for FusionMethod {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for FusionMethod {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Learnable attention head. `w1` is `hidden × dim`, row-major; `w2` has
/// `hidden` entries for the two-layer head and `dim` for the one-layer head.
/// Pooling-only methods carry no weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FusionParams<T> {
    pub method: FusionMethod,
    pub dim: usize,
    pub hidden: usize,
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct ParamsFile<T> {
    format: String,
    version: u32,
    #[serde(flatten)]
    params: FusionParams<T>,
}

impl<T: Scalar> FusionParams<T> {
    /// All-zero head: uniform attention, so `attnX+mean` starts as twice the mean.
    pub fn zeros(method: FusionMethod, dim: usize) -> Self {
        let hidden = match method.attention() {
            Some(AttentionDepth::Two) => ATTENTION_HIDDEN,
            _ => 0,
        };
        let w2_len = match method.attention() {
            None => 0,
            Some(AttentionDepth::One) => dim,
            Some(AttentionDepth::Two) => hidden,
        };
        FusionParams {
            method,
            dim,
            hidden,
            w1: vec![T::zero(); hidden * dim],
            b1: vec![T::zero(); hidden],
            w2: vec![T::zero(); w2_len],
            b2: T::zero(),
        }
    }

    /// Weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, biases zero.
    pub fn init_uniform(method: FusionMethod, dim: usize, seed: u64) -> Self {
        let mut p = FusionParams::zeros(method, dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fill = |v: &mut [T], fan_in: usize| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for x in v {
                *x = T::of(rng.random_range(-bound..=bound));
            }
        };
        fill(&mut p.w1, dim);
        let w2_fan_in = if p.hidden > 0 { p.hidden } else { dim };
        fill(&mut p.w2, w2_fan_in);
        p
    }

    pub fn validate(&self) -> Result<()> {
        let expected = FusionParams::<T>::zeros(self.method, self.dim);
        let shapes = [
            ("hidden", self.hidden, expected.hidden),
            ("w1", self.w1.len(), expected.w1.len()),
            ("b1", self.b1.len(), expected.b1.len()),
            ("w2", self.w2.len(), expected.w2.len()),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(Error::ShapeMismatch(format!(
                    "{name} has {got} entries, {} with dim {} needs {want}",
                    self.method, self.dim
                )));
            }
        }
        if !self.flat().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig("fusion parameters contain non-finite values".into()));
        }
        Ok(())
    }

    pub fn num_params(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + usize::from(self.method.attention().is_some())
    }

    /// Parameters flattened in the order `w1, b1, w2, b2`.
    pub fn flat(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.num_params());
        v.extend_from_slice(&self.w1);
        v.extend_from_slice(&self.b1);
        v.extend_from_slice(&self.w2);
        if self.method.attention().is_some() {
            v.push(self.b2);
        }
        v
    }

    pub fn set_flat(&mut self, values: &[T]) -> Result<()> {
        if values.len() != self.num_params() {
            return Err(Error::LengthMismatch {
                expected: self.num_params(),
                found: values.len(),
            });
        }
        let (w1, rest) = values.split_at(self.w1.len());
        let (b1, rest) = rest.split_at(self.b1.len());
        let (w2, rest) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        if let Some(&b2) = rest.first() {
            self.b2 = b2;
        }
        Ok(())
    }

    /// `self += scale * other`, element-wise over matching shapes.
    pub fn add_scaled(&mut self, other: &FusionParams<T>, scale: T) {
        let axpy = |dst: &mut [T], src: &[T]| {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        };
        axpy(&mut self.w1, &other.w1);
        axpy(&mut self.b1, &other.b1);
        axpy(&mut self.w2, &other.w2);
        self.b2 += scale * other.b2;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ParamsFile {
            format: PARAMS_FORMAT.to_string(),
            version: PARAMS_VERSION,
            params: self.clone(),
        })
        .expect("fusion params serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ParamsFile<T> = serde_json::from_str(text)?;
        if file.format != PARAMS_FORMAT || file.version != PARAMS_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported params file {} v{}",
                file.format, file.version
            )));
        }
        file.params.validate()?;
        Ok(file.params)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::FileNotFound(path.to_path_buf()));
        }
        FusionParams::from_json(&std::fs::read_to_string(path)?)
    }

    /// SHA-256 of the serialized parameters.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    fn hidden_activations(&self, e: &[T]) -> Vec<T> {
        self.w1
            .chunks_exact(self.dim)
            .zip(&self.b1)
            .map(|(row, &b)| (row.iter().zip(e).map(|(&w, &x)| w * x).sum::<T>() + b).tanh())
            .collect()
    }

    fn logit(&self, e: &[T]) -> T {
        match self.method.attention() {
            Some(AttentionDepth::One) => dot(&self.w2, e) + self.b2,
            Some(AttentionDepth::Two) => dot(&self.w2, &self.hidden_activations(e)) + self.b2,
            None => T::zero(),
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionWeights<T> {
    pub logits: Vec<T>,
    pub alphas: Vec<T>,
}

pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn check_inputs<T: Scalar>(embs: &[Embedding<T>], dim: Option<usize>) -> Result<usize> {
    let first = embs.first().ok_or(Error::EmptyInput)?;
    let d = dim.unwrap_or(first.dim());
    if let Some(bad) = embs.iter().position(|e| e.dim() != d) {
        return Err(Error::ShapeMismatch(format!(
            "block {bad} has dim {}, expected {d}",
            embs[bad].dim()
        )));
    }
    Ok(d)
}

pub fn pool<T: Scalar>(embs: &[Embedding<T>], mode: PoolMode) -> Result<Embedding<T>> {
    let d = check_inputs(embs, None)?;
    let mut out = embs[0].clone();
    for e in &embs[1..] {
        for (o, &v) in out.0.iter_mut().zip(&e.0) {
            match mode {
                PoolMode::Mean => *o += v,
                PoolMode::Max => *o = o.max(v),
            }
        }
    }
    if mode == PoolMode::Mean {
        let k = T::of(embs.len() as f64);
        out.0.iter_mut().for_each(|o| *o = *o / k);
    }
    debug_assert_eq!(out.dim(), d);
    Ok(out)
}

pub fn attention_weights<T: Scalar>(
    embs: &[Embedding<T>],
    params: &FusionParams<T>,
) -> Result<AttentionWeights<T>> {
    if params.method.attention().is_none() {
        return Err(Error::InvalidConfig(format!(
            "fusion method {} has no attention head",
            params.method
        )));
    }
    check_inputs(embs, Some(params.dim))?;
    let logits: Vec<T> = embs.iter().map(|e| params.logit(&e.0)).collect();
    let alphas = softmax(&logits);
    Ok(AttentionWeights { logits, alphas })
}

pub fn fuse<T: Scalar>(embs: &[Embedding<T>], params: &FusionParams<T>) -> Result<Embedding<T>> {
    let method = params.method;
    let d = check_inputs(embs, method.attention().map(|_| params.dim))?;
    let pooled = method.pooling().map(|m| pool(embs, m)).transpose()?;
    let Some(_) = method.attention() else {
        return Ok(pooled.expect("pooling-only method"));
    };
    let weights = attention_weights(embs, params)?;
    let mut out = Embedding::zeros(d);
    for (e, &a) in embs.iter().zip(&weights.alphas) {
        for (o, &v) in out.0.iter_mut().zip(&e.0) {
            *o += a * v;
        }
    }
    if let Some(p) = pooled {
        for (o, v) in out.0.iter_mut().zip(p.0) {
            *o += v;
        }
    }
    Ok(out)
}

/// Accumulate into `grads` the gradient of a scalar loss with respect to the
/// head parameters, given `grad_out = dL/d(fuse(embs, params))`. Pooling terms
/// carry no parameters, so only the attention path contributes.
pub fn fuse_backward<T: Scalar>(
    embs: &[Embedding<T>],
    params: &FusionParams<T>,
    grad_out: &[T],
    grads: &mut FusionParams<T>,
) -> Result<()> {
    let Some(depth) = params.method.attention() else {
        return Ok(());
    };
    check_inputs(embs, Some(params.dim))?;
    if grad_out.len() != params.dim {
        return Err(Error::ShapeMismatch(format!(
            "output gradient has {} entries, expected {}",
            grad_out.len(),
            params.dim
        )));
    }
    let hidden: Vec<Vec<T>> = match depth {
        AttentionDepth::Two => embs.iter().map(|e| params.hidden_activations(&e.0)).collect(),
        AttentionDepth::One => Vec::new(),
    };
    let logits: Vec<T> = match depth {
        AttentionDepth::One => embs.iter().map(|e| dot(&params.w2, &e.0) + params.b2).collect(),
        AttentionDepth::Two => hidden.iter().map(|h| dot(&params.w2, h) + params.b2).collect(),
    };
    let alphas = softmax(&logits);
    // dL/d(alpha_i) = grad_out . e_i, then back through the softmax.
    let d_alpha: Vec<T> = embs.iter().map(|e| dot(grad_out, &e.0)).collect();
    let mean_d: T = alphas.iter().zip(&d_alpha).map(|(&a, &g)| a * g).sum();
    for (i, e) in embs.iter().enumerate() {
        let d_logit = alphas[i] * (d_alpha[i] - mean_d);
        grads.b2 += d_logit;
        match depth {
            AttentionDepth::One => {
                for (g, &x) in grads.w2.iter_mut().zip(&e.0) {
                    *g += d_logit * x;
                }
            }
            AttentionDepth::Two => {
                let h = &hidden[i];
                for (j, &hj) in h.iter().enumerate() {
                    grads.w2[j] += d_logit * hj;
                    let dz = d_logit * params.w2[j] * (T::one() - hj * hj);
                    grads.b1[j] += dz;
                    let row = &mut grads.w1[j * params.dim..(j + 1) * params.dim];
                    for (g, &x) in row.iter_mut().zip(&e.0) {
                        *g += dz * x;
                    }
                }
            }
        }
    }
    Ok(())
}
