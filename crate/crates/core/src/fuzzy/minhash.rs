use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use xxhash_rust::xxh3::xxh3_64;

use super::normalize::normalize_for_dedup;
use crate::rng::SplitMix64;

/// Shingles folded into one pass over the hash functions.
const LANES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MinHashParams {
    /// Tokens per shingle.
    pub ngram: usize,
    /// Signature values hashed together into one bucket key.
    pub hashes_per_bucket: usize,
    /// Number of bucket tables.
    pub buckets: usize,
    pub seed: u64,
}

impl Default for MinHashParams {
    fn default() -> Self {
        Self { ngram: 5, hashes_per_bucket: 20, buckets: 450, seed: 0 }
    }
}

impl MinHashParams {
    /// Signature length.
    pub fn num_hashes(&self) -> usize {
        self.hashes_per_bucket * self.buckets
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinHashError {
    EmptyShingleSet,
    ParamMismatch,
    /// Signature length does not equal `hashes_per_bucket * buckets`.
    LengthMismatch { expected: usize, found: usize },
    /// A parameter is zero, or a similarity lies outside [0, 1].
    DomainError,
}

impl fmt::Display for MinHashError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinHashError::EmptyShingleSet => f.write_str("cannot sign an empty shingle set"),
            MinHashError::ParamMismatch => f.write_str("signatures were built with different parameters"),
            MinHashError::LengthMismatch { expected, found } => {
                write!(f, "signature has {found} values, expected {expected}")
            }
            MinHashError::DomainError => f.write_str("argument outside its valid range"),
        }
    }
}

impl core::error::Error for MinHashError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinHashSignature {
    params: MinHashParams,
    values: Vec<u64>,
}

impl MinHashSignature {
    pub fn from_parts(params: MinHashParams, values: Vec<u64>) -> Result<Self, MinHashError> {
        if values.len() != params.num_hashes() {
            return Err(MinHashError::LengthMismatch { expected: params.num_hashes(), found: values.len() });
        }
        Ok(Self { params, values })
    }

    pub fn params(&self) -> &MinHashParams {
        &self.params
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Unique space-joined windows of `n` consecutive tokens. Fewer than `n`
/// tokens give a single shingle of all of them; no tokens give none.
pub fn shingle_set<S: AsRef<str>>(tokens: &[S], n: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for_each_shingle(tokens, n, |s| {
        out.insert(String::from(s));
    });
    out
}

/// Base hashes of [`shingle_set`], sorted and deduplicated.
pub fn shingle_hashes<S: AsRef<str>>(tokens: &[S], n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(tokens.len());
    for_each_shingle(tokens, n, |s| out.push(xxh3_64(s.as_bytes())));
    out.sort_unstable();
    out.dedup();
    out
}

fn for_each_shingle<S: AsRef<str>>(tokens: &[S], n: usize, mut f: impl FnMut(&str)) {
    let n = n.max(1);
    if tokens.is_empty() {
        return;
    }
    let mut buf = String::new();
    let width = n.min(tokens.len());
    for window in tokens.windows(width) {
        buf.clear();
        for (i, t) in window.iter().enumerate() {
            if i > 0 {
                buf.push(' ');
            }
            buf.push_str(t.as_ref());
        }
        f(&buf);
    }
}

/// A family of `num_hashes` hash functions `x -> (a*x + b) mod 2^64`, with
/// odd multipliers and addends drawn from the seed. Each is a bijection, so
/// two signatures agree at a position exactly when the same shingle hash
/// is minimal for both.
#[derive(Debug, Clone)]
pub struct MinHasher {
    params: MinHashParams,
    mul: Vec<u64>,
    add: Vec<u64>,
}

impl MinHasher {
    pub fn new(params: MinHashParams) -> Result<Self, MinHashError> {
        if params.ngram == 0 || params.hashes_per_bucket == 0 || params.buckets == 0 {
            return Err(MinHashError::DomainError);
        }
        let mut rng = SplitMix64::new(params.seed);
        let k = params.num_hashes();
        let mut mul = Vec::with_capacity(k);
        let mut add = Vec::with_capacity(k);
        for _ in 0..k {
            mul.push(rng.next_u64() | 1);
            add.push(rng.next_u64());
        }
        Ok(Self { params, mul, add })
    }

    pub fn params(&self) -> &MinHashParams {
        &self.params
    }

    /// Signs a set of base hashes, as produced by [`shingle_hashes`].
    pub fn sign_hashes(&self, hashes: &[u64]) -> Result<MinHashSignature, MinHashError> {
        if hashes.is_empty() {
            return Err(MinHashError::EmptyShingleSet);
        }
        let mut values = alloc::vec![u64::MAX; self.mul.len()];
        let mut groups = hashes.chunks_exact(LANES);
        for xs in &mut groups {
            for ((v, &a), &b) in values.iter_mut().zip(&self.mul).zip(&self.add) {
                let mut m = *v;
                for &x in xs {
                    m = m.min(a.wrapping_mul(x).wrapping_add(b));
                }
                *v = m;
            }
        }
        for &x in groups.remainder() {
            for ((v, &a), &b) in values.iter_mut().zip(&self.mul).zip(&self.add) {
                *v = (*v).min(a.wrapping_mul(x).wrapping_add(b));
            }
        }
        Ok(MinHashSignature { params: self.params, values })
    }

    pub fn sign_shingles<'a>(&self, shingles: impl IntoIterator<Item = &'a str>) -> Result<MinHashSignature, MinHashError> {
        let hashes: Vec<u64> = shingles.into_iter().map(|s| xxh3_64(s.as_bytes())).collect();
        self.sign_hashes(&hashes)
    }

    /// Normalizes, shingles and signs `text`.
    pub fn sign_text(&self, text: &str) -> Result<MinHashSignature, MinHashError> {
        let tokens = normalize_for_dedup(text).into_tokens();
        self.sign_hashes(&shingle_hashes(&tokens, self.params.ngram))
    }
}

/// Fraction of signature positions holding equal values.
pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64, MinHashError> {
    if a.params != b.params {
        return Err(MinHashError::ParamMismatch);
    }
    let same = a.values.iter().zip(&b.values).filter(|(x, y)| x == y).count();
    Ok(same as f64 / a.values.len() as f64)
}

/// Probability that two documents of Jaccard similarity `s` share at least
/// one of `buckets` buckets of `hashes_per_bucket` values:
/// `1 - (1 - s^hashes_per_bucket)^buckets`.
pub fn match_probability(s: f64, hashes_per_bucket: usize, buckets: usize) -> Result<f64, MinHashError> {
    if !(0.0..=1.0).contains(&s) || hashes_per_bucket == 0 || buckets == 0 {
        return Err(MinHashError::DomainError);
    }
    let miss_one = libm::log1p(-libm::pow(s, hashes_per_bucket as f64));
    Ok(0.0 - libm::expm1(buckets as f64 * miss_one))
}
