//! Truncated tensor algebra: signatures of piecewise-linear paths.
//!
//! The signature of a path collects its iterated integrals, one dense
//! rank-k tensor per level `k = 1..=m` (the level-0 scalar is always 1 and
//! kept implicit). Two facts drive every routine here:
//!
//! * the signature of a single straight segment is the tensor exponential
//!   of its increment — level k is `inc^(x)k / k!`;
//! * signatures compose over concatenation by Chen's identity —
//!   `out_k = sum_{i+j=k} a_i (x) b_j`.
//!
//! A path signature is therefore a left-to-right Chen product of segment
//! exponentials. Everything is plain dense `f64` arithmetic; tensors at
//! level k are stored row-major (first letter varies slowest), so the word
//! `(l1..lk)` lives at index `l1*d^(k-1) + ... + lk`.

use crate::error::{Result, SigError};
use crate::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSignature {
    d: usize,
    m: usize,
    /// `levels[k-1]` holds the rank-k tensor, `d^k` entries.
    levels: Vec<Vec<f64>>,
}

/// Dense outer product: `out[i * len(b) + j] = a[i] * b[j]`.
fn outer(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() * b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        let row = &mut out[i * b.len()..(i + 1) * b.len()];
        for (slot, &bj) in row.iter_mut().zip(b) {
            *slot += ai * bj;
        }
    }
    out
}

fn axpy(dst: &mut [f64], src: &[f64], scale: f64) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += scale * s;
    }
}

/// Graded product of two zero-scalar tensor families:
/// `(a * b)_n = sum_{i+j=n, i,j>=1} a_i (x) b_j`, truncated at m.
fn graded_mul(a: &[Vec<f64>], b: &[Vec<f64>], m: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..m).map(|k| vec![0.0; a[k].len().max(b[k].len())]).collect();
    for n in 1..=m {
        for i in 1..n {
            let j = n - i;
            let prod = outer(&a[i - 1], &b[j - 1]);
            axpy(&mut out[n - 1], &prod, 1.0);
        }
    }
    out
}

impl TruncatedSignature {
    fn check_params(d: usize, m: usize) -> Result<()> {
        if d < 1 {
            return Err(SigError::InvalidParameter("dimension d must be >= 1".into()));
        }
        if m < 1 {
            return Err(SigError::InvalidParameter("depth m must be >= 1".into()));
        }
        Ok(())
    }

    /// The algebra unit: scalar 1, all levels zero. Neutral for
    /// [`chen_product`].
    pub fn identity(d: usize, m: usize) -> Result<Self> {
        Self::check_params(d, m)?;
        Ok(TruncatedSignature {
            d,
            m,
            levels: (1..=m).map(|k| vec![0.0; d.pow(k as u32)]).collect(),
        })
    }

    /// Wraps raw levels (sizes must already be `d^k`).
    pub(crate) fn from_levels(d: usize, m: usize, levels: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(levels.len(), m);
        debug_assert!(levels.iter().enumerate().all(|(i, l)| l.len() == d.pow(i as u32 + 1)));
        TruncatedSignature { d, m, levels }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.m
    }

    /// The rank-k tensor, `k in 1..=m`.
    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k - 1]
    }

    /// Entry addressed by a word of letters in `0..d`.
    pub fn entry(&self, word: &[usize]) -> f64 {
        self.levels[word.len() - 1][word_index(self.d, word)]
    }

    /// Largest absolute entry across all levels.
    pub fn max_abs(&self) -> f64 {
        self.levels
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Flat tensor index of a word (letters in `0..d`, first letter slowest).
pub fn word_index(d: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &l| {
        debug_assert!(l < d);
        acc * d + l
    })
}

/// Signature of one straight segment: the tensor exponential of its
/// increment, level k = `inc^(x)k / k!`.
pub fn segment_signature(increment: &[f64], m: usize) -> Result<TruncatedSignature> {
    let d = increment.len();
    TruncatedSignature::check_params(d, m)?;
    if !increment.iter().all(|c| c.is_finite()) {
        return Err(SigError::InvalidParameter("increment must be finite".into()));
    }
    let mut levels = Vec::with_capacity(m);
    levels.push(increment.to_vec());
    for k in 2..=m {
        let prev = &levels[k - 2];
        let mut next = outer(prev, increment);
        let inv_k = 1.0 / k as f64;
        for v in &mut next {
            *v *= inv_k;
        }
        levels.push(next);
    }
    Ok(TruncatedSignature { d, m, levels })
}

/// Chen's identity: the signature of a concatenation is the truncated
/// tensor product of the parts' signatures,
/// `out_k = a_k + b_k + sum_{i+j=k, i,j>=1} a_i (x) b_j`.
pub fn chen_product(
    a: &TruncatedSignature,
    b: &TruncatedSignature,
) -> Result<TruncatedSignature> {
    if a.d != b.d || a.m != b.m {
        return Err(SigError::ShapeMismatch(format!(
            "chen_product: (d={}, m={}) vs (d={}, m={})",
            a.d, a.m, b.d, b.m
        )));
    }
    let mut levels = Vec::with_capacity(a.m);
    for k in 1..=a.m {
        let mut out = a.levels[k - 1].clone();
        axpy(&mut out, &b.levels[k - 1], 1.0);
        for i in 1..k {
            let prod = outer(&a.levels[i - 1], &b.levels[k - i - 1]);
            axpy(&mut out, &prod, 1.0);
        }
        levels.push(out);
    }
    Ok(TruncatedSignature { d: a.d, m: a.m, levels })
}

/// Signature of a piecewise-linear path: the Chen product of its segment
/// exponentials, folded left to right.
///
/// Level 1 is set to `end - start` directly rather than by summing
/// increments — the two are mathematically identical (the sum telescopes),
/// and the direct form makes the displacement identity exact in floating
/// point.
pub fn signature(path: &Path, m: usize) -> Result<TruncatedSignature> {
    TruncatedSignature::check_params(path.dim(), m)?;
    let mut acc = TruncatedSignature::identity(path.dim(), m)?;
    for inc in path.increments() {
        let seg = segment_signature(&inc, m)?;
        acc = chen_product(&acc, &seg)?;
    }
    acc.levels[0] = path
        .end()
        .iter()
        .zip(path.start())
        .map(|(e, s)| e - s)
        .collect();
    Ok(acc)
}

/// Tensor logarithm of a signature:
/// `log(1 + S) = sum_{k>=1} (-1)^(k+1) S^(x)k / k`, truncated at depth m.
/// Returns raw levels (a Lie element when the input is a signature).
pub fn tensor_log(sig: &TruncatedSignature) -> Vec<Vec<f64>> {
    let m = sig.m;
    let mut out: Vec<Vec<f64>> = sig.levels.clone(); // k = 1 term
    let mut power = sig.levels.clone(); // S^1
    for k in 2..=m {
        power = graded_mul(&power, &sig.levels, m);
        let coeff = if k % 2 == 0 { -1.0 } else { 1.0 } / k as f64;
        for (dst, src) in out.iter_mut().zip(&power) {
            axpy(dst, src, coeff);
        }
    }
    out
}

/// Tensor exponential of a zero-scalar element:
/// `exp(L) = 1 + sum_{k=1..m} L^(x)k / k!`.
pub fn tensor_exp(levels: &[Vec<f64>], d: usize, m: usize) -> Result<TruncatedSignature> {
    TruncatedSignature::check_params(d, m)?;
    if levels.len() != m {
        return Err(SigError::ShapeMismatch(format!(
            "tensor_exp: {} levels for depth {m}",
            levels.len()
        )));
    }
    let mut out = levels.to_vec(); // k = 1 term
    let mut power = levels.to_vec();
    let mut factorial = 1.0;
    for k in 2..=m {
        power = graded_mul(&power, levels, m);
        factorial *= k as f64;
        for (dst, src) in out.iter_mut().zip(&power) {
            axpy(dst, src, 1.0 / factorial);
        }
    }
    Ok(TruncatedSignature { d, m, levels: out })
}
