//! Log-signatures: the tensor logarithm expressed in the Lyndon basis.
//!
//! The logarithm of a signature is a Lie element, so it is determined by
//! far fewer numbers than the full tensor — exactly `logsig_dim(d, m)`
//! coefficients. Projection onto the Lyndon basis exploits triangularity
//! (see the lyndon module): walking the words of each length in increasing
//! lexicographic order, every coefficient is the corresponding tensor
//! entry minus contributions of already-solved words. No linear system is
//! ever materialized.

use std::sync::Arc;

use crate::error::{Result, SigError};
use crate::lyndon::LyndonBasis;
use crate::path::Path;
use crate::tensor::{signature, tensor_exp, tensor_log, word_index, TruncatedSignature};

#[derive(Debug, Clone, PartialEq)]
pub struct LogSignature {
    pub basis: Arc<LyndonBasis>,
    /// One coefficient per Lyndon word, in the basis's (length, lex) order.
    pub coefficients: Vec<f64>,
}

impl LogSignature {
    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn depth(&self) -> usize {
        self.basis.m
    }

    pub fn path_dim(&self) -> usize {
        self.basis.d
    }

    /// Coefficient looked up by word name (e.g. "12").
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.basis
            .words
            .iter()
            .position(|w| w.name() == name)
            .map(|i| self.coefficients[i])
    }

    /// Re-embeds into the tensor algebra: sum of coefficient-weighted
    /// bracket expansions, level by level.
    pub fn to_tensor(&self) -> Vec<Vec<f64>> {
        let d = self.basis.d;
        let mut levels: Vec<Vec<f64>> = (1..=self.basis.m)
            .map(|k| vec![0.0; d.pow(k as u32)])
            .collect();
        for k in 1..=self.basis.m {
            let (words, offset) = self.basis.words_of_length(k);
            let level = &mut levels[k - 1];
            for (i, w) in words.iter().enumerate() {
                let alpha = self.coefficients[offset + i];
                if alpha == 0.0 {
                    continue;
                }
                for &(idx, c) in &w.expansion {
                    level[idx] += alpha * c;
                }
            }
        }
        levels
    }

    /// Tensor exponential of the re-embedded Lie element; for a
    /// log-signature of a path this reproduces the path's signature.
    pub fn exp(&self) -> Result<TruncatedSignature> {
        tensor_exp(&self.to_tensor(), self.basis.d, self.basis.m)
    }
}

/// Projects the tensor logarithm of `sig` onto the Lyndon basis.
pub fn log_signature(sig: &TruncatedSignature, basis: &Arc<LyndonBasis>) -> Result<LogSignature> {
    if sig.dim() != basis.d || sig.depth() != basis.m {
        return Err(SigError::ShapeMismatch(format!(
            "signature (d={}, m={}) vs basis (d={}, m={})",
            sig.dim(),
            sig.depth(),
            basis.d,
            basis.m
        )));
    }
    let log = tensor_log(sig);
    let mut coefficients = vec![0.0; basis.dim()];
    for k in 1..=basis.m {
        let level = &log[k - 1];
        let (words, offset) = basis.words_of_length(k);
        // Forward substitution in lex order: a word's expansion has unit
        // coefficient on itself and support only on larger words, so by
        // the time we reach word w every earlier word's contribution to
        // position idx(w) is known.
        for (i, w) in words.iter().enumerate() {
            let own = word_index(basis.d, &w.letters);
            let mut value = level[own];
            for (j, prev) in words[..i].iter().enumerate() {
                let c = prev.expansion_coeff(own);
                if c != 0.0 {
                    value -= coefficients[offset + j] * c;
                }
            }
            coefficients[offset + i] = value;
        }
    }
    Ok(LogSignature {
        basis: Arc::clone(basis),
        coefficients,
    })
}

/// Signature-then-logarithm of a path in one call.
pub fn log_signature_of_path(path: &Path, basis: &Arc<LyndonBasis>) -> Result<LogSignature> {
    let sig = signature(path, basis.m)?;
    log_signature(&sig, basis)
}
