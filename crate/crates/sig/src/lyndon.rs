//! Lyndon words and the bracket basis of the free Lie algebra.
//!
//! Log-signatures live in the free Lie algebra over d letters truncated at
//! depth m. Its graded dimension is given by the Witt formula
//! `(1/k) * sum_{j | k} mu(j) * d^(k/j)` and a concrete basis is indexed
//! by Lyndon words — words strictly smaller than every proper suffix —
//! which this module enumerates with Duval's algorithm.
//!
//! Each word `w` carries its bracketing via the standard factorization
//! `w = uv` (v the lexicographically least proper suffix), expanded
//! recursively to a sparse tensor `[u, v] = uv - vu`. The expansions are
//! triangular: word `w`'s expansion has coefficient 1 on `w` itself and
//! support only on lexicographically larger words, which is what makes the
//! projection in the logsig module a simple forward substitution.

use std::collections::BTreeMap;

use crate::error::{Result, SigError};

/// A Lyndon word (letters in `0..d`) with the sparse tensor expansion of
/// its bracketing at level `letters.len()`, sorted by flat index.
#[derive(Debug, Clone, PartialEq)]
pub struct LyndonWord {
    pub letters: Vec<usize>,
    pub expansion: Vec<(usize, f64)>,
}

impl LyndonWord {
    /// Human-readable name using 1-based letters: `[0,1]` -> "12".
    /// Letters beyond 9 are dot-separated.
    pub fn name(&self) -> String {
        if self.letters.iter().all(|&l| l < 9) {
            self.letters.iter().map(|l| (l + 1).to_string()).collect()
        } else {
            self.letters
                .iter()
                .map(|l| (l + 1).to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Coefficient of a flat tensor index in this word's expansion.
    pub fn expansion_coeff(&self, index: usize) -> f64 {
        match self.expansion.binary_search_by_key(&index, |e| e.0) {
            Ok(pos) => self.expansion[pos].1,
            Err(_) => 0.0,
        }
    }
}

/// All Lyndon words over `{1..d}` of length `<= m`, in (length, lex)
/// order, with bracket expansions.
#[derive(Debug, Clone, PartialEq)]
pub struct LyndonBasis {
    pub d: usize,
    pub m: usize,
    pub words: Vec<LyndonWord>,
    /// `offsets[k-1]..offsets[k]` indexes the words of length k.
    offsets: Vec<usize>,
}

/// Enumerates Lyndon words over alphabet `0..d` with length `<= m`
/// (Duval's algorithm, ascending lexicographic order).
pub fn lyndon_words(d: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if d == 0 || m == 0 {
        return out;
    }
    let mut w = vec![0usize];
    loop {
        out.push(w.clone());
        let base = w.clone();
        w.clear();
        while w.len() < m {
            w.push(base[w.len() % base.len()]);
        }
        while let Some(&last) = w.last() {
            if last == d - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// Möbius function for small arguments.
fn mobius(mut n: usize) -> i64 {
    debug_assert!(n >= 1);
    let mut factors = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0; // squared factor
            }
            factors += 1;
        }
        p += 1;
    }
    if n > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Witt formula: number of Lyndon words of length exactly k over d
/// letters, `(1/k) * sum_{j|k} mu(j) * d^(k/j)`.
pub fn witt_dimension(d: usize, k: usize) -> usize {
    let mut total: i64 = 0;
    for j in 1..=k {
        if k % j == 0 {
            total += mobius(j) * (d as i64).pow((k / j) as u32);
        }
    }
    (total / k as i64) as usize
}

/// Dimension of the truncated free Lie algebra: Lyndon words of length
/// `<= m`, summed by the Witt formula.
pub fn logsig_dim(d: usize, m: usize) -> usize {
    (1..=m).map(|k| witt_dimension(d, k)).sum()
}

/// Standard factorization of a Lyndon word of length >= 2: `w = uv` with
/// `v` the lexicographically least proper suffix. Both parts are Lyndon.
fn standard_factorization(w: &[usize]) -> (Vec<usize>, Vec<usize>) {
    debug_assert!(w.len() >= 2);
    let mut best = 1;
    for start in 2..w.len() {
        if w[start..] < w[best..] {
            best = start;
        }
    }
    (w[..best].to_vec(), w[best..].to_vec())
}

/// Concatenation product of two sparse homogeneous tensors: a term at
/// index `ia` (level la) times a term at `ib` (level lb) lands at
/// `ia * d^lb + ib` (level la + lb).
fn sparse_concat(
    a: &[(usize, f64)],
    b: &[(usize, f64)],
    d: usize,
    level_b: usize,
    sign: f64,
    acc: &mut BTreeMap<usize, f64>,
) {
    let shift = d.pow(level_b as u32);
    for &(ia, ca) in a {
        for &(ib, cb) in b {
            *acc.entry(ia * shift + ib).or_insert(0.0) += sign * ca * cb;
        }
    }
}

impl LyndonBasis {
    /// Enumerates the basis and computes all bracket expansions.
    pub fn new(d: usize, m: usize) -> Result<Self> {
        if d < 1 {
            return Err(SigError::InvalidParameter("dimension d must be >= 1".into()));
        }
        if m < 1 {
            return Err(SigError::InvalidParameter("depth m must be >= 1".into()));
        }
        let mut letters_list = lyndon_words(d, m);
        letters_list.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

        // Expansions are built shortest-first so both standard factors of a
        // word are always available.
        let mut expansions: BTreeMap<Vec<usize>, Vec<(usize, f64)>> = BTreeMap::new();
        for w in &letters_list {
            let expansion = if w.len() == 1 {
                vec![(w[0], 1.0)]
            } else {
                let (u, v) = standard_factorization(w);
                let eu = expansions[&u].clone();
                let ev = expansions[&v].clone();
                let mut acc = BTreeMap::new();
                sparse_concat(&eu, &ev, d, v.len(), 1.0, &mut acc);
                sparse_concat(&ev, &eu, d, u.len(), -1.0, &mut acc);
                acc.into_iter().filter(|&(_, c)| c != 0.0).collect()
            };
            expansions.insert(w.clone(), expansion);
        }

        let mut offsets = vec![0usize; m + 1];
        for w in &letters_list {
            offsets[w.len()] += 1;
        }
        for k in 1..=m {
            offsets[k] += offsets[k - 1];
        }

        let words = letters_list
            .into_iter()
            .map(|letters| {
                let expansion = expansions.remove(&letters).unwrap();
                LyndonWord { letters, expansion }
            })
            .collect();
        Ok(LyndonBasis {
            d,
            m,
            words,
            offsets,
        })
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    /// Words of length exactly k, with their coefficient offsets.
    pub fn words_of_length(&self, k: usize) -> (&[LyndonWord], usize) {
        let lo = self.offsets[k - 1];
        let hi = self.offsets[k];
        (&self.words[lo..hi], lo)
    }

    pub fn names(&self) -> Vec<String> {
        self.words.iter().map(LyndonWord::name).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::word_index;

    #[test]
    fn d2_m3_enumeration() {
        let basis = LyndonBasis::new(2, 3).unwrap();
        assert_eq!(basis.dim(), 5);
        assert_eq!(logsig_dim(2, 3), 5);
        assert_eq!(basis.names(), vec!["1", "2", "12", "112", "122"]);
    }

    #[test]
    fn d3_m2_dimension() {
        let basis = LyndonBasis::new(3, 2).unwrap();
        assert_eq!(basis.dim(), 6);
        assert_eq!(logsig_dim(3, 2), 6);
        assert_eq!(basis.names(), vec!["1", "2", "3", "12", "13", "23"]);
    }

    #[test]
    fn d1_any_depth_is_one() {
        for m in 1..=5 {
            assert_eq!(logsig_dim(1, m), 1);
            assert_eq!(LyndonBasis::new(1, m).unwrap().names(), vec!["1"]);
        }
    }

    #[test]
    fn witt_matches_enumeration_up_to_d6_m5() {
        for d in 1..=6 {
            let words = lyndon_words(d, 5);
            for k in 1..=5 {
                let count = words.iter().filter(|w| w.len() == k).count();
                assert_eq!(
                    count,
                    witt_dimension(d, k),
                    "d={d} k={k}: enumeration {count}"
                );
            }
        }
    }

    #[test]
    fn words_are_lyndon() {
        // Every enumerated word is strictly smaller than all its proper
        // suffixes (the defining property).
        for w in lyndon_words(4, 5) {
            for s in 1..w.len() {
                assert!(w[..] < w[s..], "{w:?} vs suffix at {s}");
            }
        }
    }

    #[test]
    fn mobius_small_values() {
        let expect = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1];
        for (n, &want) in (1..=10).zip(&expect) {
            assert_eq!(mobius(n), want, "mu({n})");
        }
    }

    #[test]
    fn standard_factorization_examples() {
        assert_eq!(
            standard_factorization(&[0, 0, 1]),
            (vec![0], vec![0, 1])
        );
        assert_eq!(
            standard_factorization(&[0, 1, 1]),
            (vec![0, 1], vec![1])
        );
        assert_eq!(
            standard_factorization(&[0, 1, 0, 2]),
            (vec![0, 1], vec![0, 2])
        );
    }

    #[test]
    fn bracket_expansion_of_12() {
        // [e1, e2] = e12 - e21.
        let basis = LyndonBasis::new(2, 2).unwrap();
        let w = &basis.words[2];
        assert_eq!(w.name(), "12");
        assert_eq!(w.expansion, vec![(1, 1.0), (2, -1.0)]);
    }

    #[test]
    fn bracket_expansion_of_112() {
        // [e1, [e1, e2]] = e112 - 2 e121 + e211.
        let basis = LyndonBasis::new(2, 3).unwrap();
        let w = basis
            .words
            .iter()
            .find(|w| w.name() == "112")
            .unwrap();
        assert_eq!(
            w.expansion,
            vec![
                (word_index(2, &[0, 0, 1]), 1.0),
                (word_index(2, &[0, 1, 0]), -2.0),
                (word_index(2, &[1, 0, 0]), 1.0),
            ]
        );
    }

    #[test]
    fn expansions_are_triangular() {
        // Unit coefficient on the word itself, no support on
        // lexicographically smaller words of the same length.
        for (d, m) in [(2usize, 5usize), (3, 4), (4, 3)] {
            let basis = LyndonBasis::new(d, m).unwrap();
            for w in &basis.words {
                let own = word_index(d, &w.letters);
                assert_eq!(w.expansion_coeff(own), 1.0, "word {}", w.name());
                for &(idx, _) in &w.expansion {
                    assert!(idx >= own, "word {} has support below itself", w.name());
                }
            }
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(LyndonBasis::new(0, 2).is_err());
        assert!(LyndonBasis::new(2, 0).is_err());
    }
}
