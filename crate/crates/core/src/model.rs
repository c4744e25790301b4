//! Core data model: channel specs, words, codebooks, length tuples,
//! prefix-freeness, the Kraft sum, entropy, expected length and redundancy.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{ExactError, ExactReal, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("channel alphabet size must be at least 2, got {0} for channel {1}")]
    AlphabetTooSmall(u64, usize),
    #[error("word has {got} components but the spec has {want} channels")]
    ArityMismatch { got: usize, want: usize },
    #[error("symbol {symbol} out of range for channel {channel} of size {size}")]
    SymbolOutOfRange {
        symbol: u64,
        channel: usize,
        size: u64,
    },
    #[error("duplicate codeword at rows {0} and {1}")]
    DuplicateCodeword(usize, usize),
    #[error("the all-empty word is only allowed in a codebook of size 1")]
    EmptyWordInLargeCodebook,
    #[error("probability must lie in (0, 1]")]
    ProbOutOfRange,
    #[error("probabilities must sum to 1, got {0}")]
    ProbSumNotOne(String),
    #[error("assignment has {got} probabilities for {want} codewords")]
    AssignmentSizeMismatch { got: usize, want: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// The tuple of channel alphabet sizes that every other object lives in.
///
/// Zero channels are permitted so that trimming a singleton codebook has a
/// well-defined fixed point; user-facing constructions require `n >= 1`
/// themselves.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ChannelSpec {
    sizes: Vec<u64>,
}

impl ChannelSpec {
    pub fn new(sizes: Vec<u64>) -> Result<Self, ModelError> {
        for (i, &q) in sizes.iter().enumerate() {
            if q < 2 {
                return Err(ModelError::AlphabetTooSmall(q, i));
            }
        }
        Ok(Self { sizes })
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn size(&self, channel: usize) -> u64 {
        self.sizes[channel]
    }

    /// Product of all alphabet sizes.
    pub fn alphabet_product(&self) -> BigUint {
        self.sizes
            .iter()
            .fold(BigUint::one(), |acc, &q| acc * BigUint::from(q))
    }

    pub fn conforms(&self, word: &Word) -> Result<(), ModelError> {
        if word.n() != self.n() {
            return Err(ModelError::ArityMismatch {
                got: word.n(),
                want: self.n(),
            });
        }
        for (i, comp) in word.components.iter().enumerate() {
            for &s in comp {
                if s >= self.sizes[i] {
                    return Err(ModelError::SymbolOutOfRange {
                        symbol: s,
                        channel: i,
                        size: self.sizes[i],
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.sizes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, ")")
    }
}

/// An n-tuple of per-channel symbol strings; any component may be empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word {
    components: Vec<Vec<u64>>,
}

impl Word {
    pub fn new(components: Vec<Vec<u64>>) -> Self {
        Self { components }
    }

    /// All-empty word with `n` components.
    pub fn empty(n: usize) -> Self {
        Self {
            components: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, channel: usize) -> &[u64] {
        &self.components[channel]
    }

    pub fn components(&self) -> &[Vec<u64>] {
        &self.components
    }

    pub fn is_all_empty(&self) -> bool {
        self.components.iter().all(|c| c.is_empty())
    }
}

/// Per-channel symbol counts of a word.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LengthTuple(pub Vec<usize>);

pub fn length_tuple(word: &Word) -> LengthTuple {
    LengthTuple(word.components.iter().map(Vec::len).collect())
}

/// `sum_i len_i * ln q_i`, the information in nats needed to write the word.
pub fn descriptive_length(word: &Word, spec: &ChannelSpec) -> ExactReal {
    let mut out = ExactReal::zero();
    for (i, comp) in word.components.iter().enumerate() {
        if !comp.is_empty() {
            let ln_q = ExactReal::from_ln_u64(spec.size(i));
            out.add_assign(&ln_q.scaled(&Rational::from_integer(BigInt::from(comp.len()))));
        }
    }
    out
}

fn string_prefix_free(a: &[u64], b: &[u64]) -> bool {
    let k = a.len().min(b.len());
    a[..k] != b[..k]
}

/// True iff some channel carries components that are prefix-free of each
/// other (neither is a prefix of the other).
pub fn prefix_free_pair(a: &Word, b: &Word) -> bool {
    debug_assert_eq!(a.n(), b.n());
    a.components
        .iter()
        .zip(&b.components)
        .any(|(x, y)| string_prefix_free(x, y))
}

/// An ordered list of codewords over a common spec. Duplicates are rejected,
/// and the all-empty word is only allowed alone (it is a prefix of every
/// word).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Codebook {
    spec: ChannelSpec,
    words: Vec<Word>,
}

impl Codebook {
    pub fn new(spec: ChannelSpec, words: Vec<Word>) -> Result<Self, ModelError> {
        for word in &words {
            spec.conforms(word)?;
        }
        if words.len() > 1 {
            if let Some(_) = words.iter().find(|w| w.is_all_empty()) {
                return Err(ModelError::EmptyWordInLargeCodebook);
            }
        }
        for i in 0..words.len() {
            for j in (i + 1)..words.len() {
                if words[i] == words[j] {
                    return Err(ModelError::DuplicateCodeword(i, j));
                }
            }
        }
        Ok(Self { spec, words })
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, j: usize) -> &Word {
        &self.words[j]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub fn is_prefix_code(cb: &Codebook) -> bool {
    let words = cb.words();
    for i in 0..words.len() {
        for j in (i + 1)..words.len() {
            if !prefix_free_pair(&words[i], &words[j]) {
                return false;
            }
        }
    }
    true
}

/// `sum_j exp(-|c_j|)` as an exact rational; the caller compares with 1.
pub fn kraft_sum(cb: &Codebook) -> Rational {
    let mut total = Rational::zero();
    for word in cb.words() {
        let mut volume = BigUint::one();
        for (i, comp) in word.components().iter().enumerate() {
            for _ in 0..comp.len() {
                volume *= BigUint::from(cb.spec().size(i));
            }
        }
        total += Rational::new(BigInt::one(), BigInt::from(volume));
    }
    total
}

/// A multiset of positive probabilities, kept in insertion order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProbMultiset {
    probs: Vec<Rational>,
}

impl ProbMultiset {
    pub fn new(probs: Vec<Rational>) -> Result<Self, ModelError> {
        let one = Rational::one();
        for p in &probs {
            if !p.is_positive() || p > &one {
                return Err(ModelError::ProbOutOfRange);
            }
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.probs.iter().sum()
    }

    pub fn is_distribution(&self) -> bool {
        self.sum().is_one()
    }

    fn require_distribution(&self) -> Result<(), ModelError> {
        if self.is_distribution() {
            Ok(())
        } else {
            Err(ModelError::ProbSumNotOne(self.sum().to_string()))
        }
    }
}

/// `-sum_j p_j ln p_j` in nats, exact. The probabilities must sum to 1.
pub fn entropy(p: &ProbMultiset) -> Result<ExactReal, ModelError> {
    p.require_distribution()?;
    let mut out = ExactReal::zero();
    for prob in p.probs() {
        let inv = prob.recip();
        out.add_assign(&ExactReal::from_ln(&inv)?.scaled(prob));
    }
    Ok(out)
}

/// `sum_j p_j |c_j|` with the j-th probability assigned to the j-th codeword.
pub fn expected_length(cb: &Codebook, assignment: &ProbMultiset) -> Result<ExactReal, ModelError> {
    if assignment.len() != cb.len() {
        return Err(ModelError::AssignmentSizeMismatch {
            got: assignment.len(),
            want: cb.len(),
        });
    }
    assignment.require_distribution()?;
    let mut out = ExactReal::zero();
    for (word, p) in cb.words().iter().zip(assignment.probs()) {
        out.add_assign(&descriptive_length(word, cb.spec()).scaled(p));
    }
    Ok(out)
}

/// Expected length minus entropy; never negative for uniquely decodable
/// codes.
pub fn redundancy(cb: &Codebook, assignment: &ProbMultiset) -> Result<ExactReal, ModelError> {
    let expected = expected_length(cb, assignment)?;
    let h = entropy(assignment)?;
    Ok(expected.sub(&h))
}

/// Shorthand used throughout the tests and the CLI.
pub fn word(parts: &[&[u64]]) -> Word {
    Word::new(parts.iter().map(|p| p.to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use std::cmp::Ordering;

    pub(crate) fn spec(sizes: &[u64]) -> ChannelSpec {
        ChannelSpec::new(sizes.to_vec()).unwrap()
    }

    /// Two-channel binary codebook with a decoding tree: {(0,e),(1,0),(11,1)}.
    fn chain_22() -> Codebook {
        Codebook::new(
            spec(&[2, 2]),
            vec![word(&[&[0], &[]]), word(&[&[1], &[0]]), word(&[&[1, 1], &[1]])],
        )
        .unwrap()
    }

    /// The cyclic three-channel interweave: {(e,1,0),(0,e,1),(1,0,e)}.
    pub(crate) fn core_222() -> Codebook {
        Codebook::new(
            spec(&[2, 2, 2]),
            vec![
                word(&[&[], &[1], &[0]]),
                word(&[&[0], &[], &[1]]),
                word(&[&[1], &[0], &[]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn length_tuples() {
        assert_eq!(length_tuple(&word(&[&[0], &[]])), LengthTuple(vec![1, 0]));
        assert_eq!(length_tuple(&Word::empty(3)), LengthTuple(vec![0, 0, 0]));
        assert_eq!(length_tuple(&word(&[&[1, 1], &[1]])), LengthTuple(vec![2, 1]));
    }

    #[test]
    fn descriptive_lengths() {
        let s = spec(&[2, 2, 2]);
        let w = word(&[&[], &[1], &[0]]);
        let expect = ExactReal::from_ln_u64(2).scaled(&ratio(2, 1));
        assert_eq!(descriptive_length(&w, &s), expect);

        assert!(descriptive_length(&Word::empty(3), &s).is_zero());

        let s2 = spec(&[6, 3, 2]);
        let w2 = word(&[&[], &[2], &[0, 0]]);
        assert_eq!(descriptive_length(&w2, &s2), ExactReal::from_ln_u64(12));
    }

    #[test]
    fn prefix_free_pairs() {
        assert!(prefix_free_pair(&word(&[&[0], &[]]), &word(&[&[1], &[0]])));
        assert!(prefix_free_pair(
            &word(&[&[], &[1], &[0]]),
            &word(&[&[0], &[], &[1]])
        ));
        // Channel 0 is a prefix, channel 1 has the empty prefix.
        assert!(!prefix_free_pair(&word(&[&[0], &[]]), &word(&[&[0, 1], &[1]])));
    }

    #[test]
    fn prefix_free_is_symmetric_and_irreflexive() {
        let a = word(&[&[0], &[]]);
        let b = word(&[&[1], &[0]]);
        assert_eq!(prefix_free_pair(&a, &b), prefix_free_pair(&b, &a));
        assert!(!prefix_free_pair(&a, &a));
    }

    #[test]
    fn prefix_code_checks() {
        assert!(is_prefix_code(&chain_22()));
        assert!(is_prefix_code(&core_222()));
        let bad = Codebook::new(
            spec(&[2, 2]),
            vec![word(&[&[0], &[]]), word(&[&[0, 1], &[1]])],
        )
        .unwrap();
        assert!(!is_prefix_code(&bad));
    }

    #[test]
    fn kraft_sums() {
        assert_eq!(kraft_sum(&chain_22()), ratio(7, 8));
        let empty = Codebook::new(spec(&[2, 2]), vec![]).unwrap();
        assert_eq!(kraft_sum(&empty), ratio(0, 1));
    }

    #[test]
    fn entropy_of_spa_222() {
        // Three probabilities 1/4 plus two 1/8: entropy (9/4) ln 2.
        let p = ProbMultiset::new(vec![
            ratio(1, 4),
            ratio(1, 4),
            ratio(1, 4),
            ratio(1, 8),
            ratio(1, 8),
        ])
        .unwrap();
        let h = entropy(&p).unwrap();
        assert_eq!(h, ExactReal::from_ln_u64(2).scaled(&ratio(9, 4)));
        assert_eq!(h.to_decimal(6), "1.559581");
    }

    #[test]
    fn entropy_of_point_mass_is_zero() {
        let p = ProbMultiset::new(vec![ratio(1, 1)]).unwrap();
        assert!(entropy(&p).unwrap().is_zero());
    }

    #[test]
    fn entropy_requires_distribution() {
        let p = ProbMultiset::new(vec![ratio(1, 4)]).unwrap();
        assert!(matches!(entropy(&p), Err(ModelError::ProbSumNotOne(_))));
    }

    #[test]
    fn expected_length_of_point_mass_on_empty_word() {
        let cb = Codebook::new(spec(&[2, 2]), vec![Word::empty(2)]).unwrap();
        let p = ProbMultiset::new(vec![ratio(1, 1)]).unwrap();
        assert!(expected_length(&cb, &p).unwrap().is_zero());
        assert!(redundancy(&cb, &p).unwrap().is_zero());
    }

    #[test]
    fn assignment_size_is_checked() {
        let cb = chain_22();
        let p = ProbMultiset::new(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert!(matches!(
            expected_length(&cb, &p),
            Err(ModelError::AssignmentSizeMismatch { .. })
        ));
    }

    #[test]
    fn duplicate_codewords_rejected() {
        let result = Codebook::new(spec(&[2, 2]), vec![word(&[&[0], &[]]), word(&[&[0], &[]])]);
        assert!(matches!(result, Err(ModelError::DuplicateCodeword(0, 1))));
    }

    #[test]
    fn all_empty_word_only_alone() {
        let result = Codebook::new(spec(&[2, 2]), vec![Word::empty(2), word(&[&[1], &[0]])]);
        assert!(matches!(result, Err(ModelError::EmptyWordInLargeCodebook)));
        assert!(Codebook::new(spec(&[2, 2]), vec![Word::empty(2)]).is_ok());
    }

    #[test]
    fn symbols_must_fit_alphabet() {
        let result = Codebook::new(spec(&[2, 2]), vec![word(&[&[7], &[]])]);
        assert!(matches!(
            result,
            Err(ModelError::SymbolOutOfRange { symbol: 7, .. })
        ));
    }

    #[test]
    fn redundancy_zero_iff_ideal_lengths() {
        // Lengths match -ln p exactly: redundancy 0.
        let cb = Codebook::new(
            spec(&[2, 2]),
            vec![word(&[&[0], &[]]), word(&[&[1], &[0]]), word(&[&[1], &[1]])],
        )
        .unwrap();
        let p = ProbMultiset::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        assert!(redundancy(&cb, &p).unwrap().is_zero());

        // Perturbed: strictly positive.
        let q = ProbMultiset::new(vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)]).unwrap();
        let r = redundancy(&cb, &q).unwrap();
        assert_eq!(r.sign(), Ordering::Greater);
    }
}
