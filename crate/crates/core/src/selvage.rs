//! The selvage construction: a cyclic interweave core completed with every
//! compatible unit-length word, together with the probability assembly on
//! which the completed code has zero redundancy.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::exact::Rational;
use crate::model::{
    is_prefix_code, kraft_sum, prefix_free_pair, redundancy, ChannelSpec, Codebook, ModelError,
    ProbMultiset, Word,
};
use crate::tree::decide_tree_decodable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SelvageError {
    #[error("selvage construction needs at least 3 channels, got {0}")]
    TooFewChannels(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A selvage code with its probability assembly.
#[derive(Clone, Debug)]
pub struct SelvageOutput {
    /// The n-row cyclic interweave core.
    pub core: Codebook,
    /// Core rows first (row index = channel of the empty component), then
    /// the compatible unit words in lexicographic order.
    pub full: Codebook,
    /// Probability per codeword of `full`, in the same order: `q_j / prod q`
    /// for core row j, then `1 / prod q` per unit word.
    pub spa: ProbMultiset,
    /// Number of unit words in `full` beyond the core.
    pub unit_count: usize,
}

/// The cyclic core: row `j` has an empty component on channel `j`, symbol 1
/// on channel `(j + 1) mod n`, and symbol 0 elsewhere.
pub fn selvage_core(spec: &ChannelSpec) -> Result<Codebook, SelvageError> {
    let n = spec.n();
    if n < 3 {
        return Err(SelvageError::TooFewChannels(n));
    }
    let mut words = Vec::with_capacity(n);
    for j in 0..n {
        let components = (0..n)
            .map(|i| {
                if i == j {
                    Vec::new()
                } else if i == (j + 1) % n {
                    vec![1u64]
                } else {
                    vec![0u64]
                }
            })
            .collect();
        words.push(Word::new(components));
    }
    Ok(Codebook::new(spec.clone(), words)?)
}

/// Enumerates all unit-length words over the spec in lexicographic order.
fn unit_words(spec: &ChannelSpec) -> Vec<Word> {
    let n = spec.n();
    let mut out = Vec::new();
    let mut odometer = vec![0u64; n];
    loop {
        out.push(Word::new(odometer.iter().map(|&s| vec![s]).collect()));
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            odometer[i] += 1;
            if odometer[i] < spec.size(i) {
                break;
            }
            odometer[i] = 0;
        }
    }
}

/// Builds the full selvage code and its probability assembly.
pub fn selvage_code(spec: &ChannelSpec) -> Result<SelvageOutput, SelvageError> {
    let core = selvage_core(spec)?;
    let mut words: Vec<Word> = core.words().to_vec();
    let mut unit_count = 0usize;
    for unit in unit_words(spec) {
        if core.words().iter().all(|c| prefix_free_pair(&unit, c)) {
            words.push(unit);
            unit_count += 1;
        }
    }
    let full = Codebook::new(spec.clone(), words)?;

    let product = BigInt::from(spec.alphabet_product());
    let mut probs = Vec::with_capacity(full.len());
    for j in 0..spec.n() {
        probs.push(Rational::new(BigInt::from(spec.size(j)), product.clone()));
    }
    for _ in 0..unit_count {
        probs.push(Rational::new(BigInt::one(), product.clone()));
    }
    let spa = ProbMultiset::new(probs)?;
    debug_assert!(spa.is_distribution());

    Ok(SelvageOutput {
        core,
        full,
        spa,
        unit_count,
    })
}

/// Verification report for a selvage output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelvageReport {
    pub core_is_prefix: bool,
    pub full_is_prefix: bool,
    pub core_not_tree_decodable: bool,
    pub full_not_tree_decodable: bool,
    pub redundancy_is_zero: bool,
    pub kraft_is_one: bool,
}

impl SelvageReport {
    pub fn all_pass(&self) -> bool {
        self.core_is_prefix
            && self.full_is_prefix
            && self.core_not_tree_decodable
            && self.full_not_tree_decodable
            && self.redundancy_is_zero
            && self.kraft_is_one
    }
}

/// Checks the four claimed properties: both codebooks are prefix codes,
/// neither is tree decodable, the code has exactly zero redundancy on its
/// assembly, and the Kraft sum is exactly 1.
pub fn verify_selvage(out: &SelvageOutput) -> SelvageReport {
    let core_is_prefix = is_prefix_code(&out.core);
    let full_is_prefix = is_prefix_code(&out.full);
    let core_not_tree_decodable = matches!(
        decide_tree_decodable(&out.core),
        Ok(crate::tree::Decodability::NotDecodable { .. })
    );
    let full_not_tree_decodable = matches!(
        decide_tree_decodable(&out.full),
        Ok(crate::tree::Decodability::NotDecodable { .. })
    );
    let redundancy_is_zero = redundancy(&out.full, &out.spa)
        .map(|r| r.is_zero())
        .unwrap_or(false);
    let kraft_is_one = kraft_sum(&out.full).is_one();
    SelvageReport {
        core_is_prefix,
        full_is_prefix,
        core_not_tree_decodable,
        full_not_tree_decodable,
        redundancy_is_zero,
        kraft_is_one,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{ratio, ExactReal};
    use crate::model::{descriptive_length, entropy, word};
    use crate::tree::epsilon_locating;

    fn spec(sizes: &[u64]) -> ChannelSpec {
        ChannelSpec::new(sizes.to_vec()).unwrap()
    }

    #[test]
    fn core_of_four_binary_channels() {
        let core = selvage_core(&spec(&[2, 2, 2, 2])).unwrap();
        assert_eq!(
            core.words(),
            &[
                word(&[&[], &[1], &[0], &[0]]),
                word(&[&[0], &[], &[1], &[0]]),
                word(&[&[0], &[0], &[], &[1]]),
                word(&[&[1], &[0], &[0], &[]]),
            ]
        );
    }

    #[test]
    fn core_of_three_binary_channels() {
        let core = selvage_core(&spec(&[2, 2, 2])).unwrap();
        assert_eq!(
            core.words(),
            &[
                word(&[&[], &[1], &[0]]),
                word(&[&[0], &[], &[1]]),
                word(&[&[1], &[0], &[]]),
            ]
        );
    }

    #[test]
    fn core_needs_three_channels() {
        assert_eq!(
            selvage_core(&spec(&[2, 2])),
            Err(SelvageError::TooFewChannels(2))
        );
    }

    /// Unit counts match `prod q_i - sum q_i` and a direct per-word filter.
    #[test]
    fn unit_counts_match_closed_form() {
        for sizes in [&[2u64, 2, 2][..], &[5, 3, 2], &[6, 3, 2]] {
            let s = spec(sizes);
            let out = selvage_code(&s).unwrap();
            let product: u64 = sizes.iter().product();
            let sum: u64 = sizes.iter().sum();
            assert_eq!(out.unit_count as u64, product - sum, "sizes {sizes:?}");
            assert_eq!(out.full.len(), out.core.len() + out.unit_count);
        }
    }

    #[test]
    fn kraft_sum_is_exactly_one() {
        let out = selvage_code(&spec(&[2, 2, 2])).unwrap();
        assert!(kraft_sum(&out.full).is_one());
    }

    #[test]
    fn spa_sums_to_one_and_has_zero_redundancy() {
        for sizes in [&[2u64, 2, 2][..], &[5, 3, 2], &[2, 2, 2, 2, 2]] {
            let out = selvage_code(&spec(sizes)).unwrap();
            assert!(out.spa.is_distribution());
            assert!(redundancy(&out.full, &out.spa).unwrap().is_zero());
        }
    }

    #[test]
    fn local_redundancy_vanishes_per_codeword() {
        // |c_j| = -ln p_j term by term.
        let out = selvage_code(&spec(&[5, 3, 2])).unwrap();
        for (w, p) in out.full.words().iter().zip(out.spa.probs()) {
            let dl = descriptive_length(w, out.full.spec());
            let ideal = ExactReal::from_ln(&p.recip()).unwrap();
            assert_eq!(dl, ideal);
        }
    }

    #[test]
    fn epsilon_sets_are_singletons_on_the_diagonal() {
        let core = selvage_core(&spec(&[5, 3, 2])).unwrap();
        let map = epsilon_locating(&core);
        for (i, set) in map.iter().enumerate() {
            assert_eq!(set.iter().copied().collect::<Vec<_>>(), vec![i]);
        }
    }

    #[test]
    fn verify_passes_for_small_specs() {
        for sizes in [&[2u64, 2, 2][..], &[5, 3, 2], &[2, 2, 2, 2, 2]] {
            let out = selvage_code(&spec(sizes)).unwrap();
            let report = verify_selvage(&out);
            assert!(report.all_pass(), "sizes {sizes:?}: {report:?}");
        }
    }

    #[test]
    fn entropy_values_on_reference_assemblies() {
        let out = selvage_code(&spec(&[2, 2, 2])).unwrap();
        let h = entropy(&out.spa).unwrap();
        assert_eq!(h, ExactReal::from_ln_u64(2).scaled(&ratio(9, 4)));
        assert_eq!(h.to_decimal(6), "1.559581");

        let out = selvage_code(&spec(&[5, 3, 2])).unwrap();
        assert_eq!(entropy(&out.spa).unwrap().to_decimal(6), "2.976887");
    }
}
