//! Rectangle packing view of a codebook.
//!
//! Each codeword maps to an axis-aligned block inside a container whose edge
//! along channel `i` is the integer interval `[0, q_i^lmax_i)`. Blocks are
//! pairwise disjoint exactly when the codebook is a prefix code, which makes
//! this module an independent geometric oracle for prefix-freeness.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::Rational;
use crate::model::{Codebook, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RpgError {
    #[error("component {channel} has {len} symbols, container allows {max}")]
    WordExceedsContainer {
        channel: usize,
        len: usize,
        max: usize,
    },
    #[error("block dump is only provided for up to 3 channels, got {0}")]
    TooManyDimensions(usize),
}

/// Bounding hyper-rectangle for a codebook: edge `i` has extent
/// `q_i^lmax_i` where `lmax_i` is the longest component on channel `i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Container {
    sizes: Vec<u64>,
    max_lengths: Vec<usize>,
}

impl Container {
    /// The container is always derived from the codebook, never supplied.
    pub fn for_codebook(cb: &Codebook) -> Self {
        let n = cb.spec().n();
        let mut max_lengths = vec![0usize; n];
        for word in cb.words() {
            for (i, comp) in word.components().iter().enumerate() {
                max_lengths[i] = max_lengths[i].max(comp.len());
            }
        }
        Self {
            sizes: cb.spec().sizes().to_vec(),
            max_lengths,
        }
    }

    pub fn max_lengths(&self) -> &[usize] {
        &self.max_lengths
    }

    pub fn edge_extent(&self, channel: usize) -> BigUint {
        BigUint::from(self.sizes[channel]).pow(self.max_lengths[channel] as u32)
    }

    pub fn volume(&self) -> BigUint {
        (0..self.sizes.len())
            .map(|i| self.edge_extent(i))
            .fold(BigUint::one(), |acc, e| acc * e)
    }
}

/// A hyper-rectangle `[origin_i, origin_i + size_i)` per dimension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Block {
    origin: Vec<BigUint>,
    size: Vec<BigUint>,
}

impl Block {
    pub fn origin(&self) -> &[BigUint] {
        &self.origin
    }

    pub fn size(&self) -> &[BigUint] {
        &self.size
    }

    pub fn volume(&self) -> BigUint {
        self.size.iter().fold(BigUint::one(), |acc, s| acc * s)
    }
}

/// The block occupied by `word`: its symbols are the high-order digits of
/// the origin, and the block spans every cell sharing that prefix.
pub fn block_of(word: &Word, container: &Container) -> Result<Block, RpgError> {
    let n = container.sizes.len();
    let mut origin = Vec::with_capacity(n);
    let mut size = Vec::with_capacity(n);
    for i in 0..n {
        let comp = word.component(i);
        let max = container.max_lengths[i];
        if comp.len() > max {
            return Err(RpgError::WordExceedsContainer {
                channel: i,
                len: comp.len(),
                max,
            });
        }
        let q = BigUint::from(container.sizes[i]);
        let mut value = BigUint::zero();
        for &s in comp {
            value = value * &q + BigUint::from(s);
        }
        let extent = q.pow((max - comp.len()) as u32);
        origin.push(value * &extent);
        size.push(extent);
    }
    Ok(Block { origin, size })
}

/// Disjoint iff the intervals separate in at least one dimension.
pub fn blocks_disjoint(a: &Block, b: &Block) -> bool {
    debug_assert_eq!(a.origin.len(), b.origin.len());
    for i in 0..a.origin.len() {
        let a_end = &a.origin[i] + &a.size[i];
        let b_end = &b.origin[i] + &b.size[i];
        if a_end <= b.origin[i] || b_end <= a.origin[i] {
            return true;
        }
    }
    false
}

/// Geometric prefix-code test: all blocks pairwise disjoint.
pub fn overlap_free(cb: &Codebook) -> bool {
    let container = Container::for_codebook(cb);
    let blocks: Vec<Block> = cb
        .words()
        .iter()
        .map(|w| block_of(w, &container).expect("container derived from codebook"))
        .collect();
    for i in 0..blocks.len() {
        for j in (i + 1)..blocks.len() {
            if !blocks_disjoint(&blocks[i], &blocks[j]) {
                return false;
            }
        }
    }
    true
}

/// Exact block volume as a fraction of the container volume.
pub fn relative_volume(word: &Word, cb: &Codebook) -> Rational {
    let container = Container::for_codebook(cb);
    let block = block_of(word, &container).expect("word from codebook");
    Rational::new(
        BigInt::from(block.volume()),
        BigInt::from(container.volume()),
    )
}

/// Debug dump, one `origin -> size` line per block, for up to 3 channels.
pub fn dump_blocks(cb: &Codebook) -> Result<String, RpgError> {
    let n = cb.spec().n();
    if n > 3 {
        return Err(RpgError::TooManyDimensions(n));
    }
    let container = Container::for_codebook(cb);
    let mut out = String::new();
    out.push_str(&format!(
        "container: {}\n",
        (0..n)
            .map(|i| container.edge_extent(i).to_string())
            .collect::<Vec<_>>()
            .join(" x ")
    ));
    for word in cb.words() {
        let b = block_of(word, &container).expect("word from codebook");
        let origin = b
            .origin
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let size = b
            .size
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("block: ({origin}) size ({size})\n"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::model::{descriptive_length, is_prefix_code, kraft_sum, word, ChannelSpec};
    use num_traits::ToPrimitive;

    fn spec(sizes: &[u64]) -> ChannelSpec {
        ChannelSpec::new(sizes.to_vec()).unwrap()
    }

    fn chain_22() -> Codebook {
        Codebook::new(
            spec(&[2, 2]),
            vec![word(&[&[0], &[]]), word(&[&[1], &[0]]), word(&[&[1, 1], &[1]])],
        )
        .unwrap()
    }

    fn core_222() -> Codebook {
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
    fn blocks_of_two_channel_chain() {
        let cb = chain_22();
        let container = Container::for_codebook(&cb);
        assert_eq!(container.max_lengths(), &[2, 1]);

        let b0 = block_of(cb.word(0), &container).unwrap();
        assert_eq!(b0.origin(), &[BigUint::from(0u32), BigUint::from(0u32)]);
        assert_eq!(b0.size(), &[BigUint::from(2u32), BigUint::from(2u32)]);

        let b2 = block_of(cb.word(2), &container).unwrap();
        assert_eq!(b2.origin(), &[BigUint::from(3u32), BigUint::from(1u32)]);
        assert_eq!(b2.size(), &[BigUint::from(1u32), BigUint::from(1u32)]);
    }

    #[test]
    fn all_empty_word_fills_container() {
        let cb = Codebook::new(spec(&[2, 3]), vec![Word::empty(2)]).unwrap();
        let container = Container::for_codebook(&cb);
        let b = block_of(cb.word(0), &container).unwrap();
        assert_eq!(b.origin(), &[BigUint::from(0u32), BigUint::from(0u32)]);
        assert_eq!(b.volume(), container.volume());
    }

    use crate::model::Word;

    #[test]
    fn disjointness_cases() {
        let cb = chain_22();
        let container = Container::for_codebook(&cb);
        let b0 = block_of(cb.word(0), &container).unwrap();
        let b1 = block_of(cb.word(1), &container).unwrap();
        assert!(blocks_disjoint(&b0, &b1));
        assert!(!blocks_disjoint(&b0, &b0));
    }

    #[test]
    fn interweave_blocks_are_pairwise_disjoint() {
        let cb = core_222();
        let container = Container::for_codebook(&cb);
        let blocks: Vec<Block> = cb
            .words()
            .iter()
            .map(|w| block_of(w, &container).unwrap())
            .collect();
        for i in 0..blocks.len() {
            for j in (i + 1)..blocks.len() {
                assert!(blocks_disjoint(&blocks[i], &blocks[j]));
            }
        }
        assert!(overlap_free(&cb));
    }

    #[test]
    fn volume_identity() {
        // vol(block) = vol(container) * exp(-|c|): compare ln(1/rel) with |c|.
        let cb = chain_22();
        for w in cb.words() {
            let rel = relative_volume(w, &cb);
            let dl = descriptive_length(w, cb.spec());
            let inv = rel.recip();
            let ln_inv = crate::exact::ExactReal::from_ln(&inv).unwrap();
            assert_eq!(ln_inv, dl);
        }
    }

    #[test]
    fn prefix_volume_sum_vs_kraft() {
        let cb = chain_22();
        let total: Rational = cb.words().iter().map(|w| relative_volume(w, &cb)).sum();
        assert_eq!(total, kraft_sum(&cb));
        assert_eq!(total, ratio(7, 8));
        assert!(is_prefix_code(&cb));
    }

    #[test]
    fn dump_is_line_per_block() {
        let cb = core_222();
        let dump = dump_blocks(&cb).unwrap();
        assert_eq!(dump.lines().count(), 1 + cb.len());
        let wide = Codebook::new(spec(&[2, 2, 2, 2]), vec![Word::empty(4)]).unwrap();
        assert_eq!(dump_blocks(&wide), Err(RpgError::TooManyDimensions(4)));
    }

    #[test]
    fn oracle_equivalence_on_samples() {
        let good = chain_22();
        assert_eq!(overlap_free(&good), is_prefix_code(&good));
        let bad = Codebook::new(
            spec(&[2, 2]),
            vec![word(&[&[0], &[]]), word(&[&[0, 1], &[1]])],
        )
        .unwrap();
        assert_eq!(overlap_free(&bad), is_prefix_code(&bad));
        assert!(!overlap_free(&bad));
    }

    #[test]
    fn u64_extent_sanity() {
        let cb = Codebook::new(spec(&[5, 3]), vec![word(&[&[4, 4, 4], &[2]])]).unwrap();
        let container = Container::for_codebook(&cb);
        assert_eq!(container.edge_extent(0).to_u64(), Some(125));
    }
}
