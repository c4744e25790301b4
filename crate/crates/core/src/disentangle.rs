//! Disentangling: given a partition of the channels that fails separation,
//! rewrite the lifted selvage core so that one channel reads first, and pad
//! it into an entropy-achieving tree-decodable code on the product-spec
//! probability assembly.
//!
//! Two constructions apply. The non-binary rewrite replaces the failing core
//! row using symbol 2 on a channel of size greater than 2. The binary power
//! fold applies when every witness-weighted channel in the failing part is
//! binary: it appends runs to one binary channel and empties a channel whose
//! size is a power of two.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use thiserror::Error;

use crate::exact::Rational;
use crate::model::{ChannelSpec, Codebook, ModelError, ProbMultiset, Word};
use crate::selvage::{selvage_core, SelvageError};
use crate::separation::{complement_product, enumerate_solutions, Partition, SeparationError};
use crate::tree::{decide_tree_decodable, Decodability, DecodingTree, TreeError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DisentangleError {
    #[error("components of a liftable codebook must use only symbols 0 and 1")]
    NonBinarySymbol,
    #[error("witness does not solve the separation equation for part {0}")]
    WitnessDoesNotSolve(usize),
    #[error("witness puts no weight inside part {0}")]
    WitnessNotViolating(usize),
    #[error("the non-binary rewrite needs a channel of size > 2 with witness weight inside the failing part")]
    NonBinaryRewriteNotApplicable,
    #[error("the binary fold needs an unweighted outside channel whose size is a power of 2")]
    BinaryFoldNotApplicable,
    #[error("partition is a separation: nothing to disentangle")]
    PartitionSeparates,
    #[error("no witness admits either construction")]
    NoApplicableCase,
    #[error(transparent)]
    Separation(#[from] SeparationError),
    #[error(transparent)]
    Selvage(#[from] SelvageError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A base spec with a partition of its positions and the induced product
/// spec (one channel per part, sized by the part's product).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpec {
    base: ChannelSpec,
    partition: Partition,
    product: ChannelSpec,
}

impl ProductSpec {
    pub fn new(base: ChannelSpec, partition: Partition) -> Result<Self, DisentangleError> {
        // Re-validate the partition against this spec.
        let partition = Partition::new(partition.parts().to_vec(), &base)?;
        let sizes = partition
            .parts()
            .iter()
            .map(|part| part.iter().map(|&k| base.size(k)).product())
            .collect();
        let product = ChannelSpec::new(sizes).expect("products of sizes >= 2");
        Ok(Self {
            base,
            partition,
            product,
        })
    }

    pub fn base(&self) -> &ChannelSpec {
        &self.base
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn product(&self) -> &ChannelSpec {
        &self.product
    }

    pub fn t(&self) -> usize {
        self.partition.t()
    }
}

/// Reinterprets a product-spec codebook as a base-spec codebook: component
/// `i` copies the product component of the part containing `i`. Only valid
/// when every symbol is 0 or 1, since a part channel fans out to base
/// channels of arbitrary sizes.
pub fn lift_to_base(cb: &Codebook, spec: &ProductSpec) -> Result<Codebook, DisentangleError> {
    let mut words = Vec::with_capacity(cb.len());
    for w in cb.words() {
        for comp in w.components() {
            if comp.iter().any(|&s| s > 1) {
                return Err(DisentangleError::NonBinarySymbol);
            }
        }
        let components = (0..spec.base.n())
            .map(|i| w.component(spec.partition.part_of(i)).to_vec())
            .collect();
        words.push(Word::new(components));
    }
    Ok(Codebook::new(spec.base.clone(), words)?)
}

/// A failing part with a violating witness, validated on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisentangleInput {
    pub spec: ProductSpec,
    /// Index of the failing part j*.
    pub failing_part: usize,
    /// Non-negative solution x* of the separation equation for j*.
    pub witness: Vec<u32>,
    /// Positions with positive witness weight.
    pub positive: BTreeSet<usize>,
}

impl DisentangleInput {
    pub fn new(
        spec: ProductSpec,
        failing_part: usize,
        witness: Vec<u32>,
    ) -> Result<Self, DisentangleError> {
        let part = &spec.partition.parts()[failing_part];
        let rhs = complement_product(part, &spec.base);
        let mut product = BigUint::one();
        for (k, &e) in witness.iter().enumerate() {
            product *= BigUint::from(spec.base.size(k)).pow(e);
        }
        if product != rhs {
            return Err(DisentangleError::WitnessDoesNotSolve(failing_part));
        }
        if !part.iter().any(|&k| witness[k] > 0) {
            return Err(DisentangleError::WitnessNotViolating(failing_part));
        }
        let positive = (0..witness.len()).filter(|&k| witness[k] > 0).collect();
        Ok(Self {
            spec,
            failing_part,
            witness,
            positive,
        })
    }

    fn part(&self) -> &BTreeSet<usize> {
        &self.spec.partition.parts()[self.failing_part]
    }
}

/// A constructed code together with its decoding tree and the product-spec
/// assembly it achieves entropy on (ordered to match the codebook rows).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisentangleOutput {
    pub codebook: Codebook,
    pub tree: DecodingTree,
    pub spa: ProbMultiset,
    /// The channel read at the root.
    pub pivot_channel: usize,
    /// Channel emptied by the binary fold, when that construction ran.
    pub folded_channel: Option<usize>,
    /// Rows 0..t are the rewritten core; the rest are padding.
    pub core_rows: usize,
}

/// Probability assembly of the product spec, ordered core-first to match the
/// constructed codebook.
fn product_assembly(spec: &ProductSpec, filler_count: usize) -> Result<ProbMultiset, ModelError> {
    let total = BigInt::from(spec.base.alphabet_product());
    let mut probs = Vec::with_capacity(spec.t() + filler_count);
    for j in 0..spec.t() {
        probs.push(Rational::new(
            BigInt::from(spec.product.size(j)),
            total.clone(),
        ));
    }
    for _ in 0..filler_count {
        probs.push(Rational::new(BigInt::one(), total.clone()));
    }
    ProbMultiset::new(probs)
}

/// Every word with the given per-channel lengths, in lexicographic order,
/// with fixed leading symbols per channel.
fn words_with_profile(
    spec: &ChannelSpec,
    lengths: &[usize],
    fixed_heads: &[Option<u64>],
) -> Vec<Word> {
    let free_positions: Vec<(usize, usize)> = (0..spec.n())
        .flat_map(|i| {
            let start = usize::from(fixed_heads[i].is_some());
            (start..lengths[i]).map(move |d| (i, d))
        })
        .collect();
    let template: Vec<Vec<u64>> = (0..spec.n())
        .map(|i| {
            let mut comp = vec![0u64; lengths[i]];
            if let Some(head) = fixed_heads[i] {
                if lengths[i] > 0 {
                    comp[0] = head;
                }
            }
            comp
        })
        .collect();
    let mut out = Vec::new();
    let mut current = template;
    loop {
        out.push(Word::new(current.clone()));
        let mut pos = free_positions.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            let (i, d) = free_positions[pos];
            current[i][d] += 1;
            if current[i][d] < spec.size(i) {
                break;
            }
            current[i][d] = 0;
        }
    }
}

/// True when `prefix` is a component-wise prefix of `word`.
fn covers(prefix: &Word, word: &Word) -> bool {
    prefix
        .components()
        .iter()
        .zip(word.components())
        .all(|(p, w)| w.len() >= p.len() && &w[..p.len()] == &p[..])
}

/// Root the tree at `pivot` and solve each first-symbol branch with the
/// guillotine decision procedure.
fn tree_with_root(
    codebook: &Codebook,
    pivot: usize,
) -> Result<DecodingTree, DisentangleError> {
    let arity = codebook.spec().size(pivot) as usize;
    let mut children: Vec<Option<DecodingTree>> = vec![None; arity];
    for symbol in 0..arity as u64 {
        let members: Vec<usize> = (0..codebook.len())
            .filter(|&j| codebook.word(j).component(pivot).first() == Some(&symbol))
            .collect();
        if members.is_empty() {
            continue;
        }
        let words = members
            .iter()
            .map(|&j| {
                let mut comps = codebook.word(j).components().to_vec();
                comps[pivot] = comps[pivot][1..].to_vec();
                Word::new(comps)
            })
            .collect();
        let branch = Codebook::new(codebook.spec().clone(), words)?;
        match decide_tree_decodable(&branch)? {
            Decodability::Decodable(sub) => {
                children[symbol as usize] = Some(remap_leaves(&sub, &members));
            }
            Decodability::NotDecodable { .. } => {
                unreachable!("disentangled branches are tree decodable by construction")
            }
        }
    }
    Ok(DecodingTree::Node {
        class: pivot,
        children,
    })
}

fn remap_leaves(tree: &DecodingTree, members: &[usize]) -> DecodingTree {
    match tree {
        DecodingTree::Leaf(pos) => DecodingTree::Leaf(members[*pos]),
        DecodingTree::Node { class, children } => DecodingTree::Node {
            class: *class,
            children: children
                .iter()
                .map(|c| c.as_ref().map(|c| remap_leaves(c, members)))
                .collect(),
        },
    }
}

fn assemble_output(
    spec: &ProductSpec,
    rows: Vec<Word>,
    fillers: Vec<Word>,
    pivot: usize,
    folded: Option<usize>,
) -> Result<DisentangleOutput, DisentangleError> {
    let core_rows = rows.len();
    // The padding must bring the codeword count to prod(sizes) - sum(products) + t.
    let product_total = spec.base.alphabet_product();
    let product_sum: u64 = spec.product.sizes().iter().sum();
    let expected_fillers = product_total - BigUint::from(product_sum);
    assert_eq!(
        BigUint::from(fillers.len()),
        expected_fillers,
        "padding count must match the volume argument"
    );
    let spa = product_assembly(spec, fillers.len())?;
    let mut words = rows;
    words.extend(fillers);
    let codebook = Codebook::new(spec.base.clone(), words)?;
    let tree = tree_with_root(&codebook, pivot)?;
    Ok(DisentangleOutput {
        codebook,
        tree,
        spa,
        pivot_channel: pivot,
        folded_channel: folded,
        core_rows,
    })
}

/// The non-binary rewrite. Picks the smallest in-part position `i*` with
/// positive witness weight and size > 2, rewrites core row j* to carry the
/// witness as symbol runs (2-run on `i*`, 0-runs elsewhere), and pads the
/// four branch families under a root of class `i*`.
pub fn disentangle_nonbinary(input: &DisentangleInput) -> Result<DisentangleOutput, DisentangleError> {
    let spec = &input.spec;
    let base = &spec.base;
    let t = spec.t();
    let j_star = input.failing_part;
    let pivot = *input
        .part()
        .iter()
        .find(|&&k| input.witness[k] > 0 && base.size(k) > 2)
        .ok_or(DisentangleError::NonBinaryRewriteNotApplicable)?;

    let core = lift_to_base(&selvage_core(&spec.product)?, spec)?;
    let mut rows: Vec<Word> = core.words().to_vec();
    rows[j_star] = Word::new(
        (0..base.n())
            .map(|i| {
                if i == pivot {
                    vec![2u64; input.witness[i] as usize]
                } else if input.witness[i] > 0 {
                    vec![0u64; input.witness[i] as usize]
                } else {
                    Vec::new()
                }
            })
            .collect(),
    );

    let prev = (j_star + t - 1) % t;
    let unit_lengths: Vec<usize> = vec![1; base.n()];
    let mut fillers = Vec::new();

    // Branch 0: unit words minus those covered by the rows that start with
    // 0 on the pivot (every row except j* and its predecessor).
    let mut heads = vec![None; base.n()];
    heads[pivot] = Some(0u64);
    for w in words_with_profile(base, &unit_lengths, &heads) {
        let covered = (0..t)
            .filter(|&j| j != j_star && j != prev)
            .any(|j| covers(&rows[j], &w));
        if !covered {
            fillers.push(w);
        }
    }

    // Branch 1: unit words minus those covered by the predecessor row.
    heads[pivot] = Some(1u64);
    for w in words_with_profile(base, &unit_lengths, &heads) {
        if !covers(&rows[prev], &w) {
            fillers.push(w);
        }
    }

    // Branch 2: words one symbol deeper than the rewritten row on every
    // channel of the failing part, minus those it covers.
    let mut branch2_lengths: Vec<usize> = (0..base.n())
        .map(|i| input.witness[i] as usize)
        .collect();
    for &k in input.part() {
        branch2_lengths[k] += 1;
    }
    heads = vec![None; base.n()];
    heads[pivot] = Some(2u64);
    for w in words_with_profile(base, &branch2_lengths, &heads) {
        if !covers(&rows[j_star], &w) {
            fillers.push(w);
        }
    }

    // Branches 3 and beyond: full unit slices.
    for symbol in 3..base.size(pivot) {
        heads = vec![None; base.n()];
        heads[pivot] = Some(symbol);
        fillers.extend(words_with_profile(base, &unit_lengths, &heads));
    }

    assemble_output(spec, rows, fillers, pivot, None)
}

/// The binary power fold. Requires every witness-weighted channel of the
/// failing part to be binary; appends a 1-run or 0-run of length r on a
/// binary in-part channel `i*` while emptying an outside channel of size
/// `2^r`, which becomes dummy.
pub fn disentangle_binary_power(
    input: &DisentangleInput,
) -> Result<DisentangleOutput, DisentangleError> {
    let spec = &input.spec;
    let base = &spec.base;
    let t = spec.t();
    if input
        .part()
        .iter()
        .any(|&k| input.witness[k] > 0 && base.size(k) != 2)
    {
        return Err(DisentangleError::BinaryFoldNotApplicable);
    }
    let pivot = *input
        .part()
        .iter()
        .find(|&&k| input.witness[k] > 0)
        .expect("validated violating witness");
    debug_assert_eq!(base.size(pivot), 2);
    // An outside channel with no witness weight whose size is a power of 2.
    let folded = (0..base.n())
        .filter(|&k| !input.part().contains(&k) && input.witness[k] == 0)
        .find(|&k| base.size(k).is_power_of_two())
        .ok_or(DisentangleError::BinaryFoldNotApplicable)?;
    let run = base.size(folded).trailing_zeros() as usize;

    let core = lift_to_base(&selvage_core(&spec.product)?, spec)?;
    let j_folded = spec.partition.part_of(folded);
    let j_marked = (j_folded + t - 2) % t;

    let rows: Vec<Word> = (0..t)
        .map(|j| {
            if j == j_folded {
                return core.word(j).clone();
            }
            let fill = if j == j_marked { 1u64 } else { 0u64 };
            Word::new(
                (0..base.n())
                    .map(|i| {
                        if i == pivot {
                            let mut comp = core.word(j).component(i).to_vec();
                            comp.extend(std::iter::repeat(fill).take(run));
                            comp
                        } else if i == folded {
                            Vec::new()
                        } else {
                            core.word(j).component(i).to_vec()
                        }
                    })
                    .collect(),
            )
        })
        .collect();

    // Padding: pivot reads 1 + r symbols, the folded channel none, every
    // other channel one.
    let lengths: Vec<usize> = (0..base.n())
        .map(|i| {
            if i == pivot {
                1 + run
            } else if i == folded {
                0
            } else {
                1
            }
        })
        .collect();
    let heads = vec![None; base.n()];
    let fillers: Vec<Word> = words_with_profile(base, &lengths, &heads)
        .into_iter()
        .filter(|w| !rows.iter().any(|row| covers(row, w)))
        .collect();

    assemble_output(spec, rows, fillers, pivot, Some(folded))
}

/// All violating witnesses for a part, in lexicographic order.
pub fn violating_witnesses(spec: &ProductSpec, part_index: usize) -> Vec<Vec<u32>> {
    let part = &spec.partition.parts()[part_index];
    let rhs = complement_product(part, &spec.base);
    enumerate_solutions(&spec.base, &rhs)
        .into_iter()
        .filter(|x| part.iter().any(|&k| x[k] > 0))
        .collect()
}

/// Scanning dispatch: try the non-binary rewrite over all failing parts and
/// witnesses in order, then the binary fold; report when the partition
/// separates (nothing to disentangle) or no witness fits either premise.
pub fn disentangle(
    base: &ChannelSpec,
    partition: &Partition,
) -> Result<DisentangleOutput, DisentangleError> {
    let spec = ProductSpec::new(base.clone(), partition.clone())?;
    let mut any_witness = false;
    for case_one in [true, false] {
        for j in 0..spec.t() {
            for witness in violating_witnesses(&spec, j) {
                any_witness = true;
                let input = DisentangleInput::new(spec.clone(), j, witness)?;
                let result = if case_one {
                    disentangle_nonbinary(&input)
                } else {
                    disentangle_binary_power(&input)
                };
                match result {
                    Ok(output) => return Ok(output),
                    Err(
                        DisentangleError::NonBinaryRewriteNotApplicable
                        | DisentangleError::BinaryFoldNotApplicable,
                    ) => continue,
                    Err(other) => return Err(other),
                }
            }
        }
    }
    if any_witness {
        Err(DisentangleError::NoApplicableCase)
    } else {
        Err(DisentangleError::PartitionSeparates)
    }
}
