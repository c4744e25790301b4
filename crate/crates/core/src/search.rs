//! Exact search for an optimal tree-decodable code on a probability
//! multiset: depth-first enumeration of decoding-tree shapes with exactly m
//! leaves, probabilities assigned by sorted matching.
//!
//! Shapes are grown slot by slot in nondecreasing descriptive depth, so
//! leaves are committed against the probabilities in sorted order and the
//! final pairing is automatically the rearrangement optimum. Three prunes
//! keep the space tractable:
//!
//! - canonical ordering: slots of equal depth receive decisions in a fixed
//!   rank order, killing permutation duplicates;
//! - dominance: no leaf may sit deeper than a vacant slot, since pulling it
//!   up would strictly improve the cost;
//! - a Kraft-entropy lower bound: the cheapest continuation given the open
//!   slots' Kraft mass, compared against the incumbent with exact rational
//!   interval arithmetic (never floating point).
//!
//! A search that exhausts the space — or meets the entropy bound exactly —
//! returns a certified optimum; hitting the time budget returns the
//! incumbent flagged as non-certified.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{ln_interval, ExactReal, Rational};
use crate::model::{entropy, ChannelSpec, ModelError, ProbMultiset};
use crate::tree::DecodingTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("need at least one probability")]
    EmptyDistribution,
    #[error("need at least one channel")]
    EmptySpec,
    #[error("lengths and probabilities differ in count: {lengths} vs {probs}")]
    PairingSizeMismatch { lengths: usize, probs: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Wall-clock budget; `None` searches to completion.
    pub budget: Option<Duration>,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Optimal shape; leaves are numbered in nondecreasing depth order.
    pub shape: DecodingTree,
    /// `assignment[k]` is the input index of the probability at leaf `k`.
    pub assignment: Vec<usize>,
    /// Expected descriptive length under the sorted assignment.
    pub expected: ExactReal,
    /// Exact equality with the source entropy.
    pub optimal_is_entropy: bool,
    /// False only when the budget expired before the space was exhausted.
    pub certified: bool,
    pub nodes_explored: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Decision {
    Leaf,
    /// Expand into `arity` children on the rep channel (2 <= arity <= q).
    Expand { rep: usize, arity: usize },
}

/// Largest-probability-to-shortest-length pairing: returns the probability
/// index assigned to each length, ties broken by input order.
pub fn sorted_assignment(
    probs: &ProbMultiset,
    lengths: &[ExactReal],
) -> Result<Vec<usize>, SearchError> {
    if probs.len() != lengths.len() {
        return Err(SearchError::PairingSizeMismatch {
            lengths: lengths.len(),
            probs: probs.len(),
        });
    }
    let mut prob_order: Vec<usize> = (0..probs.len()).collect();
    prob_order.sort_by(|&a, &b| probs.probs()[b].cmp(&probs.probs()[a]).then(a.cmp(&b)));
    let mut length_order: Vec<usize> = (0..lengths.len()).collect();
    length_order.sort_by(|&a, &b| lengths[a].cmp(&lengths[b]).then(a.cmp(&b)));
    let mut pairing = vec![0usize; lengths.len()];
    for (rank, &length_pos) in length_order.iter().enumerate() {
        pairing[length_pos] = prob_order[rank];
    }
    Ok(pairing)
}

/// Globally minimal expected descriptive length over all decoding-tree
/// shapes with one leaf per probability.
pub fn optimal_tree_code(
    probs: &ProbMultiset,
    spec: &ChannelSpec,
    options: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    if probs.is_empty() {
        return Err(SearchError::EmptyDistribution);
    }
    if spec.n() == 0 {
        return Err(SearchError::EmptySpec);
    }
    let source_entropy = entropy(probs)?;

    // Channels sharing an alphabet size are interchangeable for cost;
    // search one representative per size, cheapest first.
    let mut reps: Vec<(usize, u64)> = Vec::new();
    for (i, &q) in spec.sizes().iter().enumerate() {
        if !reps.iter().any(|&(_, seen)| seen == q) {
            reps.push((i, q));
        }
    }
    reps.sort_by_key(|&(_, q)| q);

    // Probabilities sorted descending, remembering input positions.
    let mut perm: Vec<usize> = (0..probs.len()).collect();
    perm.sort_by(|&a, &b| probs.probs()[b].cmp(&probs.probs()[a]).then(a.cmp(&b)));
    let sorted: Vec<Rational> = perm.iter().map(|&i| probs.probs()[i].clone()).collect();

    let m = sorted.len();
    let mut suffix_h = vec![ExactReal::zero(); m + 1];
    let mut suffix_plnp = vec![ExactReal::zero(); m + 1];
    let mut suffix_mass = vec![Rational::zero(); m + 1];
    for j in (0..m).rev() {
        suffix_mass[j] = &suffix_mass[j + 1] + &sorted[j];
        let mut h = suffix_h[j + 1].clone();
        h.add_assign(
            &ExactReal::from_ln(&sorted[j].recip())
                .map_err(ModelError::from)?
                .scaled(&sorted[j]),
        );
        suffix_h[j] = h;
    }
    for j in 0..m {
        let mass = &suffix_mass[j];
        // mass * ln(mass); the final suffix of mass 0 never participates.
        suffix_plnp[j] = ExactReal::from_ln(mass)
            .map_err(ModelError::from)?
            .scaled(mass);
    }

    let mut searcher = Searcher {
        reps,
        m,
        probs: sorted,
        suffix_h,
        suffix_plnp,
        suffix_mass,
        entropy: source_entropy.clone(),
        groups: BTreeMap::new(),
        open: 0,
        committed: 0,
        cost: ExactReal::zero(),
        cost_stack: Vec::new(),
        kraft: Rational::one(),
        kraft_stack: Vec::new(),
        vacancy: u128::MAX,
        trace: Vec::new(),
        best_cost: None,
        best_trace: Vec::new(),
        deadline: options.budget.map(|b| Instant::now() + b),
        nodes: 0,
        out_of_time: false,
        entropy_hit: false,
        ln_cache: HashMap::new(),
        depth_ln_cache: HashMap::new(),
    };

    searcher.greedy_incumbent();
    searcher.groups.insert(1, 1);
    searcher.open = 1;
    searcher.dfs();

    let best_cost = searcher.best_cost.clone().expect("greedy seeds an incumbent");
    let optimal_is_entropy = best_cost == source_entropy;
    let shape = searcher.build_tree(&searcher.best_trace);
    Ok(SearchResult {
        shape,
        assignment: perm,
        expected: best_cost,
        optimal_is_entropy,
        certified: !searcher.out_of_time,
        nodes_explored: searcher.nodes,
    })
}

struct Searcher {
    reps: Vec<(usize, u64)>,
    m: usize,
    probs: Vec<Rational>,
    suffix_h: Vec<ExactReal>,
    suffix_plnp: Vec<ExactReal>,
    suffix_mass: Vec<Rational>,
    entropy: ExactReal,

    /// Open slots not in the group currently being decided, keyed by depth
    /// product `prod q_i^(count_i)`; the key determines the depth exactly.
    groups: BTreeMap<u128, usize>,
    /// All open slots, including the rest of the current group.
    open: usize,
    committed: usize,
    cost: ExactReal,
    cost_stack: Vec<ExactReal>,
    kraft: Rational,
    kraft_stack: Vec<Rational>,
    /// Shallowest vacant slot created so far (depth product); no leaf may
    /// lie strictly deeper.
    vacancy: u128,
    trace: Vec<(u128, Decision)>,

    best_cost: Option<ExactReal>,
    best_trace: Vec<(u128, Decision)>,

    deadline: Option<Instant>,
    nodes: u64,
    out_of_time: bool,
    entropy_hit: bool,

    ln_cache: HashMap<u64, (Rational, Rational)>,
    depth_ln_cache: HashMap<u128, ExactReal>,
}

const INTERVAL_BITS: u32 = 128;

impl Searcher {
    fn stopped(&self) -> bool {
        self.out_of_time || self.entropy_hit
    }

    fn dfs(&mut self) {
        if self.stopped() {
            return;
        }
        self.nodes += 1;
        if self.nodes % 8192 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    self.out_of_time = true;
                    return;
                }
            }
        }
        match self.groups.pop_first() {
            None => {
                if self.committed == self.m {
                    self.complete();
                }
            }
            Some((depth, count)) => {
                // A slot deeper than a vacancy can never become a leaf.
                if depth <= self.vacancy {
                    self.decide_group(depth, count, 0);
                }
                self.groups.insert(depth, count);
            }
        }
    }

    /// Assigns decisions to the remaining slots of the depth group in
    /// nondecreasing rank order (rank 0 is Leaf, then expansions).
    fn decide_group(&mut self, depth: u128, remaining: usize, min_rank: usize) {
        if self.stopped() {
            return;
        }
        if remaining == 0 {
            self.dfs();
            return;
        }
        let n_expansions: usize = self
            .reps
            .iter()
            .map(|&(_, q)| q as usize - 1)
            .sum();
        for rank in min_rank..=n_expansions {
            if rank == 0 {
                self.try_leaf(depth, remaining);
            } else {
                self.try_expand(depth, remaining, rank);
            }
            if self.stopped() {
                return;
            }
        }
    }

    fn rank_to_expansion(&self, rank: usize) -> (usize, usize) {
        // rank 1.. maps to (rep 0, k=q0), (rep 0, q0-1), ..., (rep 1, q1), ...
        let mut r = rank - 1;
        for (rep, &(_, q)) in self.reps.iter().enumerate() {
            let options = q as usize - 1; // k in q, q-1, ..., 2
            if r < options {
                return (rep, q as usize - r);
            }
            r -= options;
        }
        unreachable!("rank out of range")
    }

    fn try_leaf(&mut self, depth: u128, remaining: usize) {
        // open <= m - committed is invariant, so a probability remains.
        let p = self.probs[self.committed].clone();
        let term = self.depth_ln(depth).scaled(&p);
        self.cost_stack.push(self.cost.clone());
        self.cost.add_assign(&term);
        self.kraft_stack.push(self.kraft.clone());
        self.kraft -= inverse_of(depth);
        self.committed += 1;
        self.open -= 1;
        self.trace.push((depth, Decision::Leaf));

        if !self.prune(Some(depth)) {
            self.decide_group(depth, remaining - 1, 0);
        }

        self.trace.pop();
        self.open += 1;
        self.committed -= 1;
        self.kraft = self.kraft_stack.pop().expect("kraft stack");
        self.cost = self.cost_stack.pop().expect("cost stack");
    }

    fn try_expand(&mut self, depth: u128, remaining: usize, rank: usize) {
        let (rep, arity) = self.rank_to_expansion(rank);
        let q = self.reps[rep].1;
        let child = match depth.checked_mul(q as u128) {
            Some(c) => c,
            None => return, // beyond any depth an optimal desk-scale code uses
        };
        // Each new slot still needs a leaf of its own.
        if self.open + arity - 1 > self.m - self.committed {
            return;
        }
        // Children deeper than a vacancy could never terminate.
        if child > self.vacancy {
            return;
        }
        let old_vacancy = self.vacancy;
        if (arity as u64) < q {
            self.vacancy = self.vacancy.min(child);
        }
        *self.groups.entry(child).or_insert(0) += arity;
        self.open += arity - 1;
        self.kraft_stack.push(self.kraft.clone());
        let child_mass = inverse_of(child);
        self.kraft += child_mass * Rational::from_integer(BigInt::from(arity)) - inverse_of(depth);
        self.trace.push((depth, Decision::Expand { rep, arity }));

        if !self.prune(Some(depth)) {
            self.decide_group(depth, remaining - 1, rank);
        }

        self.trace.pop();
        self.kraft = self.kraft_stack.pop().expect("kraft stack");
        self.open -= arity - 1;
        let entry = self.groups.get_mut(&child).expect("child group");
        *entry -= arity;
        if *entry == 0 {
            self.groups.remove(&child);
        }
        self.vacancy = old_vacancy;
    }

    fn complete(&mut self) {
        debug_assert_eq!(self.open, 0);
        let better = match &self.best_cost {
            None => true,
            Some(best) => self.cost < *best,
        };
        if better {
            self.best_cost = Some(self.cost.clone());
            self.best_trace = self.trace.clone();
            if self.cost == self.entropy {
                // The entropy bound certifies global optimality outright.
                self.entropy_hit = true;
            }
        }
    }

    /// True when the state provably cannot beat the incumbent. Sound but
    /// not complete: an undecided interval just keeps exploring.
    fn prune(&mut self, current_group: Option<u128>) -> bool {
        let j = self.committed;
        let best = match &self.best_cost {
            Some(b) => b.clone(),
            None => return false,
        };
        if j == self.m {
            // All probabilities placed; any open slot is unfillable.
            return self.open > 0;
        }

        // Kraft-entropy bound: cost + H_rem + M ln M - M ln K, with
        // -ln K >= y + y^2/2 + y^3/3 for y = 1 - K in [0, 1).
        let mut excess = self.cost.clone();
        excess.add_assign(&self.suffix_h[j]);
        excess.add_assign(&self.suffix_plnp[j]);
        excess.sub_assign(&best);
        let y = Rational::one() - &self.kraft;
        let rational_part = if y.is_positive() {
            let y2 = &y * &y;
            let y3 = &y2 * &y;
            let series = &y + y2 / Rational::from_integer(BigInt::from(2))
                + y3 / Rational::from_integer(BigInt::from(3));
            &self.suffix_mass[j] * series
        } else {
            Rational::zero()
        };
        let (lo, _) = self.interval_of(&excess);
        if (lo + &rational_part).is_positive() || rational_part.is_zero() && excess.is_zero() {
            return true;
        }

        // Depth bound: every remaining leaf is at least as deep as the
        // shallowest open slot.
        let min_depth = match (current_group, self.groups.keys().next()) {
            (Some(d), Some(&g)) => Some(d.min(g)),
            (Some(d), None) => Some(d),
            (None, Some(&g)) => Some(g),
            (None, None) => None,
        };
        if let Some(min_depth) = min_depth {
            if min_depth > 1 {
                let mut floor = self.cost.clone();
                floor.add_assign(&self.depth_ln(min_depth).scaled(&self.suffix_mass[j]));
                floor.sub_assign(&best);
                let (lo, _) = self.interval_of(&floor);
                if !lo.is_negative() {
                    return true;
                }
            }
        }
        false
    }

    fn interval_of(&mut self, value: &ExactReal) -> (Rational, Rational) {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (p, c) in value.terms() {
            let (plo, phi) = self
                .ln_cache
                .entry(p)
                .or_insert_with(|| {
                    ln_interval(&Rational::from_integer(p.into()), INTERVAL_BITS)
                })
                .clone();
            if c.is_positive() {
                lo += c * &plo;
                hi += c * &phi;
            } else {
                lo += c * &phi;
                hi += c * &plo;
            }
        }
        (lo, hi)
    }

    /// `ln(depth)` where the depth product factors over the channel sizes.
    fn depth_ln(&mut self, depth: u128) -> ExactReal {
        if let Some(v) = self.depth_ln_cache.get(&depth) {
            return v.clone();
        }
        let mut rest = depth;
        let mut value = ExactReal::zero();
        for &(_, q) in &self.reps {
            while rest % q as u128 == 0 {
                rest /= q as u128;
                value.add_assign(&ExactReal::from_ln_u64(q));
            }
        }
        debug_assert_eq!(rest, 1, "depth products factor over channel sizes");
        self.depth_ln_cache.insert(depth, value.clone());
        value
    }

    /// Seeds the incumbent: for each representative channel, repeatedly
    /// expand the shallowest slot until m slots exist, then leaf them all.
    fn greedy_incumbent(&mut self) {
        for rep in 0..self.reps.len() {
            let q = self.reps[rep].1 as usize;
            let mut slots: BTreeMap<u128, usize> = BTreeMap::new();
            slots.insert(1, 1);
            let mut open = 1usize;
            let mut trace: Vec<(u128, Decision)> = Vec::new();
            while open < self.m {
                let (&depth, _) = slots.iter().next().expect("open slot");
                let count = slots.remove(&depth).unwrap();
                if count > 1 {
                    slots.insert(depth, count - 1);
                }
                let arity = q.min(self.m - open + 1);
                let child = depth
                    .checked_mul(q as u128)
                    .expect("greedy depth fits 128 bits");
                *slots.entry(child).or_insert(0) += arity;
                open += arity - 1;
                trace.push((depth, Decision::Expand { rep, arity }));
            }
            let mut cost = ExactReal::zero();
            let mut leaf_rank = 0usize;
            for (&depth, &count) in slots.iter() {
                for _ in 0..count {
                    cost.add_assign(&self.depth_ln(depth).scaled(&self.probs[leaf_rank].clone()));
                    trace.push((depth, Decision::Leaf));
                    leaf_rank += 1;
                }
            }
            debug_assert_eq!(leaf_rank, self.m);
            let better = match &self.best_cost {
                None => true,
                Some(best) => cost < *best,
            };
            if better {
                self.best_cost = Some(cost);
                self.best_trace = trace;
            }
        }
    }

    /// Replays a trace into a concrete tree; slots are matched FIFO per
    /// depth, which reproduces the multiset the trace was recorded from.
    fn build_tree(&self, trace: &[(u128, Decision)]) -> DecodingTree {
        enum Build {
            Pending,
            Leaf(usize),
            Internal {
                class: usize,
                arity_total: usize,
                children: Vec<usize>,
            },
        }
        let mut arena: Vec<Build> = vec![Build::Pending];
        let mut queues: BTreeMap<u128, VecDeque<usize>> = BTreeMap::new();
        queues.entry(1).or_default().push_back(0);
        let mut leaves = 0usize;
        for &(depth, decision) in trace {
            let id = queues
                .get_mut(&depth)
                .and_then(VecDeque::pop_front)
                .expect("trace is replayable");
            match decision {
                Decision::Leaf => {
                    arena[id] = Build::Leaf(leaves);
                    leaves += 1;
                }
                Decision::Expand { rep, arity } => {
                    let (class, q) = self.reps[rep];
                    let child_depth = depth * q as u128;
                    let mut children = Vec::with_capacity(arity);
                    for _ in 0..arity {
                        let child_id = arena.len();
                        arena.push(Build::Pending);
                        queues.entry(child_depth).or_default().push_back(child_id);
                        children.push(child_id);
                    }
                    arena[id] = Build::Internal {
                        class,
                        arity_total: q as usize,
                        children,
                    };
                }
            }
        }
        fn convert(arena: &[Build], id: usize) -> DecodingTree {
            match &arena[id] {
                Build::Pending => unreachable!("complete traces leave no pending slots"),
                Build::Leaf(idx) => DecodingTree::Leaf(*idx),
                Build::Internal {
                    class,
                    arity_total,
                    children,
                } => {
                    let mut slots: Vec<Option<DecodingTree>> = vec![None; *arity_total];
                    for (s, &child) in children.iter().enumerate() {
                        slots[s] = Some(convert(arena, child));
                    }
                    DecodingTree::Node {
                        class: *class,
                        children: slots,
                    }
                }
            }
        }
        convert(&arena, 0)
    }
}

fn inverse_of(depth: u128) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn spec(sizes: &[u64]) -> ChannelSpec {
        ChannelSpec::new(sizes.to_vec()).unwrap()
    }

    fn dist(fracs: &[(i64, i64)]) -> ProbMultiset {
        ProbMultiset::new(fracs.iter().map(|&(n, d)| ratio(n, d)).collect()).unwrap()
    }

    #[test]
    fn point_mass_needs_no_symbols() {
        let result = optimal_tree_code(
            &dist(&[(1, 1)]),
            &spec(&[5, 3, 2]),
            &SearchOptions::default(),
        )
        .unwrap();
        assert!(result.expected.is_zero());
        assert!(result.certified);
        assert_eq!(result.shape, DecodingTree::Leaf(0));
        assert!(result.optimal_is_entropy);
    }

    #[test]
    fn binary_triple_spa_is_entropy_achieving() {
        let out = crate::selvage::selvage_code(&spec(&[2, 2, 2])).unwrap();
        let result =
            optimal_tree_code(&out.spa, &spec(&[2, 2, 2]), &SearchOptions::default()).unwrap();
        assert!(result.certified);
        assert!(result.optimal_is_entropy);
        assert_eq!(
            result.expected,
            ExactReal::from_ln_u64(2).scaled(&ratio(9, 4))
        );
        assert_eq!(result.expected.to_decimal(6), "1.559581");
        assert_eq!(result.shape.leaf_count(), 5);
    }

    #[test]
    fn dyadic_distribution_matches_huffman_value() {
        // 1/2, 1/4, 1/4 over a binary channel: (3/2) ln 2.
        let result = optimal_tree_code(
            &dist(&[(1, 2), (1, 4), (1, 4)]),
            &spec(&[2]),
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(
            result.expected,
            ExactReal::from_ln_u64(2).scaled(&ratio(3, 2))
        );
        assert!(result.optimal_is_entropy);
    }

    #[test]
    fn skewed_distribution_on_binary_channel() {
        // 0.9 / 0.1: expected length ln 2, entropy strictly less.
        let result = optimal_tree_code(
            &dist(&[(9, 10), (1, 10)]),
            &spec(&[2]),
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(result.expected, ExactReal::from_ln_u64(2));
        assert!(!result.optimal_is_entropy);
        assert!(result.certified);
    }

    #[test]
    fn shape_spells_a_valid_tree() {
        let result = optimal_tree_code(
            &dist(&[(1, 2), (1, 4), (1, 8), (1, 8)]),
            &spec(&[2]),
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(result.shape.leaf_count(), 4);
        // Leaves must be numbered in nondecreasing depth order.
        let spelled = result.shape.spelled_words(1);
        let mut depths: Vec<(usize, usize)> = spelled
            .iter()
            .map(|(idx, w)| (*idx, w.component(0).len()))
            .collect();
        depths.sort();
        for pair in depths.windows(2) {
            assert!(pair[0].1 <= pair[1].1);
        }
    }

    #[test]
    fn sorted_assignment_pairs_extremes() {
        let probs = dist(&[(1, 4), (1, 2), (1, 4)]);
        let ln2 = ExactReal::from_ln_u64(2);
        let lengths = vec![ln2.scaled(&ratio(2, 1)), ln2.clone(), ln2.scaled(&ratio(2, 1))];
        let pairing = sorted_assignment(&probs, &lengths).unwrap();
        // The 1/2 goes to the single short length.
        assert_eq!(pairing[1], 1);
        // Expected value (3/2) ln 2.
        let mut total = ExactReal::zero();
        for (pos, &p_idx) in pairing.iter().enumerate() {
            total.add_assign(&lengths[pos].scaled(&probs.probs()[p_idx]));
        }
        assert_eq!(total, ln2.scaled(&ratio(3, 2)));
    }

    #[test]
    fn sorted_assignment_checks_sizes() {
        let probs = dist(&[(1, 1)]);
        assert!(matches!(
            sorted_assignment(&probs, &[]),
            Err(SearchError::PairingSizeMismatch { .. })
        ));
    }

    #[test]
    fn equal_channels_collapse_to_one() {
        // (2,2,2) on a dyadic distribution behaves like a single binary
        // channel; expected values agree exactly.
        let p = dist(&[(1, 2), (1, 4), (1, 8), (1, 16), (1, 16)]);
        let multi = optimal_tree_code(&p, &spec(&[2, 2, 2]), &SearchOptions::default()).unwrap();
        let single = optimal_tree_code(&p, &spec(&[2]), &SearchOptions::default()).unwrap();
        assert_eq!(multi.expected, single.expected);
        assert!(multi.optimal_is_entropy);
    }

    #[test]
    fn budget_zero_returns_uncertified_incumbent() {
        let out = crate::selvage::selvage_code(&spec(&[5, 3, 2])).unwrap();
        let result = optimal_tree_code(
            &out.spa,
            &spec(&[5, 3, 2]),
            &SearchOptions {
                budget: Some(Duration::from_millis(0)),
            },
        )
        .unwrap();
        assert!(!result.certified);
        // The incumbent is still a real shape with the right leaf count.
        assert_eq!(result.shape.leaf_count(), out.spa.len());
    }
}
