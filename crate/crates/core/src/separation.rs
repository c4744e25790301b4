//! Channel separation via bounded Diophantine enumeration.
//!
//! A subset of channel positions is *separated* when the only non-negative
//! integer solutions of `prod_q q^(x_q) = prod of the complement` put zero
//! weight on the subset. A partition into t separated parts is a
//! t-separation; admitting one for t >= 3 is a sufficient condition for the
//! existence of an optimal tree-decodable code that is not an optimal prefix
//! code, which we report as "above tree line" (and otherwise "unknown" —
//! the condition is sufficient only, never "below").

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::factor;
use crate::model::ChannelSpec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeparationError {
    #[error("part contains position {0}, spec has {1} channels")]
    PositionOutOfRange(usize, usize),
    #[error("position {0} appears in more than one part")]
    OverlappingParts(usize),
    #[error("parts must be non-empty")]
    EmptyPart,
    #[error("partition covers {got} of {want} positions")]
    IncompleteCover { got: usize, want: usize },
}

/// Prime-exponent matrix of the spec: `entries[r][k]` is the exponent of
/// `primes[r]` in the factorization of the k-th channel size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorMatrix {
    pub primes: Vec<u64>,
    pub entries: Vec<Vec<u32>>,
}

pub fn factor_matrix(spec: &ChannelSpec) -> FactorMatrix {
    let mut primes = BTreeSet::new();
    let factored: Vec<Vec<(u64, u32)>> = spec
        .sizes()
        .iter()
        .map(|&q| factor(&BigUint::from(q)).expect("u64 channel size"))
        .collect();
    for f in &factored {
        for (p, _) in f {
            primes.insert(*p);
        }
    }
    let primes: Vec<u64> = primes.into_iter().collect();
    let entries = primes
        .iter()
        .map(|&p| {
            factored
                .iter()
                .map(|f| {
                    f.iter()
                        .find(|(fp, _)| *fp == p)
                        .map(|(_, e)| *e)
                        .unwrap_or(0)
                })
                .collect()
        })
        .collect();
    FactorMatrix { primes, entries }
}

/// All non-negative integer vectors `x` with `prod_k q_k^(x_k) = rhs`, in
/// lexicographic order. Complete by construction: position k ranges over
/// every exponent whose power still divides the remaining quotient.
pub fn enumerate_solutions(spec: &ChannelSpec, rhs: &BigUint) -> Vec<Vec<u32>> {
    assert!(!rhs.is_zero(), "rhs must be positive");
    let mut out = Vec::new();
    let mut current = vec![0u32; spec.n()];
    fn descend(
        sizes: &[u64],
        pos: usize,
        remaining: BigUint,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if pos == sizes.len() {
            if remaining.is_one() {
                out.push(current.clone());
            }
            return;
        }
        let q = BigUint::from(sizes[pos]);
        let mut rem = remaining;
        let mut e = 0u32;
        loop {
            current[pos] = e;
            descend(sizes, pos + 1, rem.clone(), current, out);
            if !(&rem % &q).is_zero() {
                break;
            }
            rem /= &q;
            e += 1;
        }
        current[pos] = 0;
    }
    descend(spec.sizes(), 0, rhs.clone(), &mut current, &mut out);
    out
}

/// A non-negative solution certifying that a part is not separated: it
/// reaches the complement product while using positions inside the part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationWitness {
    pub x: Vec<u32>,
    /// Smallest in-part position carrying positive weight.
    pub violating_position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    Separated,
    NotSeparated(SeparationWitness),
}

impl Separation {
    pub fn is_separated(&self) -> bool {
        matches!(self, Separation::Separated)
    }
}

/// Product of the complement of `part`.
pub fn complement_product(part: &BTreeSet<usize>, spec: &ChannelSpec) -> BigUint {
    let mut rhs = BigUint::one();
    for (k, &q) in spec.sizes().iter().enumerate() {
        if !part.contains(&k) {
            rhs *= BigUint::from(q);
        }
    }
    rhs
}

/// Decides whether the given set of positions is separated; on failure
/// returns the lexicographically smallest violating solution.
pub fn is_separated(part: &BTreeSet<usize>, spec: &ChannelSpec) -> Separation {
    assert!(!part.is_empty(), "part must be non-empty");
    let rhs = complement_product(part, spec);
    for x in enumerate_solutions(spec, &rhs) {
        if let Some(&pos) = part.iter().find(|&&k| x[k] > 0) {
            return Separation::NotSeparated(SeparationWitness {
                x,
                violating_position: pos,
            });
        }
    }
    Separation::Separated
}

/// A partition of the channel positions into disjoint non-empty parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<BTreeSet<usize>>,
}

impl Partition {
    pub fn new(parts: Vec<BTreeSet<usize>>, spec: &ChannelSpec) -> Result<Self, SeparationError> {
        let n = spec.n();
        let mut seen = BTreeSet::new();
        for part in &parts {
            if part.is_empty() {
                return Err(SeparationError::EmptyPart);
            }
            for &k in part {
                if k >= n {
                    return Err(SeparationError::PositionOutOfRange(k, n));
                }
                if !seen.insert(k) {
                    return Err(SeparationError::OverlappingParts(k));
                }
            }
        }
        if seen.len() != n {
            return Err(SeparationError::IncompleteCover { got: seen.len(), want: n });
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[BTreeSet<usize>] {
        &self.parts
    }

    pub fn t(&self) -> usize {
        self.parts.len()
    }

    /// Part index containing a position.
    pub fn part_of(&self, position: usize) -> usize {
        self.parts
            .iter()
            .position(|p| p.contains(&position))
            .expect("partition covers all positions")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                p.iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", rendered.join("/"))
    }
}

/// True iff every part of the partition is separated.
pub fn is_t_separation(partition: &Partition, spec: &ChannelSpec) -> bool {
    partition
        .parts()
        .iter()
        .all(|part| is_separated(part, spec).is_separated())
}

/// Enumerates partitions of the positions into exactly `t` non-empty parts
/// in restricted-growth order and returns the first t-separation found.
pub fn find_t_separation(spec: &ChannelSpec, t: usize) -> Option<Partition> {
    let n = spec.n();
    if t == 0 || t > n {
        return None;
    }
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().copied().max().map(|m| m + 1).unwrap_or(0);
        if blocks == t {
            let mut parts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); t];
            for (k, &b) in rgs.iter().enumerate() {
                parts[b].insert(k);
            }
            let partition = Partition::new(parts, spec).expect("restricted growth is valid");
            if is_t_separation(&partition, spec) {
                return Some(partition);
            }
        }
        if !next_restricted_growth(&mut rgs) {
            return None;
        }
    }
}

/// Advances a restricted-growth string in lexicographic order; `a[0] = 0`
/// and `a[i] <= max(a[0..i]) + 1` throughout.
fn next_restricted_growth(a: &mut [usize]) -> bool {
    let n = a.len();
    for i in (1..n).rev() {
        let cap = a[..i].iter().copied().max().unwrap_or(0) + 1;
        if a[i] < cap {
            a[i] += 1;
            for x in &mut a[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}

/// Sufficient prime-witness test: every element of every part must have a
/// prime divisor that divides no channel outside the part. Implies a
/// t-separation but not conversely.
pub fn natural_separation_check(partition: &Partition, spec: &ChannelSpec) -> bool {
    for (j, part) in partition.parts().iter().enumerate() {
        let outside: Vec<u64> = (0..spec.n())
            .filter(|k| partition.part_of(*k) != j)
            .map(|k| spec.size(k))
            .collect();
        for &k in part {
            let q = spec.size(k);
            let witnesses = factor(&BigUint::from(q)).expect("u64 channel size");
            let found = witnesses
                .iter()
                .any(|(p, _)| outside.iter().all(|&other| other % p != 0));
            if !found {
                return false;
            }
        }
    }
    true
}

/// Verdict vocabulary: the condition is sufficient only, so the negative
/// case stays "unknown".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeLineVerdict {
    AboveTreeLine,
    Unknown,
}

impl fmt::Display for TreeLineVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeLineVerdict::AboveTreeLine => write!(f, "above tree line"),
            TreeLineVerdict::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeLineReport {
    /// Each t >= 3 admitting a t-separation, with the first one found.
    pub separations: BTreeMap<usize, Partition>,
    pub verdict: TreeLineVerdict,
}

/// Searches every t in `3..=n` for a t-separation; any hit is sufficient
/// for the spec to be above tree line.
pub fn above_tree_line_sufficient(spec: &ChannelSpec) -> TreeLineReport {
    let mut separations = BTreeMap::new();
    for t in 3..=spec.n() {
        if let Some(partition) = find_t_separation(spec, t) {
            separations.insert(t, partition);
        }
    }
    let verdict = if separations.is_empty() {
        TreeLineVerdict::Unknown
    } else {
        TreeLineVerdict::AboveTreeLine
    };
    TreeLineReport {
        separations,
        verdict,
    }
}
