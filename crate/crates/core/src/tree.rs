//! Decoding trees: construction, decoding, the guillotine-cut decision for
//! tree decodability, trimming, and the empty-component certificate.
//!
//! A decoding tree reads one symbol from the channel named by each internal
//! node's class and follows the branch for that symbol; leaves name
//! codewords. A prefix code has such a tree exactly when its blocks in the
//! rectangle packing view can be produced by recursive guillotine cuts, and
//! a cut along channel `i` is possible only when no codeword has an empty
//! `i`-th component.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{is_prefix_code, ChannelSpec, Codebook, ModelError, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree decodability is only defined for prefix codes")]
    NotPrefixCode,
    #[error("empty codebook has no decoding tree")]
    EmptyCodebook,
    #[error("codeword index {0} out of range")]
    BadIndex(usize),
    #[error("no branch for symbol {symbol} at a class {class} node")]
    AbsentBranch { class: usize, symbol: u64 },
    #[error("channel {0} ran out of symbols while decoding")]
    StreamExhausted(usize),
    #[error("tree parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A class-labeled decoding tree. An internal node of class `i` has exactly
/// `q_i` child slots; absent slots are unused branches.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DecodingTree {
    Leaf(usize),
    Node {
        class: usize,
        children: Vec<Option<DecodingTree>>,
    },
}

impl DecodingTree {
    pub fn leaf_count(&self) -> usize {
        match self {
            DecodingTree::Leaf(_) => 1,
            DecodingTree::Node { children, .. } => children
                .iter()
                .flatten()
                .map(DecodingTree::leaf_count)
                .sum(),
        }
    }

    /// Root class, if the tree is not a bare leaf.
    pub fn root_class(&self) -> Option<usize> {
        match self {
            DecodingTree::Leaf(_) => None,
            DecodingTree::Node { class, .. } => Some(*class),
        }
    }

    /// The word spelled along the path to every leaf, per codeword index.
    pub fn spelled_words(&self, n_channels: usize) -> Vec<(usize, Word)> {
        let mut out = Vec::new();
        let mut path: Vec<Vec<u64>> = vec![Vec::new(); n_channels];
        fn walk(node: &DecodingTree, path: &mut Vec<Vec<u64>>, out: &mut Vec<(usize, Word)>) {
            match node {
                DecodingTree::Leaf(idx) => out.push((*idx, Word::new(path.clone()))),
                DecodingTree::Node { class, children } => {
                    for (symbol, child) in children.iter().enumerate() {
                        if let Some(child) = child {
                            path[*class].push(symbol as u64);
                            walk(child, path, out);
                            path[*class].pop();
                        }
                    }
                }
            }
        }
        walk(self, &mut path, &mut out);
        out
    }
}

/// Per-channel sets of codeword rows whose component is empty.
pub type EpsilonMap = Vec<BTreeSet<usize>>;

pub fn epsilon_locating(cb: &Codebook) -> EpsilonMap {
    let n = cb.spec().n();
    let mut map = vec![BTreeSet::new(); n];
    for (j, word) in cb.words().iter().enumerate() {
        for (i, comp) in word.components().iter().enumerate() {
            if comp.is_empty() {
                map[i].insert(j);
            }
        }
    }
    map
}

/// True when every channel has some codeword with an empty component, so no
/// channel can serve as the root class — a sufficient certificate that the
/// codebook is not tree decodable.
pub fn epsilon_blocked(cb: &Codebook) -> bool {
    !cb.is_empty() && epsilon_locating(cb).iter().all(|set| !set.is_empty())
}

/// Strips the per-channel longest common prefix, then deletes channels left
/// unused by every codeword. Returns the reduced codebook, the removed
/// prefix (over the original channels), and the removed channel set.
pub fn trim(cb: &Codebook) -> (Codebook, Word, BTreeSet<usize>) {
    assert!(!cb.is_empty(), "trim needs at least one codeword");
    let n = cb.spec().n();
    let mut prefix: Vec<Vec<u64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut lcp = cb.word(0).component(i).to_vec();
        for word in &cb.words()[1..] {
            let comp = word.component(i);
            let mut k = 0;
            while k < lcp.len() && k < comp.len() && lcp[k] == comp[k] {
                k += 1;
            }
            lcp.truncate(k);
        }
        prefix.push(lcp);
    }
    let stripped: Vec<Vec<Vec<u64>>> = cb
        .words()
        .iter()
        .map(|w| {
            (0..n)
                .map(|i| w.component(i)[prefix[i].len()..].to_vec())
                .collect()
        })
        .collect();
    let mut removed = BTreeSet::new();
    let mut kept = Vec::new();
    for i in 0..n {
        if stripped.iter().all(|row| row[i].is_empty()) {
            removed.insert(i);
        } else {
            kept.push(i);
        }
    }
    let reduced_spec = ChannelSpec::new(kept.iter().map(|&i| cb.spec().size(i)).collect())
        .expect("sizes already validated");
    let words = stripped
        .into_iter()
        .map(|row| Word::new(kept.iter().map(|&i| row[i].clone()).collect()))
        .collect();
    let reduced = Codebook::new(reduced_spec, words).expect("trim preserves distinctness");
    (reduced, Word::new(prefix), removed)
}

/// Outcome of the tree-decodability decision.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Decodability {
    Decodable(DecodingTree),
    /// A trimmed sub-codebook in which no channel can be cut without
    /// slicing a block: the interweave obstruction.
    NotDecodable { witness: Codebook },
}

impl Decodability {
    pub fn is_decodable(&self) -> bool {
        matches!(self, Decodability::Decodable(_))
    }
}

type Row = Vec<Vec<u64>>;
type CanonKey = (Vec<u64>, Vec<Row>);
type Memo = HashMap<CanonKey, Result<DecodingTree, CanonKey>>;

/// Decides tree decodability by recursive guillotine cuts.
///
/// At each level the sub-codebook is trimmed; a channel whose components are
/// all non-empty can be cut into per-first-symbol groups. The decision
/// succeeds iff some channel succeeds at every level. Sub-problems are
/// memoized on the canonical (sorted) form of the trimmed sub-codebook.
pub fn decide_tree_decodable(cb: &Codebook) -> Result<Decodability, TreeError> {
    if cb.is_empty() {
        return Err(TreeError::EmptyCodebook);
    }
    if !is_prefix_code(cb) {
        return Err(TreeError::NotPrefixCode);
    }
    let rows: Vec<Row> = cb
        .words()
        .iter()
        .map(|w| w.components().to_vec())
        .collect();
    let sizes = cb.spec().sizes().to_vec();
    let mut memo = Memo::new();
    match explore(rows, &sizes, &mut memo) {
        Ok(tree) => Ok(Decodability::Decodable(tree)),
        Err((wsizes, wrows)) => {
            let spec = ChannelSpec::new(wsizes).expect("validated sizes");
            let words = wrows.into_iter().map(Word::new).collect();
            let witness = Codebook::new(spec, words).expect("witness rows are distinct");
            Ok(Decodability::NotDecodable { witness })
        }
    }
}

/// Returns a tree whose leaves are positions into `rows` and whose classes
/// are indices into the current channel set, or the first interweave
/// witness met during the search.
fn explore(rows: Vec<Row>, sizes: &[u64], memo: &mut Memo) -> Result<DecodingTree, CanonKey> {
    let n = sizes.len();
    // Trim: per-channel longest common prefix, then dummy channels.
    let mut prefix: Vec<Vec<u64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut lcp = rows[0][i].clone();
        for row in &rows[1..] {
            let comp = &row[i];
            let mut k = 0;
            while k < lcp.len() && k < comp.len() && lcp[k] == comp[k] {
                k += 1;
            }
            lcp.truncate(k);
        }
        prefix.push(lcp);
    }
    let stripped: Vec<Row> = rows
        .iter()
        .map(|row| {
            (0..n)
                .map(|i| row[i][prefix[i].len()..].to_vec())
                .collect()
        })
        .collect();
    let kept: Vec<usize> = (0..n)
        .filter(|&i| stripped.iter().any(|row| !row[i].is_empty()))
        .collect();
    let reduced_sizes: Vec<u64> = kept.iter().map(|&i| sizes[i]).collect();
    let reduced: Vec<Row> = stripped
        .iter()
        .map(|row| kept.iter().map(|&i| row[i].clone()).collect())
        .collect();

    let inner = if reduced.len() == 1 {
        DecodingTree::Leaf(0)
    } else {
        // Canonical form: rows sorted lexicographically.
        let mut order: Vec<usize> = (0..reduced.len()).collect();
        order.sort_by(|&a, &b| reduced[a].cmp(&reduced[b]));
        let sorted: Vec<Row> = order.iter().map(|&r| reduced[r].clone()).collect();
        let key: CanonKey = (reduced_sizes.clone(), sorted);
        let canon = match memo.get(&key) {
            Some(result) => result.clone(),
            None => {
                let computed = solve_canonical(&key, memo);
                memo.insert(key.clone(), computed.clone());
                computed
            }
        };
        let canon_tree = canon?;
        // Leaves rank into the sorted order; map back to input row positions,
        // and classes back through the kept-channel map.
        remap(&canon_tree, &|rank| order[rank], &|c| kept[c])
    };

    // Re-attach the trimmed prefix as forced single-branch reads.
    let mut tree = inner;
    for i in (0..n).rev() {
        for &s in prefix[i].iter().rev() {
            let mut children: Vec<Option<DecodingTree>> = vec![None; sizes[i] as usize];
            children[s as usize] = Some(tree);
            tree = DecodingTree::Node { class: i, children };
        }
    }
    Ok(tree)
}

fn remap(
    t: &DecodingTree,
    leaf_map: &dyn Fn(usize) -> usize,
    class_map: &dyn Fn(usize) -> usize,
) -> DecodingTree {
    match t {
        DecodingTree::Leaf(r) => DecodingTree::Leaf(leaf_map(*r)),
        DecodingTree::Node { class, children } => DecodingTree::Node {
            class: class_map(*class),
            children: children
                .iter()
                .map(|c| c.as_ref().map(|c| remap(c, leaf_map, class_map)))
                .collect(),
        },
    }
}

/// Solves a canonical (trimmed, sorted, >= 2 rows) sub-problem. Channels are
/// tried in ascending index; the returned tree is relative to the canonical
/// rows and channels.
fn solve_canonical(key: &CanonKey, memo: &mut Memo) -> Result<DecodingTree, CanonKey> {
    let (sizes, rows) = key;
    let mut first_witness: Option<CanonKey> = None;
    'channel: for c in 0..sizes.len() {
        if rows.iter().any(|row| row[c].is_empty()) {
            continue;
        }
        // Guillotine cut along channel c: group rows by their first symbol.
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); sizes[c] as usize];
        for (rank, row) in rows.iter().enumerate() {
            groups[row[c][0] as usize].push(rank);
        }
        let mut children: Vec<Option<DecodingTree>> = vec![None; sizes[c] as usize];
        for (symbol, members) in groups.iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let sub_rows: Vec<Row> = members
                .iter()
                .map(|&rank| {
                    let mut row = rows[rank].clone();
                    row[c] = row[c][1..].to_vec();
                    row
                })
                .collect();
            match explore(sub_rows, sizes, memo) {
                Ok(sub) => {
                    children[symbol] = Some(remap(&sub, &|pos| members[pos], &|cls| cls));
                }
                Err(witness) => {
                    if first_witness.is_none() {
                        first_witness = Some(witness);
                    }
                    continue 'channel;
                }
            }
        }
        return Ok(DecodingTree::Node { class: c, children });
    }
    // Either no channel was cuttable (this sub-codebook is the interweave)
    // or every cut failed deeper down (report the first deep witness).
    Err(first_witness.unwrap_or_else(|| key.clone()))
}

/// Component-wise concatenation of the named codewords.
pub fn encode(cb: &Codebook, indices: &[usize]) -> Result<Vec<Vec<u64>>, TreeError> {
    let n = cb.spec().n();
    let mut streams = vec![Vec::new(); n];
    for &j in indices {
        if j >= cb.len() {
            return Err(TreeError::BadIndex(j));
        }
        for (i, comp) in cb.word(j).components().iter().enumerate() {
            streams[i].extend_from_slice(comp);
        }
    }
    Ok(streams)
}

/// Per-channel symbol queues being consumed by the decoder.
#[derive(Clone, Debug)]
pub struct SymbolStreams {
    queues: Vec<VecDeque<u64>>,
}

impl SymbolStreams {
    pub fn new(streams: Vec<Vec<u64>>) -> Self {
        Self {
            queues: streams.into_iter().map(VecDeque::from).collect(),
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.queues.iter().all(VecDeque::is_empty)
    }

    fn pop(&mut self, channel: usize) -> Option<u64> {
        self.queues[channel].pop_front()
    }
}

/// Decodes one codeword, consuming exactly its symbols from the streams.
pub fn decode(tree: &DecodingTree, streams: &mut SymbolStreams) -> Result<usize, TreeError> {
    let mut node = tree;
    loop {
        match node {
            DecodingTree::Leaf(idx) => return Ok(*idx),
            DecodingTree::Node { class, children } => {
                let symbol = streams
                    .pop(*class)
                    .ok_or(TreeError::StreamExhausted(*class))?;
                node = children
                    .get(symbol as usize)
                    .and_then(Option::as_ref)
                    .ok_or(TreeError::AbsentBranch {
                        class: *class,
                        symbol,
                    })?;
            }
        }
    }
}

// --- s-expression text form --------------------------------------------------
//
// node := `L<index>` | `_` | `(<class> <child_0> ... <child_{q_i-1}>)`
// with exactly q_i child slots per internal node.

pub fn print_tree(tree: &DecodingTree) -> String {
    let mut out = String::new();
    write_node(tree, &mut out);
    out
}

fn write_node(tree: &DecodingTree, out: &mut String) {
    match tree {
        DecodingTree::Leaf(idx) => {
            let _ = write!(out, "L{idx}");
        }
        DecodingTree::Node { class, children } => {
            let _ = write!(out, "({class}");
            for child in children {
                out.push(' ');
                match child {
                    None => out.push('_'),
                    Some(c) => write_node(c, out),
                }
            }
            out.push(')');
        }
    }
}

pub fn parse_tree(text: &str, spec: &ChannelSpec) -> Result<DecodingTree, TreeError> {
    let tokens = tokenize(text);
    let mut pos = 0usize;
    let node = parse_node(&tokens, &mut pos, spec)?
        .ok_or_else(|| TreeError::Parse("tree cannot be a single absent slot".into()))?;
    if pos != tokens.len() {
        return Err(TreeError::Parse(format!(
            "trailing tokens after tree (at token {pos})"
        )));
    }
    Ok(node)
}

#[derive(Debug, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut atom = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !atom.is_empty() {
                    tokens.push(Token::Atom(std::mem::take(&mut atom)));
                }
                tokens.push(if ch == '(' { Token::Open } else { Token::Close });
            }
            c if c.is_whitespace() => {
                if !atom.is_empty() {
                    tokens.push(Token::Atom(std::mem::take(&mut atom)));
                }
            }
            c => atom.push(c),
        }
    }
    if !atom.is_empty() {
        tokens.push(Token::Atom(atom));
    }
    tokens
}

fn parse_node(
    tokens: &[Token],
    pos: &mut usize,
    spec: &ChannelSpec,
) -> Result<Option<DecodingTree>, TreeError> {
    match tokens.get(*pos) {
        None => Err(TreeError::Parse("unexpected end of input".into())),
        Some(Token::Close) => Err(TreeError::Parse("unexpected ')'".into())),
        Some(Token::Atom(a)) => {
            *pos += 1;
            if a == "_" {
                return Ok(None);
            }
            if let Some(rest) = a.strip_prefix('L') {
                let idx = rest
                    .parse::<usize>()
                    .map_err(|_| TreeError::Parse(format!("bad leaf '{a}'")))?;
                return Ok(Some(DecodingTree::Leaf(idx)));
            }
            Err(TreeError::Parse(format!("unknown atom '{a}'")))
        }
        Some(Token::Open) => {
            *pos += 1;
            let class = match tokens.get(*pos) {
                Some(Token::Atom(a)) => a
                    .parse::<usize>()
                    .map_err(|_| TreeError::Parse(format!("bad class '{a}'")))?,
                _ => return Err(TreeError::Parse("expected class after '('".into())),
            };
            *pos += 1;
            if class >= spec.n() {
                return Err(TreeError::Parse(format!(
                    "class {class} out of range for {} channels",
                    spec.n()
                )));
            }
            let arity = spec.size(class) as usize;
            let mut children = Vec::with_capacity(arity);
            while !matches!(tokens.get(*pos), Some(Token::Close)) {
                children.push(parse_node(tokens, pos, spec)?);
            }
            *pos += 1; // consume ')'
            if children.len() != arity {
                return Err(TreeError::Parse(format!(
                    "class {class} node has {} slots, expected {arity}",
                    children.len()
                )));
            }
            if children.iter().all(Option::is_none) {
                return Err(TreeError::Parse(
                    "internal node must have at least one child".into(),
                ));
            }
            Ok(Some(DecodingTree::Node { class, children }))
        }
    }
}
