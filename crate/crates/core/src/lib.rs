//! A laboratory for multichannel prefix codes.
//!
//! A multichannel codeword is an n-tuple of symbol strings, one per channel,
//! where the channels may have different alphabet sizes. This crate provides:
//!
//! - exact arithmetic on rational combinations of prime logarithms, so that
//!   every length/entropy/redundancy comparison is decided without floating
//!   point ([`exact`]);
//! - the code model: channel specs, words, codebooks, prefix-freeness, the
//!   Kraft sum, entropy and redundancy ([`model`]);
//! - the rectangle packing view of prefix codes, used as an independent
//!   geometric oracle ([`rpg`]);
//! - decoding trees and the guillotine-cut decision procedure for tree
//!   decodability, including trimming and the empty-component certificate
//!   ([`tree`]);
//! - the selvage code construction and its probability assembly ([`selvage`]);
//! - channel separation decided by bounded Diophantine enumeration
//!   ([`separation`]);
//! - the disentangling constructions that turn a failed separation into an
//!   entropy-achieving tree-decodable code ([`disentangle`]);
//! - exact exhaustive search for optimal tree-decodable codes ([`search`]);
//! - text formats for codebooks and probability files ([`format`]).

pub mod disentangle;
pub mod exact;
pub mod format;
pub mod model;
pub mod rpg;
pub mod search;
pub mod selvage;
pub mod separation;
pub mod tree;

pub use exact::{ExactReal, Rational};
pub use model::{ChannelSpec, Codebook, LengthTuple, ProbMultiset, Word};
pub use tree::{Decodability, DecodingTree};
