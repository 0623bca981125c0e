//! Shared workloads for the criterion benches.

use tcclab_core::derive::EnumerationConfig;
use tcclab_core::LexicalItem;

/// Two bare lexical items, the smallest lexicon that exercises every merge
/// shape.
pub fn two_atoms(steps: usize) -> EnumerationConfig {
    EnumerationConfig::new(vec![LexicalItem::new("a", None), LexicalItem::new("b", None)], steps)
}
