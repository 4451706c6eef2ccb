//! Update detection: turn a pair of snapshots into the canonical simple
//! sequence transforming one into the other, and normalize recorded
//! operation logs into the same form.

use crate::command::Command;
use crate::filesystem::Filesystem;
use crate::rewrite::{order_simple_set, simplify, SimpleSequence, Simplified};

/// The canonical simple sequence transforming `base` into `replica`.
///
/// One command per differing node (the input type is the base's value
/// type, the replacement is the replica's value), ordered to honor the
/// forced order. Applying the result to `base` yields `replica` exactly.
pub fn detect(base: &Filesystem, replica: &Filesystem) -> SimpleSequence {
    let commands: Vec<Command> = base
        .diff(replica)
        .into_iter()
        .map(|(node, before, after)| Command::new(node, before.tag(), after))
        .collect();
    order_simple_set(commands)
        .expect("differences of two snapshots always form an orderable simple set")
}

/// Normalizes an operation log into a simple sequence extending it, or
/// reports that the log breaks every filesystem. Whatever the log did to
/// some filesystem, the normalized sequence does too.
pub fn normalize_log(commands: &[Command]) -> Simplified {
    simplify(commands)
}
