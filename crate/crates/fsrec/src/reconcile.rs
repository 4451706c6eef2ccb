//! Reconciliation of two diverged update sequences.
//!
//! Given refluent simple sequences `a` and `b` describing how two replicas
//! diverged from a common original, the reconciler for one side is the set
//! of the other side's commands that can be replayed on it: commands whose
//! node/input/output signature the side already has are dropped (the change
//! is already there, give or take the stored value), and of the rest
//! exactly those independent of all of the side's own residual commands
//! survive. That set is maximal: any command outside it either overrides a
//! local change or can never apply after the local sequence. Everything
//! excluded is classified as a conflict with a concrete blocking witness.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::command::Command;
use crate::path::NodePath;
use crate::refluence::{self, RefluenceError};
use crate::rewrite::SimpleSequence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconcileError {
    #[error("sequence breaks every filesystem")]
    BreakingInput,
    #[error("sequences are not refluent")]
    NotRefluent,
}

/// Why a command cannot be propagated to the other replica.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructuralReason {
    /// The other side changed the same node to a different value type.
    SameNodeTypeChange { blocking: Command },
    /// Replaying the command after the other side's residual changes breaks
    /// every filesystem.
    OrderViolation { blocking: Command },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConflictKind {
    /// Both sides store a value of the same type at the node, but the
    /// values differ; resolving needs content negotiation.
    Content { a_command: Command, b_command: Command },
    /// A command excluded from the reconciler, with the command that
    /// blocks it.
    Structural {
        blocked: Command,
        reason: StructuralReason,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub node: NodePath,
    pub kind: ConflictKind,
}

impl Conflict {
    /// The unordered command pair behind the conflict; the same pair is
    /// reported only once even when both directions are blocked.
    pub fn command_pair(&self) -> (Command, Command) {
        let (x, y) = match &self.kind {
            ConflictKind::Content {
                a_command,
                b_command,
            } => (a_command, b_command),
            ConflictKind::Structural { blocked, reason } => {
                let blocking = match reason {
                    StructuralReason::SameNodeTypeChange { blocking } => blocking,
                    StructuralReason::OrderViolation { blocking } => blocking,
                };
                (blocked, blocking)
            }
        };
        if x <= y {
            (x.clone(), y.clone())
        } else {
            (y.clone(), x.clone())
        }
    }
}

/// Both propagation directions plus the residual conflicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconcileResult {
    /// Commands from `b` to replay on the replica that took `a`.
    pub apply_after_alpha: SimpleSequence,
    /// Commands from `a` to replay on the replica that took `b`.
    pub apply_after_beta: SimpleSequence,
    pub conflicts: Vec<Conflict>,
}

/// Commands of `a` whose node, input type, and output type also occur in
/// `b`, in `a`'s order.
pub fn intersect_tp(a: &SimpleSequence, b: &SimpleSequence) -> Vec<Command> {
    let types: BTreeSet<_> = b.iter().map(Command::command_type).collect();
    a.iter()
        .filter(|c| types.contains(&c.command_type()))
        .cloned()
        .collect()
}

/// Commands of `a` with no type-matching counterpart in `b`, in `a`'s order.
pub fn minus_tp(a: &SimpleSequence, b: &SimpleSequence) -> Vec<Command> {
    let types: BTreeSet<_> = b.iter().map(Command::command_type).collect();
    a.iter()
        .filter(|c| !types.contains(&c.command_type()))
        .cloned()
        .collect()
}

fn ensure_refluent(a: &SimpleSequence, b: &SimpleSequence) -> Result<(), ReconcileError> {
    match refluence::refluent(a, b) {
        Ok(Some(_)) => Ok(()),
        Ok(None) => Err(ReconcileError::NotRefluent),
        Err(RefluenceError::BreakingInput) => Err(ReconcileError::BreakingInput),
        Err(_) => Err(ReconcileError::NotRefluent),
    }
}

fn reconciler_commands(after: &[Command], from: &[Command]) -> Vec<Command> {
    // `after` and `from` are the two residual sides; a command survives iff
    // it is independent of every residual command of the other side
    from.iter()
        .filter(|candidate| {
            after.iter().all(|own| {
                own.node() != candidate.node() && own.independent(candidate)
            })
        })
        .cloned()
        .collect()
}

/// The maximal reconciler for `a` over `b`: the commands of `b` that can be
/// replayed after `a` without overriding any of `a`'s changes, in `b`'s
/// order (which already honors the forced order).
pub fn reconciler_for(
    a: &SimpleSequence,
    b: &SimpleSequence,
) -> Result<SimpleSequence, ReconcileError> {
    ensure_refluent(a, b)?;
    let residual_a = minus_tp(a, b);
    let residual_b = minus_tp(b, a);
    Ok(SimpleSequence::new(reconciler_commands(&residual_a, &residual_b))
        .expect("subsequence of a simple sequence"))
}

/// Classifies every change that cannot be propagated.
///
/// Type-matched pairs with different stored values are content conflicts.
/// Excluded residual commands are structural: blocked by a same-node type
/// change on the other side, or by a residual command they cannot be
/// reordered past. A pair blocking each other is reported once.
pub fn classify_conflicts(
    a: &SimpleSequence,
    b: &SimpleSequence,
) -> Result<Vec<Conflict>, ReconcileError> {
    ensure_refluent(a, b)?;
    Ok(classify_conflicts_unchecked(a, b))
}

fn classify_conflicts_unchecked(a: &SimpleSequence, b: &SimpleSequence) -> Vec<Conflict> {
    let mut conflicts = Vec::new();
    for a_command in intersect_tp(a, b) {
        let b_command = b
            .command_on(a_command.node())
            .expect("type-matched command exists on the other side")
            .clone();
        if a_command.replacement() != b_command.replacement() {
            conflicts.push(Conflict {
                node: a_command.node().clone(),
                kind: ConflictKind::Content {
                    a_command,
                    b_command,
                },
            });
        }
    }
    let residual_a = minus_tp(a, b);
    let residual_b = minus_tp(b, a);
    let mut seen_pairs: BTreeSet<(Command, Command)> = BTreeSet::new();
    for (blocked_from, own, own_residual, dedupe) in [
        (&residual_b, a, &residual_a, false),
        (&residual_a, b, &residual_b, true),
    ] {
        let kept = reconciler_commands(own_residual, blocked_from);
        for candidate in blocked_from {
            if kept.contains(candidate) {
                continue;
            }
            let reason = match own.command_on(candidate.node()) {
                Some(same_node) => StructuralReason::SameNodeTypeChange {
                    blocking: same_node.clone(),
                },
                None => {
                    let blocking = own_residual
                        .iter()
                        .find(|own_cmd| !own_cmd.independent(candidate))
                        .expect("an excluded command has a blocking witness")
                        .clone();
                    StructuralReason::OrderViolation { blocking }
                }
            };
            let conflict = Conflict {
                node: candidate.node().clone(),
                kind: ConflictKind::Structural {
                    blocked: candidate.clone(),
                    reason,
                },
            };
            let pair = conflict.command_pair();
            if dedupe && seen_pairs.contains(&pair) {
                continue;
            }
            seen_pairs.insert(pair);
            conflicts.push(conflict);
        }
    }
    conflicts
}

/// Computes both reconcilers and the conflict classification.
pub fn reconcile(
    a: &SimpleSequence,
    b: &SimpleSequence,
) -> Result<ReconcileResult, ReconcileError> {
    ensure_refluent(a, b)?;
    let residual_a = minus_tp(a, b);
    let residual_b = minus_tp(b, a);
    let apply_after_alpha = SimpleSequence::new(reconciler_commands(&residual_a, &residual_b))
        .expect("subsequence of a simple sequence");
    let apply_after_beta = SimpleSequence::new(reconciler_commands(&residual_b, &residual_a))
        .expect("subsequence of a simple sequence");
    Ok(ReconcileResult {
        apply_after_alpha,
        apply_after_beta,
        conflicts: classify_conflicts_unchecked(a, b),
    })
}

/// Confluence: the pair can be closed to identical results. Holds exactly
/// when the type-matched commands agree including stored values and the
/// residuals are fully independent of each other.
pub fn confluent(a: &SimpleSequence, b: &SimpleSequence) -> Result<bool, ReconcileError> {
    ensure_refluent(a, b)?;
    let mut matched_a = intersect_tp(a, b);
    let mut matched_b = intersect_tp(b, a);
    matched_a.sort();
    matched_b.sort();
    if matched_a != matched_b {
        return Ok(false);
    }
    let residual_a = minus_tp(a, b);
    let residual_b = minus_tp(b, a);
    Ok(residual_a.iter().all(|x| {
        residual_b
            .iter()
            .all(|y| x.node() != y.node() && x.independent(y))
    }))
}
