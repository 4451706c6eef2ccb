//! Joint applicability of simple sequences.
//!
//! Two sequences are refluent when some filesystem satisfies both. Whether
//! a single non-breaking simple sequence applies to a given filesystem is
//! checked by three per-command conditions (input types match, ancestors of
//! upward-from-empty leaders are directories, descendants of directory
//! downgrades are empty unless the sequence mentions them); the conditions
//! are jointly equivalent to successful application, and they only mention
//! value types, never tokens. Refluence therefore reduces to satisfiability
//! of type requirements over the commands' nodes and ancestors, which is
//! decided here by direct constraint propagation, producing a canonical
//! witness filesystem on success.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::ops::Bound;

use thiserror::Error;

use crate::command::Command;
use crate::filesystem::Filesystem;
use crate::path::NodePath;
use crate::rewrite::SimpleSequence;
use crate::value::{TypeTag, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefluenceError {
    #[error("sequence breaks every filesystem")]
    BreakingInput,
    #[error("sequences share nodes")]
    SharedNodes,
    #[error("sequences are not refluent")]
    NotRefluent,
}

/// Per-command outcome of the applicability conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandCheck {
    pub command: Command,
    /// The filesystem holds a value of the command's input type at its node.
    pub input_matches: bool,
    /// For a leader upgrading an empty node: every strict ancestor is a
    /// directory. Vacuously true for other commands.
    pub ancestors_are_dirs: bool,
    /// For a command downgrading a directory: every node strictly below it
    /// holding a non-empty value is itself touched by the sequence.
    /// Vacuously true for other commands.
    pub unmentioned_descendants_empty: bool,
}

impl CommandCheck {
    pub fn passed(&self) -> bool {
        self.input_matches && self.ancestors_are_dirs && self.unmentioned_descendants_empty
    }
}

/// Applicability report for a sequence against a filesystem; all checks
/// pass exactly when applying the sequence succeeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplicabilityReport {
    checks: Vec<CommandCheck>,
}

impl ApplicabilityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(CommandCheck::passed)
    }

    pub fn checks(&self) -> &[CommandCheck] {
        &self.checks
    }

    pub fn first_failure(&self) -> Option<&CommandCheck> {
        self.checks.iter().find(|c| !c.passed())
    }
}

fn is_empty_up(command: &Command) -> bool {
    command.input() == TypeTag::Empty
        && matches!(command.output(), TypeTag::File | TypeTag::Dir)
}

fn is_dir_down(command: &Command) -> bool {
    command.input() == TypeTag::Dir
        && matches!(command.output(), TypeTag::File | TypeTag::Empty)
}

/// Decides applicability without running the sequence.
pub fn applicable_by_characterization(
    sequence: &SimpleSequence,
    fs: &Filesystem,
) -> Result<ApplicabilityReport, RefluenceError> {
    if sequence.is_breaking() {
        return Err(RefluenceError::BreakingInput);
    }
    let leader_nodes: BTreeSet<&NodePath> = sequence
        .leaders()
        .into_iter()
        .map(Command::node)
        .collect();
    let mentioned: BTreeSet<&NodePath> = sequence.iter().map(Command::node).collect();
    let checks = sequence
        .iter()
        .map(|command| {
            let input_matches = fs.type_at(command.node()) == command.input();
            let ancestors_are_dirs =
                if is_empty_up(command) && leader_nodes.contains(command.node()) {
                    command
                        .node()
                        .ancestors()
                        .all(|anc| fs.type_at(&anc) == TypeTag::Dir)
                } else {
                    true
                };
            let unmentioned_descendants_empty = if is_dir_down(command) {
                fs.strict_descendants(command.node()).all(|(node, value)| {
                    value.tag() == TypeTag::Empty || mentioned.contains(node)
                })
            } else {
                true
            };
            CommandCheck {
                command: command.clone(),
                input_matches,
                ancestors_are_dirs,
                unmentioned_descendants_empty,
            }
        })
        .collect();
    Ok(ApplicabilityReport { checks })
}

/// Builds the canonical filesystem a non-breaking simple sequence applies
/// to: for every leader that changes anything, ancestors become
/// directories and the leader's node takes a canonical value of its input
/// type.
pub fn witness(sequence: &SimpleSequence) -> Result<Filesystem, RefluenceError> {
    if sequence.is_breaking() {
        return Err(RefluenceError::BreakingInput);
    }
    let mut types: BTreeMap<NodePath, TypeTag> = BTreeMap::new();
    let leaders = sequence.leaders();
    for leader in &leaders {
        if leader.input() == TypeTag::Empty && leader.output() == TypeTag::Empty {
            continue;
        }
        for anc in leader.node().ancestors() {
            types.insert(anc, TypeTag::Dir);
        }
    }
    for leader in &leaders {
        if leader.input() == TypeTag::Empty && leader.output() == TypeTag::Empty {
            continue;
        }
        let prev = types.insert(leader.node().clone(), leader.input());
        debug_assert!(
            prev.is_none() || prev == Some(leader.input()) || leader.input() == TypeTag::Dir,
            "leader input clashes with a required directory ancestor"
        );
    }
    let fs = Filesystem::from_entries(
        types
            .into_iter()
            .filter(|(_, tag)| *tag != TypeTag::Empty)
            .map(|(node, tag)| (node, Value::canonical(tag))),
    )
    .expect("ancestors of every non-empty node were made directories");
    debug_assert!(applicable_by_characterization(sequence, &fs)
        .map(|r| r.all_pass())
        .unwrap_or(false));
    Ok(fs)
}

/// The syntactic refluence criterion for node-disjoint sequences: every
/// leader on either side is independent of the whole other side, or forms
/// one of the two sanctioned parent/child constellations with it.
pub fn refluent_node_disjoint(
    a: &SimpleSequence,
    b: &SimpleSequence,
) -> Result<bool, RefluenceError> {
    if a.is_breaking() || b.is_breaking() {
        return Err(RefluenceError::BreakingInput);
    }
    if a.iter().any(|c| b.contains_node(c.node())) {
        return Err(RefluenceError::SharedNodes);
    }
    Ok(leaders_compatible(a, b) && leaders_compatible(b, a))
}

fn leaders_compatible(x: &SimpleSequence, y: &SimpleSequence) -> bool {
    let y_leaders = y.leaders();
    x.leaders().into_iter().all(|leader| {
        if y.iter().all(|c| leader.independent(c)) {
            return true;
        }
        // upgrading an empty child while the other side downgrades the
        // parent directory
        if is_empty_up(leader) {
            if let Some(parent) = leader.node().parent() {
                if let Some(on_parent) = y.command_on(&parent) {
                    if is_dir_down(on_parent) {
                        return true;
                    }
                }
            }
        }
        // downgrading a directory while the other side's leader fills in a
        // child of it from empty
        if is_dir_down(leader)
            && y_leaders.iter().any(|other| {
                is_empty_up(other)
                    && other
                        .node()
                        .parent()
                        .is_some_and(|p| &p == leader.node())
            })
        {
            return true;
        }
        false
    })
}

/// Decides refluence of two non-breaking simple sequences and returns a
/// canonical common filesystem on success.
///
/// Applicability of either sequence constrains only value types at command
/// nodes, their ancestors, and descendants of directory downgrades, so the
/// requirements of both sequences combine into type constraints over
/// finitely many nodes. The constraints are forced: input types pin
/// command nodes, upgrade leaders and the tree property pin ancestors to
/// directories, and directory downgrades pin untouched descendants to
/// empty. Propagation either hits a contradiction (not refluent) or yields a
/// witness with canonical values and nothing else.
pub fn refluent(
    a: &SimpleSequence,
    b: &SimpleSequence,
) -> Result<Option<Filesystem>, RefluenceError> {
    if a.is_breaking() || b.is_breaking() {
        return Err(RefluenceError::BreakingInput);
    }
    let mut forced: BTreeMap<NodePath, TypeTag> = BTreeMap::new();
    let force = |forced: &mut BTreeMap<NodePath, TypeTag>,
                     node: NodePath,
                     tag: TypeTag|
     -> bool {
        match forced.get(&node) {
            Some(&existing) => existing == tag,
            None => {
                forced.insert(node, tag);
                true
            }
        }
    };

    // input types pin every command node
    for command in a.iter().chain(b.iter()) {
        if !force(&mut forced, command.node().clone(), command.input()) {
            return Ok(None);
        }
    }
    // ancestors of upgrade-from-empty leaders must be directories
    for sequence in [a, b] {
        for leader in sequence.leaders() {
            if is_empty_up(leader) {
                for anc in leader.node().ancestors() {
                    if !force(&mut forced, anc, TypeTag::Dir) {
                        return Ok(None);
                    }
                }
            }
        }
    }
    // tree property: ancestors of any non-empty node must be directories
    let non_empty: Vec<NodePath> = forced
        .iter()
        .filter(|(_, &tag)| tag != TypeTag::Empty)
        .map(|(node, _)| node.clone())
        .collect();
    for node in non_empty {
        for anc in node.ancestors() {
            if !force(&mut forced, anc, TypeTag::Dir) {
                return Ok(None);
            }
        }
    }
    // directory downgrades need every untouched node below them empty
    for sequence in [a, b] {
        let mentioned: BTreeSet<&NodePath> = sequence.iter().map(Command::node).collect();
        for command in sequence.iter().filter(|c| is_dir_down(c)) {
            let below = forced.range((
                Bound::Excluded(command.node().clone()),
                Bound::Unbounded,
            ));
            for (node, &tag) in below {
                if !command.node().is_above(node) {
                    break;
                }
                if tag != TypeTag::Empty && !mentioned.contains(node) {
                    return Ok(None);
                }
            }
        }
    }
    let witness = Filesystem::from_entries(
        forced
            .into_iter()
            .filter(|(_, tag)| *tag != TypeTag::Empty)
            .map(|(node, tag)| (node, Value::canonical(tag))),
    )
    .expect("every non-empty forced node has directory ancestors");
    debug_assert!(applicable_by_characterization(a, &witness)
        .map(|r| r.all_pass())
        .unwrap_or(false));
    debug_assert!(applicable_by_characterization(b, &witness)
        .map(|r| r.all_pass())
        .unwrap_or(false));
    Ok(Some(witness))
}

/// The type-matched/residual split of a refluent pair.
///
/// `matched_*` holds the commands whose node, input type, and output type
/// also occur on the other side; concatenating `matched` and `residual`
/// reorders each sequence equivalently, and the residuals are refluent on
/// their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionSplit {
    pub matched_a: SimpleSequence,
    pub residual_a: SimpleSequence,
    pub matched_b: SimpleSequence,
    pub residual_b: SimpleSequence,
}

/// Splits a refluent pair into type-matched prefixes and residuals.
pub fn reduce(a: &SimpleSequence, b: &SimpleSequence) -> Result<ReductionSplit, RefluenceError> {
    if refluent(a, b)?.is_none() {
        return Err(RefluenceError::NotRefluent);
    }
    let split = |x: &SimpleSequence, y: &SimpleSequence| {
        let matched_types: BTreeSet<_> = y.iter().map(Command::command_type).collect();
        let (matched, residual): (Vec<Command>, Vec<Command>) = x
            .iter()
            .cloned()
            .partition(|c| matched_types.contains(&c.command_type()));
        (
            SimpleSequence::new(matched).expect("subsequence of a simple sequence"),
            SimpleSequence::new(residual).expect("subsequence of a simple sequence"),
        )
    };
    let (matched_a, residual_a) = split(a, b);
    let (matched_b, residual_b) = split(b, a);
    Ok(ReductionSplit {
        matched_a,
        residual_a,
        matched_b,
        residual_b,
    })
}
