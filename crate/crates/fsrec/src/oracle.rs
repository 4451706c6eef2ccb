//! Brute-force semantic ground truth over small domains.
//!
//! A domain fixes a finite, parent-closed node set and a value universe.
//! Enumerating every filesystem over the domain makes semantic equivalence,
//! extension, consequence, and joint applicability decidable by exhaustion.
//! Everything here exists to verify the syntactic machinery, not to
//! perform; it deliberately stays within desk-scale domains.
//!
//! Restricting to domain filesystems is enough for sequences whose commands
//! stay on domain nodes: applying a command only ever inspects its own node,
//! that node's ancestors, and its descendants, and zeroing everything
//! outside a parent-closed node set never invalidates an application.

use std::collections::HashMap;

use thiserror::Error;

use crate::command::{apply_sequence, ApplyOutcome, Command};
use crate::filesystem::Filesystem;
use crate::path::NodePath;
use crate::value::{TypeTag, ValueUniverse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("domain nodes must be closed under parent; {node} is missing its parent")]
    NotParentClosed { node: NodePath },
}

/// A finite, parent-closed slice of the namespace plus a value universe.
#[derive(Debug, Clone)]
pub struct Domain {
    nodes: Vec<NodePath>,
    universe: ValueUniverse,
}

impl Domain {
    pub fn new(
        nodes: impl IntoIterator<Item = NodePath>,
        universe: ValueUniverse,
    ) -> Result<Self, DomainError> {
        let mut nodes: Vec<NodePath> = nodes.into_iter().collect();
        nodes.sort();
        nodes.dedup();
        for node in &nodes {
            if let Some(parent) = node.parent() {
                if nodes.binary_search(&parent).is_err() {
                    return Err(DomainError::NotParentClosed { node: node.clone() });
                }
            }
        }
        Ok(Domain { nodes, universe })
    }

    /// The default verification domain: five nodes `a, a/b, a/b/x, a/c, b`
    /// (two roots, depth three, siblings) with two values per type. It
    /// enumerates to 1632 filesystems.
    pub fn five_nodes() -> Self {
        Domain::new(
            ["a", "a/b", "a/b/x", "a/c", "b"]
                .iter()
                .map(|s| s.parse().unwrap()),
            ValueUniverse::standard(),
        )
        .unwrap()
    }

    /// A three-node domain `a, a/b, b` with two values per type, small
    /// enough for exhaustion over all short command sequences. It
    /// enumerates to 120 filesystems.
    pub fn three_nodes() -> Self {
        Domain::new(
            ["a", "a/b", "b"].iter().map(|s| s.parse().unwrap()),
            ValueUniverse::standard(),
        )
        .unwrap()
    }

    pub fn nodes(&self) -> &[NodePath] {
        &self.nodes
    }

    pub fn universe(&self) -> &ValueUniverse {
        &self.universe
    }

    /// Every command over the domain: node x input type x replacement value.
    pub fn all_commands(&self) -> Vec<Command> {
        let mut out = Vec::new();
        for node in &self.nodes {
            for input in TypeTag::ALL {
                for value in self.universe.enumeration_values() {
                    out.push(Command::new(node.clone(), input, value.clone()));
                }
            }
        }
        out
    }

    /// Every filesystem over the domain, each exactly once, the all-empty
    /// one first. Nodes outside the domain hold the default empty value.
    pub fn filesystems(&self) -> Vec<Filesystem> {
        let values = self.universe.enumeration_values();
        let mut out = Vec::new();
        let mut picks = vec![0usize; self.nodes.len()];
        'outer: loop {
            let entries = self
                .nodes
                .iter()
                .zip(&picks)
                .map(|(node, &i)| (node.clone(), values[i].clone()));
            if let Ok(fs) = Filesystem::from_entries(entries) {
                out.push(fs);
            }
            // mixed-radix increment, last node fastest
            for slot in (0..picks.len()).rev() {
                picks[slot] += 1;
                if picks[slot] < values.len() {
                    continue 'outer;
                }
                picks[slot] = 0;
            }
            break;
        }
        if self.nodes.is_empty() {
            debug_assert_eq!(out.len(), 1);
        }
        out
    }

    /// Semantic equivalence restricted to the domain: equal action on every
    /// domain filesystem, with breakage comparing equal to breakage.
    pub fn sem_equivalent(&self, a: &[Command], b: &[Command]) -> bool {
        self.filesystems()
            .iter()
            .all(|fs| apply_sequence(a, fs) == apply_sequence(b, fs))
    }

    /// Semantic extension restricted to the domain: wherever `a` applies,
    /// `b` applies with the same result.
    pub fn sem_extends(&self, a: &[Command], b: &[Command]) -> bool {
        self.filesystems().iter().all(|fs| match apply_sequence(a, fs) {
            ApplyOutcome::Broken => true,
            outcome => apply_sequence(b, fs) == outcome,
        })
    }

    /// Semantic consequence restricted to the domain: whenever every premise
    /// applies to a filesystem, so does the conclusion.
    pub fn models(&self, premises: &[&[Command]], conclusion: &[Command]) -> bool {
        self.filesystems().iter().all(|fs| {
            premises
                .iter()
                .any(|p| apply_sequence(p, fs).is_broken())
                || !apply_sequence(conclusion, fs).is_broken()
        })
    }

    /// The first domain filesystem both sequences apply to, if any.
    pub fn refluent_oracle(&self, a: &[Command], b: &[Command]) -> Option<Filesystem> {
        self.filesystems().into_iter().find(|fs| {
            !apply_sequence(a, fs).is_broken() && !apply_sequence(b, fs).is_broken()
        })
    }
}

/// Memoized command application over a domain.
///
/// The table indexes every domain filesystem and every domain command and
/// precomputes each single application with [`Command::apply`]. Exhaustive
/// suites run sequences as index lookups instead of map rebuilding; the
/// semantics is the plain one by construction.
pub struct TransitionTable {
    states: Vec<Filesystem>,
    state_ids: HashMap<Filesystem, u32>,
    commands: Vec<Command>,
    command_ids: HashMap<Command, u16>,
    // next[cmd as usize * states.len() + state]
    next: Vec<u32>,
}

impl TransitionTable {
    /// Sentinel state index for breakage.
    pub const BROKEN: u32 = u32::MAX;

    pub fn new(domain: &Domain) -> Self {
        let states = domain.filesystems();
        let state_ids: HashMap<Filesystem, u32> = states
            .iter()
            .enumerate()
            .map(|(i, fs)| (fs.clone(), i as u32))
            .collect();
        let commands = domain.all_commands();
        let command_ids: HashMap<Command, u16> = commands
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u16))
            .collect();
        let mut next = vec![Self::BROKEN; commands.len() * states.len()];
        for (ci, command) in commands.iter().enumerate() {
            for (si, state) in states.iter().enumerate() {
                if let ApplyOutcome::Applied(fs) = command.apply(state) {
                    let target = state_ids
                        .get(&fs)
                        .expect("domain filesystems are closed under domain commands");
                    next[ci * states.len() + si] = *target;
                }
            }
        }
        TransitionTable {
            states,
            state_ids,
            commands,
            command_ids,
            next,
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Filesystem] {
        &self.states
    }

    pub fn commands(&self) -> &[Command] {
        &self.commands
    }

    pub fn state_id(&self, fs: &Filesystem) -> Option<u32> {
        self.state_ids.get(fs).copied()
    }

    pub fn command_id(&self, command: &Command) -> Option<u16> {
        self.command_ids.get(command).copied()
    }

    #[inline]
    pub fn step(&self, state: u32, command: u16) -> u32 {
        if state == Self::BROKEN {
            return Self::BROKEN;
        }
        self.next[command as usize * self.states.len() + state as usize]
    }

    pub fn run(&self, commands: &[u16], start: u32) -> u32 {
        commands
            .iter()
            .fold(start, |state, &command| self.step(state, command))
    }

    /// Runs a command slice from a start state; commands must belong to the
    /// domain.
    pub fn run_commands(&self, commands: &[Command], start: u32) -> u32 {
        commands.iter().fold(start, |state, command| {
            let id = self
                .command_id(command)
                .expect("command belongs to the table's domain");
            self.step(state, id)
        })
    }
}
