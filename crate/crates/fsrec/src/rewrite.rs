//! The rewriting system on command sequences.
//!
//! Adjacent command pairs either commute, break every filesystem, merge
//! into a single command, or are already in their forced order. Iterating
//! the rules turns any sequence into a *simple* one (at most one command
//! per node) or proves that the sequence breaks every filesystem.
//!
//! For simple sequences the command set determines the semantics: any two
//! orderings that honor the forced-order relation act identically, breakage
//! is decidable from the set plus the order alone, and with at least two
//! values per type semantic equivalence collapses to set equality.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::ops::Bound;

use thiserror::Error;

use crate::command::{apply_sequence, ApplyOutcome, Command};
use crate::filesystem::Filesystem;
use crate::path::NodePath;
use crate::value::{TypeTag, ValueUniverse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("not a simple sequence: two commands on node {node}")]
    DuplicateNode { node: NodePath },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimpleSetError {
    #[error("commands do not form a simple set")]
    NotSimpleSet,
}

/// Verdict of the pairwise rewriting rules for an adjacent pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RewriteOutcome {
    /// The pair acts identically in either order and applies somewhere.
    Commute,
    /// The pair, in this order, breaks every filesystem.
    Break,
    /// The pair collapses into one command on the shared node; the merged
    /// command extends the pair's semantics.
    Merge(Command),
}

/// Rewrites an adjacent pair, or returns `None` when the pair is already in
/// its forced order and must be left intact.
pub fn rewrite_pair(first: &Command, second: &Command) -> Option<RewriteOutcome> {
    if first.node() == second.node() {
        if first.output() == second.input() {
            return Some(RewriteOutcome::Merge(Command::new(
                first.node().clone(),
                first.input(),
                second.replacement().clone(),
            )));
        }
        return Some(RewriteOutcome::Break);
    }
    if first.independent(second) {
        return Some(RewriteOutcome::Commute);
    }
    if first.precedes(second) {
        return None;
    }
    Some(RewriteOutcome::Break)
}

/// A sequence with at most one command per node.
///
/// Simplicity is enforced at construction. Whether the sequence honors the
/// forced order, and hence whether it applies to any filesystem at all,
/// is a separate, decidable property ([`SimpleSequence::is_breaking`]).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimpleSequence {
    commands: Vec<Command>,
}

impl SimpleSequence {
    pub fn new(commands: Vec<Command>) -> Result<Self, SequenceError> {
        let mut seen: BTreeSet<&NodePath> = BTreeSet::new();
        for command in &commands {
            if !seen.insert(command.node()) {
                return Err(SequenceError::DuplicateNode {
                    node: command.node().clone(),
                });
            }
        }
        drop(seen);
        Ok(SimpleSequence { commands })
    }

    pub fn empty() -> Self {
        SimpleSequence::default()
    }

    pub fn commands(&self) -> &[Command] {
        &self.commands
    }

    pub fn into_commands(self) -> Vec<Command> {
        self.commands
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Command> {
        self.commands.iter()
    }

    pub fn command_on(&self, node: &NodePath) -> Option<&Command> {
        self.commands.iter().find(|c| c.node() == node)
    }

    pub fn contains_node(&self, node: &NodePath) -> bool {
        self.command_on(node).is_some()
    }

    /// True when no pair appears against its forced order.
    pub fn honors_order(&self) -> bool {
        honors_order_slice(&self.commands)
    }

    /// The forced-order-minimal commands; every transient command is one.
    pub fn leaders(&self) -> Vec<&Command> {
        leaders(&self.commands)
    }

    /// True when the sequence breaks every filesystem: its command set is
    /// not a simple set, or some pair appears against its forced order.
    pub fn is_breaking(&self) -> bool {
        !is_simple_set(&self.commands) || !self.honors_order()
    }

    pub fn apply(&self, fs: &Filesystem) -> ApplyOutcome {
        apply_sequence(&self.commands, fs)
    }
}

impl<'a> IntoIterator for &'a SimpleSequence {
    type Item = &'a Command;
    type IntoIter = std::slice::Iter<'a, Command>;

    fn into_iter(self) -> Self::IntoIter {
        self.commands.iter()
    }
}

/// Membership test for simple sequences: at most one command per node.
pub fn is_simple(commands: &[Command]) -> bool {
    let mut seen: BTreeSet<&NodePath> = BTreeSet::new();
    commands.iter().all(|command| seen.insert(command.node()))
}

fn honors_order_slice(commands: &[Command]) -> bool {
    // forced-order pairs sit on consecutive nodes, so it suffices to check
    // each command against the command on its parent
    let position: BTreeMap<&NodePath, usize> = commands
        .iter()
        .enumerate()
        .map(|(i, c)| (c.node(), i))
        .collect();
    for (i, command) in commands.iter().enumerate() {
        if let Some(parent) = command.node().parent() {
            if let Some(&j) = position.get(&parent) {
                let parent_cmd = &commands[j];
                if command.precedes(parent_cmd) && j < i {
                    return false;
                }
                if parent_cmd.precedes(command) && i < j {
                    return false;
                }
            }
        }
    }
    true
}

/// The forced-order-minimal commands of a set on distinct nodes.
pub fn leaders(commands: &[Command]) -> Vec<&Command> {
    debug_assert!(is_simple(commands));
    let by_node: BTreeMap<&NodePath, &Command> =
        commands.iter().map(|c| (c.node(), c)).collect();
    let mut minimal: Vec<&Command> = Vec::new();
    'cmd: for command in commands {
        if let Some(parent) = command.node().parent() {
            if let Some(parent_cmd) = by_node.get(&parent) {
                if parent_cmd.precedes(command) {
                    continue 'cmd;
                }
            }
        }
        // a predecessor below can only sit on a direct child
        for (node, child_cmd) in by_node.range::<NodePath, _>(command.node().clone()..) {
            if !command.node().is_at_or_above(node) {
                break;
            }
            if command.node().is_parent_of(node) && child_cmd.precedes(command) {
                continue 'cmd;
            }
        }
        minimal.push(command);
    }
    minimal
}

/// Walks the tree path between two comparable commands and checks that the
/// set links every consecutive node pair in one uniform direction of the
/// forced order.
fn chain_connected(by_node: &BTreeMap<&NodePath, &Command>, x: &Command, y: &Command) -> bool {
    let (upper, lower) = if x.node().is_above(y.node()) {
        (x, y)
    } else if y.node().is_above(x.node()) {
        (y, x)
    } else {
        return false;
    };
    // commands on the path from the lower node up to the upper one
    let mut path_cmds: Vec<&Command> = vec![lower];
    let mut node = lower.node().clone();
    loop {
        node = match node.parent() {
            Some(p) => p,
            None => return false,
        };
        if &node == upper.node() {
            path_cmds.push(upper);
            break;
        }
        match by_node.get(&node) {
            Some(command) => path_cmds.push(command),
            None => return false,
        }
    }
    // path_cmds[i] sits one level below path_cmds[i+1]
    let downward = path_cmds
        .windows(2)
        .all(|w| w[0].precedes(w[1]));
    let upward = path_cmds
        .windows(2)
        .all(|w| w[1].precedes(w[0]));
    downward || upward
}

/// A simple set: commands on distinct nodes where every non-independent
/// pair is connected by a chain of forced-order links inside the set.
pub fn is_simple_set(commands: &[Command]) -> bool {
    let mut by_node: BTreeMap<&NodePath, &Command> = BTreeMap::new();
    for command in commands {
        if by_node.insert(command.node(), command).is_some() {
            return false;
        }
    }
    // non-independent pairs are always on comparable nodes, so every pair
    // that matters shows up on some command's ancestor chain
    for command in commands {
        for anc in command.node().ancestors() {
            if let Some(above) = by_node.get(&anc) {
                if !above.independent(command) && !chain_connected(&by_node, above, command) {
                    return false;
                }
            }
        }
    }
    true
}

/// Orders a simple set into a sequence honoring the forced order.
///
/// Ties are broken by node path, so the result is deterministic; any two
/// orderings that honor the forced order are semantically equivalent.
pub fn order_simple_set(commands: Vec<Command>) -> Result<SimpleSequence, SimpleSetError> {
    if !is_simple_set(&commands) {
        return Err(SimpleSetError::NotSimpleSet);
    }
    let index: BTreeMap<&NodePath, usize> = commands
        .iter()
        .enumerate()
        .map(|(i, c)| (c.node(), i))
        .collect();
    // forced-order edges only ever join commands on consecutive nodes
    let mut successors: Vec<Vec<usize>> = vec![Vec::new(); commands.len()];
    let mut indegree = vec![0usize; commands.len()];
    for (i, command) in commands.iter().enumerate() {
        if let Some(parent) = command.node().parent() {
            if let Some(&j) = index.get(&parent) {
                let parent_cmd = &commands[j];
                if command.precedes(parent_cmd) {
                    successors[i].push(j);
                    indegree[j] += 1;
                }
                if parent_cmd.precedes(command) {
                    successors[j].push(i);
                    indegree[i] += 1;
                }
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<(NodePath, usize)>> = indegree
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 0)
        .map(|(i, _)| Reverse((commands[i].node().clone(), i)))
        .collect();
    let mut order = Vec::with_capacity(commands.len());
    while let Some(Reverse((_, i))) = ready.pop() {
        order.push(i);
        for &j in &successors[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(Reverse((commands[j].node().clone(), j)));
            }
        }
    }
    debug_assert_eq!(order.len(), commands.len(), "forced order has no cycles");
    let mut slots: Vec<Option<Command>> = commands.into_iter().map(Some).collect();
    let sequence = order
        .into_iter()
        .map(|i| slots[i].take().expect("each command scheduled once"))
        .collect();
    Ok(SimpleSequence { commands: sequence })
}

/// Equivalence of simple sequences by set comparison.
///
/// With at least two values per type in `universe` this coincides with
/// semantic equivalence. Transient commands over a type with a single value
/// cannot change anything and are ignored. Breaking sequences are all
/// equivalent to each other and to nothing else.
pub fn equivalent_simple(
    a: &SimpleSequence,
    b: &SimpleSequence,
    universe: &ValueUniverse,
) -> bool {
    let (a_breaks, b_breaks) = (a.is_breaking(), b.is_breaking());
    if a_breaks || b_breaks {
        return a_breaks && b_breaks;
    }
    let strip = |s: &SimpleSequence| -> Vec<Command> {
        let mut kept: Vec<Command> = s
            .iter()
            .filter(|c| !(c.is_transient() && universe.is_singleton(c.input())))
            .cloned()
            .collect();
        kept.sort();
        kept
    };
    strip(a) == strip(b)
}

/// Result of simplifying a command sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Simplified {
    /// A simple sequence extending the input's semantics. `exact` is true
    /// when no merge was needed, in which case the result is fully
    /// equivalent to the input rather than just an extension of it.
    Sequence { sequence: SimpleSequence, exact: bool },
    /// The input breaks every filesystem.
    Break,
}

impl Simplified {
    pub fn is_break(&self) -> bool {
        matches!(self, Simplified::Break)
    }

    pub fn sequence(&self) -> Option<&SimpleSequence> {
        match self {
            Simplified::Sequence { sequence, .. } => Some(sequence),
            Simplified::Break => None,
        }
    }
}

/// Rewrites a sequence into a simple one, or detects that it breaks every
/// filesystem.
///
/// A node's value changes only through its own commands, so the type of
/// every touched node at every point of the log is determined: the first
/// command's input before it, each command's output after it. Untouched
/// ancestors keep one constant, initially unknown type. The log applies to
/// some filesystem exactly when
///
/// * on each node, every command consumes the type its predecessor
///   produced,
/// * whenever a command stores a non-empty value, its parent is a directory
///   at that point,
/// * whenever a command stores a non-directory value, every node below it
///   is empty at that point, and
/// * the types the log needs at its start form a tree: whatever begins
///   non-empty has directories above it.
///
/// Checking these conditions directly decides breakage; constant-type nodes
/// collect at most one forced demand each, so no search is involved and the
/// whole pass is quadratic. On success every node's run folds into a single
/// command (first input, last replacement) which extends the log's
/// semantics, and the folded set is ordered canonically.
pub fn simplify(commands: &[Command]) -> Simplified {
    use TypeTag::{Dir, Empty};

    let mut per_node: BTreeMap<NodePath, Vec<usize>> = BTreeMap::new();
    for (i, command) in commands.iter().enumerate() {
        per_node
            .entry(command.node().clone())
            .or_default()
            .push(i);
    }
    for positions in per_node.values() {
        for pair in positions.windows(2) {
            if commands[pair[0]].output() != commands[pair[1]].input() {
                return Simplified::Break;
            }
        }
    }
    // untouched ancestors of touched nodes: constant type, demanded at most
    // once below
    let mut constant_nodes: BTreeSet<NodePath> = BTreeSet::new();
    for node in per_node.keys() {
        for anc in node.ancestors() {
            if !per_node.contains_key(&anc) {
                constant_nodes.insert(anc);
            }
        }
    }
    let type_before = |node: &NodePath, position: usize| -> Option<TypeTag> {
        per_node.get(node).map(|positions| {
            match positions.partition_point(|&p| p < position) {
                0 => commands[positions[0]].input(),
                k => commands[positions[k - 1]].output(),
            }
        })
    };
    let mut demands: BTreeMap<NodePath, TypeTag> = BTreeMap::new();
    fn demand(
        demands: &mut BTreeMap<NodePath, TypeTag>,
        node: &NodePath,
        tag: TypeTag,
    ) -> bool {
        match demands.get(node) {
            Some(&existing) => existing == tag,
            None => {
                demands.insert(node.clone(), tag);
                true
            }
        }
    }
    for (i, command) in commands.iter().enumerate() {
        if command.output() != Empty {
            if let Some(parent) = command.node().parent() {
                match type_before(&parent, i) {
                    Some(tag) => {
                        if tag != Dir {
                            return Simplified::Break;
                        }
                    }
                    None => {
                        if !demand(&mut demands, &parent, Dir) {
                            return Simplified::Break;
                        }
                    }
                }
            }
        }
        if command.output() != Dir {
            let node = command.node();
            let below = per_node.range((
                Bound::Excluded(node.clone()),
                Bound::Unbounded,
            ));
            for (other, _) in below {
                if !node.is_above(other) {
                    break;
                }
                if type_before(other, i) != Some(Empty) {
                    return Simplified::Break;
                }
            }
            let constants_below = constant_nodes.range((
                Bound::Excluded(node.clone()),
                Bound::Unbounded,
            ));
            let demanded_empty: Vec<NodePath> = constants_below
                .take_while(|c| node.is_above(c))
                .cloned()
                .collect();
            for constant in demanded_empty {
                if !demand(&mut demands, &constant, Empty) {
                    return Simplified::Break;
                }
            }
        }
    }
    // initial tree property: whatever starts non-empty needs directories
    // all the way up
    let initially_non_empty: Vec<NodePath> = per_node
        .iter()
        .filter(|(_, positions)| commands[positions[0]].input() != Empty)
        .map(|(node, _)| node.clone())
        .chain(
            demands
                .iter()
                .filter(|(_, &tag)| tag == Dir)
                .map(|(node, _)| node.clone()),
        )
        .collect();
    for node in initially_non_empty {
        for anc in node.ancestors() {
            match per_node.get(&anc) {
                Some(positions) => {
                    if commands[positions[0]].input() != Dir {
                        return Simplified::Break;
                    }
                }
                None => {
                    if !demand(&mut demands, &anc, Dir) {
                        return Simplified::Break;
                    }
                }
            }
        }
    }
    let mut exact = true;
    let merged: Vec<Command> = per_node
        .iter()
        .map(|(node, positions)| {
            if positions.len() > 1 {
                exact = false;
            }
            Command::new(
                node.clone(),
                commands[positions[0]].input(),
                commands[*positions.last().expect("non-empty")].replacement().clone(),
            )
        })
        .collect();
    let sequence = order_simple_set(merged)
        .expect("the folded commands of a satisfiable log form a simple set");
    debug_assert!(!sequence.is_breaking());
    Simplified::Sequence { sequence, exact }
}

/// Direction label of a structural subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubtreeDirection {
    Up,
    Down,
}

/// A maximal run of type-changing activity: a set of connected nodes whose
/// commands are chained by the forced order and move in one direction.
/// A lone file edit forms a one-node subtree and is labeled `Up`; either
/// label predicts the same leaders for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralSubtree {
    pub root: NodePath,
    pub nodes: Vec<NodePath>,
    pub direction: SubtreeDirection,
}

/// Node partition of a simple set: nodes whose command keeps a directory a
/// directory, nodes whose command keeps an empty node empty, and disjoint
/// subtrees of everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeClassification {
    pub dir_nodes: Vec<NodePath>,
    pub empty_nodes: Vec<NodePath>,
    pub subtrees: Vec<StructuralSubtree>,
}

impl NodeClassification {
    /// The leaders the partition predicts: commands on directory- and
    /// empty-transient nodes, the roots of upward subtrees, and the leaves
    /// of downward subtrees.
    pub fn predicted_leader_nodes(&self) -> Vec<NodePath> {
        let mut nodes: Vec<NodePath> = self
            .dir_nodes
            .iter()
            .chain(&self.empty_nodes)
            .cloned()
            .collect();
        for subtree in &self.subtrees {
            match subtree.direction {
                SubtreeDirection::Up => nodes.push(subtree.root.clone()),
                SubtreeDirection::Down => {
                    for node in &subtree.nodes {
                        let has_child_inside = subtree
                            .nodes
                            .iter()
                            .any(|other| node.is_parent_of(other));
                        if !has_child_inside {
                            nodes.push(node.clone());
                        }
                    }
                }
            }
        }
        nodes.sort();
        nodes
    }
}

/// Partitions the nodes of a simple set.
pub fn classify_simple_set(commands: &[Command]) -> Result<NodeClassification, SimpleSetError> {
    if !is_simple_set(commands) {
        return Err(SimpleSetError::NotSimpleSet);
    }
    use TypeTag::*;
    let mut dir_nodes = Vec::new();
    let mut empty_nodes = Vec::new();
    let mut rest: BTreeMap<&NodePath, &Command> = BTreeMap::new();
    for command in commands {
        match (command.input(), command.output()) {
            (Dir, Dir) => dir_nodes.push(command.node().clone()),
            (Empty, Empty) => empty_nodes.push(command.node().clone()),
            _ => {
                rest.insert(command.node(), command);
            }
        }
    }
    // group the remaining nodes: a node joins its parent's subtree when the
    // two commands are linked by the forced order
    let mut subtree_of: BTreeMap<&NodePath, usize> = BTreeMap::new();
    let mut subtrees: Vec<(NodePath, Vec<NodePath>)> = Vec::new();
    for (&node, &command) in &rest {
        let linked_parent = node.parent().and_then(|parent| {
            let parent_cmd = rest.get(&parent)?;
            (command.precedes(parent_cmd) || parent_cmd.precedes(command))
                .then(|| subtree_of[&parent])
        });
        match linked_parent {
            Some(idx) => {
                subtrees[idx].1.push(node.clone());
                subtree_of.insert(node, idx);
            }
            None => {
                subtrees.push((node.clone(), vec![node.clone()]));
                subtree_of.insert(node, subtrees.len() - 1);
            }
        }
    }
    let subtrees = subtrees
        .into_iter()
        .map(|(root, nodes)| {
            let mut direction = SubtreeDirection::Up;
            for node in &nodes {
                if rest[node].kind() == crate::command::CommandKind::Down {
                    direction = SubtreeDirection::Down;
                }
            }
            StructuralSubtree {
                root,
                nodes,
                direction,
            }
        })
        .collect();
    dir_nodes.sort();
    empty_nodes.sort();
    Ok(NodeClassification {
        dir_nodes,
        empty_nodes,
        subtrees,
    })
}
