//! Commands and their application semantics.
//!
//! A command `(node, input, replacement)` replaces the value at `node` with
//! `replacement`, provided the current value there has type `input` and the
//! result is still a valid tree. Otherwise the command breaks the
//! filesystem; breakage is an outcome, not a fault, and it absorbs the rest
//! of a sequence.
//!
//! Two binary relations drive everything downstream: `precedes` is the
//! forced execution order between structural commands on consecutive nodes
//! (delete the child before downgrading the parent, create the parent
//! directory before the child's content), and `independent` marks command
//! pairs whose order is semantically irrelevant.

use std::fmt;

use crate::filesystem::Filesystem;
use crate::path::NodePath;
use crate::value::{TypeTag, Value};

/// A single replacement command.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Command {
    node: NodePath,
    input: TypeTag,
    replacement: Value,
}

/// The value-independent part of a command: node, input type, output type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommandType {
    pub node: NodePath,
    pub input: TypeTag,
    pub output: TypeTag,
}

impl fmt::Display for CommandType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}>{})", self.node, self.input, self.output)
    }
}

/// The nine input/output type combinations collapse into five categories:
/// three transient ones that keep the type, and the structural up and down
/// families that change it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommandKind {
    TransientDir,
    TransientFile,
    TransientEmpty,
    Up,
    Down,
}

/// Result of applying a command or sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApplyOutcome {
    Applied(Filesystem),
    Broken,
}

impl ApplyOutcome {
    pub fn is_broken(&self) -> bool {
        matches!(self, ApplyOutcome::Broken)
    }

    pub fn filesystem(&self) -> Option<&Filesystem> {
        match self {
            ApplyOutcome::Applied(fs) => Some(fs),
            ApplyOutcome::Broken => None,
        }
    }

    pub fn into_filesystem(self) -> Option<Filesystem> {
        match self {
            ApplyOutcome::Applied(fs) => Some(fs),
            ApplyOutcome::Broken => None,
        }
    }
}

impl Command {
    pub fn new(node: NodePath, input: TypeTag, replacement: Value) -> Self {
        Command {
            node,
            input,
            replacement,
        }
    }

    pub fn node(&self) -> &NodePath {
        &self.node
    }

    pub fn input(&self) -> TypeTag {
        self.input
    }

    pub fn replacement(&self) -> &Value {
        &self.replacement
    }

    pub fn output(&self) -> TypeTag {
        self.replacement.tag()
    }

    pub fn command_type(&self) -> CommandType {
        CommandType {
            node: self.node.clone(),
            input: self.input,
            output: self.output(),
        }
    }

    pub fn kind(&self) -> CommandKind {
        use TypeTag::*;
        match (self.input, self.output()) {
            (Dir, Dir) => CommandKind::TransientDir,
            (File, File) => CommandKind::TransientFile,
            (Empty, Empty) => CommandKind::TransientEmpty,
            (Empty, File) | (Empty, Dir) | (File, Dir) => CommandKind::Up,
            (Dir, File) | (Dir, Empty) | (File, Empty) => CommandKind::Down,
        }
    }

    pub fn is_structural(&self) -> bool {
        self.input != self.output()
    }

    pub fn is_transient(&self) -> bool {
        !self.is_structural()
    }

    /// Applies the command: checks the input type at the node and the tree
    /// property of the updated map.
    ///
    /// Equivalent to `replace` followed by the tree test, but only inspects
    /// the regions the update can invalidate.
    pub fn apply(&self, fs: &Filesystem) -> ApplyOutcome {
        if fs.type_at(&self.node) != self.input {
            return ApplyOutcome::Broken;
        }
        let out = self.output();
        if out != TypeTag::Empty {
            if let Some(parent) = self.node.parent() {
                if fs.type_at(&parent) != TypeTag::Dir {
                    return ApplyOutcome::Broken;
                }
            }
        }
        if out != TypeTag::Dir && fs.has_nonempty_strict_descendant(&self.node) {
            return ApplyOutcome::Broken;
        }
        let updated = fs
            .replace(&self.node, &self.replacement)
            .into_filesystem()
            .expect("local checks cover every violation the update can introduce");
        ApplyOutcome::Applied(updated)
    }

    /// The forced-order relation on command pairs. It holds exactly for
    ///
    /// * `(n, D|F -> E)` before `(parent n, D -> F|E)`: empty the child
    ///   before downgrading its parent directory, and
    /// * `(parent n, E|F -> D)` before `(n, E -> F|D)`: make the parent a
    ///   directory before filling in the child.
    pub fn precedes(&self, later: &Command) -> bool {
        use TypeTag::*;
        // (n, DF, E) before (parent n, D, FE)
        let down = later.node.is_parent_of(&self.node)
            && matches!(self.input, Dir | File)
            && self.output() == Empty
            && later.input == Dir
            && matches!(later.output(), File | Empty);
        if down {
            return true;
        }
        // (parent n, EF, D) before (n, E, FD)
        self.node.is_parent_of(&later.node)
            && matches!(self.input, Empty | File)
            && self.output() == Dir
            && later.input == Empty
            && matches!(later.output(), File | Dir)
    }

    /// Independence of two commands on different nodes: order never matters.
    ///
    /// Commands on uncomparable nodes are always independent; on comparable
    /// nodes the pair is independent exactly when the higher command keeps a
    /// directory a directory, or the lower command keeps an empty node
    /// empty, or both.
    ///
    /// # Panics
    ///
    /// The relation is defined only for commands on different nodes; callers
    /// must branch on node equality first.
    pub fn independent(&self, other: &Command) -> bool {
        assert_ne!(
            self.node, other.node,
            "independence is defined only for commands on different nodes"
        );
        if self.node.independent(&other.node) {
            return true;
        }
        let (upper, lower) = if self.node.is_above(&other.node) {
            (self, other)
        } else {
            (other, self)
        };
        (upper.input == TypeTag::Dir && upper.output() == TypeTag::Dir)
            || (lower.input == TypeTag::Empty && lower.output() == TypeTag::Empty)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.node, self.input, self.replacement)
    }
}

/// Applies a sequence left to right; breakage propagates.
///
/// The empty sequence is the identity.
pub fn apply_sequence(commands: &[Command], fs: &Filesystem) -> ApplyOutcome {
    let mut current = fs.clone();
    for command in commands {
        match command.apply(&current) {
            ApplyOutcome::Applied(next) => current = next,
            ApplyOutcome::Broken => return ApplyOutcome::Broken,
        }
    }
    ApplyOutcome::Applied(current)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Shorthand command constructor for tests: `cmd("a/b", 'F', "E:e0")`.
    pub fn cmd(node: &str, input: char, replacement: &str) -> Command {
        let (tag, token) = replacement.split_once(':').unwrap();
        Command::new(
            node.parse().unwrap(),
            TypeTag::from_letter(input).unwrap(),
            Value::new(TypeTag::from_letter(tag.chars().next().unwrap()).unwrap(), token)
                .unwrap(),
        )
    }

    pub fn fs(entries: &[(&str, &str)]) -> Filesystem {
        Filesystem::from_entries(entries.iter().map(|(n, v)| {
            let (tag, token) = v.split_once(':').unwrap();
            (
                n.parse().unwrap(),
                Value::new(TypeTag::from_letter(tag.chars().next().unwrap()).unwrap(), token)
                    .unwrap(),
            )
        }))
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::{cmd, fs};
    use super::*;

    #[test]
    fn apply_creates_under_directory() {
        let out = cmd("a/b", 'E', "F:f0").apply(&fs(&[("a", "D:d0")]));
        assert_eq!(out, ApplyOutcome::Applied(fs(&[("a", "D:d0"), ("a/b", "F:f0")])));
    }

    #[test]
    fn apply_refuses_removing_a_nonempty_directory() {
        let out = cmd("a", 'D', "E:e0").apply(&fs(&[("a", "D:d0"), ("a/b", "F:f0")]));
        assert_eq!(out, ApplyOutcome::Broken);
    }

    #[test]
    fn apply_refuses_input_type_mismatch() {
        let out = cmd("a", 'F', "F:f1").apply(&fs(&[("a", "D:d0")]));
        assert_eq!(out, ApplyOutcome::Broken);
    }

    #[test]
    fn sequence_application_examples() {
        assert_eq!(
            apply_sequence(&[], &fs(&[("a", "F:f0")])),
            ApplyOutcome::Applied(fs(&[("a", "F:f0")]))
        );
        assert_eq!(
            apply_sequence(
                &[cmd("a", 'E', "D:d0"), cmd("a/b", 'E', "F:f0")],
                &Filesystem::empty()
            ),
            ApplyOutcome::Applied(fs(&[("a", "D:d0"), ("a/b", "F:f0")]))
        );
        // second command's precondition fails: a is no longer empty
        assert_eq!(
            apply_sequence(
                &[cmd("a", 'E', "D:d0"), cmd("a", 'E', "F:f0")],
                &Filesystem::empty()
            ),
            ApplyOutcome::Broken
        );
    }

    #[test]
    fn category_examples() {
        assert_eq!(cmd("a", 'E', "F:f0").kind(), CommandKind::Up);
        assert_eq!(cmd("a", 'D', "F:f0").kind(), CommandKind::Down);
        assert_eq!(cmd("a", 'D', "D:d1").kind(), CommandKind::TransientDir);
        assert_eq!(cmd("a", 'F', "D:d0").kind(), CommandKind::Up);
        assert_eq!(cmd("a", 'F', "E:e1").kind(), CommandKind::Down);
        assert_eq!(cmd("a", 'E', "E:e1").kind(), CommandKind::TransientEmpty);
    }

    #[test]
    fn precedes_examples() {
        // empty the child before downgrading the parent
        assert!(cmd("a/b", 'F', "E:e0").precedes(&cmd("a", 'D', "E:e0")));
        // make the parent a directory before filling the child
        assert!(cmd("a", 'E', "D:d0").precedes(&cmd("a/b", 'E', "F:f0")));
        // transient commands never participate
        assert!(!cmd("a", 'D', "D:d1").precedes(&cmd("a/b", 'E', "F:f0")));
        // wrong direction
        assert!(!cmd("a", 'D', "E:e0").precedes(&cmd("a/b", 'F', "E:e0")));
        // unrelated nodes
        assert!(!cmd("a", 'F', "E:e0").precedes(&cmd("b", 'D', "E:e0")));
    }

    #[test]
    fn independent_examples() {
        assert!(cmd("a", 'D', "D:d1").independent(&cmd("a/b", 'F', "F:f1")));
        assert!(cmd("a", 'D', "E:e0").independent(&cmd("a/b", 'E', "E:e1")));
        assert!(!cmd("a", 'F', "D:d0").independent(&cmd("a/b", 'E', "F:f0")));
        assert!(cmd("a/b", 'F', "F:f1").independent(&cmd("a/c", 'E', "F:f0")));
    }

    #[test]
    #[should_panic(expected = "different nodes")]
    fn independent_rejects_same_node() {
        let _ = cmd("a", 'F', "F:f1").independent(&cmd("a", 'F', "F:f0"));
    }

    #[test]
    fn command_type_is_value_independent() {
        assert_eq!(
            cmd("a", 'E', "F:f0").command_type(),
            cmd("a", 'E', "F:f1").command_type()
        );
        assert_ne!(
            cmd("a", 'E', "F:f0").command_type(),
            cmd("a/b", 'E', "F:f0").command_type()
        );
        let t = cmd("a/b", 'D', "E:e1").command_type();
        assert_eq!((t.input, t.output), (TypeTag::Dir, TypeTag::Empty));
    }

    #[test]
    fn display_is_compact() {
        assert_eq!(cmd("a/b", 'F', "E:e0").to_string(), "(a/b,F,E:e0)");
    }
}
