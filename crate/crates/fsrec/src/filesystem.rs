//! Filesystem snapshots.
//!
//! A snapshot is a finitely supported map from node paths to values: nodes
//! not present in the map hold the default empty value. Valid snapshots obey
//! the tree property: along any branch from a root there are directories,
//! then at most one file, then only empty values. Locally that means every
//! stored non-empty value at a non-root node sits under a directory.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Bound;

use thiserror::Error;

use crate::path::NodePath;
use crate::value::{TypeTag, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilesystemError {
    #[error("node {node} listed twice")]
    DuplicateNode { node: NodePath },
    #[error("non-empty value at {node} does not sit under a directory")]
    TreeViolation { node: NodePath },
}

/// An immutable snapshot satisfying the tree property.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Filesystem {
    entries: BTreeMap<NodePath, Value>,
}

impl Filesystem {
    /// The filesystem holding the default empty value everywhere.
    pub fn empty() -> Self {
        Filesystem::default()
    }

    /// Builds a snapshot from explicit entries. Entries holding the default
    /// empty value are dropped (they are implied); duplicates and tree
    /// violations are rejected.
    pub fn from_entries<I>(entries: I) -> Result<Self, FilesystemError>
    where
        I: IntoIterator<Item = (NodePath, Value)>,
    {
        let mut map = BTreeMap::new();
        for (node, value) in entries {
            if value.is_default_empty() {
                // still a duplicate if the node appears twice
                if map.contains_key(&node) {
                    return Err(FilesystemError::DuplicateNode { node });
                }
                continue;
            }
            if map.insert(node.clone(), value).is_some() {
                return Err(FilesystemError::DuplicateNode { node });
            }
        }
        let candidate = CandidateMap { map };
        candidate.into_filesystem()
    }

    /// Stored entries in path order. Nodes outside this list hold the
    /// default empty value.
    pub fn entries(&self) -> impl Iterator<Item = (&NodePath, &Value)> {
        self.entries.iter()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The value at a node; unmapped nodes hold the default empty value.
    pub fn value_at(&self, node: &NodePath) -> &Value {
        self.entries.get(node).unwrap_or_else(|| Value::default_empty())
    }

    pub fn type_at(&self, node: &NodePath) -> TypeTag {
        self.entries
            .get(node)
            .map(Value::tag)
            .unwrap_or(TypeTag::Empty)
    }

    /// Pointwise update without validation: the result is a candidate map
    /// that still has to pass the tree check.
    pub fn replace(&self, node: &NodePath, value: &Value) -> CandidateMap {
        let mut map = self.entries.clone();
        if value.is_default_empty() {
            map.remove(node);
        } else {
            map.insert(node.clone(), value.clone());
        }
        CandidateMap { map }
    }

    /// Stored entries strictly below `node`, in path order.
    pub fn strict_descendants(
        &self,
        node: &NodePath,
    ) -> impl Iterator<Item = (&NodePath, &Value)> {
        self.entries
            .range((Bound::Excluded(node.clone()), Bound::Unbounded))
            .take_while({
                let node = node.clone();
                move |(p, _)| node.is_above(p)
            })
    }

    /// True when some node strictly below `node` stores a non-empty value.
    pub fn has_nonempty_strict_descendant(&self, node: &NodePath) -> bool {
        self.strict_descendants(node)
            .any(|(_, v)| v.tag() != TypeTag::Empty)
    }

    /// All nodes where the two snapshots differ, with both values. Nodes
    /// missing on one side report the default empty value for that side.
    pub fn diff(&self, other: &Filesystem) -> Vec<(NodePath, Value, Value)> {
        let mut out = Vec::new();
        let mut left = self.entries.iter().peekable();
        let mut right = other.entries.iter().peekable();
        loop {
            match (left.peek(), right.peek()) {
                (Some((ln, lv)), Some((rn, rv))) => {
                    if ln < rn {
                        out.push(((*ln).clone(), (*lv).clone(), Value::default_empty().clone()));
                        left.next();
                    } else if rn < ln {
                        out.push(((*rn).clone(), Value::default_empty().clone(), (*rv).clone()));
                        right.next();
                    } else {
                        if lv != rv {
                            out.push(((*ln).clone(), (*lv).clone(), (*rv).clone()));
                        }
                        left.next();
                        right.next();
                    }
                }
                (Some((ln, lv)), None) => {
                    out.push(((*ln).clone(), (*lv).clone(), Value::default_empty().clone()));
                    left.next();
                }
                (None, Some((rn, rv))) => {
                    out.push(((*rn).clone(), Value::default_empty().clone(), (*rv).clone()));
                    right.next();
                }
                (None, None) => break,
            }
        }
        out
    }
}

impl fmt::Display for Filesystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (node, value)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{node}:{value}")?;
        }
        write!(f, "}}")
    }
}

/// A raw node-to-value map that may violate the tree property.
///
/// Produced by [`Filesystem::replace`]; promote it back with
/// [`CandidateMap::into_filesystem`] or test it with [`CandidateMap::is_tree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateMap {
    map: BTreeMap<NodePath, Value>,
}

impl CandidateMap {
    pub fn value_at(&self, node: &NodePath) -> &Value {
        self.map.get(node).unwrap_or_else(|| Value::default_empty())
    }

    fn violation(&self) -> Option<&NodePath> {
        self.map.iter().find_map(|(node, value)| {
            if value.tag() == TypeTag::Empty {
                return None;
            }
            match node.parent() {
                None => None,
                Some(parent) => {
                    let ptag = self
                        .map
                        .get(&parent)
                        .map(Value::tag)
                        .unwrap_or(TypeTag::Empty);
                    (ptag != TypeTag::Dir).then_some(node)
                }
            }
        })
    }

    /// The tree property: every stored non-empty value at a non-root node
    /// sits under a directory.
    pub fn is_tree(&self) -> bool {
        self.violation().is_none()
    }

    pub fn into_filesystem(self) -> Result<Filesystem, FilesystemError> {
        if let Some(node) = self.violation() {
            return Err(FilesystemError::TreeViolation { node: node.clone() });
        }
        Ok(Filesystem { entries: self.map })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> NodePath {
        s.parse().unwrap()
    }

    fn fs(entries: &[(&str, &str)]) -> Filesystem {
        Filesystem::from_entries(entries.iter().map(|(n, v)| {
            let (tag, token) = v.split_once(':').unwrap();
            (
                p(n),
                Value::new(TypeTag::from_letter(tag.chars().next().unwrap()).unwrap(), token)
                    .unwrap(),
            )
        }))
        .unwrap()
    }

    #[test]
    fn is_tree_examples() {
        // file under directory
        assert!(Filesystem::from_entries([
            (p("a"), Value::dir("d0").unwrap()),
            (p("a/b"), Value::file("f0").unwrap()),
        ])
        .is_ok());
        // non-empty under file
        assert_eq!(
            Filesystem::from_entries([
                (p("a"), Value::file("f0").unwrap()),
                (p("a/b"), Value::file("f0").unwrap()),
            ]),
            Err(FilesystemError::TreeViolation { node: p("a/b") })
        );
        // empty filesystem
        assert!(Filesystem::empty().entries().next().is_none());
    }

    #[test]
    fn nondefault_empty_values_are_stored_and_legal_anywhere() {
        let f = fs(&[("a", "F:f0"), ("a/b", "E:e1")]);
        assert_eq!(f.entry_count(), 2);
        assert_eq!(f.value_at(&p("a/b")), &Value::empty("e1").unwrap());
        assert_eq!(f.type_at(&p("a/b")), TypeTag::Empty);
    }

    #[test]
    fn replace_examples() {
        let f = fs(&[("a", "D:d0")]);
        let g = f
            .replace(&p("a/b"), &Value::file("f0").unwrap())
            .into_filesystem()
            .unwrap();
        assert_eq!(g, fs(&[("a", "D:d0"), ("a/b", "F:f0")]));

        // replacing with the default empty value elides the entry
        let h = f.replace(&p("a"), Value::default_empty());
        assert!(h.is_tree());
        assert_eq!(h.into_filesystem().unwrap(), Filesystem::empty());

        let f = fs(&[("a", "F:f0")]);
        let g = f
            .replace(&p("a"), &Value::file("f1").unwrap())
            .into_filesystem()
            .unwrap();
        assert_eq!(g, fs(&[("a", "F:f1")]));
    }

    #[test]
    fn diff_examples() {
        let f = fs(&[("a", "D:d0"), ("a/b", "F:f0")]);
        let d = f.diff(&Filesystem::empty());
        assert_eq!(
            d,
            vec![
                (p("a"), Value::dir("d0").unwrap(), Value::default_empty().clone()),
                (p("a/b"), Value::file("f0").unwrap(), Value::default_empty().clone()),
            ]
        );
        assert!(f.diff(&f).is_empty());
        let d = Filesystem::empty().diff(&fs(&[("a", "F:f1")]));
        assert_eq!(
            d,
            vec![(p("a"), Value::default_empty().clone(), Value::file("f1").unwrap())]
        );
    }

    #[test]
    fn diff_is_symmetric_up_to_column_swap() {
        let f = fs(&[("a", "D:d0"), ("a/b", "F:f0"), ("b", "E:e1")]);
        let g = fs(&[("a", "D:d1"), ("b", "F:f1")]);
        let fwd = f.diff(&g);
        let mut bwd: Vec<_> = g
            .diff(&f)
            .into_iter()
            .map(|(n, x, y)| (n, y, x))
            .collect();
        bwd.sort();
        let mut fwd_sorted = fwd.clone();
        fwd_sorted.sort();
        assert_eq!(fwd_sorted, bwd);
    }

    #[test]
    fn duplicate_entries_rejected() {
        let r = Filesystem::from_entries([
            (p("a"), Value::dir("d0").unwrap()),
            (p("a"), Value::dir("d1").unwrap()),
        ]);
        assert_eq!(r, Err(FilesystemError::DuplicateNode { node: p("a") }));
    }

    #[test]
    fn descendant_scan_stops_at_subtree_edge() {
        let f = fs(&[("a", "D:d0"), ("a/b", "D:d0"), ("a/b/x", "F:f0"), ("ab", "F:f1")]);
        let below_a: Vec<_> = f.strict_descendants(&p("a")).map(|(n, _)| n.clone()).collect();
        assert_eq!(below_a, vec![p("a/b"), p("a/b/x")]);
        assert!(f.has_nonempty_strict_descendant(&p("a")));
        assert!(!f.has_nonempty_strict_descendant(&p("a/b/x")));
    }
}
