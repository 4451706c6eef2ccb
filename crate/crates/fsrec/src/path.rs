//! Node paths of the synchronization namespace.
//!
//! The namespace is a forest: every node is addressed by a non-empty list of
//! name segments, single-segment paths are roots, and `parent` strips the
//! last segment. Paths order lexicographically by segment list, so a node
//! always sorts before its descendants and a subtree occupies a contiguous
//! range in any sorted map.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors raised when constructing or parsing a [`NodePath`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("a path needs at least one segment")]
    Empty,
    #[error("path segments must be non-empty")]
    EmptySegment,
    #[error("path segment {0:?} contains a reserved character")]
    ReservedChar(String),
}

/// A node of the namespace: a non-empty sequence of name segments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodePath {
    segments: Vec<String>,
}

fn valid_segment(segment: &str) -> Result<(), PathError> {
    if segment.is_empty() {
        return Err(PathError::EmptySegment);
    }
    if segment.contains(['/', '\t', '\n', '\r']) {
        return Err(PathError::ReservedChar(segment.to_string()));
    }
    Ok(())
}

impl NodePath {
    /// Builds a path from its segments, rejecting empty lists and segments
    /// that would collide with the textual `a/b` rendering.
    pub fn new<I, S>(segments: I) -> Result<Self, PathError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(PathError::Empty);
        }
        for segment in &segments {
            valid_segment(segment)?;
        }
        Ok(NodePath { segments })
    }

    /// A single-segment path.
    pub fn root(name: impl Into<String>) -> Result<Self, PathError> {
        NodePath::new([name.into()])
    }

    /// Extends the path by one segment.
    pub fn child(&self, segment: impl Into<String>) -> Result<Self, PathError> {
        let segment = segment.into();
        valid_segment(&segment)?;
        let mut segments = self.segments.clone();
        segments.push(segment);
        Ok(NodePath { segments })
    }

    /// The parent node, or `None` when this path is a root.
    pub fn parent(&self) -> Option<NodePath> {
        if self.segments.len() == 1 {
            None
        } else {
            Some(NodePath {
                segments: self.segments[..self.segments.len() - 1].to_vec(),
            })
        }
    }

    pub fn is_root(&self) -> bool {
        self.segments.len() == 1
    }

    /// Number of segments; roots have depth 1.
    pub fn depth(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    /// Strict ancestor test: `self` is above `other`.
    pub fn is_above(&self, other: &NodePath) -> bool {
        self.segments.len() < other.segments.len()
            && other.segments[..self.segments.len()] == self.segments[..]
    }

    /// Weak ancestor test: `self` is above or equal to `other`.
    pub fn is_at_or_above(&self, other: &NodePath) -> bool {
        self == other || self.is_above(other)
    }

    pub fn is_parent_of(&self, other: &NodePath) -> bool {
        other.segments.len() == self.segments.len() + 1 && self.is_above(other)
    }

    /// Two nodes are comparable when one lies on the ancestor chain of the
    /// other.
    pub fn comparable(&self, other: &NodePath) -> bool {
        self.is_at_or_above(other) || other.is_at_or_above(self)
    }

    /// Node independence: neither node is an ancestor of the other.
    pub fn independent(&self, other: &NodePath) -> bool {
        !self.comparable(other)
    }

    /// Strict ancestors, nearest first.
    pub fn ancestors(&self) -> impl Iterator<Item = NodePath> + '_ {
        (1..self.segments.len()).rev().map(|len| NodePath {
            segments: self.segments[..len].to_vec(),
        })
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.segments.join("/"))
    }
}

impl FromStr for NodePath {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(PathError::Empty);
        }
        NodePath::new(s.split('/'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> NodePath {
        s.parse().unwrap()
    }

    #[test]
    fn parent_of_root_is_undefined() {
        assert_eq!(p("a").parent(), None);
        assert_eq!(p("a/b").parent(), Some(p("a")));
        assert_eq!(p("a/b/x").parent(), Some(p("a/b")));
    }

    #[test]
    fn prefix_order() {
        assert!(p("a").is_above(&p("a/b")));
        assert!(p("a").is_above(&p("a/b/x")));
        assert!(!p("a").is_above(&p("a")));
        assert!(!p("a/b").is_above(&p("a")));
        assert!(!p("a").is_above(&p("ab")));
        assert!(p("a").is_at_or_above(&p("a")));
    }

    #[test]
    fn comparability_and_independence() {
        assert!(p("a").comparable(&p("a/b/x")));
        assert!(p("a/b").independent(&p("a/c")));
        assert!(p("a").independent(&p("b")));
        assert!(!p("a/b").independent(&p("a/b")));
    }

    #[test]
    fn sorted_maps_keep_subtrees_contiguous() {
        let mut v = vec![p("ab"), p("a/z/q"), p("b"), p("a"), p("a/b")];
        v.sort();
        assert_eq!(v, vec![p("a"), p("a/b"), p("a/z/q"), p("ab"), p("b")]);
    }

    #[test]
    fn ancestors_nearest_first() {
        let anc: Vec<_> = p("a/b/x").ancestors().collect();
        assert_eq!(anc, vec![p("a/b"), p("a")]);
    }

    #[test]
    fn rejects_malformed_paths() {
        assert!("".parse::<NodePath>().is_err());
        assert!("a//b".parse::<NodePath>().is_err());
        assert!(NodePath::new(["a\tb"]).is_err());
        assert!(NodePath::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn renders_with_slashes() {
        assert_eq!(p("a/b/x").to_string(), "a/b/x");
    }
}
