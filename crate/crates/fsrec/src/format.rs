//! Line-based file formats for snapshots and command sequences.
//!
//! Snapshot files carry a header line followed by one tab-separated line
//! per stored node, sorted by path: `path<TAB>type<TAB>token`. Sequence
//! files have no header and one command per line:
//! `path<TAB>input<TAB>output:token`. Both formats use `/` as the path
//! separator regardless of host platform and end every line with a
//! newline.

use thiserror::Error;

use crate::command::Command;
use crate::filesystem::{Filesystem, FilesystemError};
use crate::path::{NodePath, PathError};
use crate::reconcile::{Conflict, ConflictKind, StructuralReason};
use crate::value::{TypeTag, Value, ValueError};

pub const SNAPSHOT_HEADER: &str = "fsrec-snapshot v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing snapshot header {SNAPSHOT_HEADER:?}")]
    MissingHeader,
    #[error("line {line}: expected {expected} tab-separated fields")]
    WrongFieldCount { line: usize, expected: usize },
    #[error("line {line}: unknown type tag {tag:?}")]
    UnknownTag { line: usize, tag: String },
    #[error("line {line}: value must be written as type:token")]
    MalformedValue { line: usize },
    #[error("line {line}: duplicate node {node}")]
    DuplicateNode { line: usize, node: NodePath },
    #[error("line {line}: {source}")]
    BadPath {
        line: usize,
        #[source]
        source: PathError,
    },
    #[error("line {line}: {source}")]
    BadValue {
        line: usize,
        #[source]
        source: ValueError,
    },
    #[error("{0}")]
    Tree(FilesystemError),
}

/// Renders a snapshot: header plus one sorted line per stored node.
pub fn serialize_fs(fs: &Filesystem) -> String {
    let mut out = String::new();
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for (node, value) in fs.entries() {
        out.push_str(&format!("{node}\t{}\t{}\n", value.tag(), value.token()));
    }
    out
}

fn parse_tag(field: &str, line: usize) -> Result<TypeTag, ParseError> {
    let mut chars = field.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => TypeTag::from_letter(c).ok_or(ParseError::UnknownTag {
            line,
            tag: field.to_string(),
        }),
        _ => Err(ParseError::UnknownTag {
            line,
            tag: field.to_string(),
        }),
    }
}

/// Parses a snapshot file. Lines naming the default empty value are
/// accepted and elided; duplicate nodes and tree violations are rejected.
pub fn parse_fs(text: &str) -> Result<Filesystem, ParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SNAPSHOT_HEADER => {}
        _ => return Err(ParseError::MissingHeader),
    }
    let mut entries: Vec<(NodePath, Value)> = Vec::new();
    for (index, raw) in lines {
        let line = index + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            return Err(ParseError::WrongFieldCount { line, expected: 3 });
        }
        let node: NodePath = fields[0]
            .parse()
            .map_err(|source| ParseError::BadPath { line, source })?;
        let tag = parse_tag(fields[1], line)?;
        let value =
            Value::new(tag, fields[2]).map_err(|source| ParseError::BadValue { line, source })?;
        if entries.iter().any(|(n, _)| n == &node) {
            return Err(ParseError::DuplicateNode { line, node });
        }
        entries.push((node, value));
    }
    Filesystem::from_entries(entries).map_err(ParseError::Tree)
}

/// Renders a command sequence, one line per command, order preserved.
pub fn serialize_seq(commands: &[Command]) -> String {
    let mut out = String::new();
    for command in commands {
        out.push_str(&format!(
            "{}\t{}\t{}:{}\n",
            command.node(),
            command.input(),
            command.output(),
            command.replacement().token(),
        ));
    }
    out
}

/// Parses a sequence file. The sequence may be arbitrary (commands may
/// repeat nodes), since logs are normalized downstream.
pub fn parse_seq(text: &str) -> Result<Vec<Command>, ParseError> {
    let mut commands = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            return Err(ParseError::WrongFieldCount { line, expected: 3 });
        }
        let node: NodePath = fields[0]
            .parse()
            .map_err(|source| ParseError::BadPath { line, source })?;
        let input = parse_tag(fields[1], line)?;
        let (tag_part, token) = fields[2]
            .split_once(':')
            .ok_or(ParseError::MalformedValue { line })?;
        let output = parse_tag(tag_part, line)?;
        let value =
            Value::new(output, token).map_err(|source| ParseError::BadValue { line, source })?;
        commands.push(Command::new(node, input, value));
    }
    Ok(commands)
}

/// One report line per conflict: kind, node, the two commands. Kinds are
/// `content` (same node and type, different values), `same-node` (blocked
/// by a type change on the same node), and `order` (blocked by a command it
/// cannot be reordered past).
pub fn conflict_line(conflict: &Conflict) -> String {
    match &conflict.kind {
        ConflictKind::Content {
            a_command,
            b_command,
        } => format!("content\t{}\t{a_command}\t{b_command}", conflict.node),
        ConflictKind::Structural { blocked, reason } => match reason {
            StructuralReason::SameNodeTypeChange { blocking } => {
                format!("same-node\t{}\t{blocked}\t{blocking}", conflict.node)
            }
            StructuralReason::OrderViolation { blocking } => {
                format!("order\t{}\t{blocked}\t{blocking}", conflict.node)
            }
        },
    }
}

/// Renders a whole conflict report, one line per conflict.
pub fn conflict_report(conflicts: &[Conflict]) -> String {
    conflicts
        .iter()
        .map(|c| conflict_line(c) + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::command::test_support::{cmd, fs};

    #[test]
    fn snapshot_round_trip_example() {
        let f = fs(&[("a", "D:d0"), ("a/b", "F:f0")]);
        let text = serialize_fs(&f);
        assert_eq!(text, "fsrec-snapshot v1\na\tD\td0\na/b\tF\tf0\n");
        assert_eq!(parse_fs(&text).unwrap(), f);
    }

    #[test]
    fn empty_snapshot_is_just_the_header() {
        assert_eq!(serialize_fs(&Filesystem::empty()), "fsrec-snapshot v1\n");
        assert_eq!(
            parse_fs("fsrec-snapshot v1\n").unwrap(),
            Filesystem::empty()
        );
        assert_eq!(parse_fs("fsrec-snapshot v1").unwrap(), Filesystem::empty());
    }

    #[test]
    fn snapshot_parse_rejects_tree_violations() {
        let err = parse_fs("fsrec-snapshot v1\na\tF\tf0\na/b\tF\tf0\n").unwrap_err();
        match err {
            ParseError::Tree(FilesystemError::TreeViolation { node }) => {
                assert_eq!(node, "a/b".parse().unwrap());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn snapshot_parse_rejects_duplicates_and_bad_tags() {
        // line numbers are physical: the header is line 1
        assert!(matches!(
            parse_fs("fsrec-snapshot v1\na\tD\td0\na\tD\td1\n"),
            Err(ParseError::DuplicateNode { line: 3, .. })
        ));
        assert!(matches!(
            parse_fs("fsrec-snapshot v1\na\tQ\tq0\n"),
            Err(ParseError::UnknownTag { line: 2, .. })
        ));
        assert!(matches!(
            parse_fs("no header"),
            Err(ParseError::MissingHeader)
        ));
    }

    #[test]
    fn sequence_round_trip_example() {
        let commands = vec![cmd("a/b", 'F', "E:e0")];
        let text = serialize_seq(&commands);
        assert_eq!(text, "a/b\tF\tE:e0\n");
        assert_eq!(parse_seq(&text).unwrap(), commands);
    }

    #[test]
    fn empty_sequence_is_an_empty_file() {
        assert_eq!(serialize_seq(&[]), "");
        assert_eq!(parse_seq("").unwrap(), vec![]);
    }

    #[test]
    fn sequence_parse_rejects_unknown_tags() {
        assert!(matches!(
            parse_seq("a\tQ\tF:f0\n"),
            Err(ParseError::UnknownTag { line: 1, .. })
        ));
        assert!(matches!(
            parse_seq("a\tF\tf0\n"),
            Err(ParseError::MalformedValue { line: 1 })
        ));
    }

    #[test]
    fn sequence_files_keep_order_and_repeats() {
        let log = vec![
            cmd("a", 'E', "F:f0"),
            cmd("a", 'F', "F:f1"),
            cmd("b", 'E', "D:d0"),
        ];
        assert_eq!(parse_seq(&serialize_seq(&log)).unwrap(), log);
    }
}
