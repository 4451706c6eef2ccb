//! Reconciliation engine for diverged filesystem replicas.
//!
//! Two replicas of a tree diverge; each divergence is captured as a simple
//! sequence of replacement commands: at most one command per node, ordered
//! so that forced parent/child orderings are honored. On that form the
//! engine answers the questions synchronization needs:
//!
//! * [`detect::detect`] compares two snapshots and produces the canonical
//!   command sequence transforming one into the other; [`detect::normalize_log`]
//!   brings a recorded operation log into the same form or proves it can
//!   never run.
//! * [`refluence`] decides whether two sequences can act on a common
//!   filesystem at all, with an explicit witness.
//! * [`reconcile::reconcile`] computes, for each replica, the provably
//!   maximal set of the other side's changes that can be replayed without
//!   overriding local changes, and classifies everything else as content or
//!   structural conflicts.
//!
//! The [`oracle`] module provides brute-force semantic ground truth over
//! small domains; the test suites check the syntactic machinery against it
//! exhaustively. File formats and directory ingestion live in
//! [`format`](crate::format) and [`scan`]; the `fsrec` binary wires them
//! into a command-line pipeline.

pub mod command;
pub mod detect;
pub mod filesystem;
pub mod format;
pub mod oracle;
pub mod path;
pub mod reconcile;
pub mod refluence;
pub mod rewrite;
pub mod scan;
pub mod value;

pub use command::{apply_sequence, ApplyOutcome, Command, CommandKind, CommandType};
pub use filesystem::{CandidateMap, Filesystem, FilesystemError};
pub use path::{NodePath, PathError};
pub use reconcile::{Conflict, ConflictKind, ReconcileResult, StructuralReason};
pub use rewrite::{RewriteOutcome, SimpleSequence, Simplified};
pub use value::{TypeTag, Value, ValueUniverse};
