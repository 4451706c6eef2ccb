//! Command-line surface of the reconciliation engine.
//!
//! Exit codes: 0 on success (and for conflict-free reconciliation or a
//! positive check), 1 when reconciliation reports conflicts or a check
//! answers no, 2 on breaking sequences, parse failures, and I/O errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fsrec::command::Command;
use fsrec::detect::{detect, normalize_log};
use fsrec::filesystem::Filesystem;
use fsrec::format::{conflict_report, parse_fs, parse_seq, serialize_fs, serialize_seq};
use fsrec::reconcile::{reconcile, ReconcileError};
use fsrec::refluence::refluent;
use fsrec::rewrite::{SimpleSequence, Simplified};
use fsrec::scan::scan_directory;
use fsrec::ApplyOutcome;

#[derive(Parser)]
#[command(name = "fsrec", version, about = "Snapshot, diff, and reconcile directory trees")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Snapshot a directory tree
    Scan {
        dir: PathBuf,
        /// Output snapshot file (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute the command sequence turning the base snapshot into the replica
    Detect {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        replica: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Normalize an operation log into a canonical simple sequence
    Normalize {
        sequence: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply a sequence to a snapshot
    Apply {
        snapshot: PathBuf,
        sequence: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide properties of a sequence pair
    Check {
        /// Decide whether the two sequences apply to a common filesystem
        #[arg(long)]
        refluent: bool,
        seq_a: PathBuf,
        seq_b: PathBuf,
    },
    /// Compute both propagation plans and the conflict report
    Reconcile {
        seq_a: PathBuf,
        seq_b: PathBuf,
        /// Commands from B to replay on replica A
        #[arg(long)]
        to_a: Option<PathBuf>,
        /// Commands from A to replay on replica B
        #[arg(long)]
        to_b: Option<PathBuf>,
        /// Conflict report, one conflict per line
        #[arg(long)]
        conflicts: Option<PathBuf>,
    },
}

/// Failure that maps to exit code 2.
struct Failure(String);

macro_rules! failure_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure(e.to_string())
            }
        })*
    };
}

failure_from!(
    fsrec::refluence::RefluenceError,
    ReconcileError,
    fsrec::scan::ScanError
);

fn read_to_string(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write_output(target: Option<&Path>, content: &str) -> Result<(), Failure> {
    match target {
        Some(path) => {
            fs::write(path, content).map_err(|e| Failure(format!("{}: {e}", path.display())))
        }
        None => {
            io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| Failure(e.to_string()))
        }
    }
}

fn load_snapshot(path: &Path) -> Result<Filesystem, Failure> {
    parse_fs(&read_to_string(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_sequence(path: &Path) -> Result<Vec<Command>, Failure> {
    parse_seq(&read_to_string(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_simple_sequence(path: &Path) -> Result<SimpleSequence, Failure> {
    let commands = load_sequence(path)?;
    let sequence = SimpleSequence::new(commands)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    if sequence.is_breaking() {
        return Err(Failure(format!(
            "{}: sequence breaks every filesystem",
            path.display()
        )));
    }
    Ok(sequence)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Cmd::Scan { dir, output } => {
            let outcome = scan_directory(&dir)?;
            for (path, reason) in &outcome.skipped {
                eprintln!("warning: skipping {} ({})", path.display(), reason.describe());
            }
            write_output(output.as_deref(), &serialize_fs(&outcome.filesystem))?;
            Ok(0)
        }
        Cmd::Detect {
            base,
            replica,
            output,
        } => {
            let base = load_snapshot(&base)?;
            let replica = load_snapshot(&replica)?;
            let sequence = detect(&base, &replica);
            write_output(output.as_deref(), &serialize_seq(sequence.commands()))?;
            Ok(0)
        }
        Cmd::Normalize { sequence, output } => {
            let log = load_sequence(&sequence)?;
            match normalize_log(&log) {
                Simplified::Sequence { sequence, .. } => {
                    write_output(output.as_deref(), &serialize_seq(sequence.commands()))?;
                    Ok(0)
                }
                Simplified::Break => Err(Failure("sequence breaks every filesystem".into())),
            }
        }
        Cmd::Apply {
            snapshot,
            sequence,
            output,
        } => {
            let fs = load_snapshot(&snapshot)?;
            let log = load_sequence(&sequence)?;
            match fsrec::apply_sequence(&log, &fs) {
                ApplyOutcome::Applied(result) => {
                    write_output(output.as_deref(), &serialize_fs(&result))?;
                    Ok(0)
                }
                ApplyOutcome::Broken => {
                    Err(Failure("sequence breaks the snapshot".into()))
                }
            }
        }
        Cmd::Check {
            refluent: check_refluent,
            seq_a,
            seq_b,
        } => {
            if !check_refluent {
                return Err(Failure("nothing to check; pass --refluent".into()));
            }
            let a = load_simple_sequence(&seq_a)?;
            let b = load_simple_sequence(&seq_b)?;
            match refluent(&a, &b)? {
                Some(_) => {
                    println!("refluent");
                    Ok(0)
                }
                None => {
                    println!("not refluent");
                    Ok(1)
                }
            }
        }
        Cmd::Reconcile {
            seq_a,
            seq_b,
            to_a,
            to_b,
            conflicts,
        } => {
            let a = load_simple_sequence(&seq_a)?;
            let b = load_simple_sequence(&seq_b)?;
            let result = match reconcile(&a, &b) {
                Ok(result) => result,
                Err(ReconcileError::NotRefluent) => {
                    return Err(Failure(
                        "sequences are not refluent; no common original exists".into(),
                    ))
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(path) = to_a.as_deref() {
                write_output(Some(path), &serialize_seq(result.apply_after_alpha.commands()))?;
            }
            if let Some(path) = to_b.as_deref() {
                write_output(Some(path), &serialize_seq(result.apply_after_beta.commands()))?;
            }
            let report = conflict_report(&result.conflicts);
            if let Some(path) = conflicts.as_deref() {
                write_output(Some(path), &report)?;
            }
            eprintln!(
                "to-a: {} command(s), to-b: {} command(s), conflicts: {}",
                result.apply_after_alpha.len(),
                result.apply_after_beta.len(),
                result.conflicts.len()
            );
            Ok(if result.conflicts.is_empty() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
