#ifndef FSREC_H
#define FSREC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum FsrecStatus {
  FSREC_STATUS_OK = 0,
  // Malformed snapshot or sequence text.
  FSREC_STATUS_PARSE_ERROR = 1,
  // The sequence input is not simple or breaks every filesystem.
  FSREC_STATUS_BREAKING_SEQUENCE = 2,
  // The sequence does not apply to the snapshot.
  FSREC_STATUS_APPLY_BROKEN = 3,
  // The two sequences admit no common filesystem.
  FSREC_STATUS_NOT_REFLUENT = 4,
  // A required pointer argument was null or otherwise unusable.
  FSREC_STATUS_INVALID_ARGUMENT = 5,
} FsrecStatus;

// Opaque command-sequence handle.
typedef struct FsrecSequence FsrecSequence;

// Opaque snapshot handle.
typedef struct FsrecSnapshot FsrecSnapshot;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The last error message recorded on this thread.
//
// # Safety
// The returned pointer stays valid until the next failing call on the same
// thread; do not free it.
const char *fsrec_last_error_message(void);

// Parses snapshot text into a handle.
//
// # Safety
// `text` must point to a NUL-terminated string and `out` to writable
// storage for one pointer.
enum FsrecStatus fsrec_snapshot_parse(const char *text, struct FsrecSnapshot **out);

// Serializes a snapshot back to its file format.
//
// # Safety
// `snapshot` must be a live handle and `out` writable; release the string
// with [`fsrec_string_free`].
enum FsrecStatus fsrec_snapshot_to_string(const struct FsrecSnapshot *snapshot, char **out);

// Number of stored entries in a snapshot; zero for a null handle.
//
// # Safety
// `snapshot` must be null or a live handle.
size_t fsrec_snapshot_entry_count(const struct FsrecSnapshot *snapshot);

// Releases a snapshot handle; null is ignored.
//
// # Safety
// `snapshot` must have come from this library and not be freed twice.
void fsrec_snapshot_free(struct FsrecSnapshot *snapshot);

// Parses sequence text into a handle. The sequence may be an arbitrary
// log; normalization and the pairwise operations validate further.
//
// # Safety
// As for [`fsrec_snapshot_parse`].
enum FsrecStatus fsrec_sequence_parse(const char *text, struct FsrecSequence **out);

// Serializes a sequence back to its file format.
//
// # Safety
// As for [`fsrec_snapshot_to_string`].
enum FsrecStatus fsrec_sequence_to_string(const struct FsrecSequence *sequence, char **out);

// Number of commands in a sequence; zero for a null handle.
//
// # Safety
// `sequence` must be null or a live handle.
size_t fsrec_sequence_len(const struct FsrecSequence *sequence);

// Releases a sequence handle; null is ignored.
//
// # Safety
// `sequence` must have come from this library and not be freed twice.
void fsrec_sequence_free(struct FsrecSequence *sequence);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `text` must have come from this library and not be freed twice.
void fsrec_string_free(char *text);

// Computes the canonical sequence turning `base` into `replica`.
//
// # Safety
// `base` and `replica` must be live handles and `out` writable.
enum FsrecStatus fsrec_detect(const struct FsrecSnapshot *base,
                              const struct FsrecSnapshot *replica,
                              struct FsrecSequence **out);

// Applies a sequence to a snapshot.
//
// # Safety
// `snapshot` and `sequence` must be live handles and `out` writable.
enum FsrecStatus fsrec_apply(const struct FsrecSnapshot *snapshot,
                             const struct FsrecSequence *sequence,
                             struct FsrecSnapshot **out);

// Normalizes an operation log into a canonical simple sequence.
//
// # Safety
// `sequence` must be a live handle and `out` writable.
enum FsrecStatus fsrec_normalize(const struct FsrecSequence *sequence, struct FsrecSequence **out);

// Decides whether two simple sequences apply to a common filesystem.
// Writes 1 or 0 to `out_refluent`; when refluent and `out_witness` is
// non-null, also hands out a witness snapshot.
//
// # Safety
// `a` and `b` must be live handles; `out_refluent` must be writable;
// `out_witness` may be null.
enum FsrecStatus fsrec_refluent(const struct FsrecSequence *a,
                                const struct FsrecSequence *b,
                                int32_t *out_refluent,
                                struct FsrecSnapshot **out_witness);

// Reconciles two diverged update sequences: hands out the commands from
// `b` to replay on replica A, the commands from `a` to replay on replica
// B, the conflict report text, and the number of conflicts.
//
// # Safety
// `a` and `b` must be live handles; each out-pointer may be null when the
// caller does not need that output.
enum FsrecStatus fsrec_reconcile(const struct FsrecSequence *a,
                                 const struct FsrecSequence *b,
                                 struct FsrecSequence **out_to_a,
                                 struct FsrecSequence **out_to_b,
                                 char **out_report,
                                 size_t *out_conflicts);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FSREC_H */
