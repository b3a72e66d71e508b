#ifndef PARTIAL_ENFORCE_H
#define PARTIAL_ENFORCE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define PE_OK 0

#define PE_ERR_NULL -1

#define PE_ERR_UTF8 -2

#define PE_ERR_PARSE -3

#define PE_ERR_ARGUMENT -4

#define PE_ERR_INCOMPATIBLE -5

#define PE_ERR_NOT_REASONABLE -6

#define PE_ERR_COMPLIANCE -7

#define PE_ERR_BUDGET -8

#define PE_ERR_BUFFER -9

#define PE_ERR_PANIC -10

#define PE_CLASS_O 0

#define PE_CLASS_I 1

#define PE_CLASS_D 2

#define PE_CLASS_C 3

#define PE_EQ_SYNTACTIC 0

#define PE_EQ_INSERT 1

#define PE_EQ_SUPPRESS 2

#define PE_STRATEGY_EDIT 0

#define PE_STRATEGY_TRUNCATE 1

#define PE_STRATEGY_INSERT 2

#define PE_STRATEGY_SUPPRESS 3

#define PE_PROPERTY_SAFETY 0

#define PE_PROPERTY_LIVENESS 1

#define PE_PROPERTY_RENEWAL 2

// Verdict values.
#define PE_FALSE 0

#define PE_TRUE 1

#define PE_UNDECIDED -1

// A parsed policy.
typedef struct PePolicy PePolicy;

// A running enforcer. Keeps its own copy of the policy.
typedef struct PeSession PeSession;

// Enumeration bounds: finite length, lasso stem, lasso loop.
typedef struct {
  size_t max_finite_len;
  size_t max_stem_len;
  size_t max_loop_len;
} PeBounds;

// Outcome of a finished session.
typedef struct {
  bool sound;
  bool transparent;
  bool compliant;
  bool aborted;
  bool premature;
  bool ok;
} PeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message. Empty after a
// successful call.
//
// # Safety
// `buf` must hold `len` bytes; `needed` may be null.
int32_t pe_last_error(char *buf, size_t len, size_t *needed);

// Parses policy text. `possible` lines are resolved against the working
// directory.
//
// # Safety
// `text` must be a NUL-terminated string, `out` a valid pointer.
int32_t pe_policy_parse(const char *text, PePolicy **out);

// Loads a policy file; `possible` lines are resolved relative to it.
//
// # Safety
// As pe_policy_parse.
int32_t pe_policy_load(const char *path, PePolicy **out);

// # Safety
// `policy` must come from this library and not be used afterwards. Null
// is ignored.
void pe_policy_free(PePolicy *policy);

// Puts every action in class `cls`.
//
// # Safety
// `policy` must be a live handle.
int32_t pe_policy_set_uniform(PePolicy *policy, uint32_t cls);

// Whether the empty execution is valid: 1 or 0 in `out`.
//
// # Safety
// `policy` must be a live handle, `out` valid.
int32_t pe_policy_is_reasonable(const PePolicy *policy, int32_t *out);

// Property class test (`PE_PROPERTY_*`); verdict in `out`.
//
// # Safety
// `policy` must be a live handle, `out` valid.
int32_t pe_property_class(const PePolicy *policy, uint32_t kind, int32_t *out);

// Enforceability under equivalence `eq`. `stationary` only matters for
// insertion. `bounds` may be null for the defaults. On `PE_FALSE` with a
// witness, the witness trace literal goes to `witness` when it is not
// null; otherwise an empty string is written.
//
// # Safety
// `policy` must be a live handle, `verdict` valid, `witness` null or
// `witness_len` bytes long.
int32_t pe_is_enforceable(const PePolicy *policy,
                          uint32_t eq,
                          bool stationary,
                          const PeBounds *bounds,
                          int32_t *verdict,
                          char *witness,
                          size_t witness_len);

// Opens an enforcer session on a copy of the policy.
//
// # Safety
// `policy` must be a live handle, `out` valid.
int32_t pe_session_new(const PePolicy *policy,
                       uint32_t strategy,
                       uint32_t eq,
                       bool stationary,
                       PeSession **out);

// # Safety
// As pe_policy_free.
void pe_session_free(PeSession *session);

// Feeds one action. The events it caused, one edit-log line each, go to
// `log` when it is not null. The step happens even when the log does not
// fit; `PE_ERR_BUFFER` then reports the size needed.
//
// # Safety
// `session` must be a live handle, `action` a NUL-terminated string,
// `log` null or `log_len` bytes long, `needed` null or valid.
int32_t pe_session_step(PeSession *session,
                        const char *action,
                        char *log,
                        size_t log_len,
                        size_t *needed);

// The output released so far, as a trace literal.
//
// # Safety
// `session` must be a live handle, `buf` null or `len` bytes long.
int32_t pe_session_output(const PeSession *session, char *buf, size_t len, size_t *needed);

// Ends the input and evaluates the run. The session stays usable.
//
// # Safety
// `session` must be a live handle, `out` valid.
int32_t pe_session_finish(const PeSession *session, PeResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARTIAL_ENFORCE_H */
