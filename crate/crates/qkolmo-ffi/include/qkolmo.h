#ifndef QKOLMO_H
#define QKOLMO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Zero is success.
 */
typedef enum {
  QK_STATUS_OK = 0,
  QK_STATUS_NULL_POINTER = 1,
  QK_STATUS_INVALID_UTF8 = 2,
  QK_STATUS_PARSE = 3,
  QK_STATUS_DIMENSION = 4,
  QK_STATUS_CAP_EXCEEDED = 5,
  QK_STATUS_NON_HALTING = 6,
  QK_STATUS_INVALID_ARGUMENT = 7,
  QK_STATUS_BUFFER_TOO_SMALL = 8,
  QK_STATUS_OTHER = 9,
} QkStatus;

/**
 * A parsed machine.
 */
typedef struct QkMachine QkMachine;

/**
 * A qubit string (density operator on strings of bounded length).
 */
typedef struct QkQubitString QkQubitString;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *qk_last_error(void);

/**
 * Parses a machine from its text format.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
QkStatus qk_machine_parse(const char *src, QkMachine **out);

/**
 * # Safety
 * `m` must come from [`qk_machine_parse`] or be null.
 */
void qk_machine_free(QkMachine *m);

/**
 * Exact unitarity check on the window reachable from inputs of length at
 * most `n_max` within `t_max` steps.
 *
 * # Safety
 * `m` must be a live handle and `unitary` a valid pointer.
 */
QkStatus qk_machine_validate(const QkMachine *m, size_t t_max, size_t n_max, bool *unitary);

/**
 * Dimensions of the exact halting spaces `H^(n)(t)` for `t = 0..=t_max`,
 * written to `dims[0..=t_max]`; `len` must be at least `t_max + 1`.
 *
 * # Safety
 * `m` must be a live handle and `dims` must hold `len` elements.
 */
QkStatus qk_halting_dims(const QkMachine *m, size_t n, size_t t_max, size_t *dims, size_t len);

/**
 * Classical basis state `|s⟩`.
 *
 * # Safety
 * `s` must be NUL-terminated and `out` valid.
 */
QkStatus qk_qstring_classical(const char *s, QkQubitString **out);

/**
 * # Safety
 * `q` must come from this library or be null.
 */
void qk_qstring_free(QkQubitString *q);

/**
 * Human-readable form (`01` for a classical string). Free with
 * [`qk_string_free`].
 *
 * # Safety
 * `q` must be a live handle and `out` valid.
 */
QkStatus qk_qstring_describe(const QkQubitString *q, char **out);

/**
 * Trace distance between two qubit strings.
 *
 * # Safety
 * Both handles must be live and `out` valid.
 */
QkStatus qk_qstring_trace_distance(const QkQubitString *a, const QkQubitString *b, double *out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void qk_string_free(char *s);

/**
 * Runs `input` to its halting time (at most `t_max`) and returns the time
 * and the output qubit string.
 *
 * # Safety
 * Handles must be live; `time` and `output` must be valid pointers.
 */
QkStatus qk_simulate(const QkMachine *m,
                     const QkQubitString *input,
                     size_t t_max,
                     size_t *time,
                     QkQubitString **output);

/**
 * `(log d + 4δ log(1/δ)) / (1 − 4δ)`.
 *
 * # Safety
 * `out` must be valid.
 */
QkStatus qk_counting_bound(uint64_t d, double delta, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QKOLMO_H */
