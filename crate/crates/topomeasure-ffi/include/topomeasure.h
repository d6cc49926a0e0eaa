#ifndef TOPOMEASURE_H
#define TOPOMEASURE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Return code of every fallible call.
typedef enum TmStatus {
  TM_STATUS_OK = 0,
  TM_STATUS_NULL_ARGUMENT = 1,
  TM_STATUS_INVALID_UTF8 = 2,
  TM_STATUS_PARSE = 3,
  TM_STATUS_EVALUATION = 4,
  TM_STATUS_PANIC = 5,
} TmStatus;

// Outcome of a validation.
typedef enum TmVerdict {
  TM_VERDICT_PASS = 0,
  TM_VERDICT_FAIL = 1,
  TM_VERDICT_UNKNOWN = 2,
} TmVerdict;

// A set function on open and closed regions.
typedef struct TmMeasure TmMeasure;

// A finite space with its solid-set catalog.
typedef struct TmSpace TmSpace;

// A solid-set function on a space.
typedef struct TmSsf TmSsf;

// An exact value. When `infinite` is nonzero the fraction is 0/1.
typedef struct TmValueOut {
  int32_t infinite;
  int64_t num;
  int64_t den;
} TmValueOut;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// The pointer stays valid until the next call on this thread.
const char *tm_last_error(void);

// Loads a space from a builtin name such as `disk(2)` or a descriptor file path.
//
// # Safety
// `spec` must be a valid C string and `out` a writable pointer.
enum TmStatus tm_space_load(const char *spec, struct TmSpace **out);

// Parses a space description document.
//
// # Safety
// `descriptor` must be a valid C string and `out` a writable pointer.
enum TmStatus tm_space_from_descriptor(const char *descriptor, struct TmSpace **out);

// Number of cells, not counting the point at infinity.
//
// # Safety
// `space` must be a live handle or null.
size_t tm_space_cell_count(const struct TmSpace *space);

// Nonzero when the space is compact.
//
// # Safety
// `space` must be a live handle or null.
int32_t tm_space_is_compact(const struct TmSpace *space);

// Genus of a compact space, or of its one-point compactification.
//
// # Safety
// Pointers must be valid; outputs must be writable.
enum TmStatus tm_space_genus(const struct TmSpace *space,
                             uint64_t budget,
                             size_t *genus,
                             int32_t *exact);

// # Safety
// `space` must come from this library and not be freed twice.
void tm_space_free(struct TmSpace *space);

// Parses a solid-set function descriptor such as `measure w=@uniform`.
//
// # Safety
// Pointers must be valid; `out` must be writable.
enum TmStatus tm_ssf_parse(const struct TmSpace *space, const char *descriptor, struct TmSsf **out);

// Checks the solid-set function axioms.
//
// # Safety
// Pointers must be valid; `out` must be writable.
enum TmStatus tm_ssf_validate(const struct TmSsf *ssf, uint64_t budget, enum TmVerdict *out);

// # Safety
// `ssf` must come from this library and not be freed twice.
void tm_ssf_free(struct TmSsf *ssf);

// Extends a solid-set function to open and closed regions.
//
// # Safety
// Pointers must be valid; `out` must be writable.
enum TmStatus tm_measure_extend(const struct TmSsf *ssf, struct TmMeasure **out);

// A measure with the same value on every nonempty open or closed region.
//
// # Safety
// Pointers must be valid; `value` is a literal such as `1`, `3/2` or `inf`.
enum TmStatus tm_measure_constant(const struct TmSpace *space,
                                  const char *value,
                                  struct TmMeasure **out);

// Evaluates on an open or closed region given as a region literal.
//
// # Safety
// Pointers must be valid; `out` must be writable.
enum TmStatus tm_measure_eval(const struct TmMeasure *measure,
                              const char *region,
                              struct TmValueOut *out);

// Checks the topological measure axioms.
//
// # Safety
// Pointers must be valid; `out` must be writable.
enum TmStatus tm_measure_validate(const struct TmMeasure *measure,
                                  uint64_t budget,
                                  enum TmVerdict *out);

// # Safety
// `measure` must come from this library and not be freed twice.
void tm_measure_free(struct TmMeasure *measure);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOPOMEASURE_H */
