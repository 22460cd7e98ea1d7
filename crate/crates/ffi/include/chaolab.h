#ifndef CHAOLAB_H
#define CHAOLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ChaolabStatus {
  CHAOLAB_STATUS_OK = 0,
  CHAOLAB_STATUS_NULL_POINTER = 1,
  CHAOLAB_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Refused for size or memory limits.
   */
  CHAOLAB_STATUS_RESOURCE = 3,
  /**
   * Index past the end of a collection.
   */
  CHAOLAB_STATUS_OUT_OF_RANGE = 4,
  CHAOLAB_STATUS_PANIC = 5,
} ChaolabStatus;

typedef enum ChaolabPrecision {
  CHAOLAB_PRECISION_BINARY32 = 0,
  CHAOLAB_PRECISION_BINARY64 = 1,
} ChaolabPrecision;

/**
 * Coupled chaotic number stream.
 */
typedef struct ChaolabGenerator ChaolabGenerator;

/**
 * All cycles of a lattice map, largest basin first.
 */
typedef struct ChaolabOrbitStructure ChaolabOrbitStructure;

typedef struct ChaolabCycle {
  uint64_t period;
  uint64_t basin_size;
  /**
   * Smallest lattice index on the cycle.
   */
  uint64_t min_index;
} ChaolabCycle;

typedef struct ChaolabCycleSearch {
  /**
   * 1 when a cycle was found within the budget.
   */
  uint8_t found;
  uint64_t period;
  uint64_t tail;
  uint64_t iterations_used;
} ChaolabCycleSearch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *chaolab_status_message(enum ChaolabStatus status);

/**
 * Creates a stream of `p` coupled maps (`"tent"` or `"logistic-sym"`) with
 * linear coupling `eps1`. `x0` holds `p` values in `[-1, 1]`, or is null
 * for the published seeds.
 *
 * # Safety
 * `map` must be a NUL-terminated string; `x0` is null or points to `p`
 * doubles; `out` is a valid pointer.
 */
enum ChaolabStatus chaolab_generator_new(const char *map,
                                         size_t p,
                                         double eps1,
                                         enum ChaolabPrecision precision,
                                         const double *x0,
                                         bool mixed,
                                         bool uniformize,
                                         struct ChaolabGenerator **out);

/**
 * Next value in `[-1, 1]` (in `[0, 1]` when uniformized).
 *
 * # Safety
 * `gen` comes from [`chaolab_generator_new`]; `out` is a valid pointer.
 */
enum ChaolabStatus chaolab_generator_next(struct ChaolabGenerator *gen, double *out);

/**
 * Fills `buf` with `len` values in `[0, 1)`.
 *
 * # Safety
 * `gen` comes from [`chaolab_generator_new`]; `buf` holds `len` doubles.
 */
enum ChaolabStatus chaolab_generator_fill_units(struct ChaolabGenerator *gen,
                                                double *buf,
                                                size_t len);

/**
 * Fills `buf` with `len` bytes, two per draw.
 *
 * # Safety
 * `gen` comes from [`chaolab_generator_new`]; `buf` holds `len` bytes.
 */
enum ChaolabStatus chaolab_generator_fill_bytes(struct ChaolabGenerator *gen,
                                                uint8_t *buf,
                                                size_t len);

/**
 * # Safety
 * `gen` is null or comes from [`chaolab_generator_new`] and is not used again.
 */
void chaolab_generator_free(struct ChaolabGenerator *gen);

/**
 * Enumerates every cycle of a one-dimensional map on the lattice of order
 * `n`. `max_points` of 0 means the default cap.
 *
 * # Safety
 * `map` must be a NUL-terminated string; `out` is a valid pointer.
 */
enum ChaolabStatus chaolab_enumerate(const char *map,
                                     uint64_t n,
                                     size_t workers,
                                     uint64_t max_points,
                                     struct ChaolabOrbitStructure **out);

/**
 * Number of cycles, or 0 for a null handle.
 *
 * # Safety
 * `s` is null or comes from [`chaolab_enumerate`].
 */
size_t chaolab_orbit_structure_len(const struct ChaolabOrbitStructure *s);

/**
 * # Safety
 * `s` comes from [`chaolab_enumerate`]; `out` is a valid pointer.
 */
enum ChaolabStatus chaolab_orbit_structure_get(const struct ChaolabOrbitStructure *s,
                                               size_t index,
                                               struct ChaolabCycle *out);

/**
 * # Safety
 * `s` is null or comes from [`chaolab_enumerate`] and is not used again.
 */
void chaolab_orbit_structure_free(struct ChaolabOrbitStructure *s);

/**
 * Constant-memory cycle search on `p` linearly coupled copies of an interval
 * map, starting at `x0` (null for the published seeds). `found` is 0 when
 * the budget runs out first.
 *
 * # Safety
 * `map` must be a NUL-terminated string; `x0` is null or points to `p`
 * doubles; `out` is a valid pointer.
 */
enum ChaolabStatus chaolab_detect_cycle(const char *map,
                                        size_t p,
                                        double eps1,
                                        enum ChaolabPrecision precision,
                                        const double *x0,
                                        uint64_t budget,
                                        struct ChaolabCycleSearch *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHAOLAB_H */
