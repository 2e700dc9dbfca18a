#ifndef TOWERDIGITS_H
#define TOWERDIGITS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TdCaseTag {
  TD_CASE_TAG_MOD10_19 = 0,
  TD_CASE_TAG_MOD10_37 = 1,
  TD_CASE_TAG_MOD10_5 = 2,
  TD_CASE_TAG_EVEN = 3,
} TdCaseTag;

typedef enum TdStatus {
  TD_STATUS_OK = 0,
  TD_STATUS_NULL_POINTER = 1,
  /**
   * Base is a multiple of 10.
   */
  TD_STATUS_EXCLUDED_BASE = 2,
  TD_STATUS_INVALID_ARGUMENT = 3,
  TD_STATUS_DIGITS_OUT_OF_RANGE = 4,
  /**
   * The output buffer cannot hold the digits plus the terminating NUL.
   */
  TD_STATUS_BUFFER_TOO_SMALL = 5,
  TD_STATUS_NOT_APPLICABLE = 6,
  TD_STATUS_PANIC = 7,
} TdStatus;

typedef enum TdVariant {
  TD_VARIANT_AS_WRITTEN = 0,
  TD_VARIANT_EXAMPLE_CONSISTENT = 1,
} TdVariant;

/**
 * Opaque tower base `q^(2^x * 5^y * a)`.
 */
typedef struct TdTower TdTower;

typedef struct TdPrediction {
  uint64_t u;
  enum TdCaseTag case_tag;
  bool clamped;
  /**
   * Set for `q = 1`, whose row the source leaves blank.
   */
  bool convention;
} TdPrediction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a tower handle. Release it with `td_tower_free`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum TdStatus td_tower_new(uint64_t q, uint32_t x, uint32_t y, uint64_t a, struct TdTower **out);

/**
 * # Safety
 * `tower` must come from `td_tower_new` and not have been freed. Null is ignored.
 */
void td_tower_free(struct TdTower *tower);

/**
 * Last `n` digits of the height-`height` tower.
 *
 * # Safety
 * `tower` must be a live handle; `buf` must point to `len` writable bytes;
 * `written` may be null.
 */
enum TdStatus td_tower_residue(const struct TdTower *tower,
                               uint64_t height,
                               uint32_t n,
                               char *buf,
                               size_t len,
                               size_t *written);

/**
 * Last `n` digits of the infinitely tall tower.
 *
 * # Safety
 * Same contract as `td_tower_residue`.
 */
enum TdStatus td_tower_stable_residue(const struct TdTower *tower,
                                      uint32_t n,
                                      char *buf,
                                      size_t len,
                                      size_t *written);

/**
 * Smallest height from which the last `n` digits never change.
 *
 * # Safety
 * `tower` must be a live handle and `out_u` writable.
 */
enum TdStatus td_tower_min_height(const struct TdTower *tower, uint32_t n, uint64_t *out_u);

/**
 * Conjectured minimum height. `x < 2` uses the tabulated rows and needs
 * `y = 0`; inputs no formula covers give `NotApplicable`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TdStatus td_predict(uint64_t q,
                         uint32_t x,
                         uint32_t y,
                         uint32_t n,
                         enum TdVariant variant,
                         struct TdPrediction *out);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *td_last_error(void);

/**
 * NUL-terminated library version.
 */
const char *td_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TOWERDIGITS_H */
