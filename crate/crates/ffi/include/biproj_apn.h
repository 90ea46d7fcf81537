#ifndef BIPROJ_APN_H
#define BIPROJ_APN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum BapStatus {
  BAP_STATUS_OK = 0,
  BAP_STATUS_NULL_POINTER = 1,
  BAP_STATUS_INVALID_ARGUMENT = 2,
  BAP_STATUS_DIVISION_BY_ZERO = 3,
  BAP_STATUS_CONDITION_VIOLATED = 4,
  BAP_STATUS_TOO_LARGE = 5,
  BAP_STATUS_UNSUPPORTED = 6,
  BAP_STATUS_SEARCH_FAILED = 7,
  BAP_STATUS_BUFFER_TOO_SMALL = 8,
  BAP_STATUS_PANIC = 9,
} BapStatus;

/**
 * A finite field GF(2^m).
 */
typedef struct BapField BapField;

/**
 * A biprojective pair over a field.
 */
typedef struct BapPair BapPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL terminated,
 * truncated to `cap`). Returns the full message length.
 *
 * # Safety
 * `buf` must be valid for `cap` bytes or null.
 */
uintptr_t bap_last_error(char *buf, uintptr_t cap);

/**
 * Creates GF(2^m). `poly` is the defining polynomial as a bit mask, or 0
 * for the default one.
 *
 * # Safety
 * `field` must be a valid pointer.
 */
enum BapStatus bap_field_new(uint32_t m, uint64_t poly, struct BapField **field);

/**
 * # Safety
 * `field` must come from `bap_field_new` or be null.
 */
void bap_field_free(struct BapField *field);

/**
 * Extension degree of the field, 0 for a null handle.
 *
 * # Safety
 * `field` must be a live handle or null.
 */
uint32_t bap_field_degree(const struct BapField *field);

/**
 * Defining polynomial of the field as a bit mask.
 *
 * # Safety
 * `field` must be a live handle or null.
 */
uint64_t bap_field_poly(const struct BapField *field);

/**
 * # Safety
 * `field` must be a live handle, `result` valid.
 */
enum BapStatus bap_field_mul(const struct BapField *field,
                             uint32_t a,
                             uint32_t b,
                             uint32_t *result);

/**
 * # Safety
 * `field` must be a live handle, `result` valid.
 */
enum BapStatus bap_field_inv(const struct BapField *field, uint32_t a, uint32_t *result);

/**
 * Builds the pair [(c0)_{2^k}, (c1)_{2^l}] from two 4-coefficient arrays.
 *
 * # Safety
 * `c0`, `c1` must point at 4 values each; `pair` must be valid.
 */
enum BapStatus bap_pair_new(const struct BapField *field,
                            uint32_t k,
                            uint32_t l,
                            const uint32_t *c0,
                            const uint32_t *c1,
                            struct BapPair **pair);

/**
 * Builds a catalog instance from text such as `gold:k=1` or
 * `f4:k=1,B=0x5,a=0x1`; side conditions are validated.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `pair` must be valid.
 */
enum BapStatus bap_pair_from_spec(const struct BapField *field,
                                  const char *spec,
                                  struct BapPair **pair);

/**
 * # Safety
 * `pair` must come from a `bap_pair_*` constructor or be null.
 */
void bap_pair_free(struct BapPair *pair);

/**
 * Evaluates the pair at (x, y).
 *
 * # Safety
 * `pair` must be a live handle; `fx`, `fy` valid.
 */
enum BapStatus bap_pair_eval(const struct BapPair *pair,
                             uint32_t x,
                             uint32_t y,
                             uint32_t *fx,
                             uint32_t *fy);

/**
 * APN test through the full differential table.
 *
 * # Safety
 * `pair` must be a live handle; `is_apn` valid.
 */
enum BapStatus bap_apn_naive(const struct BapPair *pair, bool *is_apn);

/**
 * APN test through the projective kernel criterion.
 *
 * # Safety
 * `pair` must be a live handle; `is_apn` valid.
 */
enum BapStatus bap_apn_projective(const struct BapPair *pair, bool *is_apn);

/**
 * Extended Walsh spectrum as parallel arrays of |W| values and their
 * multiplicities, ascending in |W|. `len` receives the number of entries;
 * BufferTooSmall is returned when it exceeds `cap`.
 *
 * # Safety
 * `values` and `counts` must be valid for `cap` entries.
 */
enum BapStatus bap_walsh_spectrum(const struct BapPair *pair,
                                  uint64_t *values,
                                  uint64_t *counts,
                                  uintptr_t cap,
                                  uintptr_t *len,
                                  bool *classical);

/**
 * Searches for a restricted equivalence between two pairs over the same
 * field. `equivalent` is set to whether a witness was found.
 *
 * # Safety
 * Both handles must be live; `equivalent` valid.
 */
enum BapStatus bap_equivalent(const struct BapPair *first,
                              const struct BapPair *second,
                              bool *equivalent);

/**
 * Number of (p1, p2, p3, p4) with p1 != 0 whose form of exponent 2^k has
 * no projective root.
 *
 * # Safety
 * `field` must be a live handle; `count` valid.
 */
enum BapStatus bap_rootless_count(const struct BapField *field, uint32_t k, uint64_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIPROJ_APN_H */
