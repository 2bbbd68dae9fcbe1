#ifndef LOOPBLOCKS_H
#define LOOPBLOCKS_H

/* Generated by cbindgen from loopblocks-ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LbStatus {
  LB_STATUS_OK = 0,
  LB_STATUS_NULL_POINTER = 1,
  LB_STATUS_INVALID_UTF8 = 2,
  LB_STATUS_INVALID_GROUP = 3,
  LB_STATUS_INVALID_CUT = 4,
  LB_STATUS_INVALID_INPUT = 5,
  LB_STATUS_CAP_EXCEEDED = 6,
  LB_STATUS_NUMERICAL = 7,
  LB_STATUS_CONSISTENCY = 8,
  LB_STATUS_OUT_OF_RANGE = 9,
  LB_STATUS_PANIC = 10,
} LbStatus;

/**
 * Opaque handle to a computed block structure.
 */
typedef struct LbBlocks LbBlocks;

/**
 * Opaque handle to a finite group and its character table.
 */
typedef struct LbGroup LbGroup;

/**
 * Topological shape of one block: `copies` blocks of size `rows × cols`.
 */
typedef struct LbBlockShape {
  uint64_t copies;
  uint64_t rows;
  uint64_t cols;
} LbBlockShape;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Free with `lb_string_free`.
 */
char *lb_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void lb_string_free(char *s);

/**
 * Builds a group from a name such as "D6", "Q8" or "Z2xA4".
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum LbStatus lb_group_new(const char *name, struct LbGroup **out);

/**
 * # Safety
 * `g` must come from `lb_group_new` and not have been freed, or be NULL.
 */
void lb_group_free(struct LbGroup *g);

/**
 * Group order, or 0 for NULL.
 *
 * # Safety
 * `g` must be a live group handle or NULL.
 */
size_t lb_group_order(const struct LbGroup *g);

/**
 * Number of conjugacy classes (equal to the number of irreps), or 0 for NULL.
 *
 * # Safety
 * `g` must be a live group handle or NULL.
 */
size_t lb_group_num_classes(const struct LbGroup *g);

/**
 * Character table as JSON. Free the result with `lb_string_free`.
 *
 * # Safety
 * `g` must be a live group handle; `out` must be writable.
 */
enum LbStatus lb_group_character_table_json(const struct LbGroup *g, char **out);

/**
 * Ground-state degeneracy on "sphere", "torus", "rp2", "klein", "genus:<g>" or "crosscap:<k>".
 *
 * # Safety
 * `g` must be a live group handle; `surface` NUL-terminated; `out` writable.
 */
enum LbStatus lb_gsd(struct LbGroup *g, const char *surface, uint64_t *out);

/**
 * Computes the block structure for a cut such as "orient:gx=0,gy=0,n=2,s=+-".
 *
 * # Safety
 * `g` must be a live group handle; `cut` NUL-terminated; `out` writable.
 */
enum LbStatus lb_blocks_new(const struct LbGroup *g, const char *cut, struct LbBlocks **out);

/**
 * # Safety
 * `b` must come from `lb_blocks_new` and not have been freed, or be NULL.
 */
void lb_blocks_free(struct LbBlocks *b);

/**
 * Number of block labels, or 0 for NULL.
 *
 * # Safety
 * `b` must be a live block handle or NULL.
 */
size_t lb_blocks_len(const struct LbBlocks *b);

/**
 * Topological shape of block `index`, evaluated at the group order.
 *
 * # Safety
 * `b` must be a live block handle; `out` writable.
 */
enum LbStatus lb_blocks_shape(const struct LbBlocks *b, size_t index, struct LbBlockShape *out);

/**
 * Sum of rows·cols·copies over the topological blocks.
 *
 * # Safety
 * `b` must be a live block handle; `out` writable.
 */
enum LbStatus lb_blocks_total_dof(const struct LbBlocks *b, uint64_t *out);

/**
 * Block structure as JSON. Free the result with `lb_string_free`.
 *
 * # Safety
 * `b` must be a live block handle; `out` writable.
 */
enum LbStatus lb_blocks_json(const struct LbBlocks *b, char **out);

/**
 * Minimal-state entanglement entropy `n ln|G| - ln(orbit_size · dim)`.
 */
double lb_tee_minimal(size_t group_order,
                      size_t boundary_points,
                      uint64_t orbit_size,
                      uint64_t dim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOOPBLOCKS_H */
