#ifndef FAIRDIV_H
#define FAIRDIV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum FairdivStatus {
  FAIRDIV_STATUS_OK = 0,
  FAIRDIV_STATUS_NULL_POINTER = 1,
  FAIRDIV_STATUS_INVALID_INPUT = 2,
  FAIRDIV_STATUS_OUT_OF_RANGE = 3,
  // The exact MMS oracle refuses instances this large.
  FAIRDIV_STATUS_TOO_LARGE = 4,
  FAIRDIV_STATUS_SOLVER = 5,
  FAIRDIV_STATUS_PANIC = 6,
} FairdivStatus;

typedef enum FairdivAlgorithm {
  FAIRDIV_ALGORITHM_MAXSUM = 0,
  FAIRDIV_ALGORITHM_LEXIMIN = 1,
  FAIRDIV_ALGORITHM_PROPM = 2,
  // 3/4-MMS allocation before leftover completion.
  FAIRDIV_ALGORITHM_MMS34 = 3,
} FairdivAlgorithm;

// Opaque allocation.
typedef struct FairdivAllocation FairdivAllocation;

// Opaque valuation matrix.
typedef struct FairdivInstance FairdivInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failed call on this thread, or NULL.
//
// The pointer stays valid until the next failing call on the same thread.
const char *fairdiv_last_error(void);

// Library version as a static NUL-terminated string.
const char *fairdiv_version(void);

// Build an instance from a row-major `n_agents x n_items` matrix.
//
// # Safety
// `values` must point to `n_agents * n_items` doubles (it may be NULL when
// that product is 0) and `out` must be a valid pointer.
enum FairdivStatus fairdiv_instance_new(size_t n_agents,
                                        size_t n_items,
                                        const double *values,
                                        struct FairdivInstance **out);

// # Safety
// `inst` must be NULL or a handle from [`fairdiv_instance_new`] not yet freed.
void fairdiv_instance_free(struct FairdivInstance *inst);

// # Safety
// `inst` must be a live instance handle.
size_t fairdiv_instance_n_agents(const struct FairdivInstance *inst);

// # Safety
// `inst` must be a live instance handle.
size_t fairdiv_instance_n_items(const struct FairdivInstance *inst);

// Run `algorithm` on `inst`.
//
// # Safety
// `inst` must be a live instance handle and `out` a valid pointer.
enum FairdivStatus fairdiv_allocate(const struct FairdivInstance *inst,
                                    enum FairdivAlgorithm algorithm,
                                    struct FairdivAllocation **out);

// Hand out the items `partial` left unallocated, starting from the last agent.
//
// # Safety
// `inst` and `partial` must be live handles and `out` a valid pointer.
enum FairdivStatus fairdiv_complete_leftovers(const struct FairdivInstance *inst,
                                              const struct FairdivAllocation *partial,
                                              struct FairdivAllocation **out);

// # Safety
// `alloc` must be NULL or a handle not yet freed.
void fairdiv_allocation_free(struct FairdivAllocation *alloc);

// Fraction of `item` held by `agent`.
//
// # Safety
// `alloc` must be a live handle and `out` a valid pointer.
enum FairdivStatus fairdiv_allocation_share(const struct FairdivAllocation *alloc,
                                            size_t agent,
                                            size_t item,
                                            double *out);

// Owner of `item`, or -1 when it is unallocated or split.
//
// # Safety
// `alloc` must be a live handle and `out` a valid pointer.
enum FairdivStatus fairdiv_allocation_owner(const struct FairdivAllocation *alloc,
                                            size_t item,
                                            int64_t *out);

// Write each agent's utility into `out[0..len]`; `len` must equal the number
// of agents.
//
// # Safety
// Both handles must be live and `out` must have room for `len` doubles.
enum FairdivStatus fairdiv_utilities(const struct FairdivInstance *inst,
                                     const struct FairdivAllocation *alloc,
                                     double *out,
                                     size_t len);

// Exact maximin share of `agent`.
//
// # Safety
// `inst` must be a live handle and `out` a valid pointer.
enum FairdivStatus fairdiv_mms_exact(const struct FairdivInstance *inst, size_t agent, double *out);

// Whether `alloc` is PROPm for `inst`; it must be complete and integral.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum FairdivStatus fairdiv_check_propm(const struct FairdivInstance *inst,
                                       const struct FairdivAllocation *alloc,
                                       bool *out);

// Convenience for C callers printing statuses.
const char *fairdiv_status_name(enum FairdivStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAIRDIV_H */
