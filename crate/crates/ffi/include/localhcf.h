#ifndef LOCALHCF_H
#define LOCALHCF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Zero means success; `EstimatorFailed`
 * means the run hit its iteration cap.
 */
typedef enum LhcfStatus {
  LHCF_STATUS_OK = 0,
  LHCF_STATUS_NULL_POINTER = 1,
  LHCF_STATUS_INVALID_ARGUMENT = 2,
  LHCF_STATUS_BUFFER_TOO_SMALL = 3,
  LHCF_STATUS_ESTIMATOR_FAILED = 4,
  LHCF_STATUS_PANIC = 5,
} LhcfStatus;

/**
 * A field together with its data term.
 */
typedef struct LhcfProblem LhcfProblem;

/**
 * Prior potentials for the edge lattice.
 */
typedef struct LhcfPotentials {
  double continuity;
  double turn;
  double parallel;
  double edge_prior;
} LhcfPotentials;

/**
 * Summary of one estimator run.
 */
typedef struct LhcfRunInfo {
  /**
   * Final energy of the labeling.
   */
  double energy;
  /**
   * Iterations (Local HCF) or steps (HCF) that changed the labeling.
   */
  size_t iterations;
} LhcfRunInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default edge-lattice potentials.
 */
struct LhcfPotentials lhcf_potentials_default(void);

/**
 * The eight-site edge chain used in the test suite.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum LhcfStatus lhcf_problem_chain_fixture(struct LhcfProblem **out);

/**
 * Edge-labeling problem for a `width` x `height` grayscale image stored row
 * by row. `potentials` may be null for the defaults.
 *
 * # Safety
 * `pixels` must be valid for `width * height` reads and `out` writable.
 */
enum LhcfStatus lhcf_problem_from_image(const uint8_t *pixels,
                                        size_t width,
                                        size_t height,
                                        double mu,
                                        double sigma,
                                        const struct LhcfPotentials *potentials,
                                        struct LhcfProblem **out);

/**
 * Edge-labeling problem from per-site log likelihood ratios, one per
 * boundary segment of a `width` x `height` image (vertical segments first).
 *
 * # Safety
 * `llrs` must be valid for `len` reads and `out` writable.
 */
enum LhcfStatus lhcf_problem_from_llrs(const double *llrs,
                                       size_t len,
                                       size_t width,
                                       size_t height,
                                       const struct LhcfPotentials *potentials,
                                       struct LhcfProblem **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `problem` must be null or a handle not yet freed.
 */
void lhcf_problem_free(struct LhcfProblem *problem);

/**
 * Number of sites, or 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t lhcf_problem_num_sites(const struct LhcfProblem *problem);

/**
 * Runs Local HCF. `threads` = 0 uses all cores; `rank_seed` = 0 breaks ties
 * by site index, anything else by a seeded permutation. Writes one label per
 * site to `labels_out`; `info_out` may be null.
 *
 * # Safety
 * `problem` must be a live handle, `labels_out` valid for `len` writes, and
 * `info_out` null or writable.
 */
enum LhcfStatus lhcf_run_local_hcf(const struct LhcfProblem *problem,
                                   size_t threads,
                                   uint64_t rank_seed,
                                   uint32_t *labels_out,
                                   size_t len,
                                   struct LhcfRunInfo *info_out);

/**
 * Runs serial HCF. Arguments as for `lhcf_run_local_hcf`.
 *
 * # Safety
 * As for `lhcf_run_local_hcf`.
 */
enum LhcfStatus lhcf_run_hcf(const struct LhcfProblem *problem,
                             uint64_t rank_seed,
                             uint32_t *labels_out,
                             size_t len,
                             struct LhcfRunInfo *info_out);

/**
 * Energy of a complete labeling.
 *
 * # Safety
 * `problem` must be a live handle, `labels` valid for `len` reads and
 * `energy_out` writable.
 */
enum LhcfStatus lhcf_energy(const struct LhcfProblem *problem,
                            const uint32_t *labels,
                            size_t len,
                            double *energy_out);

/**
 * Message for the last failure on this thread, or null if there was none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *lhcf_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCALHCF_H */
