#ifndef OFFSPRING_H
#define OFFSPRING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OfsInsertOutcome {
  OFS_INSERT_OUTCOME_ACCEPTED = 0,
  /**
   * Accepted, and another member was truncated to make room.
   */
  OFS_INSERT_OUTCOME_ACCEPTED_WITH_TRUNCATION = 1,
  /**
   * Accepted, then truncated again because it was the weakest member.
   */
  OFS_INSERT_OUTCOME_CANDIDATE_TRUNCATED = 2,
  OFS_INSERT_OUTCOME_REJECTED_DOMINATED = 3,
  OFS_INSERT_OUTCOME_REJECTED_DUPLICATE = 4,
} OfsInsertOutcome;

/**
 * Result code of every fallible call.
 */
typedef enum OfsStatus {
  OFS_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  OFS_STATUS_NULL_ARGUMENT = 1,
  OFS_STATUS_INVALID_ARGUMENT = 2,
  OFS_STATUS_UNKNOWN_PROBLEM = 3,
  OFS_STATUS_CONFIG = 4,
  /**
   * I/O, executor or protocol failure.
   */
  OFS_STATUS_RUNTIME = 5,
  OFS_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  OFS_STATUS_PANIC = 7,
} OfsStatus;

typedef enum OfsTopologyKind {
  /**
   * `int_a` != 0 wraps the lattice into a torus.
   */
  OFS_TOPOLOGY_KIND_LATTICE = 0,
  /**
   * `int_a` = k, `probability` = rewiring probability.
   */
  OFS_TOPOLOGY_KIND_SMALL_WORLD = 1,
  /**
   * `int_a` = m0, `int_b` = m.
   */
  OFS_TOPOLOGY_KIND_SCALE_FREE = 2,
  /**
   * `probability` = edge probability.
   */
  OFS_TOPOLOGY_KIND_RANDOM = 3,
} OfsTopologyKind;

typedef struct OfsArchive OfsArchive;

typedef struct OfsProblem OfsProblem;

typedef struct OfsRun OfsRun;

typedef struct OfsTopology OfsTopology;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or NULL.
 */
const char *ofs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ofs_version(void);

/**
 * Looks up a benchmark problem by name (`zdt1`..`zdt6`, `dtlz1`..`dtlz6`).
 */
enum OfsStatus ofs_problem_new(const char *name, struct OfsProblem **out);

void ofs_problem_free(struct OfsProblem *problem);

/**
 * Number of decision variables, or 0 for NULL.
 */
size_t ofs_problem_decision_count(const struct OfsProblem *problem);

/**
 * Number of objectives, or 0 for NULL.
 */
size_t ofs_problem_objective_count(const struct OfsProblem *problem);

/**
 * Evaluates one genome of `decision_count` genes into `objective_count`
 * values.
 */
enum OfsStatus ofs_problem_evaluate(const struct OfsProblem *problem,
                                    const double *genome,
                                    size_t genome_len,
                                    double *objectives,
                                    size_t capacity,
                                    size_t *written);

/**
 * Builds a topology of `node_count` nodes. See [`OfsTopologyKind`] for how
 * `int_a`, `int_b` and `probability` are read.
 */
enum OfsStatus ofs_topology_new(enum OfsTopologyKind kind,
                                size_t node_count,
                                size_t int_a,
                                size_t int_b,
                                double probability,
                                uint64_t seed,
                                struct OfsTopology **out);

void ofs_topology_free(struct OfsTopology *topology);

size_t ofs_topology_node_count(const struct OfsTopology *topology);

size_t ofs_topology_edge_count(const struct OfsTopology *topology);

/**
 * Sorted neighbor ids of `node`.
 */
enum OfsStatus ofs_topology_neighbors(const struct OfsTopology *topology,
                                      size_t node,
                                      size_t *buf,
                                      size_t capacity,
                                      size_t *written);

/**
 * Archive of at most `capacity` members; 0 means unbounded.
 */
enum OfsStatus ofs_archive_new(size_t capacity, struct OfsArchive **out);

void ofs_archive_free(struct OfsArchive *archive);

/**
 * Offers one objective vector to the archive.
 */
enum OfsStatus ofs_archive_insert(struct OfsArchive *archive,
                                  const double *objectives,
                                  size_t len,
                                  enum OfsInsertOutcome *outcome);

size_t ofs_archive_len(const struct OfsArchive *archive);

/**
 * Members' objective vectors, row-major.
 */
enum OfsStatus ofs_archive_objectives(const struct OfsArchive *archive,
                                      double *buf,
                                      size_t capacity,
                                      size_t *written);

/**
 * Runs the serial engine for `generations` steps from a random population
 * with default operator settings.
 */
enum OfsStatus ofs_run_new(const struct OfsProblem *problem,
                           const struct OfsTopology *topology,
                           uint32_t generations,
                           uint64_t seed,
                           struct OfsRun **out);

void ofs_run_free(struct OfsRun *run);

/**
 * Number of points in the final archived front.
 */
size_t ofs_run_front_len(const struct OfsRun *run);

size_t ofs_run_objective_count(const struct OfsRun *run);

/**
 * Wall time spent inside the engine, in seconds.
 */
double ofs_run_pure_seconds(const struct OfsRun *run);

/**
 * Front objective vectors, row-major.
 */
enum OfsStatus ofs_run_front(const struct OfsRun *run,
                             double *buf,
                             size_t capacity,
                             size_t *written);

/**
 * Runs a full experiment from `key = value` config text, as the `run`
 * command does. A non-NULL `output_dir` overrides the configured one.
 */
enum OfsStatus ofs_experiment_run(const char *config_text, const char *output_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OFFSPRING_H */
