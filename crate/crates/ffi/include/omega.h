#ifndef OMEGA_H
#define OMEGA_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OmegaStatus {
  OMEGA_STATUS_OK = 0,
  OMEGA_STATUS_NULL_POINTER = 1,
  OMEGA_STATUS_INVALID_UTF8 = 2,
  OMEGA_STATUS_CONFIG = 3,
  OMEGA_STATUS_INPUT = 4,
  OMEGA_STATUS_PRECONDITION = 5,
  OMEGA_STATUS_USAGE = 6,
  OMEGA_STATUS_IO = 7,
  OMEGA_STATUS_PANIC = 8,
} OmegaStatus;

typedef enum OmegaBoundaryClass {
  OMEGA_BOUNDARY_CLASS_EMPTY = 0,
  OMEGA_BOUNDARY_CLASS_TWO_POINTS = 1,
  OMEGA_BOUNDARY_CLASS_CANTOR = 2,
  OMEGA_BOUNDARY_CLASS_OMEGA_CANTOR = 3,
} OmegaBoundaryClass;

/**
 * A word-metric ball in a graph of groups.
 */
typedef struct OmegaBall OmegaBall;

/**
 * A RAAG defining graph.
 */
typedef struct OmegaGraph OmegaGraph;

/**
 * A finished run: its bundle directory and manifest.
 */
typedef struct OmegaRun OmegaRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The library version as a static string.
 */
const char *omega_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * nul-terminated) and returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t omega_last_error(char *buf, size_t len);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void omega_string_free(char *s);

/**
 * Runs a JSON config. `output` overrides the config's output directory
 * when non-null. A run whose certificates fail still returns `Ok`; check
 * [`omega_run_passed`].
 *
 * # Safety
 * `config_json` must be a nul-terminated string, `output` null or one, and
 * `out` a valid pointer.
 */
enum OmegaStatus omega_run_json(const char *config_json, const char *output, struct OmegaRun **out);

/**
 * # Safety
 * `run` must be a live handle from [`omega_run_json`].
 */
bool omega_run_passed(const struct OmegaRun *run);

/**
 * The process exit code the command-line tool would return: 0 or 1.
 *
 * # Safety
 * `run` must be a live handle from [`omega_run_json`].
 */
int32_t omega_run_exit_code(const struct OmegaRun *run);

/**
 * The run's manifest as JSON; free with [`omega_string_free`].
 *
 * # Safety
 * `run` must be a live handle from [`omega_run_json`].
 */
char *omega_run_manifest_json(const struct OmegaRun *run);

/**
 * The bundle directory; free with [`omega_string_free`].
 *
 * # Safety
 * `run` must be a live handle from [`omega_run_json`].
 */
char *omega_run_dir(const struct OmegaRun *run);

/**
 * # Safety
 * `run` must be null or a handle from [`omega_run_json`], not yet freed.
 */
void omega_run_free(struct OmegaRun *run);

/**
 * Copies a bundle's artifacts of one format (`svg`, `csv`, `json`, `dot`)
 * into `out_dir` and stores the number of files written in `written`.
 *
 * # Safety
 * The strings must be nul-terminated; `written` must be null or valid.
 */
enum OmegaStatus omega_export(const char *bundle,
                              const char *format,
                              const char *out_dir,
                              size_t *written);

/**
 * A graph on vertices `0..n` with `n_edges` edges given as consecutive
 * vertex pairs in `edges`.
 *
 * # Safety
 * `edges` must point to `2 * n_edges` integers (or be null when
 * `n_edges == 0`) and `out` must be valid.
 */
enum OmegaStatus omega_raag_graph_new(size_t n,
                                      const uint32_t *edges,
                                      size_t n_edges,
                                      struct OmegaGraph **out);

/**
 * # Safety
 * `graph` must be a live handle and `class` valid.
 */
enum OmegaStatus omega_raag_classify(const struct OmegaGraph *graph,
                                     enum OmegaBoundaryClass *class_);

/**
 * # Safety
 * `graph` must be null or a handle from [`omega_raag_graph_new`], not yet
 * freed.
 */
void omega_raag_graph_free(struct OmegaGraph *graph);

/**
 * The separation constant of a Kleinian preset (a shipped name or a JSON
 * path), from every cusp with shadow radius at least `r_min`.
 *
 * # Safety
 * `preset` must be nul-terminated and `lambda` valid.
 */
enum OmegaStatus omega_kleinian_lambda_sep(const char *preset, double r_min, double *lambda);

/**
 * The ball of the given radius about the identity of a graph-of-groups
 * preset (a shipped name or a JSON path).
 *
 * # Safety
 * `preset` must be nul-terminated and `out` valid.
 */
enum OmegaStatus omega_ball_new(const char *preset, size_t radius, struct OmegaBall **out);

/**
 * Number of elements in the ball.
 *
 * # Safety
 * `ball` must be a live handle from [`omega_ball_new`].
 */
size_t omega_ball_len(const struct OmegaBall *ball);

/**
 * Fits the quasi-isometry constant `K` of the tree projection over every
 * geodesic in the ball whose coset intersections have diameter at most
 * `d_bound`.
 *
 * # Safety
 * `ball` must be a live handle and `k` valid.
 */
enum OmegaStatus omega_ball_fit(const struct OmegaBall *ball,
                                size_t d_bound,
                                uint64_t seed,
                                double *k);

/**
 * # Safety
 * `ball` must be null or a handle from [`omega_ball_new`], not yet freed.
 */
void omega_ball_free(struct OmegaBall *ball);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMEGA_H */
