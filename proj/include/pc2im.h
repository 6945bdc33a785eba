/* C interface to the point-cloud accelerator simulator.
 *
 * Every call returns a pc2im_status; on failure pc2im_last_error() holds a
 * human-readable message for the calling thread. Strings returned through
 * char** out parameters are heap-allocated and must be released with
 * pc2im_string_free().
 */
#ifndef PC2IM_H
#define PC2IM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pc2im_status {
  PC2IM_OK = 0,
  PC2IM_ERR_INVALID_ARGUMENT = 1,
  PC2IM_ERR_PARSE = 2,
  PC2IM_ERR_IO = 3,
  PC2IM_ERR_CAPACITY = 4,
  PC2IM_ERR_CONFIG = 5,
  PC2IM_ERR_VERIFY = 6,
  PC2IM_ERR_INTERNAL = 7
} pc2im_status;

/* Library version, "major.minor.patch". Static storage, do not free. */
const char* pc2im_version(void);

/* Message of the last failing call on this thread ("" after a success). */
const char* pc2im_last_error(void);

void pc2im_string_free(char* s);

/* ---- point clouds ----------------------------------------------------- */

typedef struct pc2im_cloud pc2im_cloud;

/* format: "xyz_ascii" ("xyz") or "f32le_binary" ("f32"). */
pc2im_status pc2im_cloud_load(const char* path, const char* format,
                              pc2im_cloud** out);

/* kind: "uniform", "gaussian" or "clustered". */
pc2im_status pc2im_cloud_generate(const char* kind, uint64_t n, uint64_t seed,
                                  pc2im_cloud** out);

pc2im_status pc2im_cloud_save(const pc2im_cloud* cloud, const char* path,
                              const char* format);

size_t pc2im_cloud_size(const pc2im_cloud* cloud);

void pc2im_cloud_free(pc2im_cloud* cloud);

/* ---- simulation (JSON in, JSON out) ----------------------------------- */

/* Median-split partition of the cloud into tiles of at most `capacity`
 * points. *out_json receives the tree and tile table. */
pc2im_status pc2im_partition_json(const pc2im_cloud* cloud, uint32_t capacity,
                                  char** out_json);

/* Sampling and grouping only. options_json keys: capacity,
 * samples_per_tile, radius, scale_factor, max_neighbors, seed_index,
 * compare_exact, energy{...}; all optional except samples_per_tile. */
pc2im_status pc2im_sample_json(const pc2im_cloud* cloud,
                               const char* options_json, char** out_json);

/* Whole-network run. config_json holds {"layers": [...]} plus optional
 * energy{...}, capacity, threads, fps_seed_index, bit_serial_features,
 * collect_features. Passing NULL runs the built-in default network. */
pc2im_status pc2im_simulate_json(const pc2im_cloud* cloud,
                                 const char* config_json, char** out_json);

/* Same config surface as pc2im_simulate_json; reports accelerator traffic,
 * energy and cycle figures against the digital baselines. */
pc2im_status pc2im_compare_json(const pc2im_cloud* cloud,
                                const char* config_json, char** out_json);

/* ---- self checks ------------------------------------------------------ */

/* Exhaustive + randomized MAC datapath check. With inject_fault nonzero one
 * product is corrupted on purpose and the call succeeds only if the checker
 * caught it. Returns PC2IM_ERR_VERIFY when the check fails; *out_json (may
 * be NULL) receives the detailed tally either way. */
pc2im_status pc2im_verify_mac(uint64_t seed, uint32_t random_macs,
                              int inject_fault, char** out_json);

/* ---- reporting --------------------------------------------------------- */

/* Renders a human-readable stage/energy summary from any JSON produced by
 * the calls above (accepts a bare report or a document embedding one). */
pc2im_status pc2im_report_summary(const char* json_text, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* PC2IM_H */
