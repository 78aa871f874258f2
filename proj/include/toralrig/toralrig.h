/* SPDX-License-Identifier: Apache-2.0 */
#ifndef TORALRIG_TORALRIG_H
#define TORALRIG_TORALRIG_H

#include <stddef.h>
#include <stdint.h>

#if defined(TORALRIG_BUILDING_LIBRARY)
#define TORALRIG_API __attribute__((visibility("default")))
#else
#define TORALRIG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values above TORALRIG_OK mirror the library's error kinds. */
typedef enum toralrig_status {
  TORALRIG_OK = 0,
  TORALRIG_E_INVALID_INPUT,
  TORALRIG_E_NON_COMMUTING,
  TORALRIG_E_NOT_UNIMODULAR,
  TORALRIG_E_NO_ANOSOV_WITNESS,
  TORALRIG_E_NON_SEMISIMPLE,
  TORALRIG_E_SPECTRUM_AMBIGUOUS,
  TORALRIG_E_BOUND_VIOLATED,
  TORALRIG_E_NOT_INVARIANT,
  TORALRIG_E_REPRESENTATIVE_NOT_FOUND,
  TORALRIG_E_IMPLICATION_VIOLATED,
  TORALRIG_E_INVALID_CIRCLE_MAP,
  TORALRIG_E_COMPATIBILITY_VIOLATED,
  TORALRIG_E_NOT_BUNCHED_WITHIN,
  TORALRIG_E_SAMPLE_FAILED,
  TORALRIG_E_NOT_DOMINATED,
  TORALRIG_E_CONE_ESCAPE,
  TORALRIG_E_NO_CONVERGENCE,
  TORALRIG_E_GROWTH_VIOLATED,
  TORALRIG_E_NOT_ON_UNSTABLE_LEAF,
  TORALRIG_E_PATH_DEPENDENCE,
  TORALRIG_E_DEGENERATE_LATTICE,
  TORALRIG_E_NOT_FIXED_POINT_TRIVIAL,
  TORALRIG_E_OVERFLOW,
  TORALRIG_E_CONFIG,
  TORALRIG_E_IO,
  TORALRIG_E_STAGE_REFUSED,
  TORALRIG_E_NULL_ARGUMENT = 100,
  TORALRIG_E_INTERNAL = 101
} toralrig_status;

typedef enum toralrig_command {
  TORALRIG_ANALYZE = 0,
  TORALRIG_CERTIFY = 1,
  TORALRIG_RIGIDITY = 2
} toralrig_command;

typedef struct toralrig_config toralrig_config;
typedef struct toralrig_report toralrig_report;
typedef struct toralrig_action toralrig_action;

TORALRIG_API const char* toralrig_version(void);
TORALRIG_API const char* toralrig_status_name(toralrig_status status);
/* Message of the most recent failure on the calling thread. */
TORALRIG_API const char* toralrig_last_error(void);
/* Worker threads for parallel kernels; 0 restores the default. */
TORALRIG_API toralrig_status toralrig_set_threads(int threads);

/* Configuration */
TORALRIG_API toralrig_status toralrig_config_load(const char* path, toralrig_config** out);
TORALRIG_API toralrig_status toralrig_config_parse(const char* text, toralrig_config** out);
TORALRIG_API void toralrig_config_free(toralrig_config* config);
TORALRIG_API toralrig_status toralrig_config_set_seed(toralrig_config* config, uint64_t seed);
TORALRIG_API const char* toralrig_config_report_name(const toralrig_config* config);
TORALRIG_API const char* toralrig_config_diagram_name(const toralrig_config* config);

/* Runs a command. A report is produced even when the run fails; its exit code
   says how. out_dir may be NULL. */
TORALRIG_API toralrig_status toralrig_run(const toralrig_config* config, toralrig_command command, int force,
                                          const char* out_dir, toralrig_report** out);
TORALRIG_API const char* toralrig_report_json(const toralrig_report* report);
/* NULL unless the action has rank 2. */
TORALRIG_API const char* toralrig_report_svg(const toralrig_report* report);
TORALRIG_API int toralrig_report_exit_code(const toralrig_report* report);
TORALRIG_API void toralrig_report_free(toralrig_report* report);

/* Actions given as k row-major d x d integer matrices, stacked. */
TORALRIG_API toralrig_status toralrig_action_create(int dimension, int rank, const int64_t* entries,
                                                    toralrig_action** out);
TORALRIG_API void toralrig_action_free(toralrig_action* action);
TORALRIG_API int toralrig_action_functional_count(const toralrig_action* action);
/* Writes rank values. */
TORALRIG_API toralrig_status toralrig_action_functional(const toralrig_action* action, int index, double* values,
                                                        int* dimension);
TORALRIG_API toralrig_status toralrig_action_chambers(const toralrig_action* action, int search_bound,
                                                      size_t* count);
/* Flags in the order maximal, cartan, tns, full, resonance_free. */
TORALRIG_API toralrig_status toralrig_action_predicates(const toralrig_action* action, int search_bound,
                                                        int flags[5]);
/* Index of the sublattice spanned by all A_j - I, as a decimal string into buf. */
TORALRIG_API toralrig_status toralrig_action_cover_index(const toralrig_action* action, char* buf, size_t size);

#ifdef __cplusplus
}
#endif

#endif
