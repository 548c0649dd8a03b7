#ifndef LITM_H
#define LITM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum litm_status {
  LITM_OK = 0,
  LITM_E_INVALID_ARGUMENT = 1,
  LITM_E_DIMENSION_MISMATCH = 2,
  LITM_E_IO = 3,
  LITM_E_FORMAT_VERSION = 4,
  LITM_E_TRUNCATED = 5,
  LITM_E_INCONSISTENT = 6,
  LITM_E_CONFIG = 7,
  LITM_E_NON_FINITE = 8,
  LITM_E_SAMPLING = 9,
  LITM_E_UNKNOWN = 127
} litm_status;

typedef struct litm_dataset litm_dataset;
typedef struct litm_model litm_model;

const char* litm_status_name(litm_status s);

/* Message for the most recent failure on this thread; empty after success. */
const char* litm_last_error(void);

/* Frees strings returned through char** out-parameters. */
void litm_string_free(char* s);

/* config_json: full config document; the "synth" section drives generation. */
litm_status litm_dataset_generate(const char* config_json, litm_dataset** out);
litm_status litm_dataset_load(const char* path, litm_dataset** out);
litm_status litm_dataset_load_csv(const char* path, litm_dataset** out);
litm_status litm_dataset_save(const litm_dataset* ds, const char* path);
litm_status litm_dataset_info(const litm_dataset* ds, int* n_ids, int* samples_per_id,
                              int* d_in, int* descriptors_per_sample);
void litm_dataset_free(litm_dataset* ds);

/* Trains per the "model" and "train" sections; writes a checkpoint and a
 * JSONL metrics log (either path may be NULL to skip). On success returns the
 * trained model. */
litm_status litm_train(const char* config_json, const litm_dataset* ds,
                       const char* checkpoint_path, const char* metrics_path,
                       litm_model** out_model);

litm_status litm_model_load(const char* path, litm_model** out);
litm_status litm_model_save(const litm_model* m, const char* path);
void litm_model_free(litm_model* m);

/* stage -1 = final stage. Output strings are malloc'd; pass NULL to skip. */
litm_status litm_evaluate(const litm_model* m, const litm_dataset* ds,
                          double query_fraction, int stage, int k_max, uint64_t seed,
                          char** json_out, char** table_out, char** cmc_csv_out);

litm_status litm_metrics_report(const char* metrics_path, char** table_out);
litm_status litm_metrics_curves_csv(const char* metrics_path, char** csv_out);

/* Parses and echoes the fully resolved config (defaults filled in). */
litm_status litm_config_echo(const char* config_json, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* LITM_H */
