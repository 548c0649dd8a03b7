#include "litm/litm.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "litm/checkpoint.hpp"
#include "litm/config.hpp"
#include "litm/dataset.hpp"
#include "litm/eval.hpp"
#include "litm/report.hpp"
#include "litm/trainer.hpp"

struct litm_dataset {
  litm::Dataset ds;
};

struct litm_model {
  litm::Checkpoint ck;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
litm_status wrap(F&& f) {
  try {
    f();
    g_last_error.clear();
    return LITM_OK;
  } catch (const litm::Error& e) {
    g_last_error = e.what();
    return static_cast<litm_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LITM_E_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return LITM_E_UNKNOWN;
  }
}

litm_status arg_error(const char* msg) {
  g_last_error = msg;
  return LITM_E_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* litm_status_name(litm_status s) {
  switch (s) {
    case LITM_OK: return "ok";
    case LITM_E_INVALID_ARGUMENT: return "invalid_argument";
    case LITM_E_DIMENSION_MISMATCH: return "dimension_mismatch";
    case LITM_E_IO: return "io";
    case LITM_E_FORMAT_VERSION: return "format_version";
    case LITM_E_TRUNCATED: return "truncated";
    case LITM_E_INCONSISTENT: return "inconsistent";
    case LITM_E_CONFIG: return "config";
    case LITM_E_NON_FINITE: return "non_finite";
    case LITM_E_SAMPLING: return "sampling";
    case LITM_E_UNKNOWN: return "unknown";
  }
  return "unknown";
}

const char* litm_last_error(void) { return g_last_error.c_str(); }

void litm_string_free(char* s) { std::free(s); }

litm_status litm_dataset_generate(const char* config_json, litm_dataset** out) {
  if (!config_json || !out) return arg_error("litm_dataset_generate: null argument");
  return wrap([&] {
    const litm::FullConfig fc = litm::parse_config_string(config_json);
    *out = new litm_dataset{litm::generate(fc.synth)};
  });
}

litm_status litm_dataset_load(const char* path, litm_dataset** out) {
  if (!path || !out) return arg_error("litm_dataset_load: null argument");
  return wrap([&] { *out = new litm_dataset{litm::load_dataset(path)}; });
}

litm_status litm_dataset_load_csv(const char* path, litm_dataset** out) {
  if (!path || !out) return arg_error("litm_dataset_load_csv: null argument");
  return wrap([&] { *out = new litm_dataset{litm::load_dataset_csv(path)}; });
}

litm_status litm_dataset_save(const litm_dataset* ds, const char* path) {
  if (!ds || !path) return arg_error("litm_dataset_save: null argument");
  return wrap([&] { litm::save_dataset(ds->ds, path); });
}

litm_status litm_dataset_info(const litm_dataset* ds, int* n_ids, int* samples_per_id,
                              int* d_in, int* descriptors_per_sample) {
  if (!ds) return arg_error("litm_dataset_info: null dataset");
  if (n_ids) *n_ids = ds->ds.n_ids;
  if (samples_per_id) *samples_per_id = ds->ds.samples_per_id;
  if (d_in) *d_in = ds->ds.d_in;
  if (descriptors_per_sample) *descriptors_per_sample = ds->ds.descriptors_per_sample;
  g_last_error.clear();
  return LITM_OK;
}

void litm_dataset_free(litm_dataset* ds) { delete ds; }

litm_status litm_train(const char* config_json, const litm_dataset* ds,
                       const char* checkpoint_path, const char* metrics_path,
                       litm_model** out_model) {
  if (!config_json || !ds) return arg_error("litm_train: null argument");
  return wrap([&] {
    const litm::FullConfig fc = litm::parse_config_string(config_json);
    litm::TrainResult res =
        litm::train(ds->ds, fc.model, fc.train, checkpoint_path ? checkpoint_path : "",
                    metrics_path ? metrics_path : "");
    if (out_model) *out_model = new litm_model{{fc.model, std::move(res.params)}};
  });
}

litm_status litm_model_load(const char* path, litm_model** out) {
  if (!path || !out) return arg_error("litm_model_load: null argument");
  return wrap([&] { *out = new litm_model{litm::load_checkpoint(path)}; });
}

litm_status litm_model_save(const litm_model* m, const char* path) {
  if (!m || !path) return arg_error("litm_model_save: null argument");
  return wrap([&] { litm::save_checkpoint(m->ck, path); });
}

void litm_model_free(litm_model* m) { delete m; }

litm_status litm_evaluate(const litm_model* m, const litm_dataset* ds,
                          double query_fraction, int stage, int k_max, uint64_t seed,
                          char** json_out, char** table_out, char** cmc_csv_out) {
  if (!m || !ds) return arg_error("litm_evaluate: null argument");
  return wrap([&] {
    litm::EvalOptions opts;
    opts.query_fraction = query_fraction;
    opts.stage = stage;
    opts.k_max = k_max;
    opts.seed = seed;
    const litm::EvalResult res = litm::evaluate(ds->ds, m->ck.params, m->ck.config, opts);
    if (json_out) *json_out = dup_string(litm::eval_result_json(res));
    if (table_out) *table_out = dup_string(litm::eval_result_table(res));
    if (cmc_csv_out) *cmc_csv_out = dup_string(litm::cmc_csv(res));
  });
}

litm_status litm_metrics_report(const char* metrics_path, char** table_out) {
  if (!metrics_path || !table_out) return arg_error("litm_metrics_report: null argument");
  return wrap([&] {
    *table_out = dup_string(litm::metrics_summary_table(litm::load_metrics(metrics_path)));
  });
}

litm_status litm_metrics_curves_csv(const char* metrics_path, char** csv_out) {
  if (!metrics_path || !csv_out) return arg_error("litm_metrics_curves_csv: null argument");
  return wrap([&] {
    *csv_out = dup_string(litm::metrics_curves_csv(litm::load_metrics(metrics_path)));
  });
}

litm_status litm_config_echo(const char* config_json, char** json_out) {
  if (!config_json || !json_out) return arg_error("litm_config_echo: null argument");
  return wrap([&] {
    const litm::FullConfig fc = litm::parse_config_string(config_json);
    *json_out = dup_string(litm::full_config_to_json(fc).dump(2) + "\n");
  });
}

}  // extern "C"
