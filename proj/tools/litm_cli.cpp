#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "litm/litm.h"

namespace {

int report_error(litm_status st) {
  std::cerr << "error (" << litm_status_name(st) << "): " << litm_last_error() << '\n';
  return static_cast<int>(st);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream is(path);
  if (!is) return false;
  std::ostringstream ss;
  ss << is.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) return false;
  os << text;
  return os.good();
}

// Applies CLI overrides to the config document. Malformed JSON passes through
// untouched so the library reports it with a proper error code.
std::string with_overrides(const std::string& text, const char* section,
                           const std::uint64_t* seed, const bool* dry_run) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return text;
  if (seed) j[section]["seed"] = *seed;
  if (dry_run) j[section]["dry_run"] = *dry_run;
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental-margin metric learning on synthetic identity data"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path, metrics_path, checkpoint_path;
  std::string stage_str = "final", cmc_csv_path, curves_path;
  double split = 0.5;
  int k_max = 10;
  std::uint64_t seed = 0;
  bool dry_run = false;

  CLI::App* gen = app.add_subcommand("gen", "Synthesize an identity dataset");
  gen->add_option("--config", config_path, "Config JSON (synth section)")->required();
  gen->add_option("--out", out_path, "Output dataset file")->required();
  CLI::Option* gen_seed = gen->add_option("--seed", seed, "Override synth seed");

  CLI::App* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", config_path, "Config JSON (model + train sections)")->required();
  train->add_option("--data", data_path, "Training dataset")->required();
  train->add_option("--out", out_path, "Output checkpoint")->required();
  train->add_option("--metrics", metrics_path, "JSONL metrics log");
  CLI::Option* train_seed = train->add_option("--seed", seed, "Override train seed");
  train->add_flag("--dry-run", dry_run, "Echo the resolved config and write the initial checkpoint");

  CLI::App* eval = app.add_subcommand("eval", "Retrieval evaluation on a query/gallery split");
  eval->add_option("--checkpoint", checkpoint_path, "Trained checkpoint")->required();
  eval->add_option("--data", data_path, "Evaluation dataset")->required();
  eval->add_option("--split", split, "Query fraction per identity");
  eval->add_option("--stage", stage_str, "Embedding stage: index or 'final'");
  eval->add_option("--k-max", k_max, "CMC curve length");
  eval->add_option("--seed", seed, "Split seed");
  eval->add_option("--out", out_path, "Write the JSON report here");
  eval->add_option("--cmc-csv", cmc_csv_path, "Write the CMC curve CSV here");

  CLI::App* report = app.add_subcommand("report", "Summarize a metrics log");
  report->add_option("--metrics", metrics_path, "JSONL metrics log")->required();
  report->add_option("--curves", curves_path, "Write per-iteration curves CSV here");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    std::string text;
    if (!read_file(config_path, text)) {
      std::cerr << "error (io): cannot open config: " << config_path << '\n';
      return LITM_E_IO;
    }
    const std::string cfg = with_overrides(
        text, "synth", gen_seed->count() ? &seed : nullptr, nullptr);
    litm_dataset* ds = nullptr;
    litm_status st = litm_dataset_generate(cfg.c_str(), &ds);
    if (st != LITM_OK) return report_error(st);
    st = litm_dataset_save(ds, out_path.c_str());
    if (st != LITM_OK) {
      litm_dataset_free(ds);
      return report_error(st);
    }
    int n_ids = 0, spi = 0, d_in = 0, r = 0;
    litm_dataset_info(ds, &n_ids, &spi, &d_in, &r);
    litm_dataset_free(ds);
    std::cout << "wrote " << out_path << ": " << n_ids << " identities x " << spi
              << " samples, d_in " << d_in << ", " << r << " descriptors/sample\n";
    return 0;
  }

  if (train->parsed()) {
    std::string text;
    if (!read_file(config_path, text)) {
      std::cerr << "error (io): cannot open config: " << config_path << '\n';
      return LITM_E_IO;
    }
    const std::string cfg = with_overrides(
        text, "train", train_seed->count() ? &seed : nullptr, dry_run ? &dry_run : nullptr);
    litm_dataset* ds = nullptr;
    litm_status st = litm_dataset_load(data_path.c_str(), &ds);
    if (st != LITM_OK) return report_error(st);
    if (dry_run) {
      char* echo = nullptr;
      st = litm_config_echo(cfg.c_str(), &echo);
      if (st != LITM_OK) {
        litm_dataset_free(ds);
        return report_error(st);
      }
      std::cout << echo;
      litm_string_free(echo);
    }
    litm_model* model = nullptr;
    st = litm_train(cfg.c_str(), ds, out_path.c_str(),
                    metrics_path.empty() ? nullptr : metrics_path.c_str(), &model);
    litm_dataset_free(ds);
    if (st != LITM_OK) return report_error(st);
    litm_model_free(model);
    std::cout << (dry_run ? "dry run: initial checkpoint " : "checkpoint ") << out_path << '\n';
    if (!metrics_path.empty() && !dry_run) std::cout << "metrics " << metrics_path << '\n';
    return 0;
  }

  if (eval->parsed()) {
    int stage = -1;
    if (stage_str != "final") {
      try {
        std::size_t pos = 0;
        stage = std::stoi(stage_str, &pos);
        if (pos != stage_str.size()) throw std::invalid_argument(stage_str);
      } catch (const std::exception&) {
        std::cerr << "error (invalid_argument): --stage must be a stage index or 'final'\n";
        return LITM_E_INVALID_ARGUMENT;
      }
    }
    litm_model* model = nullptr;
    litm_status st = litm_model_load(checkpoint_path.c_str(), &model);
    if (st != LITM_OK) return report_error(st);
    litm_dataset* ds = nullptr;
    st = litm_dataset_load(data_path.c_str(), &ds);
    if (st != LITM_OK) {
      litm_model_free(model);
      return report_error(st);
    }
    char* json = nullptr;
    char* table = nullptr;
    char* csv = nullptr;
    st = litm_evaluate(model, ds, split, stage, k_max, seed, &json, &table,
                       cmc_csv_path.empty() ? nullptr : &csv);
    litm_dataset_free(ds);
    litm_model_free(model);
    if (st != LITM_OK) return report_error(st);
    std::cout << table;
    litm_string_free(table);
    int rc = 0;
    if (!out_path.empty() && !write_file(out_path, json)) {
      std::cerr << "error (io): cannot write " << out_path << '\n';
      rc = LITM_E_IO;
    }
    if (rc == 0 && !cmc_csv_path.empty() && !write_file(cmc_csv_path, csv)) {
      std::cerr << "error (io): cannot write " << cmc_csv_path << '\n';
      rc = LITM_E_IO;
    }
    litm_string_free(json);
    litm_string_free(csv);
    return rc;
  }

  if (report->parsed()) {
    char* table = nullptr;
    litm_status st = litm_metrics_report(metrics_path.c_str(), &table);
    if (st != LITM_OK) return report_error(st);
    std::cout << table;
    litm_string_free(table);
    if (!curves_path.empty()) {
      char* csv = nullptr;
      st = litm_metrics_curves_csv(metrics_path.c_str(), &csv);
      if (st != LITM_OK) return report_error(st);
      const bool ok = write_file(curves_path, csv);
      litm_string_free(csv);
      if (!ok) {
        std::cerr << "error (io): cannot write " << curves_path << '\n';
        return LITM_E_IO;
      }
    }
    return 0;
  }

  return 0;
}
