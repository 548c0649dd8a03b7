#include "litm/config.hpp"

#include <fstream>
#include <sstream>

#include "jsonutil.hpp"

namespace litm {

using detail::StrictObject;

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig cfg;
  StrictObject o(j, "synth");
  o.get_int("n_ids", cfg.n_ids);
  o.get_int("samples_per_id", cfg.samples_per_id);
  o.get_int("d_in", cfg.d_in);
  o.get_int("descriptors_per_sample", cfg.descriptors_per_sample);
  o.get_double("sigma_within", cfg.sigma_within);
  o.get_double("hard_pair_fraction", cfg.hard_pair_fraction);
  o.get_double("twin_distance", cfg.twin_distance);
  o.get_u64("seed", cfg.seed);
  o.finish();
  cfg.validate();
  return cfg;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  StrictObject o(j, "model");
  o.get_int("d_in", cfg.d_in);
  o.get_int_array("hidden_dims", cfg.hidden_dims);
  o.get_int("d_emb", cfg.d_emb);
  o.get_int("stages", cfg.stages);
  std::string pooling = cfg.pooling == Pooling::gmp ? "gmp" : "gap";
  o.get_string("pooling", pooling);
  if (pooling == "gmp")
    cfg.pooling = Pooling::gmp;
  else if (pooling == "gap")
    cfg.pooling = Pooling::gap;
  else
    fail(ErrorCode::config, "model.pooling must be 'gmp' or 'gap'");
  o.get_int_array("stage_sources", cfg.stage_sources);
  o.get_int("shift_hidden", cfg.shift_hidden);
  o.finish();
  cfg.validate();
  return cfg;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  StrictObject o(j, "train");
  o.get_int("epochs", cfg.epochs);
  o.get_int("batches_per_epoch", cfg.batches_per_epoch);
  o.get_double("base_lr", cfg.base_lr);
  o.get_int("lr_breakpoint", cfg.lr_breakpoint);
  o.get_double("adam_beta1", cfg.adam.beta1);
  o.get_double("adam_beta2", cfg.adam.beta2);
  o.get_double("adam_eps", cfg.adam.eps);
  o.get_int("P", cfg.batch.P);
  o.get_int("K", cfg.batch.K);
  o.get_int("ghis_g", cfg.ghis.g);
  o.get_int("ghis_q", cfg.ghis.q);
  o.get_int("k_probe", cfg.k_probe);
  o.get_double("margin_m0", cfg.margins.m0);
  o.get_double_array("margin_deltas", cfg.margins.deltas);
  o.get_double_array("lambdas", cfg.lambdas);
  o.get_u64("seed", cfg.seed);
  o.get_int("checkpoint_every", cfg.checkpoint_every);
  o.get_bool("dry_run", cfg.dry_run);
  o.get_string("ghis_dump", cfg.ghis_dump);
  o.finish();
  cfg.validate();
  return cfg;
}

FullConfig parse_config(const nlohmann::json& j) {
  FullConfig fc;
  StrictObject top(j, "config");
  if (const auto* synth = top.get_object("synth")) fc.synth = synth_config_from_json(*synth);
  if (const auto* model = top.get_object("model")) fc.model = model_config_from_json(*model);
  if (const auto* train = top.get_object("train")) fc.train = train_config_from_json(*train);
  top.finish();
  return fc;
}

FullConfig parse_config_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::config, std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

FullConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::io, "cannot open config: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_string(buf.str());
}

nlohmann::ordered_json synth_config_to_json(const SynthConfig& cfg) {
  nlohmann::ordered_json j;
  j["n_ids"] = cfg.n_ids;
  j["samples_per_id"] = cfg.samples_per_id;
  j["d_in"] = cfg.d_in;
  j["descriptors_per_sample"] = cfg.descriptors_per_sample;
  j["sigma_within"] = cfg.sigma_within;
  j["hard_pair_fraction"] = cfg.hard_pair_fraction;
  j["twin_distance"] = cfg.twin_distance;
  j["seed"] = cfg.seed;
  return j;
}

nlohmann::ordered_json model_config_to_json(const ModelConfig& cfg) {
  nlohmann::ordered_json j;
  j["d_in"] = cfg.d_in;
  j["hidden_dims"] = cfg.hidden_dims;
  j["d_emb"] = cfg.d_emb;
  j["stages"] = cfg.stages;
  j["pooling"] = cfg.pooling == Pooling::gmp ? "gmp" : "gap";
  j["stage_sources"] = cfg.stage_sources;
  j["shift_hidden"] = cfg.shift_hidden;
  return j;
}

nlohmann::ordered_json train_config_to_json(const TrainConfig& cfg) {
  nlohmann::ordered_json j;
  j["epochs"] = cfg.epochs;
  j["batches_per_epoch"] = cfg.batches_per_epoch;
  j["base_lr"] = cfg.base_lr;
  j["lr_breakpoint"] = cfg.lr_breakpoint;
  j["adam_beta1"] = cfg.adam.beta1;
  j["adam_beta2"] = cfg.adam.beta2;
  j["adam_eps"] = cfg.adam.eps;
  j["P"] = cfg.batch.P;
  j["K"] = cfg.batch.K;
  j["ghis_g"] = cfg.ghis.g;
  j["ghis_q"] = cfg.ghis.q;
  j["k_probe"] = cfg.k_probe;
  j["margin_m0"] = cfg.margins.m0;
  j["margin_deltas"] = cfg.margins.deltas;
  j["lambdas"] = cfg.lambdas;
  j["seed"] = cfg.seed;
  j["checkpoint_every"] = cfg.checkpoint_every;
  j["dry_run"] = cfg.dry_run;
  j["ghis_dump"] = cfg.ghis_dump;
  return j;
}

nlohmann::ordered_json full_config_to_json(const FullConfig& cfg) {
  nlohmann::ordered_json j;
  j["synth"] = synth_config_to_json(cfg.synth);
  j["model"] = model_config_to_json(cfg.model);
  j["train"] = train_config_to_json(cfg.train);
  return j;
}

}  // namespace litm
