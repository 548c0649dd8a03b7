#pragma once

#include <string>

#include <json.hpp>

#include "litm/dataset.hpp"
#include "litm/model.hpp"
#include "litm/trainer.hpp"

namespace litm {

// One JSON document drives every command: optional "synth", "model" and
// "train" sections, defaults filled in, unknown keys rejected.
struct FullConfig {
  SynthConfig synth;
  ModelConfig model;
  TrainConfig train;
};

FullConfig parse_config(const nlohmann::json& j);
FullConfig parse_config_string(const std::string& text);
FullConfig parse_config_file(const std::string& path);

SynthConfig synth_config_from_json(const nlohmann::json& j);
ModelConfig model_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::ordered_json synth_config_to_json(const SynthConfig& cfg);
nlohmann::ordered_json model_config_to_json(const ModelConfig& cfg);
nlohmann::ordered_json train_config_to_json(const TrainConfig& cfg);
nlohmann::ordered_json full_config_to_json(const FullConfig& cfg);

}  // namespace litm
