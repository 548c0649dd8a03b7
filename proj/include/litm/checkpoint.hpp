#pragma once

#include <string>

#include "litm/model.hpp"

namespace litm {

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};

// Versioned file: text header, config as one JSON line, then all parameters
// as little-endian doubles in flat order.
void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace litm
