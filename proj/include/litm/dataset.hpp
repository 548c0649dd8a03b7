#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "litm/numeric.hpp"
#include "litm/random.hpp"

namespace litm {

// One "person image" surrogate: an identity label plus a bag of local
// descriptor vectors (the stand-in for spatial positions of a feature map).
struct Sample {
  int identity = 0;
  std::vector<Vec> descriptors;
};

struct Dataset {
  int n_ids = 0;
  int samples_per_id = 0;
  int d_in = 0;
  int descriptors_per_sample = 0;  // R

  std::vector<Sample> samples;

  // Structural consistency: counts, dimensions, label range, finiteness.
  void validate() const;

  // Sample indices grouped by identity, identity-major ascending.
  std::vector<std::vector<int>> indices_by_identity() const;
};

// Synthetic identity generator. Identity centers live in the unit hypercube;
// a hard_pair_fraction of identities is paired off with a "twin" whose center
// sits at twin_distance, giving the dataset controllable hard identity pairs.
struct SynthConfig {
  int n_ids = 50;
  int samples_per_id = 8;
  int d_in = 16;
  int descriptors_per_sample = 4;
  double sigma_within = 0.2;
  double hard_pair_fraction = 0.25;
  double twin_distance = 0.3;
  std::uint64_t seed = 1;

  void validate() const;
};

Dataset generate(const SynthConfig& cfg);

// Binary dataset file: one plain-text header line, then little-endian
// records. save/load round-trips bit-exactly; writes are atomic
// (temp file + rename).
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// CSV import for externally produced vectors: "identity,v1,...,vd" per line,
// one descriptor per sample (R = 1). Labels are remapped to a dense 0-based
// range; every identity must contribute the same number of rows.
Dataset load_dataset_csv(const std::string& path);

}  // namespace litm
