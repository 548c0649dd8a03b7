#pragma once

#include <string>
#include <vector>

#include "litm/common.hpp"
#include "litm/dataset.hpp"
#include "litm/loss.hpp"
#include "litm/model.hpp"
#include "litm/random.hpp"

namespace litm {

struct BatchSpec {
  int P = 20;  // identities per batch
  int K = 4;   // samples per identity

  void validate() const;  // P >= 2, K >= 2
};

struct GhisConfig {
  int g = 5;  // candidate pool per identity
  int q = 3;  // hard identities drawn per seed

  // Strict form used by training configs; requires q < g and (q+1) | P.
  void validate(int P) const;
};

struct MeanDistanceMatrix {
  int n = 0;
  int k_probe = 0;
  std::vector<double> d;  // row-major n*n, diagonal +inf

  double at(int u, int v) const { return d[static_cast<std::size_t>(u) * n + v]; }
  double& at(int u, int v) { return d[static_cast<std::size_t>(u) * n + v]; }
};

struct IdentityGroup {
  int seed = 0;
  std::vector<int> candidates;  // g nearest identities, ascending distance
  std::vector<int> hard;        // q-subset of candidates
};

// Mean squared distance between identities over k_probe sampled final-stage
// embeddings each; diagonal masked to +inf.
MeanDistanceMatrix mean_distance_matrix(const Dataset& ds, const ModelParams& params,
                                        const ModelConfig& cfg, int k_probe,
                                        RandomSource& rng);

// Same computation starting from already-embedded probes (one list per
// identity); exposed for direct comparison against reference computations.
MeanDistanceMatrix mean_distance_matrix_from(const std::vector<std::vector<Vec>>& per_id);

std::vector<IdentityGroup> ghis_groups(const MeanDistanceMatrix& mdm, const GhisConfig& cfg,
                                       RandomSource& rng);

// Batch assembly from hard identity groups: P/(q+1) disjoint groups, K
// samples per identity. Returns sample indices into ds.samples.
std::vector<int> ghis_batch(const std::vector<IdentityGroup>& groups, const BatchSpec& spec,
                            const GhisConfig& cfg, const Dataset& ds, RandomSource& rng);

std::vector<int> random_pk_batch(const Dataset& ds, const BatchSpec& spec, RandomSource& rng);

// One triplet per anchor: hardest positive (max d2 same label) and hardest
// negative (min d2 other label), ties to the lowest index.
std::vector<Triplet> batch_hard_triplets(const std::vector<Vec>& embs,
                                         const std::vector<int>& labels);

enum class SamplerMode { random_pk, ghis };

// Two random epochs followed by one hard-identity epoch, repeating.
SamplerMode epoch_sampler_schedule(int epoch);

// Text table "identity: hard ids" for diagnostics.
std::string ghis_table(const std::vector<IdentityGroup>& groups);

}  // namespace litm
