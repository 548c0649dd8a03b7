#pragma once

#include <cstdint>
#include <vector>

#include "litm/common.hpp"
#include "litm/dataset.hpp"
#include "litm/model.hpp"
#include "litm/numeric.hpp"

namespace litm {

struct RetrievalItem {
  Vec emb;
  int identity = 0;
};

struct RetrievalSplit {
  std::vector<RetrievalItem> queries;
  std::vector<RetrievalItem> gallery;
};

// Gallery indices by ascending squared distance to q, ties by lowest index.
std::vector<int> rank_gallery(const Vec& q, const std::vector<RetrievalItem>& gallery);

struct EvalReport {
  std::vector<double> cmc;  // cmc[k-1] = CMC@k for k = 1..k_max
  double map = 0.0;
};

EvalReport cmc_map(const RetrievalSplit& split, int k_max);

struct StagePairStats {
  double mean_dap = 0.0;  // mean squared distance over same-identity pairs
  double mean_dan = 0.0;  // over cross-identity pairs
  double gap = 0.0;       // mean_dan - mean_dap
};

// Per-stage statistics over all unordered pairs of the given samples.
std::vector<StagePairStats> pair_distance_stats(const std::vector<StageEmbeddings>& embs,
                                                const std::vector<int>& labels);

struct EvalOptions {
  double query_fraction = 0.5;
  int stage = -1;  // stage used for ranking; -1 = final
  int k_max = 10;
  std::uint64_t seed = 0;  // drives the query/gallery split
};

struct EvalResult {
  int stage = 0;  // resolved ranking stage
  EvalReport report;
  std::vector<StagePairStats> pair_stats;  // per stage, over the whole dataset
  int n_queries = 0;
  int n_gallery = 0;
};

// Splits each identity's samples into queries and gallery, ranks queries at
// the requested stage, and reports CMC/mAP plus per-stage pair statistics.
EvalResult evaluate(const Dataset& ds, const ModelParams& params, const ModelConfig& cfg,
                    const EvalOptions& opts);

}  // namespace litm
