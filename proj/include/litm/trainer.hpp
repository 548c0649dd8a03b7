#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "litm/common.hpp"
#include "litm/dataset.hpp"
#include "litm/loss.hpp"
#include "litm/mining.hpp"
#include "litm/model.hpp"

namespace litm {

struct AdamConfig {
  double beta1 = 0.99;
  double beta2 = 0.999;
  double eps = 1e-3;

  void validate() const;
};

struct OptimizerState {
  Vec m, v;
  long long t = 0;
};

struct TrainConfig {
  int epochs = 300;
  int batches_per_epoch = 0;  // 0 = ceil(total samples / (P*K))
  double base_lr = 2e-4;
  int lr_breakpoint = 150;
  AdamConfig adam;
  BatchSpec batch;
  GhisConfig ghis;
  int k_probe = 4;  // samples per identity for the mean distance matrix
  MarginSchedule margins;
  std::vector<double> lambdas;  // per-stage loss weights; empty = all ones
  std::uint64_t seed = 1;
  int checkpoint_every = 0;  // extra checkpoint every N epochs; 0 = final only
  bool dry_run = false;
  std::string ghis_dump;  // path for hard-set tables; empty = no dump

  void validate() const;
  int resolved_batches_per_epoch(const Dataset& ds) const;
  std::vector<double> resolved_lambdas(int stages) const;
};

// Constant base_lr through the breakpoint epoch, then exponential decay
// reaching base_lr * 1e-3 at 2x the breakpoint. t is 1-based.
double lr_at(int t, const TrainConfig& cfg);

// Bias-corrected Adam over flat parameter vectors. `name` labels parameters
// in non-finite-gradient errors.
void adam_step(Vec& params, const Vec& grads, OptimizerState& state, double lr,
               const AdamConfig& cfg,
               const std::function<std::string(std::size_t)>& name = nullptr);

struct TrainResult {
  ModelParams params;
  long long iterations = 0;
  double first_total = 0.0;
  double last_total = 0.0;
};

// Full training loop: alternating sampler schedule, batch-hard mining on the
// final-stage embeddings, staged joint loss, Adam updates. Writes a JSONL
// metrics row per iteration and a checkpoint at the end (plus periodic ones
// when configured). Empty paths skip the corresponding output.
TrainResult train(const Dataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
                  const std::string& checkpoint_path, const std::string& metrics_path);

}  // namespace litm
