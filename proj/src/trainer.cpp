#include "litm/trainer.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "litm/checkpoint.hpp"

namespace litm {

void AdamConfig::validate() const {
  if (beta1 <= 0.0 || beta1 >= 1.0) fail(ErrorCode::config, "adam: beta1 must be in (0, 1)");
  if (beta2 <= 0.0 || beta2 >= 1.0) fail(ErrorCode::config, "adam: beta2 must be in (0, 1)");
  if (eps <= 0.0) fail(ErrorCode::config, "adam: eps must be > 0");
}

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorCode::config, "train: epochs must be >= 1");
  if (batches_per_epoch < 0) fail(ErrorCode::config, "train: batches_per_epoch must be >= 0");
  if (base_lr <= 0.0) fail(ErrorCode::config, "train: base_lr must be > 0");
  if (lr_breakpoint < 1) fail(ErrorCode::config, "train: lr_breakpoint must be >= 1");
  adam.validate();
  batch.validate();
  ghis.validate(batch.P);
  if (k_probe < 1) fail(ErrorCode::config, "train: k_probe must be >= 1");
  margins.validate();
  for (double l : lambdas)
    if (l < 0.0) fail(ErrorCode::config, "train: lambdas must be >= 0");
  if (checkpoint_every < 0) fail(ErrorCode::config, "train: checkpoint_every must be >= 0");
}

int TrainConfig::resolved_batches_per_epoch(const Dataset& ds) const {
  if (batches_per_epoch > 0) return batches_per_epoch;
  const long long total = static_cast<long long>(ds.samples.size());
  const long long per_batch = static_cast<long long>(batch.P) * batch.K;
  return static_cast<int>((total + per_batch - 1) / per_batch);
}

std::vector<double> TrainConfig::resolved_lambdas(int stages) const {
  if (lambdas.empty()) return std::vector<double>(stages + 1, 1.0);
  if (static_cast<int>(lambdas.size()) != stages + 1)
    fail(ErrorCode::config, "train: lambdas must have one entry per stage");
  return lambdas;
}

double lr_at(int t, const TrainConfig& cfg) {
  if (t < 1 || t > cfg.epochs)
    fail(ErrorCode::invalid_argument, "lr_at: epoch index out of range");
  if (t <= cfg.lr_breakpoint) return cfg.base_lr;
  const double e = -3.0 * (t - cfg.lr_breakpoint) / cfg.lr_breakpoint;
  return cfg.base_lr * std::pow(10.0, e);
}

void adam_step(Vec& params, const Vec& grads, OptimizerState& state, double lr,
               const AdamConfig& cfg, const std::function<std::string(std::size_t)>& name) {
  cfg.validate();
  if (grads.size() != params.size())
    fail(ErrorCode::dimension_mismatch, "adam: gradient size does not match parameters");
  if (state.t == 0 && state.m.empty() && state.v.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size() || state.v.size() != params.size())
    fail(ErrorCode::dimension_mismatch, "adam: state size does not match parameters");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads[i]))
      fail(ErrorCode::non_finite,
           "adam: non-finite gradient for " +
               (name ? name(i) : "parameter " + std::to_string(i)));

  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

TrainResult train(const Dataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
                  const std::string& checkpoint_path, const std::string& metrics_path) {
  ds.validate();
  mcfg.validate();
  tcfg.validate();
  if (ds.d_in != mcfg.d_in)
    fail(ErrorCode::dimension_mismatch, "train: dataset d_in does not match model");
  if (static_cast<int>(tcfg.margins.deltas.size()) != mcfg.stages)
    fail(ErrorCode::config, "train: margin schedule must provide one delta per shift stage");
  const std::vector<double> lambdas = tcfg.resolved_lambdas(mcfg.stages);
  if (ds.n_ids < tcfg.batch.P)
    fail(ErrorCode::invalid_argument, "train: dataset has fewer identities than P");
  const bool uses_ghis = !tcfg.dry_run && tcfg.epochs >= 3;
  if (uses_ghis && ds.n_ids <= tcfg.ghis.g)
    fail(ErrorCode::invalid_argument, "train: dataset needs more identities than ghis_g");

  RandomSource rng(tcfg.seed);
  ModelParams params = init_params(mcfg, rng);
  Vec flat = flatten_params(params);
  OptimizerState opt;
  const auto namer = [&mcfg](std::size_t i) { return param_name(mcfg, i); };

  std::ofstream metrics;
  if (!metrics_path.empty()) {
    metrics.open(metrics_path, std::ios::trunc);
    if (!metrics) fail(ErrorCode::io, "cannot open metrics log: " + metrics_path);
  }

  TrainResult res;
  if (tcfg.dry_run) {
    res.params = std::move(params);
    if (!checkpoint_path.empty()) save_checkpoint({mcfg, res.params}, checkpoint_path);
    return res;
  }

  std::ofstream dump;
  if (!tcfg.ghis_dump.empty()) {
    dump.open(tcfg.ghis_dump, std::ios::trunc);
    if (!dump) fail(ErrorCode::io, "cannot open ghis dump: " + tcfg.ghis_dump);
  }

  const int batches = tcfg.resolved_batches_per_epoch(ds);
  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    const SamplerMode mode = epoch_sampler_schedule(epoch);
    const double lr = lr_at(epoch + 1, tcfg);

    std::vector<IdentityGroup> groups;
    if (mode == SamplerMode::ghis) {
      const MeanDistanceMatrix mdm =
          mean_distance_matrix(ds, params, mcfg, tcfg.k_probe, rng);
      groups = ghis_groups(mdm, tcfg.ghis, rng);
      if (dump.is_open()) dump << "# epoch " << epoch << '\n' << ghis_table(groups);
    }

    for (int it = 0; it < batches; ++it) {
      const std::vector<int> batch =
          mode == SamplerMode::ghis
              ? ghis_batch(groups, tcfg.batch, tcfg.ghis, ds, rng)
              : random_pk_batch(ds, tcfg.batch, rng);

      std::vector<DescriptorSet> descs;
      std::vector<int> labels;
      std::vector<StageEmbeddings> embs;
      descs.reserve(batch.size());
      labels.reserve(batch.size());
      embs.reserve(batch.size());
      for (int idx : batch) {
        descs.push_back(ds.samples[idx].descriptors);
        labels.push_back(ds.samples[idx].identity);
        embs.push_back(forward(params, mcfg, descs.back()));
      }

      std::vector<Vec> final_embs(embs.size());
      for (std::size_t i = 0; i < embs.size(); ++i) final_embs[i] = embs[i].f.back();
      const std::vector<Triplet> triplets = batch_hard_triplets(final_embs, labels);

      JointLossResult joint = joint_loss(embs, triplets, tcfg.margins, lambdas);
      if (!std::isfinite(joint.report.total))
        fail(ErrorCode::non_finite, "train: loss diverged at epoch " + std::to_string(epoch) +
                                        " iteration " + std::to_string(it));

      const Vec grads = backward(params, mcfg, descs, joint.grads);
      adam_step(flat, grads, opt, lr, tcfg.adam, namer);
      params = unflatten_params(mcfg, flat);

      if (metrics.is_open()) {
        nlohmann::ordered_json row;
        row["epoch"] = epoch;
        row["iter"] = it;
        row["sampler"] = mode == SamplerMode::ghis ? "ghis" : "random";
        row["lr"] = lr;
        row["loss"] = joint.report.stage_loss;
        row["total"] = joint.report.total;
        row["mean_dap"] = joint.report.mean_dap;
        row["mean_dan"] = joint.report.mean_dan;
        row["gap"] = joint.report.gap;
        metrics << row.dump() << '\n';
      }

      if (res.iterations == 0) res.first_total = joint.report.total;
      res.last_total = joint.report.total;
      ++res.iterations;
    }

    if (!checkpoint_path.empty() && tcfg.checkpoint_every > 0 &&
        (epoch + 1) % tcfg.checkpoint_every == 0 && epoch + 1 != tcfg.epochs)
      save_checkpoint({mcfg, params}, checkpoint_path + ".epoch" + std::to_string(epoch + 1));
  }

  res.params = unflatten_params(mcfg, flat);
  if (!checkpoint_path.empty()) save_checkpoint({mcfg, res.params}, checkpoint_path);
  return res;
}

}  // namespace litm
