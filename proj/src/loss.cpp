#include "litm/loss.hpp"

namespace litm {

void MarginSchedule::validate() const {
  if (m0 <= 0.0) fail(ErrorCode::config, "margins: m0 must be > 0");
  for (double d : deltas)
    if (d <= 0.0) fail(ErrorCode::config, "margins: every delta must be > 0");
}

std::vector<double> MarginSchedule::margins() const {
  validate();
  std::vector<double> m(deltas.size() + 1);
  m[0] = m0;
  for (std::size_t j = 0; j < deltas.size(); ++j) m[j + 1] = m[j] + deltas[j];
  return m;
}

TripletLossResult triplet_loss(const std::vector<Vec>& embs,
                               const std::vector<Triplet>& triplets, double m) {
  const int n = static_cast<int>(embs.size());
  const std::size_t d = embs.empty() ? 0 : embs[0].size();
  for (const Vec& e : embs)
    if (e.size() != d) fail(ErrorCode::dimension_mismatch, "triplet_loss: ragged embeddings");

  TripletLossResult res;
  res.grads.assign(embs.size(), Vec(d, 0.0));
  double sum_dap = 0.0, sum_dan = 0.0;
  for (const Triplet& t : triplets) {
    if (t.a < 0 || t.a >= n || t.p < 0 || t.p >= n || t.n < 0 || t.n >= n)
      fail(ErrorCode::invalid_argument, "triplet_loss: index out of range");
    if (t.a == t.p) fail(ErrorCode::invalid_argument, "triplet_loss: anchor equals positive");
    const Vec& ea = embs[t.a];
    const Vec& ep = embs[t.p];
    const Vec& en = embs[t.n];
    const double dap = squared_euclidean(ea, ep);
    const double dan = squared_euclidean(ea, en);
    sum_dap += dap;
    sum_dan += dan;
    const double term = dap - dan + m;
    if (term > 0.0) {
      res.loss += term;
      for (std::size_t k = 0; k < d; ++k) {
        res.grads[t.a][k] += 2.0 * (en[k] - ep[k]);
        res.grads[t.p][k] += 2.0 * (ep[k] - ea[k]);
        res.grads[t.n][k] += 2.0 * (ea[k] - en[k]);
      }
    }
  }
  if (!triplets.empty()) {
    res.mean_dap = sum_dap / static_cast<double>(triplets.size());
    res.mean_dan = sum_dan / static_cast<double>(triplets.size());
  }
  return res;
}

JointLossResult joint_loss(const std::vector<StageEmbeddings>& stage_embs,
                           const std::vector<Triplet>& triplets,
                           const MarginSchedule& sched,
                           const std::vector<double>& lambdas) {
  const std::vector<double> m = sched.margins();
  const std::size_t n_stages = m.size();  // M + 1
  if (lambdas.size() != n_stages)
    fail(ErrorCode::config, "joint_loss: lambdas must have one entry per stage");
  if (stage_embs.empty()) fail(ErrorCode::invalid_argument, "joint_loss: empty batch");
  for (const auto& se : stage_embs)
    if (se.f.size() != n_stages)
      fail(ErrorCode::dimension_mismatch, "joint_loss: sample stage count does not match schedule");

  JointLossResult res;
  res.report.stage_loss.resize(n_stages);
  res.report.mean_dap.resize(n_stages);
  res.report.mean_dan.resize(n_stages);
  res.report.gap.resize(n_stages);
  res.grads.assign(stage_embs.size(), std::vector<Vec>(n_stages));

  for (std::size_t j = 0; j < n_stages; ++j) {
    std::vector<Vec> embs_j(stage_embs.size());
    for (std::size_t i = 0; i < stage_embs.size(); ++i) embs_j[i] = stage_embs[i].f[j];
    TripletLossResult stage = triplet_loss(embs_j, triplets, m[j]);
    res.report.stage_loss[j] = stage.loss;
    res.report.mean_dap[j] = stage.mean_dap;
    res.report.mean_dan[j] = stage.mean_dan;
    res.report.gap[j] = stage.mean_dan - stage.mean_dap;
    res.report.total += lambdas[j] * stage.loss;
    for (std::size_t i = 0; i < stage_embs.size(); ++i) {
      Vec& g = stage.grads[i];
      for (double& v : g) v *= lambdas[j];
      res.grads[i][j] = std::move(g);
    }
  }
  return res;
}

}  // namespace litm
