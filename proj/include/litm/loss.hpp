#pragma once

#include <vector>

#include "litm/common.hpp"
#include "litm/model.hpp"
#include "litm/numeric.hpp"

namespace litm {

struct MarginSchedule {
  double m0 = 4.0;
  std::vector<double> deltas{3.0, 3.0};

  void validate() const;               // m0 > 0 and every delta > 0
  std::vector<double> margins() const; // [m0, m0+d1, m0+d1+d2, ...]
};

struct Triplet {
  int a, p, n;
};

struct TripletLossResult {
  double loss = 0.0;
  std::vector<Vec> grads;  // one per embedding
  double mean_dap = 0.0;   // over the given triplets
  double mean_dan = 0.0;
};

// Sum over triplets of [d2(a,p) - d2(a,n) + m]+ with exact subgradients
// (zero at the hinge kink).
TripletLossResult triplet_loss(const std::vector<Vec>& embs,
                               const std::vector<Triplet>& triplets, double m);

struct LossReport {
  std::vector<double> stage_loss;  // L_0..L_M
  double total = 0.0;              // sum of lambda_j * L_j
  std::vector<double> mean_dap;
  std::vector<double> mean_dan;
  std::vector<double> gap;  // mean_dan - mean_dap per stage
};

struct JointLossResult {
  LossReport report;
  // grads[i][j] is the gradient of the total loss with respect to sample i's
  // stage-j embedding, ready to feed backward().
  std::vector<std::vector<Vec>> grads;
};

JointLossResult joint_loss(const std::vector<StageEmbeddings>& stage_embs,
                           const std::vector<Triplet>& triplets,
                           const MarginSchedule& sched,
                           const std::vector<double>& lambdas);

}  // namespace litm
