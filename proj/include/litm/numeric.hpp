#pragma once

#include <cstddef>
#include <vector>

#include "litm/common.hpp"

namespace litm {

using Vec = std::vector<double>;

// Squared Euclidean distance ||a - b||^2. Throws on dimension mismatch.
double squared_euclidean(const Vec& a, const Vec& b);

// Symmetric matrix of pairwise squared distances; zero diagonal.
struct DistanceMatrix {
  int n = 0;
  std::vector<double> d;  // row-major, n x n

  double at(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
  double& at(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }
};

DistanceMatrix pairwise_distances(const std::vector<Vec>& xs);

}  // namespace litm
