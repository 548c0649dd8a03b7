#include "litm/numeric.hpp"

namespace litm {

double squared_euclidean(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    fail(ErrorCode::dimension_mismatch,
         "squared_euclidean: dimensions differ (" + std::to_string(a.size()) +
             " vs " + std::to_string(b.size()) + ")");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

DistanceMatrix pairwise_distances(const std::vector<Vec>& xs) {
  if (xs.empty()) fail(ErrorCode::invalid_argument, "pairwise_distances: empty input");
  const std::size_t dim = xs[0].size();
  for (const auto& x : xs)
    if (x.size() != dim)
      fail(ErrorCode::dimension_mismatch, "pairwise_distances: ragged dimensions");

  const int n = static_cast<int>(xs.size());
  DistanceMatrix m{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = squared_euclidean(xs[i], xs[j]);
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  return m;
}

}  // namespace litm
