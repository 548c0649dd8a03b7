#include "litm/mining.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace litm {

void BatchSpec::validate() const {
  if (P < 2) fail(ErrorCode::config, "batch: P must be >= 2");
  if (K < 2) fail(ErrorCode::config, "batch: K must be >= 2");
}

void GhisConfig::validate(int P) const {
  if (q < 1) fail(ErrorCode::config, "ghis: q must be >= 1");
  if (q >= g) fail(ErrorCode::config, "ghis: q must be < g");
  if (P % (q + 1) != 0) fail(ErrorCode::config, "ghis: q+1 must divide P");
}

namespace {

// k draws from pool: without replacement when the pool suffices, uniform
// with replacement otherwise.
std::vector<int> draw_samples(const std::vector<int>& pool, int k, RandomSource& rng) {
  std::vector<int> out;
  out.reserve(k);
  if (static_cast<int>(pool.size()) >= k) {
    std::vector<int> copy(pool);
    for (int i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(
                                    static_cast<std::int64_t>(copy.size()) - i));
      std::swap(copy[i], copy[j]);
      out.push_back(copy[i]);
    }
  } else {
    for (int i = 0; i < k; ++i)
      out.push_back(pool[static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(pool.size())))]);
  }
  return out;
}

}  // namespace

MeanDistanceMatrix mean_distance_matrix_from(const std::vector<std::vector<Vec>>& per_id) {
  const int n = static_cast<int>(per_id.size());
  if (n < 2) fail(ErrorCode::invalid_argument, "mean distances: need at least 2 identities");
  const int k = static_cast<int>(per_id[0].size());
  for (const auto& embs : per_id)
    if (static_cast<int>(embs.size()) != k || embs.empty())
      fail(ErrorCode::invalid_argument, "mean distances: uneven probe counts");

  MeanDistanceMatrix mdm;
  mdm.n = n;
  mdm.k_probe = k;
  mdm.d.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double scale = 1.0 / (static_cast<double>(k) * k);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      double acc = 0.0;
      for (int l = 0; l < k; ++l)
        for (int r = 0; r < k; ++r) acc += squared_euclidean(per_id[u][l], per_id[v][r]);
      const double mean = acc * scale;
      mdm.at(u, v) = mean;
      mdm.at(v, u) = mean;
    }
  for (int u = 0; u < n; ++u) mdm.at(u, u) = std::numeric_limits<double>::infinity();
  return mdm;
}

MeanDistanceMatrix mean_distance_matrix(const Dataset& ds, const ModelParams& params,
                                        const ModelConfig& cfg, int k_probe,
                                        RandomSource& rng) {
  if (k_probe < 1) fail(ErrorCode::invalid_argument, "mean distances: k_probe must be >= 1");
  const auto by_id = ds.indices_by_identity();
  std::vector<std::vector<Vec>> per_id(by_id.size());
  for (std::size_t u = 0; u < by_id.size(); ++u) {
    if (by_id[u].empty())
      fail(ErrorCode::invalid_argument, "mean distances: identity without samples");
    for (int idx : draw_samples(by_id[u], k_probe, rng)) {
      StageEmbeddings se = forward(params, cfg, ds.samples[idx].descriptors);
      per_id[u].push_back(std::move(se.f.back()));
    }
  }
  return mean_distance_matrix_from(per_id);
}

std::vector<IdentityGroup> ghis_groups(const MeanDistanceMatrix& mdm, const GhisConfig& cfg,
                                       RandomSource& rng) {
  const int n = mdm.n;
  if (cfg.g < 1 || cfg.q < 1 || cfg.q > cfg.g)
    fail(ErrorCode::invalid_argument, "ghis: need 1 <= q <= g");
  if (n <= cfg.g) fail(ErrorCode::invalid_argument, "ghis: need more identities than g");

  std::vector<IdentityGroup> groups(n);
  std::vector<int> order(n);
  for (int u = 0; u < n; ++u) {
    IdentityGroup& grp = groups[u];
    grp.seed = u;
    for (int v = 0; v < n; ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return mdm.at(u, a) < mdm.at(u, b); });
    grp.candidates.assign(order.begin(), order.begin() + cfg.g);
    grp.hard = draw_samples(grp.candidates, cfg.q, rng);
  }
  return groups;
}

std::vector<int> ghis_batch(const std::vector<IdentityGroup>& groups, const BatchSpec& spec,
                            const GhisConfig& cfg, const Dataset& ds, RandomSource& rng) {
  spec.validate();
  if (spec.P % (cfg.q + 1) != 0)
    fail(ErrorCode::invalid_argument, "ghis batch: q+1 must divide P");
  if (static_cast<int>(groups.size()) != ds.n_ids)
    fail(ErrorCode::invalid_argument, "ghis batch: groups do not cover the dataset identities");
  const int n_groups = spec.P / (cfg.q + 1);

  // A group whose identities collide with already-placed ones is redrawn; if a
  // slot exhausts its redraws the whole selection restarts, since early
  // placements can strand the remaining slots even when a disjoint selection
  // exists.
  std::vector<char> chosen(ds.n_ids, 0);
  std::vector<int> batch_ids;
  batch_ids.reserve(spec.P);
  bool assembled = false;
  for (int restart = 0; restart < 100 && !assembled; ++restart) {
    std::fill(chosen.begin(), chosen.end(), 0);
    batch_ids.clear();
    assembled = true;
    for (int gi = 0; gi < n_groups && assembled; ++gi) {
      bool placed = false;
      for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
        const int seed = static_cast<int>(rng.uniform_int(ds.n_ids));
        const IdentityGroup& grp = groups[seed];
        bool overlap = chosen[seed] != 0;
        for (int v : grp.hard) overlap = overlap || chosen[v] != 0;
        if (overlap) continue;
        chosen[seed] = 1;
        batch_ids.push_back(seed);
        for (int v : grp.hard) {
          chosen[v] = 1;
          batch_ids.push_back(v);
        }
        placed = true;
      }
      assembled = placed;
    }
  }
  if (!assembled)
    fail(ErrorCode::sampling, "ghis batch: could not assemble disjoint identity groups");

  const auto by_id = ds.indices_by_identity();
  std::vector<int> batch;
  batch.reserve(static_cast<std::size_t>(spec.P) * spec.K);
  for (int u : batch_ids)
    for (int idx : draw_samples(by_id[u], spec.K, rng)) batch.push_back(idx);
  return batch;
}

std::vector<int> random_pk_batch(const Dataset& ds, const BatchSpec& spec, RandomSource& rng) {
  spec.validate();
  if (ds.n_ids < spec.P)
    fail(ErrorCode::invalid_argument, "random batch: dataset has fewer than P identities");
  std::vector<int> ids(ds.n_ids);
  for (int u = 0; u < ds.n_ids; ++u) ids[u] = u;
  const std::vector<int> picked = draw_samples(ids, spec.P, rng);

  const auto by_id = ds.indices_by_identity();
  std::vector<int> batch;
  batch.reserve(static_cast<std::size_t>(spec.P) * spec.K);
  for (int u : picked)
    for (int idx : draw_samples(by_id[u], spec.K, rng)) batch.push_back(idx);
  return batch;
}

std::vector<Triplet> batch_hard_triplets(const std::vector<Vec>& embs,
                                         const std::vector<int>& labels) {
  if (embs.size() != labels.size())
    fail(ErrorCode::dimension_mismatch, "batch_hard: embeddings and labels differ in length");
  const int n = static_cast<int>(embs.size());
  if (n < 2) fail(ErrorCode::invalid_argument, "batch_hard: batch too small");
  const DistanceMatrix dm = pairwise_distances(embs);

  std::vector<Triplet> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    int p = -1, neg = -1;
    double dp = -1.0, dn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = dm.at(i, j);
      if (labels[j] == labels[i]) {
        if (d > dp) {
          dp = d;
          p = j;
        }
      } else if (d < dn) {
        dn = d;
        neg = j;
      }
    }
    if (p < 0)
      fail(ErrorCode::invalid_argument,
           "batch_hard: label " + std::to_string(labels[i]) + " has a single sample");
    if (neg < 0) fail(ErrorCode::invalid_argument, "batch_hard: batch has a single label");
    out.push_back({i, p, neg});
  }
  return out;
}

SamplerMode epoch_sampler_schedule(int epoch) {
  if (epoch < 0) fail(ErrorCode::invalid_argument, "schedule: epoch must be >= 0");
  return epoch % 3 == 2 ? SamplerMode::ghis : SamplerMode::random_pk;
}

std::string ghis_table(const std::vector<IdentityGroup>& groups) {
  std::ostringstream os;
  for (const auto& grp : groups) {
    os << grp.seed << ':';
    for (int v : grp.hard) os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace litm
