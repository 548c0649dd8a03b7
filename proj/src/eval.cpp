#include "litm/eval.hpp"

#include <algorithm>
#include <cmath>

#include "litm/random.hpp"

namespace litm {

std::vector<int> rank_gallery(const Vec& q, const std::vector<RetrievalItem>& gallery) {
  if (gallery.empty()) fail(ErrorCode::invalid_argument, "rank: empty gallery");
  std::vector<double> dist(gallery.size());
  for (std::size_t i = 0; i < gallery.size(); ++i)
    dist[i] = squared_euclidean(q, gallery[i].emb);
  std::vector<int> order(gallery.size());
  for (std::size_t i = 0; i < gallery.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return dist[a] < dist[b]; });
  return order;
}

EvalReport cmc_map(const RetrievalSplit& split, int k_max) {
  if (split.queries.empty() || split.gallery.empty())
    fail(ErrorCode::invalid_argument, "cmc_map: empty split");
  if (k_max < 1) fail(ErrorCode::invalid_argument, "cmc_map: k_max must be >= 1");

  EvalReport rep;
  rep.cmc.assign(k_max, 0.0);
  double ap_sum = 0.0;
  for (const RetrievalItem& q : split.queries) {
    const std::vector<int> order = rank_gallery(q.emb, split.gallery);
    int first_hit = -1;
    int positives_seen = 0;
    int positives_total = 0;
    double ap = 0.0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      if (split.gallery[order[rank]].identity != q.identity) continue;
      ++positives_total;
      ++positives_seen;
      if (first_hit < 0) first_hit = static_cast<int>(rank);
      ap += static_cast<double>(positives_seen) / static_cast<double>(rank + 1);
    }
    if (positives_total == 0)
      fail(ErrorCode::invalid_argument, "cmc_map: query identity absent from gallery");
    ap_sum += ap / positives_total;
    for (int k = first_hit; k < k_max; ++k) rep.cmc[k] += 1.0;
  }
  for (double& c : rep.cmc) c /= static_cast<double>(split.queries.size());
  rep.map = ap_sum / static_cast<double>(split.queries.size());
  return rep;
}

std::vector<StagePairStats> pair_distance_stats(const std::vector<StageEmbeddings>& embs,
                                                const std::vector<int>& labels) {
  if (embs.size() != labels.size())
    fail(ErrorCode::dimension_mismatch, "pair stats: embeddings and labels differ in length");
  const int n = static_cast<int>(embs.size());
  if (n < 2) fail(ErrorCode::invalid_argument, "pair stats: need at least 2 samples");
  const std::size_t n_stages = embs[0].f.size();
  for (const auto& se : embs)
    if (se.f.size() != n_stages)
      fail(ErrorCode::dimension_mismatch, "pair stats: uneven stage counts");

  std::vector<StagePairStats> out(n_stages);
  std::vector<double> sum_ap(n_stages, 0.0), sum_an(n_stages, 0.0);
  long long n_ap = 0, n_an = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool same = labels[i] == labels[j];
      if (same)
        ++n_ap;
      else
        ++n_an;
      for (std::size_t s = 0; s < n_stages; ++s) {
        const double d = squared_euclidean(embs[i].f[s], embs[j].f[s]);
        if (same)
          sum_ap[s] += d;
        else
          sum_an[s] += d;
      }
    }
  if (n_ap == 0)
    fail(ErrorCode::invalid_argument, "pair stats: every identity needs >= 2 samples");
  if (n_an == 0) fail(ErrorCode::invalid_argument, "pair stats: need >= 2 identities");
  for (std::size_t s = 0; s < n_stages; ++s) {
    out[s].mean_dap = sum_ap[s] / static_cast<double>(n_ap);
    out[s].mean_dan = sum_an[s] / static_cast<double>(n_an);
    out[s].gap = out[s].mean_dan - out[s].mean_dap;
  }
  return out;
}

EvalResult evaluate(const Dataset& ds, const ModelParams& params, const ModelConfig& cfg,
                    const EvalOptions& opts) {
  ds.validate();
  cfg.validate();
  if (ds.d_in != cfg.d_in)
    fail(ErrorCode::dimension_mismatch, "evaluate: dataset d_in does not match model");
  if (opts.query_fraction <= 0.0 || opts.query_fraction >= 1.0)
    fail(ErrorCode::invalid_argument, "evaluate: query fraction must be in (0, 1)");
  if (opts.stage < -1 || opts.stage > cfg.stages)
    fail(ErrorCode::invalid_argument, "evaluate: stage out of range");
  const int stage = opts.stage < 0 ? cfg.stages : opts.stage;

  std::vector<StageEmbeddings> embs(ds.samples.size());
  std::vector<int> labels(ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    embs[i] = forward(params, cfg, ds.samples[i].descriptors);
    labels[i] = ds.samples[i].identity;
  }

  RandomSource rng(opts.seed);
  RetrievalSplit split;
  for (auto& ids : ds.indices_by_identity()) {
    rng.shuffle(ids);
    const int s = static_cast<int>(ids.size());
    int n_q = static_cast<int>(std::llround(opts.query_fraction * s));
    n_q = std::clamp(n_q, 1, s - 1);
    for (int i = 0; i < s; ++i) {
      RetrievalItem item{embs[ids[i]].f[stage], labels[ids[i]]};
      if (i < n_q)
        split.queries.push_back(std::move(item));
      else
        split.gallery.push_back(std::move(item));
    }
  }

  EvalResult res;
  res.stage = stage;
  res.n_queries = static_cast<int>(split.queries.size());
  res.n_gallery = static_cast<int>(split.gallery.size());
  res.report = cmc_map(split, std::min<int>(opts.k_max, static_cast<int>(split.gallery.size())));
  res.pair_stats = pair_distance_stats(embs, labels);
  return res;
}

}  // namespace litm
