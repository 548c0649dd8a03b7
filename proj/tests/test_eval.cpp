#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "litm/eval.hpp"
#include "oracles.hpp"

using litm::Error;
using litm::ErrorCode;
using litm::RetrievalItem;
using litm::RetrievalSplit;
using litm::Vec;

namespace {

litm::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<litm::ErrorCode>(0);
}

RetrievalSplit random_split(int n_ids, int per_id_q, int per_id_g, int d,
                            litm::RandomSource& rng) {
  RetrievalSplit split;
  for (int u = 0; u < n_ids; ++u) {
    Vec center(d);
    for (double& v : center) v = 3.0 * rng.normal();
    auto item = [&] {
      RetrievalItem it;
      it.identity = u;
      it.emb = center;
      for (double& v : it.emb) v += 0.5 * rng.normal();
      return it;
    };
    for (int i = 0; i < per_id_q; ++i) split.queries.push_back(item());
    for (int i = 0; i < per_id_g; ++i) split.gallery.push_back(item());
  }
  return split;
}

}  // namespace

TEST_CASE("gallery ranking orders by distance with ties by index") {
  std::vector<RetrievalItem> gallery{
      {{5.0}, 0}, {{1.0}, 1}, {{3.0}, 2}, {{-1.0}, 3}, {{1.0}, 4},
  };
  // Query 0: distances 25, 1, 9, 1, 1 -> ties at 1 keep indices 1, 3, 4.
  CHECK(litm::rank_gallery({0.0}, gallery) == std::vector<int>{1, 3, 4, 2, 0});
  CHECK(litm::rank_gallery({5.0}, gallery) == std::vector<int>{0, 2, 1, 4, 3});
  CHECK(code_of([] { litm::rank_gallery({0.0}, {}); }) == ErrorCode::invalid_argument);
}

TEST_CASE("cmc and map on a worked example") {
  // Query identity 7. Ranked gallery: distances 1, 4, 9, 16 with identities
  // 3, 7, 5, 7: hits at ranks 2 and 4.
  RetrievalSplit split;
  split.queries.push_back({{0.0}, 7});
  split.gallery = {{{1.0}, 3}, {{2.0}, 7}, {{3.0}, 5}, {{4.0}, 7}};
  const auto rep = litm::cmc_map(split, 4);
  CHECK(rep.cmc == std::vector<double>{0.0, 1.0, 1.0, 1.0});
  // AP = (1/2 + 2/4) / 2 = 1/2.
  CHECK(rep.map == 0.5);
}

TEST_CASE("perfect and mixed retrieval react as expected") {
  RetrievalSplit split;
  split.queries.push_back({{0.0}, 1});
  split.queries.push_back({{10.0}, 2});
  split.gallery = {{{0.5}, 1}, {{9.5}, 2}, {{20.0}, 1}, {{30.0}, 2}};
  const auto rep = litm::cmc_map(split, 2);
  CHECK(rep.cmc[0] == 1.0);  // both queries hit at rank 1
  CHECK(rep.cmc[1] == 1.0);
  // Query 1 hits at ranks 1 and 3: AP = (1 + 2/3)/2 = 5/6.
  // Query 2 hits at ranks 1 and 4: AP = (1 + 2/4)/2 = 3/4.
  CHECK(rep.map == doctest::Approx((5.0 / 6.0 + 3.0 / 4.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("cmc is monotone and saturates at the gallery size") {
  litm::RandomSource rng(301);
  const auto split = random_split(5, 2, 3, 4, rng);
  const int g = static_cast<int>(split.gallery.size());
  const auto rep = litm::cmc_map(split, g);
  for (int k = 1; k < g; ++k) CHECK(rep.cmc[k] >= rep.cmc[k - 1]);
  CHECK(rep.cmc[g - 1] == 1.0);
  CHECK(rep.map <= 1.0);
  CHECK(rep.map > 0.0);
}

TEST_CASE("cmc and map match the brute-force reference exactly") {
  litm::RandomSource rng(307);
  for (int trial = 0; trial < 40; ++trial) {
    const int n_ids = 2 + static_cast<int>(rng.uniform_int(3));
    const auto split = random_split(n_ids, 2, 3, 3, rng);
    const int k_max = 1 + static_cast<int>(rng.uniform_int(
                              static_cast<std::int64_t>(split.gallery.size())));
    const auto rep = litm::cmc_map(split, k_max);
    const auto ref = oracle::cmc_map(split, k_max);
    CHECK(rep.map == ref.map);
    REQUIRE(rep.cmc.size() == ref.cmc.size());
    for (std::size_t k = 0; k < ref.cmc.size(); ++k) CHECK(rep.cmc[k] == ref.cmc[k]);
  }
}

TEST_CASE("cmc_map input validation") {
  RetrievalSplit split;
  split.queries.push_back({{0.0}, 1});
  split.gallery.push_back({{1.0}, 2});  // identity 1 absent
  CHECK(code_of([&] { litm::cmc_map(split, 1); }) == ErrorCode::invalid_argument);

  split.gallery[0].identity = 1;
  CHECK(code_of([&] { litm::cmc_map(split, 0); }) == ErrorCode::invalid_argument);
  CHECK(code_of([&] { litm::cmc_map({{}, split.gallery}, 1); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { litm::cmc_map({split.queries, {}}, 1); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("pair statistics on a worked example") {
  // Two ids, two samples each, one stage.
  std::vector<litm::StageEmbeddings> embs(4);
  embs[0].f = {{0.0, 0.0}};
  embs[1].f = {{1.0, 1.0}};
  embs[2].f = {{4.0, 0.0}};
  embs[3].f = {{4.0, 1.0}};
  const std::vector<int> labels{0, 0, 1, 1};
  const auto stats = litm::pair_distance_stats(embs, labels);
  REQUIRE(stats.size() == 1);
  // Same-id distances 2 and 1; cross distances 16, 17, 10, 9.
  CHECK(stats[0].mean_dap == 1.5);
  CHECK(stats[0].mean_dan == 13.0);
  CHECK(stats[0].gap == 11.5);
}

TEST_CASE("pair statistics match the brute-force reference") {
  litm::RandomSource rng(311);
  std::vector<litm::StageEmbeddings> embs(10);
  std::vector<int> labels(10);
  for (int i = 0; i < 10; ++i) {
    labels[i] = i / 2;
    embs[i].f.assign(3, Vec(4));
    for (auto& f : embs[i].f)
      for (double& v : f) v = rng.normal();
  }
  const auto stats = litm::pair_distance_stats(embs, labels);
  const auto ref = oracle::pair_stats(embs, labels);
  REQUIRE(stats.size() == 3);
  for (int s = 0; s < 3; ++s) {
    CHECK(stats[s].mean_dap == ref[s].mean_dap);
    CHECK(stats[s].mean_dan == ref[s].mean_dan);
    CHECK(stats[s].gap == ref[s].gap);
  }
}

TEST_CASE("pair statistics ignore sample order and label names") {
  // Integer embeddings keep the mean sums exact under reordering.
  std::vector<litm::StageEmbeddings> embs(6);
  std::vector<int> labels{0, 0, 1, 1, 2, 2};
  litm::RandomSource rng(313);
  for (auto& e : embs) {
    e.f.assign(1, Vec(3));
    for (double& v : e.f[0]) v = static_cast<double>(rng.uniform_int(9));
  }
  const auto base = litm::pair_distance_stats(embs, labels);

  std::vector<int> perm{3, 1, 5, 0, 4, 2};
  std::vector<litm::StageEmbeddings> shuffled(6);
  std::vector<int> shuffled_labels(6);
  for (int i = 0; i < 6; ++i) {
    shuffled[i] = embs[perm[i]];
    shuffled_labels[i] = labels[perm[i]] * 10 + 7;  // relabeled too
  }
  const auto moved = litm::pair_distance_stats(shuffled, shuffled_labels);
  CHECK(moved[0].mean_dap == base[0].mean_dap);
  CHECK(moved[0].mean_dan == base[0].mean_dan);
}

TEST_CASE("pair statistics input validation") {
  std::vector<litm::StageEmbeddings> embs(2);
  embs[0].f = {{0.0}};
  embs[1].f = {{1.0}};
  CHECK(code_of([&] { litm::pair_distance_stats(embs, {0}); }) ==
        ErrorCode::dimension_mismatch);
  CHECK(code_of([&] { litm::pair_distance_stats({embs[0]}, {0}); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { litm::pair_distance_stats(embs, {0, 1}); }) ==
        ErrorCode::invalid_argument);  // no positive pair
  CHECK(code_of([&] { litm::pair_distance_stats(embs, {0, 0}); }) ==
        ErrorCode::invalid_argument);  // no negative pair

  auto ragged = embs;
  ragged[1].f.push_back({2.0});
  CHECK(code_of([&] { litm::pair_distance_stats(ragged, {0, 0}); }) ==
        ErrorCode::dimension_mismatch);
}

TEST_CASE("dataset evaluation splits per identity and reports every stage") {
  litm::SynthConfig scfg;
  scfg.n_ids = 6;
  scfg.samples_per_id = 5;
  scfg.d_in = 6;
  scfg.descriptors_per_sample = 2;
  scfg.sigma_within = 0.05;
  scfg.hard_pair_fraction = 0.0;
  scfg.twin_distance = 0.2;
  scfg.seed = 317;
  const auto ds = litm::generate(scfg);

  litm::ModelConfig mcfg;
  mcfg.d_in = 6;
  mcfg.hidden_dims = {8, 8};
  mcfg.d_emb = 4;
  mcfg.stages = 2;
  litm::RandomSource prng(9);
  const auto params = litm::init_params(mcfg, prng);

  litm::EvalOptions opts;
  opts.query_fraction = 0.4;  // 2 of 5 samples per identity
  opts.k_max = 8;
  opts.seed = 5;
  const auto res = litm::evaluate(ds, params, mcfg, opts);

  CHECK(res.stage == 2);  // -1 resolves to the final stage
  CHECK(res.n_queries == 12);
  CHECK(res.n_gallery == 18);
  CHECK(res.report.cmc.size() == 8);
  CHECK(res.pair_stats.size() == 3);
  for (const auto& st : res.pair_stats) CHECK(std::isfinite(st.gap));

  // Explicit final stage matches the default.
  auto explicit_opts = opts;
  explicit_opts.stage = 2;
  const auto res2 = litm::evaluate(ds, params, mcfg, explicit_opts);
  CHECK(res2.report.map == res.report.map);
  CHECK(res2.report.cmc == res.report.cmc);

  // Same seed, same split; different seed may differ.
  const auto res3 = litm::evaluate(ds, params, mcfg, opts);
  CHECK(res3.report.map == res.report.map);

  // Earlier stages rank on different embeddings.
  auto stage0 = opts;
  stage0.stage = 0;
  const auto res0 = litm::evaluate(ds, params, mcfg, stage0);
  CHECK(res0.stage == 0);
  CHECK(res0.pair_stats.size() == 3);

  // k_max is clamped to the gallery size.
  auto wide = opts;
  wide.k_max = 1000;
  CHECK(litm::evaluate(ds, params, mcfg, wide).report.cmc.size() == 18);

  auto bad = opts;
  bad.query_fraction = 0.0;
  CHECK(code_of([&] { litm::evaluate(ds, params, mcfg, bad); }) ==
        ErrorCode::invalid_argument);
  bad = opts;
  bad.query_fraction = 1.0;
  CHECK(code_of([&] { litm::evaluate(ds, params, mcfg, bad); }) ==
        ErrorCode::invalid_argument);
  bad = opts;
  bad.stage = 3;
  CHECK(code_of([&] { litm::evaluate(ds, params, mcfg, bad); }) ==
        ErrorCode::invalid_argument);
  bad = opts;
  bad.stage = -2;
  CHECK(code_of([&] { litm::evaluate(ds, params, mcfg, bad); }) ==
        ErrorCode::invalid_argument);

  auto wrong_model = mcfg;
  wrong_model.d_in = 7;
  CHECK(code_of([&] { litm::evaluate(ds, params, wrong_model, opts); }) ==
        ErrorCode::dimension_mismatch);
}
