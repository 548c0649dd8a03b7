// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any fail. Tolerances are pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "litm/checkpoint.hpp"
#include "litm/config.hpp"
#include "litm/eval.hpp"
#include "litm/trainer.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

namespace {

using litm::Vec;

struct Outcome {
  bool pass = false;
  std::string details;
};

// --- shared experiment setup ------------------------------------------------

litm::SynthConfig bench_synth(std::uint64_t seed) {
  litm::SynthConfig cfg;  // 50 identities, 25% twins
  cfg.sigma_within = 0.25;
  cfg.seed = seed;
  return cfg;
}

litm::ModelConfig bench_model(litm::Pooling pooling, int stages) {
  litm::ModelConfig cfg;  // d_in 16, hidden 64x3, d_emb 32
  cfg.pooling = pooling;
  cfg.stages = stages;
  return cfg;
}

litm::TrainConfig bench_train(std::uint64_t seed, int stages) {
  litm::TrainConfig cfg;
  cfg.epochs = 60;
  cfg.lr_breakpoint = 30;
  cfg.base_lr = 2e-3;
  cfg.seed = seed;
  cfg.margins.m0 = 4.0;
  cfg.margins.deltas.assign(stages, 3.0);
  return cfg;
}

constexpr int kSeeds = 5;
constexpr int kSeedsNeeded = 4;

struct TrainedRuns {
  std::vector<litm::EvalResult> litm_gmp;  // staged model, max pooling
  std::vector<litm::EvalResult> baseline;  // single stage, margin 4
  std::vector<litm::EvalResult> litm_gap;  // staged model, mean pooling
};

const TrainedRuns& trained_runs() {
  static const TrainedRuns runs = [] {
    TrainedRuns r;
    for (int s = 1; s <= kSeeds; ++s) {
      const auto ds = litm::generate(bench_synth(s));
      litm::EvalOptions opts;
      opts.seed = 9;

      const auto run = [&](litm::Pooling pooling, int stages) {
        const auto mcfg = bench_model(pooling, stages);
        const auto res = litm::train(ds, mcfg, bench_train(100 + s, stages), "", "");
        return litm::evaluate(ds, res.params, mcfg, opts);
      };
      r.litm_gmp.push_back(run(litm::Pooling::gmp, 2));
      r.baseline.push_back(run(litm::Pooling::gmp, 0));
      r.litm_gap.push_back(run(litm::Pooling::gap, 2));
    }
    return r;
  }();
  return runs;
}

// --- criterion 1: full-pipeline gradients ------------------------------------

Outcome check_gradients() {
  litm::RandomSource rng(940);
  int checked_params = 0;
  for (int trial = 0; trial < 24; ++trial) {
    litm::ModelConfig cfg;
    cfg.d_in = 2 + static_cast<int>(rng.uniform_int(7));
    cfg.hidden_dims.assign(1 + rng.uniform_int(3), 0);
    for (int& h : cfg.hidden_dims) h = 2 + static_cast<int>(rng.uniform_int(7));
    cfg.d_emb = 2 + static_cast<int>(rng.uniform_int(5));
    cfg.stages = static_cast<int>(rng.uniform_int(3));
    cfg.pooling = rng.uniform() < 0.5 ? litm::Pooling::gmp : litm::Pooling::gap;
    if (rng.uniform() < 0.3) cfg.shift_hidden = 2 + static_cast<int>(rng.uniform_int(5));

    const int R = 1 + static_cast<int>(rng.uniform_int(4));
    std::vector<litm::DescriptorSet> batch(4);
    std::vector<int> labels{0, 0, 1, 1};
    for (auto& sample : batch) {
      sample.assign(R, Vec(cfg.d_in));
      for (auto& d : sample)
        for (double& v : d) v = rng.normal();
    }

    auto params = litm::init_params(cfg, rng);
    Vec flat = litm::flatten_params(params);
    for (double& v : flat) v += 0.3 * rng.normal();
    params = litm::unflatten_params(cfg, flat);

    litm::MarginSchedule sched;
    sched.m0 = 3.0;
    sched.deltas.assign(cfg.stages, 1.5);
    const std::vector<double> lambdas(cfg.stages + 1, 1.0);

    // Triplets mined once and frozen so the loss is smooth in theta.
    std::vector<litm::StageEmbeddings> embs;
    for (const auto& sample : batch) embs.push_back(litm::forward(params, cfg, sample));
    std::vector<Vec> finals;
    for (const auto& e : embs) finals.push_back(e.f.back());
    const auto triplets = litm::batch_hard_triplets(finals, labels);

    const auto loss_at = [&](const Vec& theta) {
      const auto p = litm::unflatten_params(cfg, theta);
      std::vector<litm::StageEmbeddings> es;
      for (const auto& sample : batch) es.push_back(litm::forward(p, cfg, sample));
      return litm::joint_loss(es, triplets, sched, lambdas).report.total;
    };

    const auto joint = litm::joint_loss(embs, triplets, sched, lambdas);
    const Vec analytic = litm::backward(params, cfg, batch, joint.grads);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      const double fd = oracle::central_diff(loss_at, flat, i, 1e-5);
      if (!oracle::grad_close(analytic[i], fd, 1e-4, 1e-8)) {
        std::ostringstream os;
        os << "trial " << trial << " " << litm::param_name(cfg, i) << ": analytic "
           << analytic[i] << " vs fd " << fd;
        return {false, os.str()};
      }
      ++checked_params;
    }
  }
  return {true, "24 configurations, " + std::to_string(checked_params) +
                    " parameter gradients within rel 1e-4 / abs 1e-8"};
}

// --- criterion 2: exact oracle agreement -------------------------------------

Outcome check_oracles() {
  litm::RandomSource rng(941);

  for (int trial = 0; trial < 120; ++trial) {
    const int P = 2 + static_cast<int>(rng.uniform_int(3));
    const int K = 2 + static_cast<int>(rng.uniform_int(3));
    std::vector<Vec> embs;
    std::vector<int> labels;
    for (int u = 0; u < P; ++u)
      for (int k = 0; k < K; ++k) {
        Vec e(3);
        for (double& v : e) v = rng.normal();
        embs.push_back(e);
        labels.push_back(u);
      }
    const auto mined = litm::batch_hard_triplets(embs, labels);
    const auto ref = oracle::batch_hard(embs, labels);
    for (std::size_t i = 0; i < mined.size(); ++i)
      if (mined[i].a != ref[i].a || mined[i].p != ref[i].p || mined[i].n != ref[i].n)
        return {false, "batch-hard mismatch on trial " + std::to_string(trial)};
  }

  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(4));
    const int k = 1 + static_cast<int>(rng.uniform_int(3));
    std::vector<std::vector<Vec>> per_id(n);
    for (auto& probes : per_id) {
      probes.assign(k, Vec(3));
      for (auto& p : probes)
        for (double& v : p) v = rng.normal();
    }
    const auto mdm = litm::mean_distance_matrix_from(per_id);
    const auto ref = oracle::mean_distance(per_id);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v && mdm.at(u, v) != ref[u][v])
          return {false, "mean-distance mismatch on trial " + std::to_string(trial)};
  }

  for (int trial = 0; trial < 120; ++trial) {
    const int n_ids = 2 + static_cast<int>(rng.uniform_int(3));
    litm::RetrievalSplit split;
    for (int u = 0; u < n_ids; ++u) {
      const int nq = 1 + static_cast<int>(rng.uniform_int(2));
      const int ng = 1 + static_cast<int>(rng.uniform_int(3));
      for (int i = 0; i < nq + ng; ++i) {
        litm::RetrievalItem item;
        item.identity = u;
        item.emb.assign(2, 0.0);
        for (double& v : item.emb) v = rng.normal();
        (i < nq ? split.queries : split.gallery).push_back(std::move(item));
      }
    }
    const int k_max =
        1 + static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(split.gallery.size())));
    const auto rep = litm::cmc_map(split, k_max);
    const auto ref = oracle::cmc_map(split, k_max);
    if (rep.map != ref.map) return {false, "map mismatch on trial " + std::to_string(trial)};
    for (int k = 0; k < k_max; ++k)
      if (rep.cmc[k] != ref.cmc[k])
        return {false, "cmc mismatch on trial " + std::to_string(trial)};
  }

  for (int trial = 0; trial < 120; ++trial) {
    const int n_ids = 2 + static_cast<int>(rng.uniform_int(3));
    const int per_id = 2 + static_cast<int>(rng.uniform_int(3));
    const int stages = 1 + static_cast<int>(rng.uniform_int(3));
    std::vector<litm::StageEmbeddings> embs;
    std::vector<int> labels;
    for (int u = 0; u < n_ids; ++u)
      for (int i = 0; i < per_id; ++i) {
        litm::StageEmbeddings se;
        se.f.assign(stages, Vec(3));
        for (auto& f : se.f)
          for (double& v : f) v = rng.normal();
        embs.push_back(std::move(se));
        labels.push_back(u);
      }
    const auto stats = litm::pair_distance_stats(embs, labels);
    const auto ref = oracle::pair_stats(embs, labels);
    for (int s = 0; s < stages; ++s)
      if (stats[s].mean_dap != ref[s].mean_dap || stats[s].mean_dan != ref[s].mean_dan ||
          stats[s].gap != ref[s].gap)
        return {false, "pair-stats mismatch on trial " + std::to_string(trial)};
  }

  return {true, "batch-hard, mean-distance, cmc/map, pair-stats exact on 120 instances each"};
}

// --- criterion 3: per-stage separation ordering -------------------------------

Outcome check_gap_ordering() {
  const auto& runs = trained_runs();
  int ok = 0;
  std::ostringstream os;
  for (int s = 0; s < kSeeds; ++s) {
    const auto& st = runs.litm_gmp[s].pair_stats;
    const bool ordered = st[2].gap > st[1].gap && st[1].gap > st[0].gap;
    ok += ordered ? 1 : 0;
    os << (s ? "  " : "") << "seed" << (s + 1) << " gaps " << st[0].gap << "/" << st[1].gap
       << "/" << st[2].gap << (ordered ? "" : " (unordered)");
  }
  return {ok >= kSeedsNeeded,
          std::to_string(ok) + "/" + std::to_string(kSeeds) + " seeds ordered: " + os.str()};
}

// --- criterion 4: staged training beats the single-margin baseline ------------

Outcome check_beats_baseline() {
  const auto& runs = trained_runs();
  int ok = 0;
  std::ostringstream os;
  for (int s = 0; s < kSeeds; ++s) {
    const double staged = runs.litm_gmp[s].report.map;
    const double base = runs.baseline[s].report.map;
    ok += staged > base ? 1 : 0;
    os << (s ? "  " : "") << "seed" << (s + 1) << " map " << staged << " vs " << base;
  }
  return {ok >= kSeedsNeeded,
          std::to_string(ok) + "/" + std::to_string(kSeeds) + " seeds improved: " + os.str()};
}

// --- criterion 5: max pooling vs mean pooling ---------------------------------

Outcome check_gmp_vs_gap() {
  litm::RandomSource rng(942);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Vec> rows(1 + rng.uniform_int(5), Vec(4));
    for (auto& r : rows)
      for (double& v : r) v = std::abs(rng.normal());
    const auto mx = litm::pool_descriptors(rows, litm::Pooling::gmp);
    const auto mn = litm::pool_descriptors(rows, litm::Pooling::gap);
    for (std::size_t k = 0; k < mx.size(); ++k)
      if (mx[k] < mn[k]) return {false, "pooling dominance violated"};
  }

  const auto& runs = trained_runs();
  int ok = 0;
  std::ostringstream os;
  for (int s = 0; s < kSeeds; ++s) {
    const auto& a = runs.litm_gmp[s].pair_stats.back();
    const auto& b = runs.litm_gap[s].pair_stats.back();
    const bool larger = a.mean_dap > b.mean_dap && a.mean_dan > b.mean_dan && a.gap > b.gap;
    ok += larger ? 1 : 0;
    os << (s ? "  " : "") << "seed" << (s + 1) << " gap " << a.gap << " vs " << b.gap
       << (larger ? "" : " (not dominant)");
  }
  return {ok >= kSeedsNeeded, "max>=mean pooling invariant on 2000 draws; " +
                                  std::to_string(ok) + "/" + std::to_string(kSeeds) +
                                  " seeds dominant: " + os.str()};
}

// --- criterion 6: hard-identity batches mine closer negatives -----------------

Outcome check_ghis_hardness() {
  for (int e = 0; e < 6; ++e) {
    const auto expect = (e % 3 == 2) ? litm::SamplerMode::ghis : litm::SamplerMode::random_pk;
    if (litm::epoch_sampler_schedule(e) != expect)
      return {false, "sampler schedule broke at epoch " + std::to_string(e)};
  }

  litm::SynthConfig scfg;
  scfg.n_ids = 30;
  scfg.samples_per_id = 6;
  scfg.hard_pair_fraction = 0.5;
  scfg.sigma_within = 0.15;
  scfg.twin_distance = 0.25;
  scfg.seed = 77;
  const auto ds = litm::generate(scfg);

  const auto mcfg = bench_model(litm::Pooling::gmp, 2);
  auto tcfg = bench_train(700, 2);
  tcfg.epochs = 15;
  tcfg.lr_breakpoint = 15;
  const auto frozen = litm::train(ds, mcfg, tcfg, "", "").params;

  litm::RandomSource rng(943);
  const auto mdm = litm::mean_distance_matrix(ds, frozen, mcfg, tcfg.k_probe, rng);
  const auto groups = litm::ghis_groups(mdm, tcfg.ghis, rng);

  const auto mean_mined_dan = [&](bool hard) {
    double sum = 0.0;
    long long count = 0;
    for (int b = 0; b < 60; ++b) {
      const auto batch = hard ? litm::ghis_batch(groups, tcfg.batch, tcfg.ghis, ds, rng)
                              : litm::random_pk_batch(ds, tcfg.batch, rng);
      std::vector<Vec> embs;
      std::vector<int> labels;
      for (int idx : batch) {
        embs.push_back(litm::forward(frozen, mcfg, ds.samples[idx].descriptors).f.back());
        labels.push_back(ds.samples[idx].identity);
      }
      for (const auto& t : litm::batch_hard_triplets(embs, labels)) {
        sum += oracle::d2(embs[t.a], embs[t.n]);
        ++count;
      }
    }
    return sum / static_cast<double>(count);
  };

  const double hard_dan = mean_mined_dan(true);
  const double random_dan = mean_mined_dan(false);
  std::ostringstream os;
  os << "mean mined d_an " << hard_dan << " (hard) vs " << random_dan
     << " (random) over 60 batches each; schedule R,R,G";
  return {hard_dan < random_dan, os.str()};
}

// --- criterion 7: schedule and optimizer exactness -----------------------------

Outcome check_schedule_optimizer() {
  litm::TrainConfig cfg;  // epochs 300, breakpoint 150, base 2e-4
  if (litm::lr_at(150, cfg) != 2e-4) return {false, "lr at the breakpoint is not exactly 2e-4"};
  const double end = litm::lr_at(300, cfg);
  if (std::abs(end - 2e-7) > 1e-12 * 2e-7) {
    std::ostringstream os;
    os << "lr at 300 is " << end << ", expected 2e-7";
    return {false, os.str()};
  }

  const litm::AdamConfig acfg{0.99, 0.999, 1e-3};
  Vec param{0.7};
  litm::OptimizerState state;
  oracle::ScalarAdam ref(acfg.beta1, acfg.beta2, acfg.eps);
  double ref_param = 0.7;
  double worst = 0.0;
  for (int t = 1; t <= 100; ++t) {
    const double g = std::sin(0.37 * t) + 0.25;
    const double lr = 0.01 / (1.0 + 0.02 * t);
    litm::adam_step(param, {g}, state, lr, acfg);
    ref_param = ref.step(ref_param, g, lr);
    worst = std::max(worst, std::abs(param[0] - ref_param));
  }
  if (worst > 1e-12) {
    std::ostringstream os;
    os << "optimizer drift " << worst << " exceeds 1e-12";
    return {false, os.str()};
  }
  std::ostringstream os;
  os << "lr endpoints exact; optimizer drift " << worst << " over 100 steps";
  return {true, os.str()};
}

// --- criterion 8: determinism and persistence ----------------------------------

Outcome check_determinism() {
  testutil::TempDir tmp;
  litm::SynthConfig scfg;
  scfg.n_ids = 10;
  scfg.samples_per_id = 4;
  scfg.d_in = 8;
  scfg.descriptors_per_sample = 2;
  scfg.sigma_within = 0.1;
  scfg.twin_distance = 0.25;
  scfg.seed = 13;
  const auto ds = litm::generate(scfg);

  litm::ModelConfig mcfg;
  mcfg.d_in = 8;
  mcfg.hidden_dims = {12, 12};
  mcfg.d_emb = 6;
  mcfg.stages = 2;

  litm::TrainConfig tcfg;
  tcfg.epochs = 9;
  tcfg.lr_breakpoint = 5;
  tcfg.base_lr = 1e-3;
  tcfg.batch = {4, 2};
  tcfg.ghis = {3, 1};
  tcfg.k_probe = 2;
  tcfg.margins.m0 = 2.0;
  tcfg.margins.deltas = {1.0, 1.0};
  tcfg.seed = 21;

  const auto r1 = litm::train(ds, mcfg, tcfg, tmp.file("a.ckpt"), tmp.file("a.jsonl"));
  const auto r2 = litm::train(ds, mcfg, tcfg, tmp.file("b.ckpt"), tmp.file("b.jsonl"));

  if (testutil::read_bytes(tmp.file("a.ckpt")) != testutil::read_bytes(tmp.file("b.ckpt")))
    return {false, "checkpoints differ between identical runs"};
  if (testutil::read_bytes(tmp.file("a.jsonl")) != testutil::read_bytes(tmp.file("b.jsonl")))
    return {false, "metrics logs differ between identical runs"};
  if (litm::flatten_params(r1.params) != litm::flatten_params(r2.params))
    return {false, "in-memory parameters differ between identical runs"};

  const auto loaded = litm::load_checkpoint(tmp.file("a.ckpt"));
  for (int i = 0; i < 5; ++i) {
    const auto a = litm::forward(r1.params, mcfg, ds.samples[i].descriptors);
    const auto b = litm::forward(loaded.params, loaded.config, ds.samples[i].descriptors);
    if (a.f != b.f) return {false, "reloaded checkpoint changes forward outputs"};
  }
  return {true, "runs byte-identical; reloaded checkpoint reproduces forward outputs"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria{
      {"joint-loss gradients match finite differences", check_gradients},
      {"mining and evaluation match brute-force oracles", check_oracles},
      {"per-stage separation gaps increase with stage", check_gap_ordering},
      {"staged margins beat the single-margin baseline", check_beats_baseline},
      {"max pooling dominates mean pooling", check_gmp_vs_gap},
      {"hard-identity batches mine closer negatives", check_ghis_hardness},
      {"lr schedule and optimizer are exact", check_schedule_optimizer},
      {"training is deterministic and persistent", check_determinism},
  };

  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const auto secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("ACCEPTANCE %zu (%s): %s (%s) [%.1fs]\n", i + 1, criteria[i].label,
                out.pass ? "PASS" : "FAIL", out.details.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
