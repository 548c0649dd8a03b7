#include "litm/model.hpp"

#include <algorithm>
#include <cmath>

namespace litm {

void ModelConfig::validate() const {
  if (d_in < 1) fail(ErrorCode::config, "model: d_in must be >= 1");
  if (d_emb < 1) fail(ErrorCode::config, "model: d_emb must be >= 1");
  if (stages < 0) fail(ErrorCode::config, "model: stages must be >= 0");
  if (hidden_dims.empty()) fail(ErrorCode::config, "model: need at least one hidden layer");
  for (int h : hidden_dims)
    if (h < 1) fail(ErrorCode::config, "model: hidden layer width must be >= 1");
  if (shift_hidden < 0) fail(ErrorCode::config, "model: shift_hidden must be >= 0");
  if (!stage_sources.empty()) {
    if (static_cast<int>(stage_sources.size()) != stages)
      fail(ErrorCode::config, "model: stage_sources needs one entry per shift stage");
    for (int s : stage_sources)
      if (s < 0 || s >= static_cast<int>(hidden_dims.size()))
        fail(ErrorCode::config, "model: stage source layer out of range");
  }
}

std::vector<int> ModelConfig::shift_sources() const {
  if (!stage_sources.empty()) return stage_sources;
  const int L = static_cast<int>(hidden_dims.size());
  std::vector<int> s(stages);
  for (int j = 1; j <= stages; ++j) s[j - 1] = std::max(0, L - 1 - j);
  return s;
}

namespace {

Vec affine(const AffineLayer& layer, const Vec& x) {
  const std::size_t out = layer.b.size();
  Vec y(layer.b);
  for (std::size_t o = 0; o < out; ++o) {
    const Vec& row = layer.w[o];
    double acc = y[o];
    for (std::size_t i = 0; i < x.size(); ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
  return y;
}

Vec relu(const Vec& x) {
  Vec y(x);
  for (double& v : y)
    if (v < 0.0) v = 0.0;
  return y;
}

// Affine shapes in flat parameter order: backbone shallow to deep, base head,
// then shift heads in stage order (inner, out). Each affine contributes its
// weight rows then its bias.
struct AffineShape {
  std::string name;
  int out, in;
};

std::vector<AffineShape> affine_shapes(const ModelConfig& cfg) {
  const auto src = cfg.shift_sources();
  const int L = static_cast<int>(cfg.hidden_dims.size());
  std::vector<AffineShape> shapes;
  for (int l = 0; l < L; ++l)
    shapes.push_back({"backbone" + std::to_string(l), cfg.hidden_dims[l],
                      l == 0 ? cfg.d_in : cfg.hidden_dims[l - 1]});
  shapes.push_back({"base", cfg.d_emb, cfg.hidden_dims[L - 1]});
  for (int j = 1; j <= cfg.stages; ++j) {
    const int w = cfg.hidden_dims[src[j - 1]];
    const int inner = cfg.shift_hidden > 0 ? cfg.shift_hidden : w;
    shapes.push_back({"shift" + std::to_string(j) + ".inner", inner, w});
    shapes.push_back({"shift" + std::to_string(j) + ".out", cfg.d_emb, inner});
  }
  return shapes;
}

AffineLayer zero_affine(int out, int in) {
  AffineLayer l;
  l.w.assign(out, Vec(in, 0.0));
  l.b.assign(out, 0.0);
  return l;
}

ModelParams shaped_params(const ModelConfig& cfg) {
  const auto src = cfg.shift_sources();
  ModelParams p;
  const int L = static_cast<int>(cfg.hidden_dims.size());
  for (int l = 0; l < L; ++l)
    p.backbone.push_back(
        zero_affine(cfg.hidden_dims[l], l == 0 ? cfg.d_in : cfg.hidden_dims[l - 1]));
  p.base = zero_affine(cfg.d_emb, cfg.hidden_dims[L - 1]);
  for (int j = 1; j <= cfg.stages; ++j) {
    const int w = cfg.hidden_dims[src[j - 1]];
    const int inner = cfg.shift_hidden > 0 ? cfg.shift_hidden : w;
    ShiftHead h;
    h.inner = zero_affine(inner, w);
    h.out = zero_affine(cfg.d_emb, inner);
    p.shifts.push_back(std::move(h));
  }
  return p;
}

struct Trace {
  std::vector<std::vector<Vec>> pre;  // [layer][descriptor]
  std::vector<std::vector<Vec>> act;
  std::vector<Vec> pooled;            // [layer]
  std::vector<std::vector<int>> arg;  // gmp: descriptor index winning each dim
  std::vector<Vec> shift_pre;         // [shift]
  std::vector<Vec> shift_act;
  StageEmbeddings out;
};

Trace run_forward(const ModelParams& p, const ModelConfig& cfg,
                  const DescriptorSet& x) {
  if (x.empty()) fail(ErrorCode::invalid_argument, "forward: sample has no descriptors");
  for (const Vec& d : x)
    if (static_cast<int>(d.size()) != cfg.d_in)
      fail(ErrorCode::dimension_mismatch, "forward: descriptor size does not match d_in");

  const int L = static_cast<int>(cfg.hidden_dims.size());
  const int R = static_cast<int>(x.size());
  Trace t;
  t.pre.resize(L);
  t.act.resize(L);
  t.pooled.resize(L);
  if (cfg.pooling == Pooling::gmp) t.arg.resize(L);

  const std::vector<Vec>* prev = &x;
  for (int l = 0; l < L; ++l) {
    t.pre[l].resize(R);
    t.act[l].resize(R);
    for (int r = 0; r < R; ++r) {
      t.pre[l][r] = affine(p.backbone[l], (*prev)[r]);
      t.act[l][r] = relu(t.pre[l][r]);
    }
    prev = &t.act[l];
    const int w = cfg.hidden_dims[l];
    if (cfg.pooling == Pooling::gmp) {
      t.pooled[l] = t.act[l][0];
      t.arg[l].assign(w, 0);
      for (int r = 1; r < R; ++r)
        for (int k = 0; k < w; ++k)
          if (t.act[l][r][k] > t.pooled[l][k]) {
            t.pooled[l][k] = t.act[l][r][k];
            t.arg[l][k] = r;
          }
    } else {
      t.pooled[l].assign(w, 0.0);
      for (int r = 0; r < R; ++r)
        for (int k = 0; k < w; ++k) t.pooled[l][k] += t.act[l][r][k];
      for (int k = 0; k < w; ++k) t.pooled[l][k] /= R;
    }
  }

  const auto src = cfg.shift_sources();
  t.out.f.resize(cfg.stages + 1);
  t.out.f[0] = affine(p.base, t.pooled[L - 1]);
  t.out.shifts.resize(cfg.stages);
  t.shift_pre.resize(cfg.stages);
  t.shift_act.resize(cfg.stages);
  for (int j = 1; j <= cfg.stages; ++j) {
    const ShiftHead& h = p.shifts[j - 1];
    t.shift_pre[j - 1] = affine(h.inner, t.pooled[src[j - 1]]);
    t.shift_act[j - 1] = relu(t.shift_pre[j - 1]);
    t.out.shifts[j - 1] = affine(h.out, t.shift_act[j - 1]);
    t.out.f[j] = t.out.f[j - 1];
    for (int k = 0; k < cfg.d_emb; ++k) t.out.f[j][k] += t.out.shifts[j - 1][k];
  }
  return t;
}

}  // namespace

Vec pool_descriptors(const std::vector<Vec>& rows, Pooling mode) {
  if (rows.empty()) fail(ErrorCode::invalid_argument, "pool: no descriptors");
  const std::size_t w = rows[0].size();
  for (const Vec& r : rows)
    if (r.size() != w) fail(ErrorCode::dimension_mismatch, "pool: ragged descriptors");
  Vec out(rows[0]);
  if (mode == Pooling::gmp) {
    for (std::size_t r = 1; r < rows.size(); ++r)
      for (std::size_t k = 0; k < w; ++k)
        if (rows[r][k] > out[k]) out[k] = rows[r][k];
  } else {
    for (std::size_t r = 1; r < rows.size(); ++r)
      for (std::size_t k = 0; k < w; ++k) out[k] += rows[r][k];
    for (std::size_t k = 0; k < w; ++k) out[k] /= static_cast<double>(rows.size());
  }
  return out;
}

ModelParams init_params(const ModelConfig& cfg, RandomSource& rng) {
  cfg.validate();
  ModelParams p = shaped_params(cfg);
  auto fill = [&](AffineLayer& l) {
    const double stddev =
        1.0 / std::sqrt(static_cast<double>(l.w.empty() ? 1 : l.w[0].size()));
    for (auto& row : l.w)
      for (double& v : row) v = rng.normal(0.0, stddev);
  };
  for (auto& l : p.backbone) fill(l);
  fill(p.base);
  for (auto& h : p.shifts) {
    fill(h.inner);
    fill(h.out);
  }
  return p;
}

StageEmbeddings forward(const ModelParams& params, const ModelConfig& cfg,
                        const DescriptorSet& descriptors) {
  Trace t = run_forward(params, cfg, descriptors);
  return std::move(t.out);
}

Vec backward(const ModelParams& params, const ModelConfig& cfg,
             const std::vector<DescriptorSet>& batch,
             const std::vector<std::vector<Vec>>& upstream) {
  if (batch.size() != upstream.size())
    fail(ErrorCode::dimension_mismatch, "backward: batch and upstream sizes differ");
  const int L = static_cast<int>(cfg.hidden_dims.size());
  const int M = cfg.stages;
  const auto src = cfg.shift_sources();
  ModelParams g = shaped_params(cfg);

  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto& up = upstream[s];
    if (static_cast<int>(up.size()) != M + 1)
      fail(ErrorCode::dimension_mismatch, "backward: upstream must cover every stage");
    for (const Vec& gj : up)
      if (static_cast<int>(gj.size()) != cfg.d_emb)
        fail(ErrorCode::dimension_mismatch, "backward: upstream gradient size mismatch");

    const Trace t = run_forward(params, cfg, batch[s]);
    const int R = static_cast<int>(batch[s].size());

    // Stage j's embedding feeds every later stage, so head j sees the suffix
    // sum of the upstream gradients.
    std::vector<Vec> c(M + 1);
    c[M] = up[M];
    for (int j = M - 1; j >= 0; --j) {
      c[j] = c[j + 1];
      for (int k = 0; k < cfg.d_emb; ++k) c[j][k] += up[j][k];
    }

    std::vector<Vec> gp(L);  // gradient wrt pooled level vectors
    for (int l = 0; l < L; ++l) gp[l].assign(cfg.hidden_dims[l], 0.0);

    const Vec& x0 = t.pooled[L - 1];
    for (int o = 0; o < cfg.d_emb; ++o) {
      const double go = c[0][o];
      g.base.b[o] += go;
      for (std::size_t i = 0; i < x0.size(); ++i) {
        g.base.w[o][i] += go * x0[i];
        gp[L - 1][i] += params.base.w[o][i] * go;
      }
    }

    for (int j = 1; j <= M; ++j) {
      const ShiftHead& h = params.shifts[j - 1];
      ShiftHead& gh = g.shifts[j - 1];
      const Vec& xj = t.pooled[src[j - 1]];
      const Vec& hidden = t.shift_act[j - 1];
      const Vec& hpre = t.shift_pre[j - 1];
      const int w = static_cast<int>(hidden.size());

      Vec ghidden(w, 0.0);
      for (int o = 0; o < cfg.d_emb; ++o) {
        const double go = c[j][o];
        gh.out.b[o] += go;
        for (int k = 0; k < w; ++k) {
          gh.out.w[o][k] += go * hidden[k];
          ghidden[k] += h.out.w[o][k] * go;
        }
      }
      for (int k = 0; k < w; ++k) {
        const double gpre = hpre[k] > 0.0 ? ghidden[k] : 0.0;
        if (gpre == 0.0) continue;
        gh.inner.b[k] += gpre;
        for (std::size_t i = 0; i < xj.size(); ++i) {
          gh.inner.w[k][i] += gpre * xj[i];
          gp[src[j - 1]][i] += h.inner.w[k][i] * gpre;
        }
      }
    }

    std::vector<std::vector<Vec>> ga(L);  // gradient wrt post-relu activations
    for (int l = 0; l < L; ++l) ga[l].assign(R, Vec(cfg.hidden_dims[l], 0.0));
    for (int l = 0; l < L; ++l) {
      const int w = cfg.hidden_dims[l];
      if (cfg.pooling == Pooling::gmp) {
        for (int k = 0; k < w; ++k) ga[l][t.arg[l][k]][k] += gp[l][k];
      } else {
        for (int r = 0; r < R; ++r)
          for (int k = 0; k < w; ++k) ga[l][r][k] += gp[l][k] / R;
      }
    }

    for (int l = L - 1; l >= 0; --l) {
      const std::vector<Vec>& input = l == 0 ? batch[s] : t.act[l - 1];
      for (int r = 0; r < R; ++r) {
        for (int o = 0; o < cfg.hidden_dims[l]; ++o) {
          const double gpre = t.pre[l][r][o] > 0.0 ? ga[l][r][o] : 0.0;
          if (gpre == 0.0) continue;
          g.backbone[l].b[o] += gpre;
          const Vec& in_row = input[r];
          for (std::size_t i = 0; i < in_row.size(); ++i)
            g.backbone[l].w[o][i] += gpre * in_row[i];
          if (l > 0)
            for (std::size_t i = 0; i < in_row.size(); ++i)
              ga[l - 1][r][i] += params.backbone[l].w[o][i] * gpre;
        }
      }
    }
  }
  return flatten_params(g);
}

std::size_t param_count(const ModelConfig& cfg) {
  std::size_t n = 0;
  for (const auto& sh : affine_shapes(cfg))
    n += static_cast<std::size_t>(sh.out) * (sh.in + 1);
  return n;
}

namespace {

void append_affine(const AffineLayer& l, Vec& flat) {
  for (const Vec& row : l.w) flat.insert(flat.end(), row.begin(), row.end());
  flat.insert(flat.end(), l.b.begin(), l.b.end());
}

void take_affine(AffineLayer& l, const Vec& flat, std::size_t& pos) {
  for (Vec& row : l.w)
    for (double& v : row) v = flat[pos++];
  for (double& v : l.b) v = flat[pos++];
}

}  // namespace

Vec flatten_params(const ModelParams& params) {
  Vec flat;
  for (const auto& l : params.backbone) append_affine(l, flat);
  append_affine(params.base, flat);
  for (const auto& h : params.shifts) {
    append_affine(h.inner, flat);
    append_affine(h.out, flat);
  }
  return flat;
}

ModelParams unflatten_params(const ModelConfig& cfg, const Vec& flat) {
  if (flat.size() != param_count(cfg))
    fail(ErrorCode::dimension_mismatch,
         "unflatten: expected " + std::to_string(param_count(cfg)) +
             " parameters, got " + std::to_string(flat.size()));
  ModelParams p = shaped_params(cfg);
  std::size_t pos = 0;
  for (auto& l : p.backbone) take_affine(l, flat, pos);
  take_affine(p.base, flat, pos);
  for (auto& h : p.shifts) {
    take_affine(h.inner, flat, pos);
    take_affine(h.out, flat, pos);
  }
  return p;
}

std::string param_name(const ModelConfig& cfg, std::size_t flat_index) {
  std::size_t pos = 0;
  for (const auto& sh : affine_shapes(cfg)) {
    const std::size_t n_w = static_cast<std::size_t>(sh.out) * sh.in;
    if (flat_index < pos + n_w) {
      const std::size_t off = flat_index - pos;
      return sh.name + ".w[" + std::to_string(off / sh.in) + "][" +
             std::to_string(off % sh.in) + "]";
    }
    pos += n_w;
    if (flat_index < pos + static_cast<std::size_t>(sh.out))
      return sh.name + ".b[" + std::to_string(flat_index - pos) + "]";
    pos += sh.out;
  }
  fail(ErrorCode::invalid_argument, "param_name: index out of range");
}

}  // namespace litm
