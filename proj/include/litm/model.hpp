#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "litm/common.hpp"
#include "litm/numeric.hpp"
#include "litm/random.hpp"

namespace litm {

enum class Pooling { gmp, gap };

struct ModelConfig {
  int d_in = 16;
  std::vector<int> hidden_dims{64, 64, 64};
  int d_emb = 32;
  int stages = 2;  // number of shift heads stacked on the base embedding
  Pooling pooling = Pooling::gmp;
  // Backbone layer feeding each shift head, one entry per shift stage 1..M.
  // Empty means one step shallower per stage starting below the deepest
  // layer, clamped at layer 0. The base head always reads the deepest layer.
  std::vector<int> stage_sources;
  int shift_hidden = 0;  // inner width of shift heads; 0 = width of the source layer

  void validate() const;
  std::vector<int> shift_sources() const;  // resolved stage_sources, length stages
};

struct AffineLayer {
  std::vector<Vec> w;  // w[out][in]
  Vec b;
};

struct ShiftHead {
  AffineLayer inner;  // source width -> inner width, ReLU after
  AffineLayer out;    // inner width -> d_emb
};

struct ModelParams {
  std::vector<AffineLayer> backbone;
  AffineLayer base;
  std::vector<ShiftHead> shifts;
};

// Embeddings of one sample at every stage: f[0] is the base embedding and
// f[j] = f[j-1] + shifts[j-1] for j >= 1.
struct StageEmbeddings {
  std::vector<Vec> f;       // stages + 1 entries
  std::vector<Vec> shifts;  // stages entries
};

using DescriptorSet = std::vector<Vec>;

// Elementwise max (gmp) or mean (gap) across descriptors.
Vec pool_descriptors(const std::vector<Vec>& rows, Pooling mode);

ModelParams init_params(const ModelConfig& cfg, RandomSource& rng);

StageEmbeddings forward(const ModelParams& params, const ModelConfig& cfg,
                        const DescriptorSet& descriptors);

// Parameter gradients for a batch, given per-sample gradients with respect to
// every stage embedding (upstream[i][j] pairs with f_j of sample i). Returns
// a flat vector aligned with flatten_params.
Vec backward(const ModelParams& params, const ModelConfig& cfg,
             const std::vector<DescriptorSet>& batch,
             const std::vector<std::vector<Vec>>& upstream);

std::size_t param_count(const ModelConfig& cfg);
Vec flatten_params(const ModelParams& params);
ModelParams unflatten_params(const ModelConfig& cfg, const Vec& flat);
std::string param_name(const ModelConfig& cfg, std::size_t flat_index);

}  // namespace litm
