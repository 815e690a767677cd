#pragma once

#include <cstdint>
#include <vector>

#include "ldgen/features.hpp"
#include "ldgen/layers.hpp"

namespace ldgen {

// Miniature diffusion transformer operating on a flattened grid of latent
// patch tokens, cross-attending to a text condition sequence. Stands in for
// a full T2I backbone; exists so the conditioning path can be trained and
// measured end to end.
struct ToyDiTConfig {
  std::int64_t tokens = 16;    // latent patch tokens (4x4 grid by default)
  std::int64_t channels = 4;   // values per patch token
  std::int64_t d_model = 32;
  std::int64_t heads = 4;
  std::int64_t blocks = 2;
  std::int64_t ffn_mult = 4;
  std::int64_t cond_dim = 64;  // width of the condition sequence (d_t5)

  void validate() const;
};

struct DiTBlockParams {
  LayerNormParams ln1;
  AttentionParams self_attn;
  LayerNormParams ln2;
  AttentionParams cross_attn;
  LayerNormParams ln3;
  FeedForwardParams ffn;
};

struct ToyDiTParams {
  ToyDiTConfig config;
  Tensor patch_embed_w;  // [channels x d_model]
  Tensor patch_embed_b;
  FeedForwardParams time_mlp;  // sinusoidal t-embedding -> d_model
  Tensor cond_proj_w;          // [cond_dim x d_model]
  Tensor cond_proj_b;
  std::vector<DiTBlockParams> blocks;
  Tensor unembed_w;  // [d_model x channels]
  Tensor unembed_b;

  NamedParams named_parameters() const;
};

ToyDiTParams toy_dit_init(const ToyDiTConfig &config, std::uint64_t seed);

// Predicts the injected noise for x_t at timestep t conditioned on `cond`
// (space aligned or refined). Output shape equals x_t.
Tensor toy_dit_forward(const ToyDiTParams &params, const Tensor &x_t,
                       std::int64_t t, const FeatureSequence &cond);

}  // namespace ldgen
