#pragma once

#include <cstdint>
#include <vector>

#include "ldgen/features.hpp"
#include "ldgen/layers.hpp"

namespace ldgen {

// Gated residual block refining aligned text features against image
// latents: self-attention, image-conditioned cross-attention and an FFN,
// each scaled by a learnable scalar gate that starts at zero so the block
// is exactly the identity until trained.
struct RefinerConfig {
  std::int64_t dim = 4096;     // width of the text features (d_t5)
  std::int64_t heads = 8;
  std::int64_t ffn_mult = 4;
  std::int64_t blocks = 1;
  double gate_init = 0.0;
  // Width of the incoming image latents; a learned projection lifts them to
  // `dim` before they serve as keys/values.
  std::int64_t image_dim = 4096;

  void validate() const;
};

struct RefinerBlockParams {
  LayerNormParams ln1;
  AttentionParams self_attn;
  LayerNormParams ln2;
  AttentionParams cross_attn;
  LayerNormParams ln3;
  FeedForwardParams ffn;
  Tensor g_sa;   // scalar gates, shape {1}
  Tensor g_ca;
  Tensor g_ffn;
};

struct RefinerParams {
  RefinerConfig config;
  Tensor image_proj_w;  // [image_dim x dim]
  Tensor image_proj_b;
  std::vector<RefinerBlockParams> blocks;

  NamedParams named_parameters() const;
};

RefinerParams refiner_init(const RefinerConfig &config, std::uint64_t seed);

// Per block: h1 = x + g_sa*SA(LN1(x)); h2 = h1 + g_ca*CA(LN2(h1), img);
// y = h2 + g_ffn*FFN(LN3(h2)). Mask of `text` is preserved on the output,
// which is tagged space = refined.
FeatureSequence refiner_forward(const RefinerParams &params,
                                const FeatureSequence &text,
                                const FeatureSequence &image_latents);

}  // namespace ldgen
