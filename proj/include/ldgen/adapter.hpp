#pragma once

#include <cstdint>
#include <vector>

#include "ldgen/features.hpp"
#include "ldgen/layers.hpp"

namespace ldgen {

// Encoder-decoder transformer that maps scaled LLM token features into the
// T5 feature space. The decoder starts from a learnable query bank of fixed
// length t_out, so the output length never depends on the input length.
struct AdapterConfig {
  std::int64_t d_llm = 3584;
  std::int64_t d_t5 = 4096;
  std::int64_t d_model = 512;
  std::int64_t heads = 8;
  std::int64_t encoder_layers = 3;
  std::int64_t decoder_layers = 3;
  std::int64_t t_out = 32;
  std::int64_t ffn_mult = 4;

  void validate() const;
};

struct EncoderLayerParams {
  LayerNormParams ln1;
  AttentionParams self_attn;
  LayerNormParams ln2;
  FeedForwardParams ffn;
};

struct DecoderLayerParams {
  LayerNormParams ln1;
  AttentionParams self_attn;
  LayerNormParams ln2;
  AttentionParams cross_attn;
  LayerNormParams ln3;
  FeedForwardParams ffn;
};

struct AdapterParams {
  AdapterConfig config;
  Tensor input_proj_w;  // [d_llm x d_model]
  Tensor input_proj_b;
  std::vector<EncoderLayerParams> encoder;
  Tensor query_tokens;  // [t_out x d_model]
  std::vector<DecoderLayerParams> decoder;
  Tensor output_proj_w;  // [d_model x d_t5]
  Tensor output_proj_b;

  NamedParams named_parameters() const;
};

// Deterministic seeded init: Gaussian std 0.02 for projection/attention/FFN
// weights and the query bank, gamma=1/beta=0 for the norms, zero biases.
AdapterParams adapter_init(const AdapterConfig &config, std::uint64_t seed);

// Pre-norm residual encoder over the (scaled) LLM tokens with the input
// mask applied to attention keys; pre-norm decoder over the query bank with
// cross-attention into the encoder memory. Returns length t_out, full mask,
// space = aligned.
FeatureSequence adapter_forward(const AdapterParams &params,
                                const FeatureSequence &llm_seq);

}  // namespace ldgen
