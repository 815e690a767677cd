#include "ldgen/adapter.hpp"

#include <string>

namespace ldgen {

void AdapterConfig::validate() const {
  if (d_llm < 1 || d_t5 < 1 || d_model < 1 || heads < 1 ||
      encoder_layers < 1 || decoder_layers < 1 || t_out < 1 || ffn_mult < 1) {
    throw ConfigError("adapter config: all extents must be positive");
  }
  if (d_model % heads != 0) {
    throw ConfigError("adapter config: d_model " + std::to_string(d_model) +
                      " not divisible by heads " + std::to_string(heads));
  }
}

AdapterParams adapter_init(const AdapterConfig &config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  AdapterParams p;
  p.config = config;
  p.input_proj_w = init_weight(config.d_llm, config.d_model, rng);
  p.input_proj_b = init_bias(config.d_model);
  const std::int64_t hidden = config.d_model * config.ffn_mult;
  for (std::int64_t i = 0; i < config.encoder_layers; ++i) {
    EncoderLayerParams layer;
    layer.ln1 = init_layer_norm(config.d_model);
    layer.self_attn = init_attention(config.d_model, config.heads, rng);
    layer.ln2 = init_layer_norm(config.d_model);
    layer.ffn = init_ffn(config.d_model, hidden, rng);
    p.encoder.push_back(std::move(layer));
  }
  p.query_tokens = init_weight(config.t_out, config.d_model, rng);
  for (std::int64_t i = 0; i < config.decoder_layers; ++i) {
    DecoderLayerParams layer;
    layer.ln1 = init_layer_norm(config.d_model);
    layer.self_attn = init_attention(config.d_model, config.heads, rng);
    layer.ln2 = init_layer_norm(config.d_model);
    layer.cross_attn = init_attention(config.d_model, config.heads, rng);
    layer.ln3 = init_layer_norm(config.d_model);
    layer.ffn = init_ffn(config.d_model, hidden, rng);
    p.decoder.push_back(std::move(layer));
  }
  p.output_proj_w = init_weight(config.d_model, config.d_t5, rng);
  p.output_proj_b = init_bias(config.d_t5);
  return p;
}

NamedParams AdapterParams::named_parameters() const {
  NamedParams out;
  out.emplace_back("adapter.in_proj.w", input_proj_w);
  out.emplace_back("adapter.in_proj.b", input_proj_b);
  for (std::size_t i = 0; i < encoder.size(); ++i) {
    const std::string base = "adapter.enc." + std::to_string(i);
    collect(out, base + ".ln1", encoder[i].ln1);
    collect(out, base + ".attn", encoder[i].self_attn);
    collect(out, base + ".ln2", encoder[i].ln2);
    collect(out, base + ".ffn", encoder[i].ffn);
  }
  out.emplace_back("adapter.queries", query_tokens);
  for (std::size_t i = 0; i < decoder.size(); ++i) {
    const std::string base = "adapter.dec." + std::to_string(i);
    collect(out, base + ".ln1", decoder[i].ln1);
    collect(out, base + ".self_attn", decoder[i].self_attn);
    collect(out, base + ".ln2", decoder[i].ln2);
    collect(out, base + ".cross_attn", decoder[i].cross_attn);
    collect(out, base + ".ln3", decoder[i].ln3);
    collect(out, base + ".ffn", decoder[i].ffn);
  }
  out.emplace_back("adapter.out_proj.w", output_proj_w);
  out.emplace_back("adapter.out_proj.b", output_proj_b);
  return out;
}

FeatureSequence adapter_forward(const AdapterParams &params,
                                const FeatureSequence &llm_seq) {
  const auto &cfg = params.config;
  if (llm_seq.space != FeatureSpace::kLlm) {
    throw SpaceError(std::string("adapter_forward: expected llm input, got ") +
                     feature_space_name(llm_seq.space));
  }
  if (llm_seq.width() != cfg.d_llm) {
    throw DimensionError("adapter_forward: input width " +
                         std::to_string(llm_seq.width()) + " vs d_llm " +
                         std::to_string(cfg.d_llm));
  }
  bool any = false;
  for (auto m : llm_seq.mask) any = any || (m != 0);
  if (!any) throw MaskError("adapter_forward: every input row masked");

  // Encoder over projected tokens with additive sinusoidal positions.
  Tensor x = add_bias(matmul(llm_seq.tokens, params.input_proj_w),
                      params.input_proj_b);
  x = add(x, sinusoidal_positions(x.rows(), cfg.d_model));
  for (const auto &layer : params.encoder) {
    Tensor a = apply_layer_norm(x, layer.ln1);
    x = add(x, multi_head_attention(a, a, layer.self_attn, &llm_seq.mask));
    Tensor b = apply_layer_norm(x, layer.ln2);
    x = add(x, apply_ffn(b, layer.ffn));
  }
  const Tensor &memory = x;

  // Decoder starting from the learnable query bank.
  Tensor q = params.query_tokens;
  for (const auto &layer : params.decoder) {
    Tensor a = apply_layer_norm(q, layer.ln1);
    q = add(q, multi_head_attention(a, a, layer.self_attn));
    Tensor b = apply_layer_norm(q, layer.ln2);
    q = add(q, multi_head_attention(b, memory, layer.cross_attn,
                                    &llm_seq.mask));
    Tensor c = apply_layer_norm(q, layer.ln3);
    q = add(q, apply_ffn(c, layer.ffn));
  }

  Tensor out = add_bias(matmul(q, params.output_proj_w), params.output_proj_b);
  return FeatureSequence::full(out, FeatureSpace::kAligned);
}

}  // namespace ldgen
