#include "ldgen/refiner.hpp"

#include <string>

namespace ldgen {

void RefinerConfig::validate() const {
  if (dim < 1 || heads < 1 || ffn_mult < 1 || blocks < 1 || image_dim < 1) {
    throw ConfigError("refiner config: all extents must be positive");
  }
  if (dim % heads != 0) {
    throw ConfigError("refiner config: dim " + std::to_string(dim) +
                      " not divisible by heads " + std::to_string(heads));
  }
}

RefinerParams refiner_init(const RefinerConfig &config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  RefinerParams p;
  p.config = config;
  p.image_proj_w = init_weight(config.image_dim, config.dim, rng);
  p.image_proj_b = init_bias(config.dim);
  const std::int64_t hidden = config.dim * config.ffn_mult;
  for (std::int64_t i = 0; i < config.blocks; ++i) {
    RefinerBlockParams blk;
    blk.ln1 = init_layer_norm(config.dim);
    blk.self_attn = init_attention(config.dim, config.heads, rng);
    blk.ln2 = init_layer_norm(config.dim);
    blk.cross_attn = init_attention(config.dim, config.heads, rng);
    blk.ln3 = init_layer_norm(config.dim);
    blk.ffn = init_ffn(config.dim, hidden, rng);
    blk.g_sa = Tensor::param({1}, {config.gate_init});
    blk.g_ca = Tensor::param({1}, {config.gate_init});
    blk.g_ffn = Tensor::param({1}, {config.gate_init});
    p.blocks.push_back(std::move(blk));
  }
  return p;
}

NamedParams RefinerParams::named_parameters() const {
  NamedParams out;
  out.emplace_back("refiner.img_proj.w", image_proj_w);
  out.emplace_back("refiner.img_proj.b", image_proj_b);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string base = "refiner.blk." + std::to_string(i);
    collect(out, base + ".ln1", blocks[i].ln1);
    collect(out, base + ".self_attn", blocks[i].self_attn);
    collect(out, base + ".ln2", blocks[i].ln2);
    collect(out, base + ".cross_attn", blocks[i].cross_attn);
    collect(out, base + ".ln3", blocks[i].ln3);
    collect(out, base + ".ffn", blocks[i].ffn);
    out.emplace_back(base + ".g_sa", blocks[i].g_sa);
    out.emplace_back(base + ".g_ca", blocks[i].g_ca);
    out.emplace_back(base + ".g_ffn", blocks[i].g_ffn);
  }
  return out;
}

FeatureSequence refiner_forward(const RefinerParams &params,
                                const FeatureSequence &text,
                                const FeatureSequence &image_latents) {
  const auto &cfg = params.config;
  if (text.width() != cfg.dim) {
    throw DimensionError("refiner_forward: text width " +
                         std::to_string(text.width()) + " vs dim " +
                         std::to_string(cfg.dim));
  }
  if (image_latents.width() != cfg.image_dim) {
    throw DimensionError("refiner_forward: image width " +
                         std::to_string(image_latents.width()) +
                         " vs image_dim " + std::to_string(cfg.image_dim));
  }
  bool text_any = false;
  for (auto m : text.mask) text_any = text_any || (m != 0);
  if (!text_any) throw MaskError("refiner_forward: every text row masked");
  bool img_any = false;
  for (auto m : image_latents.mask) img_any = img_any || (m != 0);
  if (!img_any) {
    throw MaskError("refiner_forward: every image latent masked");
  }

  Tensor img = add_bias(matmul(image_latents.tokens, params.image_proj_w),
                        params.image_proj_b);

  Tensor x = text.tokens;
  for (const auto &blk : params.blocks) {
    Tensor a = apply_layer_norm(x, blk.ln1);
    x = add(x, mul_scalar_tensor(
                   multi_head_attention(a, a, blk.self_attn, &text.mask),
                   blk.g_sa));
    Tensor b = apply_layer_norm(x, blk.ln2);
    x = add(x, mul_scalar_tensor(
                   multi_head_attention(b, img, blk.cross_attn,
                                        &image_latents.mask),
                   blk.g_ca));
    Tensor c = apply_layer_norm(x, blk.ln3);
    x = add(x, mul_scalar_tensor(apply_ffn(c, blk.ffn), blk.g_ffn));
  }

  FeatureSequence out;
  out.tokens = x;
  out.mask = text.mask;
  out.space = FeatureSpace::kRefined;
  return out;
}

}  // namespace ldgen
