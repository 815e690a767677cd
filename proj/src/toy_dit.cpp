#include "ldgen/toy_dit.hpp"

#include <string>

namespace ldgen {

void ToyDiTConfig::validate() const {
  if (tokens < 1 || channels < 1 || d_model < 1 || heads < 1 || blocks < 1 ||
      ffn_mult < 1 || cond_dim < 1) {
    throw ConfigError("toy dit config: all extents must be positive");
  }
  if (d_model % heads != 0) {
    throw ConfigError("toy dit config: d_model " + std::to_string(d_model) +
                      " not divisible by heads " + std::to_string(heads));
  }
}

ToyDiTParams toy_dit_init(const ToyDiTConfig &config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ToyDiTParams p;
  p.config = config;
  p.patch_embed_w = init_weight(config.channels, config.d_model, rng);
  p.patch_embed_b = init_bias(config.d_model);
  p.time_mlp = init_ffn(config.d_model, config.d_model, rng);
  p.cond_proj_w = init_weight(config.cond_dim, config.d_model, rng);
  p.cond_proj_b = init_bias(config.d_model);
  const std::int64_t hidden = config.d_model * config.ffn_mult;
  for (std::int64_t i = 0; i < config.blocks; ++i) {
    DiTBlockParams blk;
    blk.ln1 = init_layer_norm(config.d_model);
    blk.self_attn = init_attention(config.d_model, config.heads, rng);
    blk.ln2 = init_layer_norm(config.d_model);
    blk.cross_attn = init_attention(config.d_model, config.heads, rng);
    blk.ln3 = init_layer_norm(config.d_model);
    blk.ffn = init_ffn(config.d_model, hidden, rng);
    p.blocks.push_back(std::move(blk));
  }
  p.unembed_w = init_weight(config.d_model, config.channels, rng);
  p.unembed_b = init_bias(config.channels);
  return p;
}

NamedParams ToyDiTParams::named_parameters() const {
  NamedParams out;
  out.emplace_back("dit.patch_embed.w", patch_embed_w);
  out.emplace_back("dit.patch_embed.b", patch_embed_b);
  collect(out, "dit.time_mlp", time_mlp);
  out.emplace_back("dit.cond_proj.w", cond_proj_w);
  out.emplace_back("dit.cond_proj.b", cond_proj_b);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string base = "dit.blk." + std::to_string(i);
    collect(out, base + ".ln1", blocks[i].ln1);
    collect(out, base + ".self_attn", blocks[i].self_attn);
    collect(out, base + ".ln2", blocks[i].ln2);
    collect(out, base + ".cross_attn", blocks[i].cross_attn);
    collect(out, base + ".ln3", blocks[i].ln3);
    collect(out, base + ".ffn", blocks[i].ffn);
  }
  out.emplace_back("dit.unembed.w", unembed_w);
  out.emplace_back("dit.unembed.b", unembed_b);
  return out;
}

Tensor toy_dit_forward(const ToyDiTParams &params, const Tensor &x_t,
                       std::int64_t t, const FeatureSequence &cond) {
  const auto &cfg = params.config;
  if (cond.space != FeatureSpace::kAligned &&
      cond.space != FeatureSpace::kRefined) {
    throw SpaceError(
        std::string("toy_dit_forward: condition must be aligned or refined, "
                    "got ") +
        feature_space_name(cond.space));
  }
  if (cond.width() != cfg.cond_dim) {
    throw DimensionError("toy_dit_forward: condition width " +
                         std::to_string(cond.width()) + " vs cond_dim " +
                         std::to_string(cfg.cond_dim));
  }
  if (x_t.shape().size() != 2 || x_t.rows() != cfg.tokens ||
      x_t.cols() != cfg.channels) {
    throw DimensionError("toy_dit_forward: latent " + shape_str(x_t.shape()) +
                         " vs configured [" + std::to_string(cfg.tokens) +
                         "x" + std::to_string(cfg.channels) + "]");
  }

  // Timestep embedding broadcast onto every latent token.
  Tensor t_row = Tensor::from_data({1, cfg.d_model},
                                   timestep_embedding(t, cfg.d_model).value());
  Tensor t_emb = reshape(apply_ffn(t_row, params.time_mlp), {cfg.d_model});

  Tensor h = add_bias(matmul(x_t, params.patch_embed_w), params.patch_embed_b);
  h = add(h, sinusoidal_positions(cfg.tokens, cfg.d_model));
  h = add_bias(h, t_emb);

  Tensor kv = add_bias(matmul(cond.tokens, params.cond_proj_w),
                       params.cond_proj_b);
  for (const auto &blk : params.blocks) {
    Tensor a = apply_layer_norm(h, blk.ln1);
    h = add(h, multi_head_attention(a, a, blk.self_attn));
    Tensor b = apply_layer_norm(h, blk.ln2);
    h = add(h, multi_head_attention(b, kv, blk.cross_attn, &cond.mask));
    Tensor c = apply_layer_norm(h, blk.ln3);
    h = add(h, apply_ffn(c, blk.ffn));
  }
  return add_bias(matmul(h, params.unembed_w), params.unembed_b);
}

}  // namespace ldgen
