#include "ldgen/teacher.hpp"

#include <cmath>

#include "ldgen/kernels.hpp"

namespace ldgen {

void TeacherConfig::validate() const {
  if (d_z < 1 || d_llm < 1 || d_t5 < 1 || t_out < 1 || latent_tokens < 1 ||
      latent_channels < 1) {
    throw ConfigError("teacher config: all extents must be positive");
  }
  if (len_min < 1 || len_max < len_min) {
    throw ConfigError("teacher config: need 1 <= len_min <= len_max");
  }
  if (sigma < 0.0 || latent_sigma < 0.0) {
    throw ConfigError("teacher config: noise levels must be >= 0");
  }
  if (languages.empty()) {
    throw ConfigError("teacher config: at least one language");
  }
}

SyntheticTeacher::SyntheticTeacher(const TeacherConfig &config)
    : config_(config) {
  config_.validate();
  // Maps are fixed at construction from the teacher seed alone; sample
  // noise comes from per-index derived streams.
  const double scale = 1.0 / std::sqrt(static_cast<double>(config_.d_z));
  for (std::size_t li = 0; li < config_.languages.size(); ++li) {
    Rng rng(derive_seed(config_.seed, 0x100 + li));
    std::vector<double> map(config_.d_z * config_.d_llm);
    for (auto &v : map) v = rng.normal() * scale * config_.source_gain;
    source_maps_.push_back(std::move(map));
  }
  {
    Rng rng(derive_seed(config_.seed, 0x200));
    target_map_.assign(config_.d_z * config_.t_out * config_.d_t5, 0.0);
    for (auto &v : target_map_) v = rng.normal() * scale;
  }
  {
    Rng rng(derive_seed(config_.seed, 0x300));
    latent_map_.assign(
        config_.d_z * config_.latent_tokens * config_.latent_channels, 0.0);
    for (auto &v : latent_map_) v = rng.normal() * scale;
  }
}

bool SyntheticTeacher::has_language(const std::string &lang) const {
  for (const auto &l : config_.languages) {
    if (l == lang) return true;
  }
  return false;
}

std::size_t SyntheticTeacher::lang_index(const std::string &lang) const {
  for (std::size_t i = 0; i < config_.languages.size(); ++i) {
    if (config_.languages[i] == lang) return i;
  }
  throw ConfigError("teacher: unknown language '" + lang + "'");
}

std::vector<double> SyntheticTeacher::draw_z(std::uint64_t sample_seed) const {
  Rng rng(derive_seed(sample_seed, 0x1));
  std::vector<double> z(config_.d_z);
  for (auto &v : z) v = rng.normal();
  return z;
}

TeacherPair SyntheticTeacher::pair_from_z(const std::vector<double> &z,
                                          const std::string &lang,
                                          std::uint64_t sample_seed) const {
  const std::size_t li = lang_index(lang);
  Rng rng(derive_seed(sample_seed, 0x2));

  // u = A_lang(z), the language-specific LLM-space embedding of z.
  std::vector<double> u(config_.d_llm, 0.0);
  kernels::mm_nn_serial(z.data(), source_maps_[li].data(), u.data(), 1,
                        config_.d_z, config_.d_llm);

  const std::int64_t span = config_.len_max - config_.len_min + 1;
  const std::int64_t len =
      config_.len_min + static_cast<std::int64_t>(rng.below(span));
  std::vector<double> tokens(len * config_.d_llm);
  for (std::int64_t i = 0; i < len; ++i) {
    for (std::int64_t j = 0; j < config_.d_llm; ++j) {
      tokens[i * config_.d_llm + j] = u[j] + config_.sigma * rng.normal();
    }
  }

  std::vector<double> target(config_.t_out * config_.d_t5, 0.0);
  kernels::mm_nn_serial(z.data(), target_map_.data(), target.data(), 1,
                        config_.d_z, config_.t_out * config_.d_t5);

  TeacherPair pair;
  pair.source = FeatureSequence::full(
      Tensor::from_data({len, config_.d_llm}, std::move(tokens)),
      FeatureSpace::kLlm);
  pair.target = FeatureSequence::full(
      Tensor::from_data({config_.t_out, config_.d_t5}, std::move(target)),
      FeatureSpace::kT5);
  return pair;
}

ConditionedLatent SyntheticTeacher::latent_from_z(
    const std::vector<double> &z, const std::string &lang,
    std::uint64_t sample_seed) const {
  ConditionedLatent out;
  out.cond = pair_from_z(z, lang, sample_seed).source;

  Rng rng(derive_seed(sample_seed, 0x3));
  const std::int64_t n = config_.latent_tokens * config_.latent_channels;
  std::vector<double> flat(n, 0.0);
  kernels::mm_nn_serial(z.data(), latent_map_.data(), flat.data(), 1,
                        config_.d_z, n);
  // Smooth bounded response keeps the latent scale O(1) while staying
  // nearly linear in z, so the condition is informative by construction.
  for (auto &v : flat) {
    v = 2.0 * std::tanh(0.5 * v);
    v += config_.latent_sigma * rng.normal();
  }
  out.x0 = Tensor::from_data({config_.latent_tokens, config_.latent_channels},
                             std::move(flat));
  return out;
}

std::vector<TeacherPair> SyntheticTeacher::synth_teacher_pairs(
    std::int64_t n, const std::string &lang) {
  lang_index(lang);  // throws on unknown language
  std::vector<TeacherPair> pairs;
  pairs.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t s = derive_seed(config_.seed, next_index_++);
    pairs.push_back(pair_from_z(draw_z(s), lang, s));
  }
  return pairs;
}

std::vector<ConditionedLatent> SyntheticTeacher::synth_conditioned_latents(
    std::int64_t n) {
  if (n < 1) throw ConfigError("synth_conditioned_latents: n must be >= 1");
  std::vector<ConditionedLatent> out;
  out.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t s = derive_seed(config_.seed, next_index_++);
    const auto &lang =
        config_.languages[static_cast<std::size_t>(i) %
                          config_.languages.size()];
    out.push_back(latent_from_z(draw_z(s), lang, s));
  }
  return out;
}

}  // namespace ldgen
