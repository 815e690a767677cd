#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldgen/features.hpp"
#include "ldgen/tensor.hpp"

namespace ldgen {

// Synthetic stand-in for LLM/T5 feature extraction. Each "language" owns a
// fixed random map from a shared latent semantic vector z to LLM-space
// tokens, while a single shared map produces the T5-space target, so
// different languages over the same z yield identical targets (the
// many-to-one structure the alignment stage must learn).
struct TeacherConfig {
  std::uint64_t seed = 1;
  std::int64_t d_z = 16;
  std::int64_t d_llm = 48;
  std::int64_t d_t5 = 64;
  std::int64_t t_out = 8;
  double sigma = 0.05;        // per-token source noise
  double source_gain = 8.0;   // plants the LLM/T5 numeric-range mismatch
  std::int64_t len_min = 4;   // source length range, inclusive
  std::int64_t len_max = 16;
  double latent_sigma = 0.05; // observation noise on conditioned latents
  std::int64_t latent_tokens = 16;
  std::int64_t latent_channels = 4;
  std::vector<std::string> languages = {"en", "xx"};

  void validate() const;
};

struct TeacherPair {
  FeatureSequence source;  // llm space, length in [len_min, len_max]
  FeatureSequence target;  // t5 space, [t_out x d_t5], full mask
};

struct ConditionedLatent {
  FeatureSequence cond;  // llm space
  Tensor x0;             // [latent_tokens x latent_channels]
};

class SyntheticTeacher {
 public:
  explicit SyntheticTeacher(const TeacherConfig &config);

  const TeacherConfig &config() const { return config_; }

  bool has_language(const std::string &lang) const;

  // Draws n fresh pairs in one language. Each pair consumes a unique stream
  // index, so z values never repeat across calls.
  std::vector<TeacherPair> synth_teacher_pairs(std::int64_t n,
                                               const std::string &lang);

  // Draws n (condition, clean latent) pairs; languages rotate per sample.
  std::vector<ConditionedLatent> synth_conditioned_latents(std::int64_t n);

  // Deterministic construction from an explicit semantic vector; used for
  // controlled probes (same z across languages) and by the generators above.
  TeacherPair pair_from_z(const std::vector<double> &z,
                          const std::string &lang,
                          std::uint64_t sample_seed) const;
  ConditionedLatent latent_from_z(const std::vector<double> &z,
                                  const std::string &lang,
                                  std::uint64_t sample_seed) const;

  std::vector<double> draw_z(std::uint64_t sample_seed) const;

  // Stream position, persisted in checkpoints so generation resumes
  // deterministically.
  std::uint64_t next_index() const { return next_index_; }
  void set_next_index(std::uint64_t i) { next_index_ = i; }

 private:
  std::size_t lang_index(const std::string &lang) const;

  TeacherConfig config_;
  // Row-major [d_z x d_llm] per language.
  std::vector<std::vector<double>> source_maps_;
  // [d_z x (t_out * d_t5)] shared target map.
  std::vector<double> target_map_;
  // [d_z x (latent_tokens * latent_channels)] latent map.
  std::vector<double> latent_map_;
  std::uint64_t next_index_ = 0;
};

}  // namespace ldgen
