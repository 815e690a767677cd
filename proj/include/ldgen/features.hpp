#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldgen/tensor.hpp"

namespace ldgen {

enum class FeatureSpace : std::uint8_t {
  kLlm = 0,
  kT5 = 1,
  kAligned = 2,
  kRefined = 3,
};

const char *feature_space_name(FeatureSpace s);

// A masked [L x D] token-feature matrix tagged by the space it lives in.
// `tokens` may sit on a live autodiff graph; mask entry != 0 means valid.
struct FeatureSequence {
  Tensor tokens;
  std::vector<std::uint8_t> mask;
  FeatureSpace space = FeatureSpace::kLlm;

  std::int64_t length() const { return tokens.rows(); }
  std::int64_t width() const { return tokens.cols(); }

  // Enforces the structural invariants (rank 2, mask length, at least one
  // valid row, finite values). Called on every ingestion path; internal
  // compute paths construct directly.
  static FeatureSequence validated(Tensor tokens,
                                   std::vector<std::uint8_t> mask,
                                   FeatureSpace space);
  static FeatureSequence full(Tensor tokens, FeatureSpace space);
};

// The scalar that maps the LLM numeric range onto the T5 range, plus the
// statistics it was derived from.
struct ScaleCalibration {
  double coefficient = 1.0;
  double source_rms = 0.0;
  double target_rms = 0.0;
  std::uint64_t sample_count = 0;
};

// Root-mean-square over every entry of the unmasked rows.
double masked_rms(const FeatureSequence &seq);

// coefficient = pooled masked RMS of `t5_batch` / pooled masked RMS of
// `llm_batch`. Throws DataError on an empty batch or zero source RMS.
ScaleCalibration calibrate_scale_coefficient(
    const std::vector<FeatureSequence> &llm_batch,
    const std::vector<FeatureSequence> &t5_batch);

// Multiplies tokens by the coefficient; mask, length and space unchanged.
// The input must be tagged llm.
FeatureSequence scale_features(const FeatureSequence &seq,
                               const ScaleCalibration &calib);

// LDFS batch file: magic "LDFS", version u32, then per record
// (L u32, D u32, space u8, mask bits (ceil(L/8) bytes, LSB first),
// row-major f64 LE values). Bit-exact round trip.
inline constexpr std::uint32_t kLdfsVersion = 1;

std::vector<char> ldfs_encode(const std::vector<FeatureSequence> &batch);
std::vector<FeatureSequence> ldfs_decode(const std::vector<char> &bytes);
void save_ldfs(const std::string &path,
               const std::vector<FeatureSequence> &batch);
std::vector<FeatureSequence> load_ldfs(const std::string &path);

}  // namespace ldgen
