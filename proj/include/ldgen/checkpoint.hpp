#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldgen/features.hpp"
#include "ldgen/layers.hpp"
#include "ldgen/tensor.hpp"

namespace ldgen {

// LDGN checkpoint: magic "LDGN", format version, config digest, payload
// checksum, calibration, rng state, named f64 parameter blobs and optional
// optimizer moments. Little-endian throughout; the FNV-1a checksum covers
// every byte after the checksum field, so any single-byte corruption is
// caught at load.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedBlob {
  std::string name;
  Shape shape;
  std::vector<double> data;
};

struct OptimizerBlobs {
  std::uint64_t step = 0;
  double lr = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double epsilon = 0.0;
  // m/v pairs aligned with `params` order in the owning checkpoint.
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::uint64_t config_digest = 0;
  ScaleCalibration calibration;
  std::string rng_state;
  std::uint64_t teacher_next_index = 0;
  std::vector<NamedBlob> params;
  std::optional<OptimizerBlobs> optimizer;

  const NamedBlob *find(const std::string &name) const;
};

std::vector<char> checkpoint_encode(const Checkpoint &ckpt);
Checkpoint checkpoint_decode(const std::vector<char> &bytes);

void save_checkpoint(const Checkpoint &ckpt, const std::string &path);
Checkpoint load_checkpoint(const std::string &path);

// Verifies the stored digest against an expected one. strict=true throws
// ConfigError on mismatch; otherwise returns false so callers can warn.
bool verify_config_digest(const Checkpoint &ckpt, std::uint64_t expected,
                          bool strict);

// Bridges between live parameter structs and blobs (by name, shape-checked).
std::vector<NamedBlob> blobs_from_params(const NamedParams &named);
void load_params_from_blobs(const NamedParams &named, const Checkpoint &ckpt);

}  // namespace ldgen
