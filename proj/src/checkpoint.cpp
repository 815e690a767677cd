#include "ldgen/checkpoint.hpp"

#include <algorithm>

#include "ldgen/serialize.hpp"

namespace ldgen {

namespace {

constexpr char kMagic[4] = {'L', 'D', 'G', 'N'};
// Offset of the checksum field: magic(4) + version(4).
constexpr std::size_t kChecksumOffset = 8;

}  // namespace

const NamedBlob *Checkpoint::find(const std::string &name) const {
  for (const auto &b : params) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

std::vector<char> checkpoint_encode(const Checkpoint &ckpt) {
  ByteWriter w;
  w.raw(kMagic, 4);
  w.u32(ckpt.version);
  w.u64(0);  // checksum, patched below
  w.u64(ckpt.config_digest);
  w.f64(ckpt.calibration.coefficient);
  w.f64(ckpt.calibration.source_rms);
  w.f64(ckpt.calibration.target_rms);
  w.u64(ckpt.calibration.sample_count);
  w.str(ckpt.rng_state);
  w.u64(ckpt.teacher_next_index);
  w.u32(static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto &blob : ckpt.params) {
    w.str(blob.name);
    w.u32(static_cast<std::uint32_t>(blob.shape.size()));
    for (auto e : blob.shape) w.i64(e);
    w.f64s(blob.data);
  }
  w.u8(ckpt.optimizer.has_value() ? 1 : 0);
  if (ckpt.optimizer) {
    const auto &opt = *ckpt.optimizer;
    w.u64(opt.step);
    w.f64(opt.lr);
    w.f64(opt.beta1);
    w.f64(opt.beta2);
    w.f64(opt.epsilon);
    w.u32(static_cast<std::uint32_t>(opt.m.size()));
    for (std::size_t i = 0; i < opt.m.size(); ++i) {
      w.u64(opt.m[i].size());
      w.f64s(opt.m[i]);
      w.f64s(opt.v[i]);
    }
  }
  // Checksum everything after the checksum field.
  const auto &bytes = w.bytes();
  const std::uint64_t sum = fnv1a64(bytes.data() + kChecksumOffset + 8,
                                    bytes.size() - kChecksumOffset - 8);
  w.patch_u64(kChecksumOffset, sum);
  return w.bytes();
}

Checkpoint checkpoint_decode(const std::vector<char> &bytes) {
  if (bytes.size() < kChecksumOffset + 8) {
    throw FormatError("checkpoint: truncated header");
  }
  if (!std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw FormatError("checkpoint: bad magic");
  }
  ByteReader r(bytes);
  r.u32();  // past magic
  const std::uint32_t version = r.u32();
  if (version > kCheckpointVersion) {
    throw VersionError("checkpoint: file version " + std::to_string(version) +
                       " is newer than supported " +
                       std::to_string(kCheckpointVersion));
  }
  const std::uint64_t stored_sum = r.u64();
  const std::uint64_t actual_sum =
      fnv1a64(bytes.data() + kChecksumOffset + 8,
              bytes.size() - kChecksumOffset - 8);
  if (stored_sum != actual_sum) {
    throw FormatError("checkpoint: payload checksum mismatch (corrupt file)");
  }

  Checkpoint ckpt;
  ckpt.version = version;
  ckpt.config_digest = r.u64();
  ckpt.calibration.coefficient = r.f64();
  ckpt.calibration.source_rms = r.f64();
  ckpt.calibration.target_rms = r.f64();
  ckpt.calibration.sample_count = r.u64();
  ckpt.rng_state = r.str();
  ckpt.teacher_next_index = r.u64();
  const std::uint32_t nparams = r.u32();
  ckpt.params.reserve(nparams);
  for (std::uint32_t i = 0; i < nparams; ++i) {
    NamedBlob blob;
    blob.name = r.str();
    const std::uint32_t rank = r.u32();
    if (rank > 8) {
      throw FormatError("checkpoint: blob '" + blob.name +
                        "' has implausible rank " + std::to_string(rank));
    }
    blob.shape.resize(rank);
    std::int64_t numel = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      blob.shape[d] = r.i64();
      if (blob.shape[d] < 1) {
        throw FormatError("checkpoint: blob '" + blob.name +
                          "' has non-positive extent");
      }
      numel *= blob.shape[d];
    }
    blob.data = r.f64s(static_cast<std::size_t>(numel));
    ckpt.params.push_back(std::move(blob));
  }
  if (r.u8() != 0) {
    OptimizerBlobs opt;
    opt.step = r.u64();
    opt.lr = r.f64();
    opt.beta1 = r.f64();
    opt.beta2 = r.f64();
    opt.epsilon = r.f64();
    const std::uint32_t n = r.u32();
    opt.m.resize(n);
    opt.v.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint64_t len = r.u64();
      opt.m[i] = r.f64s(len);
      opt.v[i] = r.f64s(len);
    }
    ckpt.optimizer = std::move(opt);
  }
  if (!r.at_end()) {
    throw FormatError("checkpoint: " + std::to_string(r.remaining()) +
                      " trailing bytes");
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint &ckpt, const std::string &path) {
  write_file_bytes(path, checkpoint_encode(ckpt));
}

Checkpoint load_checkpoint(const std::string &path) {
  return checkpoint_decode(read_file_bytes(path));
}

bool verify_config_digest(const Checkpoint &ckpt, std::uint64_t expected,
                          bool strict) {
  if (ckpt.config_digest == expected) return true;
  if (strict) {
    throw ConfigError("checkpoint: config digest mismatch (file " +
                      std::to_string(ckpt.config_digest) + ", expected " +
                      std::to_string(expected) + ")");
  }
  return false;
}

std::vector<NamedBlob> blobs_from_params(const NamedParams &named) {
  std::vector<NamedBlob> out;
  out.reserve(named.size());
  for (const auto &[name, t] : named) {
    out.push_back(NamedBlob{name, t.shape(), t.value()});
  }
  return out;
}

void load_params_from_blobs(const NamedParams &named, const Checkpoint &ckpt) {
  for (const auto &[name, t] : named) {
    const NamedBlob *blob = ckpt.find(name);
    if (!blob) {
      throw FormatError("checkpoint: missing parameter '" + name + "'");
    }
    if (!same_shape(blob->shape, t.shape())) {
      throw DimensionError("checkpoint: parameter '" + name + "' has shape " +
                           shape_str(blob->shape) + ", model expects " +
                           shape_str(t.shape()));
    }
    Tensor tensor = t;
    tensor.mutable_value() = blob->data;
  }
}

}  // namespace ldgen
