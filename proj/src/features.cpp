#include "ldgen/features.hpp"

#include <cmath>
#include <fstream>

#include "ldgen/ops.hpp"
#include "ldgen/serialize.hpp"

namespace ldgen {

const char *feature_space_name(FeatureSpace s) {
  switch (s) {
    case FeatureSpace::kLlm: return "llm";
    case FeatureSpace::kT5: return "t5";
    case FeatureSpace::kAligned: return "aligned";
    case FeatureSpace::kRefined: return "refined";
  }
  return "?";
}

FeatureSequence FeatureSequence::validated(Tensor tokens,
                                           std::vector<std::uint8_t> mask,
                                           FeatureSpace space) {
  if (tokens.shape().size() != 2) {
    throw DimensionError("feature sequence: tokens must be [L x D], got " +
                         shape_str(tokens.shape()));
  }
  if (static_cast<std::int64_t>(mask.size()) != tokens.rows()) {
    throw DimensionError("feature sequence: mask length " +
                         std::to_string(mask.size()) + " vs " +
                         std::to_string(tokens.rows()) + " rows");
  }
  bool any = false;
  for (auto m : mask) any = any || (m != 0);
  if (!any) throw MaskError("feature sequence: every row masked");
  for (double v : tokens.value()) {
    if (!std::isfinite(v)) {
      throw DataError("feature sequence: non-finite value");
    }
  }
  return FeatureSequence{std::move(tokens), std::move(mask), space};
}

FeatureSequence FeatureSequence::full(Tensor tokens, FeatureSpace space) {
  std::vector<std::uint8_t> mask(tokens.rows(), 1);
  return FeatureSequence{std::move(tokens), std::move(mask), space};
}

double masked_rms(const FeatureSequence &seq) {
  const auto cols = seq.width();
  double acc = 0.0;
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < seq.length(); ++i) {
    if (!seq.mask[i]) continue;
    const double *row = seq.tokens.value().data() + i * cols;
    for (std::int64_t j = 0; j < cols; ++j) acc += row[j] * row[j];
    count += cols;
  }
  if (count == 0) throw MaskError("masked_rms: every row masked");
  return std::sqrt(acc / static_cast<double>(count));
}

namespace {

// Sum of squares and entry count over unmasked rows, for pooled statistics.
void accumulate_sq(const FeatureSequence &seq, double &acc,
                   std::uint64_t &count) {
  const auto cols = seq.width();
  for (std::int64_t i = 0; i < seq.length(); ++i) {
    if (!seq.mask[i]) continue;
    const double *row = seq.tokens.value().data() + i * cols;
    for (std::int64_t j = 0; j < cols; ++j) acc += row[j] * row[j];
    count += static_cast<std::uint64_t>(cols);
  }
}

}  // namespace

ScaleCalibration calibrate_scale_coefficient(
    const std::vector<FeatureSequence> &llm_batch,
    const std::vector<FeatureSequence> &t5_batch) {
  if (llm_batch.empty() || t5_batch.empty()) {
    throw DataError("calibrate: empty batch");
  }
  double src_acc = 0.0, tgt_acc = 0.0;
  std::uint64_t src_n = 0, tgt_n = 0;
  for (const auto &s : llm_batch) accumulate_sq(s, src_acc, src_n);
  for (const auto &s : t5_batch) accumulate_sq(s, tgt_acc, tgt_n);
  const double src_rms = std::sqrt(src_acc / static_cast<double>(src_n));
  const double tgt_rms = std::sqrt(tgt_acc / static_cast<double>(tgt_n));
  if (!(src_rms > 0.0)) {
    throw DataError("calibrate: source RMS is zero");
  }
  ScaleCalibration c;
  c.source_rms = src_rms;
  c.target_rms = tgt_rms;
  c.coefficient = tgt_rms / src_rms;
  c.sample_count = static_cast<std::uint64_t>(llm_batch.size());
  return c;
}

FeatureSequence scale_features(const FeatureSequence &seq,
                               const ScaleCalibration &calib) {
  if (seq.space != FeatureSpace::kLlm) {
    throw SpaceError(std::string("scale_features: expected llm input, got ") +
                     feature_space_name(seq.space));
  }
  FeatureSequence out;
  out.tokens = mul_const(seq.tokens, calib.coefficient);
  out.mask = seq.mask;
  out.space = seq.space;
  return out;
}

std::vector<char> ldfs_encode(const std::vector<FeatureSequence> &batch) {
  ByteWriter w;
  w.raw("LDFS", 4);
  w.u32(kLdfsVersion);
  for (const auto &seq : batch) {
    const auto rows = seq.length(), cols = seq.width();
    w.u32(static_cast<std::uint32_t>(rows));
    w.u32(static_cast<std::uint32_t>(cols));
    w.u8(static_cast<std::uint8_t>(seq.space));
    std::vector<std::uint8_t> bits((rows + 7) / 8, 0);
    for (std::int64_t i = 0; i < rows; ++i) {
      if (seq.mask[i]) bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    w.raw(bits.data(), bits.size());
    w.f64s(seq.tokens.value());
  }
  return w.bytes();
}

std::vector<FeatureSequence> ldfs_decode(const std::vector<char> &bytes) {
  ByteReader r(bytes);
  char magic[4];
  if (r.remaining() < 4) throw FormatError("LDFS: truncated header");
  magic[0] = static_cast<char>(r.u8());
  magic[1] = static_cast<char>(r.u8());
  magic[2] = static_cast<char>(r.u8());
  magic[3] = static_cast<char>(r.u8());
  if (std::string(magic, 4) != "LDFS") {
    throw FormatError("LDFS: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version > kLdfsVersion) {
    throw VersionError("LDFS: file version " + std::to_string(version) +
                       " is newer than supported " +
                       std::to_string(kLdfsVersion));
  }
  std::vector<FeatureSequence> batch;
  while (!r.at_end()) {
    const std::int64_t rows = r.u32();
    const std::int64_t cols = r.u32();
    const std::uint8_t tag = r.u8();
    if (rows < 1 || cols < 1) {
      throw FormatError("LDFS: record " + std::to_string(batch.size()) +
                        " has empty shape");
    }
    if (tag > static_cast<std::uint8_t>(FeatureSpace::kRefined)) {
      throw FormatError("LDFS: record " + std::to_string(batch.size()) +
                        " has unknown space tag " + std::to_string(tag));
    }
    std::vector<std::uint8_t> mask(rows, 0);
    const std::int64_t nbytes = (rows + 7) / 8;
    for (std::int64_t b = 0; b < nbytes; ++b) {
      const std::uint8_t byte = r.u8();
      for (std::int64_t k = 0; k < 8 && b * 8 + k < rows; ++k) {
        mask[b * 8 + k] = (byte >> k) & 1u;
      }
    }
    std::vector<double> data = r.f64s(static_cast<std::size_t>(rows * cols));
    batch.push_back(FeatureSequence::validated(
        Tensor::from_data({rows, cols}, std::move(data)), std::move(mask),
        static_cast<FeatureSpace>(tag)));
  }
  return batch;
}

void save_ldfs(const std::string &path,
               const std::vector<FeatureSequence> &batch) {
  write_file_bytes(path, ldfs_encode(batch));
}

std::vector<FeatureSequence> load_ldfs(const std::string &path) {
  return ldfs_decode(read_file_bytes(path));
}

std::vector<char> read_file_bytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path);
  return bytes;
}

void write_file_bytes(const std::string &path,
                      const std::vector<char> &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace ldgen
