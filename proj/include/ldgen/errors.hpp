#pragma once

#include <stdexcept>
#include <string>

namespace ldgen {

// Shape or width disagreement between operands.
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string &msg) : std::runtime_error(msg) {}
};

// Every position of a required mask is invalid.
struct MaskError : std::runtime_error {
  explicit MaskError(const std::string &msg) : std::runtime_error(msg) {}
};

// A FeatureSequence arrived tagged with the wrong source space.
struct SpaceError : std::runtime_error {
  explicit SpaceError(const std::string &msg) : std::runtime_error(msg) {}
};

// Loss became non-finite during training; last good checkpoint was kept.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string &msg) : std::runtime_error(msg) {}
};

// A requires-grad parameter had no populated gradient.
struct GradError : std::runtime_error {
  explicit GradError(const std::string &msg) : std::runtime_error(msg) {}
};

// Bad magic, truncation, checksum mismatch or other on-disk damage.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string &msg) : std::runtime_error(msg) {}
};

// File was written by a newer format revision than this binary reads.
struct VersionError : std::runtime_error {
  explicit VersionError(const std::string &msg) : std::runtime_error(msg) {}
};

// Invalid configuration value or section.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

// Structured input (corpus record, template, dataset) failed validation.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string &msg) : std::runtime_error(msg) {}
};

// Dataset content is inconsistent with what the operation expects.
struct DataError : std::runtime_error {
  explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string &msg) : std::runtime_error(msg) {}
};

}  // namespace ldgen
