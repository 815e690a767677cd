#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "ldgen/errors.hpp"

namespace ldgen {

// Little-endian buffer writer/reader for the LDFS and LDGN binary formats.
// The host is assumed little-endian; payloads are defined LE on disk.

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { raw(&v, sizeof(v)); }
  void u64(std::uint64_t v) { raw(&v, sizeof(v)); }
  void i64(std::int64_t v) { raw(&v, sizeof(v)); }
  void f64(double v) { raw(&v, sizeof(v)); }

  void f64s(const std::vector<double> &v) {
    raw(v.data(), v.size() * sizeof(double));
  }

  void str(const std::string &s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }

  void raw(const void *p, std::size_t n) {
    const char *c = static_cast<const char *>(p);
    buf_.insert(buf_.end(), c, c + n);
  }

  // Overwrites bytes at an already-written offset (checksum patching).
  void patch_u64(std::size_t offset, std::uint64_t v) {
    std::memcpy(buf_.data() + offset, &v, sizeof(v));
  }

  std::size_t size() const { return buf_.size(); }
  const std::vector<char> &bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class ByteReader {
 public:
  ByteReader(const char *data, std::size_t size) : data_(data), size_(size) {}
  explicit ByteReader(const std::vector<char> &v)
      : ByteReader(v.data(), v.size()) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

  std::uint32_t u32() {
    std::uint32_t v;
    std::memcpy(&v, take(sizeof(v)), sizeof(v));
    return v;
  }

  std::uint64_t u64() {
    std::uint64_t v;
    std::memcpy(&v, take(sizeof(v)), sizeof(v));
    return v;
  }

  std::int64_t i64() {
    std::int64_t v;
    std::memcpy(&v, take(sizeof(v)), sizeof(v));
    return v;
  }

  double f64() {
    double v;
    std::memcpy(&v, take(sizeof(v)), sizeof(v));
    return v;
  }

  std::vector<double> f64s(std::size_t count) {
    std::vector<double> v(count);
    std::memcpy(v.data(), take(count * sizeof(double)),
                count * sizeof(double));
    return v;
  }

  std::string str() {
    const std::uint32_t n = u32();
    const char *p = take(n);
    return std::string(p, n);
  }

  std::size_t remaining() const { return size_ - pos_; }
  bool at_end() const { return pos_ == size_; }
  std::size_t pos() const { return pos_; }

 private:
  const char *take(std::size_t n) {
    if (pos_ + n > size_) {
      throw FormatError("truncated input: need " + std::to_string(n) +
                        " bytes at offset " + std::to_string(pos_) +
                        ", have " + std::to_string(size_ - pos_));
    }
    const char *p = data_ + pos_;
    pos_ += n;
    return p;
  }

  const char *data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::vector<char> read_file_bytes(const std::string &path);
void write_file_bytes(const std::string &path, const std::vector<char> &bytes);

}  // namespace ldgen
