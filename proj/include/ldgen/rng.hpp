#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace ldgen {

// FNV-1a 64-bit. Used for config digests, payload checksums and derived seeds.
inline std::uint64_t fnv1a64(const void *data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto *p = static_cast<const unsigned char *>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string &s,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), seed);
}

// Mixes a base seed with a stream index so per-sample generators are
// independent of iteration order and thread count.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t buf[2] = {base, index};
  return fnv1a64(buf, sizeof(buf));
}

// mt19937_64 plus hand-rolled uniform/normal transforms. The standard pins
// the engine but not the distributions, so the transforms live here to keep
// streams reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe to feed into log().
  double uniform_pos() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller, two engine draws per variate, no cached spare.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n) via 128-bit multiply-shift.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  std::string state() const {
    std::ostringstream os;
    os << eng_;
    return os.str();
  }

  void set_state(const std::string &s) {
    std::istringstream is(s);
    is >> eng_;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ldgen
