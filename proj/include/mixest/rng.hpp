#ifndef MIXEST_RNG_HPP
#define MIXEST_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace mixest {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent 64-bit stream id from a master seed, a tag, and
/// scenario indices. The result depends only on the arguments, never on
/// execution order, so replicates are reproducible under any scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t k = 0, std::uint64_t n = 0,
                                 std::uint64_t l = 0) {
  std::uint64_t state = master;
  splitmix64(state);
  for (char c : tag) {
    state ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    splitmix64(state);
  }
  state ^= k;
  splitmix64(state);
  state ^= n;
  splitmix64(state);
  state ^= l;
  return splitmix64(state);
}

/// Seeded random stream. Not shareable across workers; derive one per task.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via the polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  /// Derives a child stream; deterministic in (this stream's seed, index).
  RngStream child(std::uint64_t index) const {
    std::uint64_t state = seed_;
    splitmix64(state);
    state ^= index;
    return RngStream(splitmix64(state));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mixest

#endif
