#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "poem/vector.hpp"

namespace poem {

/// Seeded random stream. Sub-streams are derived from (seed, stream id) through
/// std::seed_seq, so replication r of an experiment never depends on how many
/// draws replication r-1 consumed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : RngStream(seed, 0, 0) {}

  /// Independent sub-stream keyed by `stream_id`.
  [[nodiscard]] RngStream derive(std::uint64_t stream_id) const {
    return RngStream(seed_, stream_id, depth_ + 1, path_hash_);
  }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double normal() { return normal_(engine_); }

  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t depth, std::uint64_t parent = 0)
      : seed_(seed), depth_(depth), path_hash_(mix(parent ^ mix(stream_id + depth))) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path_hash_), static_cast<std::uint32_t>(path_hash_ >> 32),
                      depth};
    engine_.seed(seq);
  }

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint32_t depth_;
  std::uint64_t path_hash_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Uniform direction on the unit sphere S^{d-1}: a normalized Gaussian draw.
/// An all-zero Gaussian draw is rejected and redrawn.
inline Vector sample_unit_sphere(RngStream& rng, std::size_t d) {
  if (d == 0) throw std::invalid_argument("sphere dimension must be >= 1");
  Vector v(d);
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) v[i] = rng.normal();
    const double n = norm(v);
    if (n > 0.0 && std::isfinite(n)) {
      for (double& c : v) c /= n;  // division keeps d = 1 draws exactly +-1
      return v;
    }
  }
}

/// Uniform point in the unit ball: sphere direction scaled by U^{1/d}.
inline Vector sample_unit_ball(RngStream& rng, std::size_t d) {
  if (d == 0) throw std::invalid_argument("ball dimension must be >= 1");
  Vector v = sample_unit_sphere(rng, d);
  v *= std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
  return v;
}

inline std::size_t sample_uniform_index(RngStream& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("index range must be nonempty");
  return rng.uniform_index(n);
}

}  // namespace poem
