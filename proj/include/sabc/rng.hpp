#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace sabc {

/// Seeded pseudo-random stream with deterministic splitting.
///
/// A child stream depends only on the parent's seed and the split keys, never
/// on how many draws the parent has made. Particle updates key their stream by
/// (sweep, particle index), so results do not depend on thread scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream split(std::uint64_t key) const;
  RngStream split(std::initializer_list<std::uint64_t> keys) const;

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  /// Draws an index with probability proportional to `weights`.
  std::size_t categorical(std::span<const double> weights);
  std::int64_t binomial(std::int64_t trials, double p);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

/// SplitMix64 finalizer, used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace sabc
