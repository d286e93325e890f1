#include "sabc/rng.hpp"

#include <numeric>
#include <stdexcept>

namespace sabc {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

RngStream RngStream::split(std::uint64_t key) const {
  return RngStream(mix_seed(seed_ ^ mix_seed(key + 0x632be59bd9b4e019ULL)));
}

RngStream RngStream::split(std::initializer_list<std::uint64_t> keys) const {
  std::uint64_t s = seed_;
  for (auto k : keys) s = mix_seed(s ^ mix_seed(k + 0x632be59bd9b4e019ULL));
  return RngStream(s);
}

double RngStream::uniform() { return unif_(engine_); }

double RngStream::normal() { return norm_(engine_); }

std::size_t RngStream::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("index: empty range");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

std::size_t RngStream::categorical(std::span<const double> weights) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("categorical: weights must have positive sum");
  double r = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    r -= weights[i];
    if (r < 0.0) return i;
  }
  // r can survive the loop by rounding; fall back to the last positive weight
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return weights.size() - 1;
}

std::int64_t RngStream::binomial(std::int64_t trials, double p) {
  return std::binomial_distribution<std::int64_t>(trials, p)(engine_);
}

}  // namespace sabc
