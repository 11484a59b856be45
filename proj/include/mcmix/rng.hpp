#pragma once

#include <cstdint>
#include <random>

namespace mcmix {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `stream` of master seed `master`.
///
/// Streams are keyed by an index (restart number, trial number, chunk number),
/// never by execution order, so anything seeded this way gives the same
/// result regardless of how work is scheduled across threads.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seedable generator with explicit stream semantics.
///
/// `Rng(seed)` and `Rng(seed, stream)` are both deterministic; `split(i)`
/// returns the generator for child stream i without advancing this one.
class Rng {
public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::uint64_t stream);

  Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }
  std::uint64_t seed() const { return seed_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  /// Uniform on [0, 1).
  double uniform();
  /// Exponential with unit rate.
  double exponential();
  /// Standard normal.
  double normal();

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace mcmix
