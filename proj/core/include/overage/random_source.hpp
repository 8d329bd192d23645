#pragma once

#include <cstdint>
#include <random>

namespace overage {

/// Seeded 64-bit random stream. Identical (seed, stream_id) pairs reproduce the
/// same draws; distinct stream ids are used for independent replications.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double exponential(double rate);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace overage
