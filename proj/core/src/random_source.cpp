#include "overage/random_source.hpp"

#include <cmath>

#include "overage/errors.hpp"

namespace overage {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RandomSource::uniform() {
  // 53 random bits mapped to the centre of their bin: never 0, never 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::exponential(double rate) {
  if (!(rate > 0.0)) throw ParameterError("exponential rate must be positive");
  return -std::log(uniform()) / rate;
}

}  // namespace overage
