#pragma once

#include <cstdint>

namespace mtp {

// Quantile function of the standard normal (Wichura's AS 241, double precision).
double inverse_normal_cdf(double p);

// Counter-style splitmix64 generator. Streams are derived by hashing
// (seed, stream_id), so replicate r of a run with base seed s can use
// Rng::stream(s, r) and is independent of every other replicate.
// Normal variates come from the inverse CDF applied to a 53-bit uniform,
// which keeps the mapping documented and reproducible across platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1).
  double next_uniform();

  // Standard normal via inverse-CDF transform.
  double next_normal();

  double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound);

private:
  std::uint64_t state_;
};

} // namespace mtp
