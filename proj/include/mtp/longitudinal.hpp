#pragma once

#include "mtp/estimators.hpp"

namespace mtp {

// Resample units with replacement; ids are renumbered to keep them unique.
Panel resample_units(const Panel& panel, std::span<const int> unit_indices);

// Nonparametric unit bootstrap with percentile (2.5%, 97.5%) intervals.
// Replicate b draws its resample and its fold seed from the stream
// (seed, 2^32 + b). Degenerate replicates (singular normal equations) are
// dropped and counted; more than 5% dropped is an error.
BootstrapCi bootstrap_ci(const Panel& panel, const OrthogonalConfig& config, int replicates, std::uint64_t seed);

// Convenience: fit + attach bootstrap intervals (the default CI source for
// T >= 2; the sandwich is always emitted too).
EstimateReport estimate_longitudinal_with_bootstrap(const Panel& panel, const OrthogonalConfig& config,
                                                    int replicates, std::uint64_t bootstrap_seed);

} // namespace mtp
