#include "mtp/longitudinal.hpp"

#include <algorithm>
#include <cmath>

#include "mtp/errors.hpp"
#include "mtp/parallel.hpp"
#include "mtp/rng.hpp"

namespace mtp {

namespace {

double percentile(std::vector<double> sorted, double q) {
  const std::size_t n = sorted.size();
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= n) return sorted[n - 1];
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

} // namespace

Panel resample_units(const Panel& panel, std::span<const int> unit_indices) {
  Panel out;
  out.layout = panel.layout;
  const int m = static_cast<int>(unit_indices.size());
  out.unit_ids.reserve(m);
  for (int r = 0; r < m; ++r) out.unit_ids.push_back(std::to_string(r));

  out.steps.resize(panel.horizon());
  for (int t = 0; t < panel.horizon(); ++t) {
    const auto& src = panel.steps[t];
    auto& dst = out.steps[t];
    dst.covariates.resize(src.covariates.size());
    for (std::size_t c = 0; c < src.covariates.size(); ++c) {
      dst.covariates[c].resize(m);
      for (int r = 0; r < m; ++r) dst.covariates[c][r] = src.covariates[c][unit_indices[r]];
    }
    dst.treatment.resize(m);
    for (int r = 0; r < m; ++r) dst.treatment[r] = src.treatment[unit_indices[r]];
  }
  out.outcomes.resize(panel.outcomes.size());
  for (std::size_t k = 0; k < panel.outcomes.size(); ++k) {
    if (panel.outcomes[k].empty()) continue;
    out.outcomes[k].resize(m);
    for (int r = 0; r < m; ++r) out.outcomes[k][r] = panel.outcomes[k][unit_indices[r]];
  }
  return out;
}

BootstrapCi bootstrap_ci(const Panel& panel, const OrthogonalConfig& config, int replicates, std::uint64_t seed) {
  if (replicates < 100) throw ConfigError("bootstrap needs at least 100 replicates");
  const int n = panel.n_units();
  const int d = config.blip.total_dim();

  std::vector<std::optional<Eigen::VectorXd>> draws(replicates);
  parallel_for(replicates, [&](int b) {
    Rng rng = Rng::stream(seed, (1ULL << 32) + static_cast<std::uint64_t>(b));
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    OrthogonalConfig cfg = config;
    cfg.seed = rng.next_u64();
    try {
      const Panel resampled = resample_units(panel, idx);
      const EstimateReport rep =
          panel.layout == Layout::point ? estimate_point(resampled, cfg) : estimate_longitudinal(resampled, cfg);
      draws[b] = rep.psi;
    } catch (const NumericError&) {
      draws[b] = std::nullopt; // degenerate resample: dropped and counted
    }
  });

  BootstrapCi ci;
  ci.replicates = replicates;
  std::vector<std::vector<double>> per_comp(d);
  for (const auto& psi : draws) {
    if (!psi) {
      ++ci.dropped;
      continue;
    }
    for (int j = 0; j < d; ++j) per_comp[j].push_back((*psi)[j]);
  }
  if (ci.dropped > 0.05 * replicates)
    throw NumericError("bootstrap: " + std::to_string(ci.dropped) + " of " + std::to_string(replicates) +
                       " replicates degenerate (more than 5%)");

  ci.lo.resize(d);
  ci.hi.resize(d);
  ci.sd.resize(d);
  const int kept = replicates - ci.dropped;
  for (int j = 0; j < d; ++j) {
    std::sort(per_comp[j].begin(), per_comp[j].end());
    ci.lo[j] = percentile(per_comp[j], 0.025);
    ci.hi[j] = percentile(per_comp[j], 0.975);
    double mean = 0.0;
    for (double x : per_comp[j]) mean += x;
    mean /= kept;
    double ss = 0.0;
    for (double x : per_comp[j]) ss += (x - mean) * (x - mean);
    ci.sd[j] = kept > 1 ? std::sqrt(ss / (kept - 1)) : 0.0;
  }
  return ci;
}

EstimateReport estimate_longitudinal_with_bootstrap(const Panel& panel, const OrthogonalConfig& config,
                                                    int replicates, std::uint64_t bootstrap_seed) {
  EstimateReport report = estimate_longitudinal(panel, config);
  report.bootstrap = bootstrap_ci(panel, config, replicates, bootstrap_seed);
  return report;
}

} // namespace mtp
