#include "mtp/blip.hpp"

#include "mtp/errors.hpp"

namespace mtp {

int BlipSpec::total_dim() const {
  int d = 0;
  for (const auto& b : bases) d += b.dim();
  return d;
}

int BlipSpec::offset(int t) const {
  int off = 0;
  for (int j = 0; j < t; ++j) off += bases[j].dim();
  return off;
}

void BlipSpec::validate() const {
  if (bases.empty()) throw ConfigError("blip spec has no bases");
  for (int t = 0; t < times(); ++t) {
    if (bases[t].empty()) throw ConfigError("blip basis at time " + std::to_string(t) + " is empty");
    if (bases[t].uses_treatment())
      throw ConfigError("blip basis at time " + std::to_string(t) + " must depend on the history only");
  }
}

double blip_value(const BlipSpec& blip, int t, std::span<const double> h, double delta_eff,
                  std::span<const double> psi_t) {
  const LinearBasis& s = blip.bases.at(t);
  if (static_cast<int>(psi_t.size()) != s.dim())
    throw ConfigError("psi_" + std::to_string(t) + " has dimension " + std::to_string(psi_t.size()) +
                      ", basis wants " + std::to_string(s.dim()));
  double dot = 0.0;
  Eigen::VectorXd sv = s.eval(0.0, h);
  for (int i = 0; i < s.dim(); ++i) dot += sv[i] * psi_t[i];
  return -delta_eff * dot;
}

double blip_gamma(const BlipSpec& blip, const PolicySpec& policy, int t, std::span<const double> h, double a,
                  std::span<const double> psi) {
  const double delta_eff = policy.apply(t, h, a) - a;
  const int off = blip.offset(t);
  const int d = blip.dim(t);
  return blip_value(blip, t, h, delta_eff, psi.subspan(off, d));
}

double blip_down(const Panel& panel, int unit, const BlipSpec& blip, const PolicySpec& policy,
                 std::span<const double> psi, int t_from, int k_horizon) {
  if (k_horizon < t_from || k_horizon > panel.horizon())
    throw ConfigError("blip_down horizon " + std::to_string(k_horizon) + " out of range");
  double y = panel.outcome(k_horizon)[unit];
  for (int j = t_from; j < k_horizon; ++j) {
    const std::vector<double> h = panel.history(j, unit);
    const double g = blip_gamma(blip, policy, j, h, panel.steps[j].treatment[unit], psi);
    // keep psi = 0 an exact identity on outcomes, signed zeros included
    if (g != 0.0) y -= g;
  }
  return y;
}

} // namespace mtp
