#pragma once

#include <span>
#include <vector>

#include "mtp/basis.hpp"
#include "mtp/panel.hpp"
#include "mtp/policy.hpp"

namespace mtp {

// Parametric blip model gamma_t(h, a; psi) = -(g_t(h,a) - a) * s_t(h)^T psi_t.
// For a shift policy the factor is the constant delta_t; for threshold-floor
// it is (threshold - a)^+ so the blip vanishes whenever the policy leaves
// treatment unchanged, as the SNMM definition requires. psi stacks
// (psi_0, ..., psi_{T-1}).
struct BlipSpec {
  std::vector<LinearBasis> bases; // s_t over H_t; history-only terms

  int times() const { return static_cast<int>(bases.size()); }
  int dim(int t) const { return bases[t].dim(); }
  int total_dim() const;
  int offset(int t) const; // start of psi_t within the stacked psi

  void validate() const; // history-only bases, nonempty
};

// gamma with an explicit effective shift delta_eff = g_t(h,a) - a.
double blip_value(const BlipSpec& blip, int t, std::span<const double> h, double delta_eff,
                  std::span<const double> psi_t);

// gamma_t(h, a; psi) under a policy.
double blip_gamma(const BlipSpec& blip, const PolicySpec& policy, int t, std::span<const double> h, double a,
                  std::span<const double> psi);

// Lemma-1 transform: Y_k - sum_{j=t}^{k-1} gamma_j(H_j, A_j; psi).
double blip_down(const Panel& panel, int unit, const BlipSpec& blip, const PolicySpec& policy,
                 std::span<const double> psi, int t_from, int k_horizon);

} // namespace mtp
