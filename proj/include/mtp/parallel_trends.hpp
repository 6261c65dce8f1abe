#pragma once

#include <optional>

#include "mtp/blip.hpp"
#include "mtp/learner.hpp"
#include "mtp/panel.hpp"
#include "mtp/policy.hpp"
#include "mtp/report.hpp"

namespace mtp {

// Fitted trend models. For the point case only d01 is populated; the
// two-period case carries d01 = E[Y1-Y0|L0,A0], d12 = E[Y2-Y1|H1,A1] and the
// composed pullback regression d02, whose fit at (L0, g(L0,A0)) estimates
// mu^d_02(g(l0,a0), l0).
struct TrendFit {
  LinearBasis basis01, basis12, basis02;
  Eigen::VectorXd beta01, beta12, beta02;
};

// Point-exposure difference estimator: parametric least squares for
// mu^d(l,a) = E[Y1-Y0|L,A], then the psi moment
// q(A,L){Y1-Y0-gamma(psi)-mu^d(L,g(A,L))} = 0, stacked-sandwich variance.
// No cross-fitting anywhere on the PT path.
struct PtPointConfig {
  PolicySpec policy = PolicySpec::shift(std::vector<double>{0.5});
  BlipSpec blip;       // single basis s(L0)
  LinearBasis mu_d_basis;
};

EstimateReport estimate_pt_point(const Panel& panel, const PtPointConfig& config, TrendFit* trend_out = nullptr);

// Two-period stacked estimator. Blip bases come in display order
// (s01 over L0, s12 over H1, s02 over L0); psi is reported stacked the same
// way. Individual zero shifts are allowed, the all-zero policy is not.
struct PtTwoPeriodConfig {
  PolicySpec policy = PolicySpec::shift(std::vector<double>{0.4, 0.5});
  LinearBasis s01, s12, s02;
  LinearBasis mu01_basis, mu12_basis, mu02_basis;
};

EstimateReport estimate_pt_two_period(const Panel& panel, const PtTwoPeriodConfig& config,
                                      TrendFit* trend_out = nullptr);

} // namespace mtp
