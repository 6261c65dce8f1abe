#pragma once

#include <functional>
#include <optional>
#include <span>

#include "mtp/blip.hpp"
#include "mtp/folds.hpp"
#include "mtp/learner.hpp"
#include "mtp/nuisance.hpp"
#include "mtp/panel.hpp"
#include "mtp/policy.hpp"
#include "mtp/report.hpp"

namespace mtp {

// Configuration for the cross-fitted Neyman-orthogonal estimators (point
// exposure and longitudinal; the point case is the T = 1 instance of the
// same engine, so the two agree bitwise on T = 1 panels).
struct OrthogonalConfig {
  PolicySpec policy = PolicySpec::shift(std::vector<double>{0.5});
  BlipSpec blip;
  std::vector<LearnerConfig> mu_learners; // per time
  std::vector<LearnerConfig> m_learners;  // per time; unused when ratio_override is set
  int folds = 5;
  std::uint64_t seed = 0;
  std::vector<double> ridge; // normal-equation ridge per time; empty = 0 with automatic fallback
  ClipBounds clip;
  // User-supplied density ratio r(t, a, h) replacing the Normal working
  // model (the generic ratio branch of the algorithm).
  std::function<double(int t, double a, std::span<const double> h)> ratio_override;
};

// Injected nuisances for oracle runs and perturbation studies: evaluated
// directly, no cross-fitting.
struct OracleNuisance {
  std::function<double(double a, std::span<const double> h)> mu;
  std::function<double(std::span<const double> h)> m;
  double sigma = 1.0;
  std::function<double(double a, std::span<const double> h)> ratio; // optional, replaces (m, sigma)
};

EstimateReport estimate_point(const Panel& panel, const OrthogonalConfig& config);
EstimateReport estimate_longitudinal(const Panel& panel, const OrthogonalConfig& config);

// Same moment equations at fixed injected nuisances.
EstimateReport estimate_orthogonal_with_nuisances(const Panel& panel, const OrthogonalConfig& config,
                                                  std::span<const OracleNuisance> nuisances);

// The Theorem-1 score phi(O; psi, eta) for one observation.
Eigen::VectorXd score_point(double y, double a, std::span<const double> h, std::span<const double> psi, double delta,
                            const LinearBasis& s_basis, const OracleNuisance& nuisance, const ClipBounds& clip);

// Backward-recursion pseudo-outcome update: V_{t,i} = mu_t(A_{t,i} + delta_t,
// H_{t,i}) with the model of the fold holding unit i out.
std::vector<double> backward_recursion_step(int t, std::span<const RegressionFit> mu_per_fold, const FoldPlan& folds,
                                            const Panel& panel, double delta_t);

// Non-orthogonal outcome-regression estimator (stacked estimating equations
// with b = dmu/dbeta, the least-squares score).
struct OutcomeRegressionConfig {
  PolicySpec policy = PolicySpec::shift(std::vector<double>{0.5});
  BlipSpec blip;
  LinearBasis mu_basis;
  // Optional additive perturbation of the fitted mu inside the psi block
  // (used by the orthogonality contrast suite).
  std::function<double(double a, std::span<const double> h)> mu_perturbation;
};

EstimateReport estimate_point_outcome_regression(const Panel& panel, const OutcomeRegressionConfig& config,
                                                 Eigen::VectorXd* beta_out = nullptr);

} // namespace mtp
