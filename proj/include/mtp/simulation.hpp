#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "mtp/estimators.hpp"
#include "mtp/panel.hpp"
#include "mtp/parallel_trends.hpp"
#include "mtp/policy.hpp"

namespace mtp {

// Point-exposure DGP: L ~ N(0, sd_l^2); A | L ~ N(theta0 + theta1 L +
// theta2 L^2, sd_a^2); Y = xi0 + xi1 L + xi2 L^2 + (beta0 + beta1 L) A + eps.
// Blip truth under a shift by delta: psi* = beta.
struct PointDgpParams {
  std::array<double, 3> theta{0.2, 0.8, -0.4};
  std::array<double, 3> xi{0.3, 0.5, 0.2};
  std::array<double, 2> beta{0.8, -0.6};
  double sd_l = 1.0, sd_a = 1.0, sd_y = 1.0;
  double delta = 0.5;
};

Panel gen_point_dgp(const PointDgpParams& params, int n, std::uint64_t seed);

// Two-period DGP calibrated so both blip identities hold by construction.
// beta1 = (beta10, beta1L1, beta1L0); A0 | L0 ~ N(a0_slope * L0, sd_a0^2).
struct LongDgpParams {
  double delta0 = 0.4, delta1 = 0.5;
  std::array<double, 2> psi1{0.5, 0.3};
  std::array<double, 3> rho{0.1, 0.6, 0.8};
  std::array<double, 2> kappa{0.2, 0.35};
  std::array<double, 3> beta1{0.25, 0.5, 0.2};
  double a0_slope = 0.4;
  double sd_a0 = 1.0, sd_l1 = 0.5, sd_a1 = 1.0, sd_y = 1.0;
};

Panel gen_longitudinal_dgp(const LongDgpParams& params, int n, std::uint64_t seed);

// psi00 = rho2 beta1L1 + rho2 psi11 (kappa0 + delta1); psi01 = rho2 psi11 kappa2.
std::array<double, 2> calibrate_psi0(const LongDgpParams& params);

// Full truth vector (psi00, psi01, psi10, psi11).
Eigen::VectorXd longitudinal_truth(const LongDgpParams& params);

// Parallel-trends DGPs with an additive unit confounder U that cancels in
// outcome differences. Confounding strength scales U's loading on treatment;
// at 0 exchangeability holds as well.
struct PtPointDgpParams {
  std::array<double, 2> tau{0.7, -0.3};      // blip truth for a shift policy
  std::array<double, 2> alpha0{0.3, 0.4};    // Y0 = a + b L + U + e
  std::array<double, 2> alpha1{0.5, 0.25};   // Y1 baseline
  std::array<double, 2> theta{0.2, 0.6};     // A mean in L
  double confounding = 1.0;                  // c in c (1 + interaction L) U
  double interaction = 0.6;
  double delta = 0.5;
};

struct PtTwoPeriodDgpParams {
  double delta0 = 0.4, delta1 = 0.5;
  double a0_slope = 0.5;                      // A0 = a0_slope L0 + c U + e
  std::array<double, 2> alpha0{0.3, 0.4};     // Y0
  std::array<double, 2> alpha1{0.5, 0.25};    // Y1 baseline
  std::array<double, 2> tau01{0.7, -0.3};     // Y1 += (tau0 + tau1 L0) A0
  std::array<double, 3> rho{0.1, 0.6, 0.8};   // L1 = r0 + r1 L0 + r2 A0 + nu
  std::array<double, 2> kappa{0.2, 0.35};     // A1 = k0 + k1 L0 + e
  std::array<double, 3> alpha2{0.4, 0.3, 0.45}; // Y2 = a20 + a21 L0 + a22 L1 + ...
  std::array<double, 2> tau12{0.6, 0.25};     // Y2 += (t0 + t1 L1) A1
  double beta02 = 0.35;                       // Y2 += beta02 A0
  double confounding = 1.0;
  double sd_l1 = 0.5;
};

// Documented truth emitted alongside PT panels so tests never hard-code it.
struct PtTruth {
  std::vector<std::string> names;
  Eigen::VectorXd psi;
};

Panel gen_pt_point_dgp(const PtPointDgpParams& params, int n, std::uint64_t seed, PtTruth* truth = nullptr);
Panel gen_pt_two_period_dgp(const PtTwoPeriodDgpParams& params, int n, std::uint64_t seed, PtTruth* truth = nullptr);

enum class PtDgpKind { point, two_period };
Panel gen_pt_dgp(PtDgpKind kind, double confounding, int n, std::uint64_t seed, PtTruth* truth = nullptr);

// Relabel a pt panel as its exchangeability counterpart (drops pre-terminal
// outcomes); used for estimator contrasts on identical draws.
Panel to_exchangeability_view(const Panel& panel);

// Built-in structural models the g-formula oracle can forward-simulate.
struct DgpSpec {
  enum class Family { point, longitudinal, pt_point, pt_two_period };
  Family family = Family::point;
  PointDgpParams point;
  LongDgpParams longitudinal;
  PtPointDgpParams pt_point;
  PtTwoPeriodDgpParams pt_two_period;

  static DgpSpec make_point(const PointDgpParams& p = {});
  static DgpSpec make_longitudinal(const LongDgpParams& p = {});
  static DgpSpec make_pt_point(const PtPointDgpParams& p = {});
  static DgpSpec make_pt_two_period(const PtTwoPeriodDgpParams& p = {});
};

struct OracleResult {
  double mean = 0.0;
  double se = 0.0;
  long n_mc = 0;
};

// Brute-force counterfactual mean E[Y(A-bar_{m-1}, g-underbar_m)] of the
// terminal outcome: natural treatments before policy_start, the policy
// enforced on the natural draw from policy_start onward. policy_start = 0
// gives E[Y(g)]; policy_start >= T gives the observed law.
OracleResult gformula_oracle(const DgpSpec& dgp, const PolicySpec& policy, int policy_start, long n_mc,
                             std::uint64_t seed);

// Default estimator configurations for the built-in DGPs (correctly
// specified parametric nuisances; shared by the harness, the CLI and tests).
OrthogonalConfig default_point_design(const PointDgpParams& params, int folds, std::uint64_t seed);
OrthogonalConfig default_longitudinal_design(const LongDgpParams& params, int folds, std::uint64_t seed);
OutcomeRegressionConfig default_point_or_design(const PointDgpParams& params, bool omit_l2 = false);
PtPointConfig default_pt_point_design(const PtPointDgpParams& params);
PtTwoPeriodConfig default_pt_two_period_design(const PtTwoPeriodDgpParams& params);

} // namespace mtp
