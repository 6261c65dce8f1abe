#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtp/nuisance.hpp"

namespace mtp {

struct BootstrapCi {
  int replicates = 0;
  int dropped = 0;
  Eigen::VectorXd lo, hi, sd;
};

struct Diagnostics {
  ClipCounter ratio;                 // pre-clip extremes + clip counts
  std::vector<int> fold_sizes;
  std::vector<double> ridge_used;    // normal-equation ridge per time (0 = none)
  std::vector<double> nuisance_ridge; // max least-squares fallback ridge per time
};

// Estimation output shared by every estimator in the library.
struct EstimateReport {
  std::vector<std::string> component_names;
  Eigen::VectorXd psi;
  Eigen::MatrixXd vcov;     // sandwich, symmetric PSD
  Eigen::VectorXd se;
  Eigen::VectorXd ci_lo, ci_hi; // 95% Wald
  Eigen::MatrixXd jacobian; // G
  Eigen::MatrixXd influence; // n x d, IF_i = G^{-1} phi_i
  std::optional<BootstrapCi> bootstrap;
  Diagnostics diagnostics;
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(psi.size()); }
};

// V = Var_n(G^{-1} phi_i) / n, symmetrized. Also returns the influence rows
// when a destination is given.
Eigen::MatrixXd sandwich_variance(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& jacobian,
                                  Eigen::MatrixXd* influence_out = nullptr);

// Fills se / ci from psi and vcov.
void finalize_wald(EstimateReport& report);

} // namespace mtp
