#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mtp/basis.hpp"

namespace mtp {

struct GbtOptions {
  int trees = 200;
  int depth = 3;
  double learning_rate = 0.1;
  int min_leaf = 10;
};

// Conditional-mean learner configuration. Least squares on a declared basis
// is the default; gradient-boosted trees are an optional drop-in honoring
// the same predict contract (and stay off the acceptance path).
struct LearnerConfig {
  enum class Kind { least_squares, boosted_trees };
  Kind kind = Kind::least_squares;
  LinearBasis basis; // least-squares features; boosted trees use raw (a, h)
  GbtOptions gbt;

  static LearnerConfig least_squares(LinearBasis basis) {
    LearnerConfig c;
    c.basis = std::move(basis);
    return c;
  }
};

namespace detail {
struct GbtModel;
}

// A fitted conditional mean m(a, h). Immutable, cheap to copy via shared tree
// storage.
class RegressionFit {
public:
  RegressionFit() = default;

  double predict(double a, std::span<const double> h) const;

  bool is_linear() const { return gbt_ == nullptr; }
  const Eigen::VectorXd& coefficients() const { return coef_; }
  const LinearBasis& basis() const { return basis_; }
  double ridge_used() const { return ridge_used_; }

private:
  friend RegressionFit fit_mean(std::span<const double> a, const Eigen::MatrixXd& h, std::span<const double> y,
                                std::span<const int> rows, const LearnerConfig& config);
  LinearBasis basis_;
  Eigen::VectorXd coef_;
  double ridge_used_ = 0.0;
  std::shared_ptr<const detail::GbtModel> gbt_;
};

// Least squares on explicit design rows; exact when the (square or tall)
// design has full rank, otherwise stabilized by lambda = 1e-8 tr(X'X)/d.
// ridge_used reports the lambda actually applied (0 when none).
Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double* ridge_used = nullptr);

// Fit y ~ E[y | a, h] over the given row subset. h is n x hdim, one row per
// observation.
RegressionFit fit_mean(std::span<const double> a, const Eigen::MatrixXd& h, std::span<const double> y,
                       std::span<const int> rows, const LearnerConfig& config);

// Normal working model for A | H: mean fit plus the residual scale sigma
// estimated with the (n_train - 1) convention. sigma > 0 always holds.
struct TreatmentModel {
  RegressionFit mean;
  double sigma = 0.0;

  double mean_at(std::span<const double> h) const { return mean.predict(0.0, h); }
};

TreatmentModel fit_treatment_model(std::span<const double> a, const Eigen::MatrixXd& h, std::span<const int> rows,
                                   const LearnerConfig& config);

} // namespace mtp
