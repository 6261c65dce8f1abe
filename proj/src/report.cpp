#include "mtp/report.hpp"

#include <cmath>

#include "mtp/errors.hpp"

namespace mtp {

Eigen::MatrixXd sandwich_variance(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& jacobian,
                                  Eigen::MatrixXd* influence_out) {
  const int n = static_cast<int>(scores.rows());
  const int d = static_cast<int>(scores.cols());
  if (jacobian.rows() != d || jacobian.cols() != d) throw ConfigError("sandwich_variance: G dimension mismatch");
  if (n < 2) throw ConfigError("sandwich_variance: need at least 2 observations");

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(jacobian);
  const Eigen::MatrixXd ginv = lu.inverse();
  if (!ginv.allFinite()) throw NumericError("sandwich_variance: Jacobian G is singular");

  Eigen::MatrixXd inf = scores * ginv.transpose();
  const Eigen::RowVectorXd mean = inf.colwise().mean();
  Eigen::MatrixXd centered = inf.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::MatrixXd v = cov / static_cast<double>(n);
  v = 0.5 * (v + v.transpose()).eval();
  if (influence_out) *influence_out = std::move(inf);
  return v;
}

void finalize_wald(EstimateReport& report) {
  const int d = report.dim();
  report.se.resize(d);
  report.ci_lo.resize(d);
  report.ci_hi.resize(d);
  for (int j = 0; j < d; ++j) {
    const double vjj = report.vcov(j, j);
    if (vjj < 0.0) throw NumericError("finalize_wald: negative variance on the diagonal");
    report.se[j] = std::sqrt(vjj);
    report.ci_lo[j] = report.psi[j] - 1.96 * report.se[j];
    report.ci_hi[j] = report.psi[j] + 1.96 * report.se[j];
  }
}

} // namespace mtp
