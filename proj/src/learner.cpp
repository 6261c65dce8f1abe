#include "mtp/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtp/errors.hpp"

namespace mtp {

namespace detail {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Depth-limited regression tree stored as a flat node array.
struct GbtNode {
  int feature = -1; // -1: leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct GbtTree {
  std::vector<GbtNode> nodes;

  double predict(const double* x) const {
    int idx = 0;
    while (nodes[idx].feature >= 0) idx = x[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left : nodes[idx].right;
    return nodes[idx].value;
  }
};

struct GbtModel {
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<GbtTree> trees;

  double predict(const double* x) const {
    double f = base;
    for (const auto& t : trees) f += learning_rate * t.predict(x);
    return f;
  }
};

namespace {

struct SplitResult {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

SplitResult best_split(const RowMajorMatrix& x, const std::vector<double>& r, const std::vector<int>& idx,
                       int min_leaf) {
  SplitResult best;
  const int n = static_cast<int>(idx.size());
  if (n < 2 * min_leaf) return best;
  double total = 0.0;
  for (int i : idx) total += r[i];

  std::vector<int> order(idx);
  for (int f = 0; f < x.cols(); ++f) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (x(a, f) != x(b, f)) return x(a, f) < x(b, f);
      return a < b;
    });
    double left_sum = 0.0;
    for (int pos = 0; pos < n - 1; ++pos) {
      left_sum += r[order[pos]];
      if (x(order[pos], f) == x(order[pos + 1], f)) continue;
      const int nl = pos + 1, nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - total * total / n;
      if (gain > best.gain + 1e-12) {
        best.found = true;
        best.feature = f;
        best.threshold = 0.5 * (x(order[pos], f) + x(order[pos + 1], f));
        best.gain = gain;
      }
    }
  }
  return best;
}

int grow(GbtTree& tree, const RowMajorMatrix& x, const std::vector<double>& r, std::vector<int> idx, int depth,
         const GbtOptions& opt) {
  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  double mean = 0.0;
  for (int i : idx) mean += r[i];
  mean /= static_cast<double>(idx.size());
  tree.nodes[node_id].value = mean;
  if (depth >= opt.depth) return node_id;

  const SplitResult split = best_split(x, r, idx, opt.min_leaf);
  if (!split.found) return node_id;

  std::vector<int> left, right;
  for (int i : idx) (x(i, split.feature) <= split.threshold ? left : right).push_back(i);
  tree.nodes[node_id].feature = split.feature;
  tree.nodes[node_id].threshold = split.threshold;
  const int l = grow(tree, x, r, std::move(left), depth + 1, opt);
  tree.nodes[node_id].left = l;
  const int rr = grow(tree, x, r, std::move(right), depth + 1, opt);
  tree.nodes[node_id].right = rr;
  return node_id;
}

std::shared_ptr<const GbtModel> fit_gbt(const RowMajorMatrix& x, const std::vector<double>& y,
                                        const GbtOptions& opt) {
  const int n = static_cast<int>(y.size());
  auto model = std::make_shared<GbtModel>();
  model->learning_rate = opt.learning_rate;
  model->base = std::accumulate(y.begin(), y.end(), 0.0) / n;

  std::vector<double> pred(n, model->base);
  std::vector<double> resid(n);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);

  for (int m = 0; m < opt.trees; ++m) {
    for (int i = 0; i < n; ++i) resid[i] = y[i] - pred[i];
    GbtTree tree;
    grow(tree, x, resid, all, 0, opt);
    for (int i = 0; i < n; ++i) pred[i] += opt.learning_rate * tree.predict(x.row(i).data());
    model->trees.push_back(std::move(tree));
  }
  return model;
}

} // namespace
} // namespace detail

Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double* ridge_used) {
  const int d = static_cast<int>(x.cols());
  if (x.rows() != y.size()) throw ConfigError("least_squares: row mismatch");
  if (x.rows() < d)
    throw ConfigError("least_squares: " + std::to_string(x.rows()) + " rows cannot identify " + std::to_string(d) +
                      " coefficients");

  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::VectorXd xty = x.transpose() * y;
  const double tr = xtx.trace();
  if (!(tr > 0.0)) throw NumericError("least_squares: design is identically zero");

  auto try_solve = [&](double lambda, Eigen::VectorXd& out) {
    Eigen::MatrixXd m = xtx;
    if (lambda != 0.0) m.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success) return false;
    const auto dvec = ldlt.vectorD();
    const double dmax = dvec.cwiseAbs().maxCoeff();
    const double dmin = dvec.cwiseAbs().minCoeff();
    if (!(dmax > 0.0) || dmin <= 1e-13 * dmax) return false;
    out = ldlt.solve(xty);
    return out.allFinite();
  };

  Eigen::VectorXd beta;
  if (try_solve(0.0, beta)) {
    if (ridge_used) *ridge_used = 0.0;
    return beta;
  }
  const double lambda = 1e-8 * tr / d;
  if (!try_solve(lambda, beta))
    throw NumericError("least_squares: design rank-deficient beyond ridge tolerance");
  if (ridge_used) *ridge_used = lambda;
  return beta;
}

double RegressionFit::predict(double a, std::span<const double> h) const {
  if (gbt_) {
    std::vector<double> x(h.size() + 1);
    x[0] = a;
    std::copy(h.begin(), h.end(), x.begin() + 1);
    return gbt_->predict(x.data());
  }
  double out = 0.0;
  Eigen::VectorXd row = basis_.eval(a, h);
  for (int i = 0; i < row.size(); ++i) out += row[i] * coef_[i];
  return out;
}

RegressionFit fit_mean(std::span<const double> a, const Eigen::MatrixXd& h, std::span<const double> y,
                       std::span<const int> rows, const LearnerConfig& config) {
  const int m = static_cast<int>(rows.size());
  RegressionFit fit;
  if (config.kind == LearnerConfig::Kind::boosted_trees) {
    detail::RowMajorMatrix x(m, h.cols() + 1);
    std::vector<double> yy(m);
    for (int r = 0; r < m; ++r) {
      const int i = rows[r];
      x(r, 0) = a[i];
      x.row(r).tail(h.cols()) = h.row(i);
      yy[r] = y[i];
    }
    fit.gbt_ = detail::fit_gbt(x, yy, config.gbt);
    return fit;
  }

  const LinearBasis& basis = config.basis;
  const int d = basis.dim();
  if (d == 0) throw ConfigError("fit_mean: empty least-squares basis");
  if (m < d)
    throw ConfigError("fit_mean: " + std::to_string(m) + " rows for a " + std::to_string(d) + "-column design");

  Eigen::MatrixXd x(m, d);
  Eigen::VectorXd yy(m);
  std::vector<double> hrow(h.cols());
  std::vector<double> xrow(d);
  for (int r = 0; r < m; ++r) {
    const int i = rows[r];
    for (int c = 0; c < h.cols(); ++c) hrow[c] = h(i, c);
    basis.eval(a[i], hrow, xrow.data());
    for (int c = 0; c < d; ++c) x(r, c) = xrow[c];
    yy[r] = y[i];
  }
  fit.basis_ = basis;
  fit.coef_ = least_squares(x, yy, &fit.ridge_used_);
  return fit;
}

TreatmentModel fit_treatment_model(std::span<const double> a, const Eigen::MatrixXd& h, std::span<const int> rows,
                                   const LearnerConfig& config) {
  if (config.kind == LearnerConfig::Kind::least_squares && config.basis.uses_treatment())
    throw ConfigError("treatment-model basis must not reference the treatment");

  // The mean is a function of h alone; reuse fit_mean with the target in the
  // y slot and a zero treatment column.
  std::vector<double> zero(a.size(), 0.0);
  TreatmentModel model;
  model.mean = fit_mean(zero, h, a, rows, config);

  double ss = 0.0, mean_resid = 0.0;
  std::vector<double> hrow(h.cols());
  std::vector<double> resid(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int i = rows[r];
    for (int c = 0; c < h.cols(); ++c) hrow[c] = h(i, c);
    resid[r] = a[i] - model.mean.predict(0.0, hrow);
    mean_resid += resid[r];
  }
  mean_resid /= static_cast<double>(rows.size());
  for (double e : resid) ss += (e - mean_resid) * (e - mean_resid);
  if (rows.size() < 2) throw ConfigError("fit_treatment_model: need at least 2 rows");
  model.sigma = std::sqrt(ss / (static_cast<double>(rows.size()) - 1.0));
  if (!(model.sigma > 0.0)) throw NumericError("fit_treatment_model: degenerate residuals, sigma is not positive");
  return model;
}

} // namespace mtp
