#include "mtp/estimators.hpp"

#include <cmath>

#include "mtp/errors.hpp"

namespace mtp {

namespace {

struct TimeAccumulators {
  Eigen::MatrixXd m;       // delta_t * sum s s^T
  Eigen::VectorXd b;
  Eigen::MatrixXd s_sum;   // sum s s^T
  Eigen::MatrixXd phi;     // per-observation score, identifying part pending psi
  Eigen::MatrixXd s_rows;  // n x d_t
  double ridge_used = 0.0;
  double nuisance_ridge = 0.0;
};

Eigen::VectorXd solve_normal_equations(const Eigen::MatrixXd& m, const Eigen::VectorXd& b, double ridge,
                                       double* ridge_used) {
  const int d = static_cast<int>(m.rows());
  auto attempt = [&](double lambda, Eigen::VectorXd& out) {
    Eigen::MatrixXd mm = m;
    if (lambda != 0.0) mm.diagonal().array() += lambda;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mm);
    if (!lu.isInvertible()) return false;
    out = lu.solve(b);
    return out.allFinite();
  };
  Eigen::VectorXd psi;
  if (attempt(ridge, psi)) {
    if (ridge_used) *ridge_used = ridge;
    return psi;
  }
  // sign-consistent fallback: trace(M) carries delta's sign
  const double lambda = ridge + 1e-8 * m.trace() / d;
  if (!attempt(lambda, psi)) throw NumericError("singular normal equations M (beyond ridge fallback)");
  if (ridge_used) *ridge_used = lambda;
  return psi;
}

void validate_orthogonal_config(const Panel& panel, const OrthogonalConfig& cfg, int expect_horizon) {
  const int T = panel.horizon();
  const int n = panel.n_units();
  if (expect_horizon > 0 && T != expect_horizon)
    throw ConfigError("panel horizon " + std::to_string(T) + " does not match the estimator");
  cfg.policy.validate_for_exchangeability(T);
  cfg.blip.validate();
  if (cfg.blip.times() != T)
    throw ConfigError("blip has " + std::to_string(cfg.blip.times()) + " time bases for horizon " + std::to_string(T));
  if (static_cast<int>(cfg.mu_learners.size()) != T) throw ConfigError("need one mu learner per time");
  if (!cfg.ratio_override && static_cast<int>(cfg.m_learners.size()) != T)
    throw ConfigError("need one treatment-model learner per time (or a ratio override)");
  if (!cfg.ridge.empty() && static_cast<int>(cfg.ridge.size()) != T)
    throw ConfigError("ridge list must have one entry per time");
  if (cfg.folds < 2 || cfg.folds > n) throw ConfigError("folds must lie in [2, n]");
  for (int t = 0; t < T; ++t) {
    const int hdim = panel.history_dim(t);
    if (cfg.blip.bases[t].max_history_index() >= hdim)
      throw ConfigError("blip basis at time " + std::to_string(t) + " references a history index out of range");
    if (cfg.mu_learners[t].kind == LearnerConfig::Kind::least_squares &&
        cfg.mu_learners[t].basis.max_history_index() >= hdim)
      throw ConfigError("mu basis at time " + std::to_string(t) + " references a history index out of range");
  }
}

// One cross-fitted pass of the backward recursion (Algorithm 2; T = 1 is
// Algorithm 1). Accumulation runs per time, fold by fold, units in ascending
// index order, so results are bitwise reproducible for a given seed.
EstimateReport run_crossfit(const Panel& panel, const OrthogonalConfig& cfg) {
  const int T = panel.horizon();
  const int n = panel.n_units();
  const FoldPlan folds = make_folds(n, cfg.folds, cfg.seed);

  std::vector<std::vector<int>> fold_members(cfg.folds);
  for (int i = 0; i < n; ++i) fold_members[folds.assignment[i]].push_back(i);

  std::vector<double> v = panel.terminal_outcome();
  std::vector<double> v_next(n);

  std::vector<TimeAccumulators> acc(T);
  Diagnostics diag;
  diag.fold_sizes = folds.sizes();
  diag.ridge_used.assign(T, 0.0);
  diag.nuisance_ridge.assign(T, 0.0);

  std::vector<int> train;
  train.reserve(n);

  for (int t = T - 1; t >= 0; --t) {
    const int d = cfg.blip.dim(t);
    const double delta_t = cfg.policy.delta(t);
    TimeAccumulators& a = acc[t];
    a.m = Eigen::MatrixXd::Zero(d, d);
    a.b = Eigen::VectorXd::Zero(d);
    a.s_sum = Eigen::MatrixXd::Zero(d, d);
    a.phi.resize(n, d);
    a.s_rows.resize(n, d);

    const int hdim = panel.history_dim(t);
    Eigen::MatrixXd h(n, hdim);
    std::vector<double> hrow(hdim);
    for (int i = 0; i < n; ++i) {
      panel.history(t, i, hrow.data());
      for (int c = 0; c < hdim; ++c) h(i, c) = hrow[c];
    }
    const std::vector<double>& treat = panel.steps[t].treatment;

    Eigen::VectorXd s(d);
    for (int k = 0; k < cfg.folds; ++k) {
      train.clear();
      for (int i = 0; i < n; ++i) {
        if (folds.assignment[i] != k) train.push_back(i);
      }
      const RegressionFit mu = fit_mean(treat, h, v, train, cfg.mu_learners[t]);
      a.nuisance_ridge = std::max(a.nuisance_ridge, mu.ridge_used());
      TreatmentModel treatment_model;
      if (!cfg.ratio_override) {
        treatment_model = fit_treatment_model(treat, h, train, cfg.m_learners[t]);
        a.nuisance_ridge = std::max(a.nuisance_ridge, treatment_model.mean.ridge_used());
      }

      for (int i : fold_members[k]) {
        for (int c = 0; c < hdim; ++c) hrow[c] = h(i, c);
        const double mu_obs = mu.predict(treat[i], hrow);
        const double mu_g = mu.predict(treat[i] + delta_t, hrow);
        const double e = v[i] - mu_obs;
        cfg.blip.bases[t].eval(0.0, hrow, s.data());
        const double r = cfg.ratio_override
                             ? cfg.ratio_override(t, treat[i], hrow)
                             : density_ratio(treatment_model, treat[i], delta_t, hrow, cfg.clip, &diag.ratio);
        // M += delta s s^T ; b -= s (mu - mu^g) + (q - q~) e
        a.m.selfadjointView<Eigen::Lower>().rankUpdate(s, delta_t);
        a.b.noalias() -= s * (mu_obs - mu_g) + (s - s * r) * e;
        a.s_sum.selfadjointView<Eigen::Lower>().rankUpdate(s, 1.0);
        a.phi.row(i) = ((s - s * r) * e + s * (mu_obs - mu_g)).transpose();
        a.s_rows.row(i) = s.transpose();
        v_next[i] = mu_g;
      }
    }
    a.m = a.m.selfadjointView<Eigen::Lower>();
    a.s_sum = a.s_sum.selfadjointView<Eigen::Lower>();
    v.swap(v_next);
  }

  // Solve and variance
  const int dtot = cfg.blip.total_dim();
  EstimateReport report;
  report.seed = cfg.seed;
  report.psi.resize(dtot);
  report.jacobian = Eigen::MatrixXd::Zero(dtot, dtot);
  Eigen::MatrixXd phi(n, dtot);

  for (int t = 0; t < T; ++t) {
    TimeAccumulators& a = acc[t];
    const int d = cfg.blip.dim(t);
    const int off = cfg.blip.offset(t);
    const double delta_t = cfg.policy.delta(t);
    const double ridge = cfg.ridge.empty() ? 0.0 : cfg.ridge[t];
    const Eigen::VectorXd psi_t = solve_normal_equations(a.m, a.b, ridge, &diag.ridge_used[t]);
    report.psi.segment(off, d) = psi_t;
    report.jacobian.block(off, off, d, d) = (delta_t / n) * a.s_sum;
    // phi_i = (q - q~) e + s {mu - mu^g + delta s^T psi}
    phi.middleCols(off, d) = a.phi + (a.s_rows * psi_t * delta_t).asDiagonal() * a.s_rows;
    for (int j = 0; j < d; ++j) {
      report.component_names.push_back("psi" + std::to_string(t) + "_" + std::to_string(j));
    }
    diag.nuisance_ridge[t] = a.nuisance_ridge;
  }

  report.vcov = sandwich_variance(phi, report.jacobian, &report.influence);
  report.diagnostics = std::move(diag);
  finalize_wald(report);
  return report;
}

} // namespace

EstimateReport estimate_point(const Panel& panel, const OrthogonalConfig& config) {
  if (panel.layout != Layout::point)
    throw ConfigError("estimate_point requires a point-layout panel");
  panel.validate();
  validate_orthogonal_config(panel, config, 1);
  const int n = panel.n_units();
  if (n < 10 * config.blip.total_dim())
    throw ConfigError("estimate_point: need n >= 10 d, got n = " + std::to_string(n));
  return run_crossfit(panel, config);
}

EstimateReport estimate_longitudinal(const Panel& panel, const OrthogonalConfig& config) {
  if (panel.layout != Layout::longitudinal && panel.layout != Layout::point)
    throw ConfigError("estimate_longitudinal requires an exchangeability-layout panel");
  panel.validate();
  validate_orthogonal_config(panel, config, 0);
  return run_crossfit(panel, config);
}

EstimateReport estimate_orthogonal_with_nuisances(const Panel& panel, const OrthogonalConfig& config,
                                                  std::span<const OracleNuisance> nuisances) {
  panel.validate();
  const int T = panel.horizon();
  const int n = panel.n_units();
  config.policy.validate_for_exchangeability(T);
  config.blip.validate();
  if (static_cast<int>(nuisances.size()) != T) throw ConfigError("need one injected nuisance set per time");

  std::vector<double> v = panel.terminal_outcome();
  std::vector<double> v_next(n);

  const int dtot = config.blip.total_dim();
  EstimateReport report;
  report.seed = config.seed;
  report.psi.resize(dtot);
  report.jacobian = Eigen::MatrixXd::Zero(dtot, dtot);
  Eigen::MatrixXd phi(n, dtot);
  Diagnostics diag;
  diag.ridge_used.assign(T, 0.0);
  diag.nuisance_ridge.assign(T, 0.0);

  for (int t = T - 1; t >= 0; --t) {
    const int d = config.blip.dim(t);
    const int off = config.blip.offset(t);
    const double delta_t = config.policy.delta(t);
    const OracleNuisance& nu = nuisances[t];
    if (!nu.mu) throw ConfigError("injected nuisance at time " + std::to_string(t) + " lacks mu");
    if (!nu.ratio && !nu.m) throw ConfigError("injected nuisance at time " + std::to_string(t) + " lacks m or ratio");

    Eigen::MatrixXd m_acc = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd b_acc = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd s_sum = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd phi_partial(n, d);
    Eigen::MatrixXd s_rows(n, d);

    const int hdim = panel.history_dim(t);
    std::vector<double> hrow(hdim);
    Eigen::VectorXd s(d);
    for (int i = 0; i < n; ++i) {
      panel.history(t, i, hrow.data());
      const double a_i = panel.steps[t].treatment[i];
      const double mu_obs = nu.mu(a_i, hrow);
      const double mu_g = nu.mu(a_i + delta_t, hrow);
      const double e = v[i] - mu_obs;
      config.blip.bases[t].eval(0.0, hrow, s.data());
      const double r = nu.ratio ? nu.ratio(a_i, hrow)
                                : density_ratio(a_i, delta_t, nu.m(hrow), nu.sigma, config.clip, &diag.ratio);
      m_acc.selfadjointView<Eigen::Lower>().rankUpdate(s, delta_t);
      b_acc.noalias() -= s * (mu_obs - mu_g) + (s - s * r) * e;
      s_sum.selfadjointView<Eigen::Lower>().rankUpdate(s, 1.0);
      phi_partial.row(i) = ((s - s * r) * e + s * (mu_obs - mu_g)).transpose();
      s_rows.row(i) = s.transpose();
      v_next[i] = mu_g;
    }
    m_acc = m_acc.selfadjointView<Eigen::Lower>();
    s_sum = s_sum.selfadjointView<Eigen::Lower>();
    v.swap(v_next);

    const double ridge = config.ridge.empty() ? 0.0 : config.ridge[t];
    const Eigen::VectorXd psi_t = solve_normal_equations(m_acc, b_acc, ridge, &diag.ridge_used[t]);
    report.psi.segment(off, d) = psi_t;
    report.jacobian.block(off, off, d, d) = (delta_t / n) * s_sum;
    phi.middleCols(off, d) = phi_partial + (s_rows * psi_t * delta_t).asDiagonal() * s_rows;
  }

  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < config.blip.dim(t); ++j)
      report.component_names.push_back("psi" + std::to_string(t) + "_" + std::to_string(j));
  }
  report.vcov = sandwich_variance(phi, report.jacobian, &report.influence);
  report.diagnostics = std::move(diag);
  finalize_wald(report);
  return report;
}

Eigen::VectorXd score_point(double y, double a, std::span<const double> h, std::span<const double> psi, double delta,
                            const LinearBasis& s_basis, const OracleNuisance& nuisance, const ClipBounds& clip) {
  const Eigen::VectorXd s = s_basis.eval(0.0, h);
  if (psi.size() != static_cast<std::size_t>(s.size())) throw ConfigError("score_point: psi dimension mismatch");
  const double mu_obs = nuisance.mu(a, h);
  const double mu_g = nuisance.mu(a + delta, h);
  const double e = y - mu_obs;
  const double r =
      nuisance.ratio ? nuisance.ratio(a, h) : density_ratio(a, delta, nuisance.m(h), nuisance.sigma, clip, nullptr);
  double gamma = 0.0;
  for (int j = 0; j < s.size(); ++j) gamma += s[j] * psi[j];
  gamma *= -delta;
  return (s - s * r) * e + s * (mu_obs - mu_g - gamma);
}

std::vector<double> backward_recursion_step(int t, std::span<const RegressionFit> mu_per_fold, const FoldPlan& folds,
                                            const Panel& panel, double delta_t) {
  const int n = panel.n_units();
  if (static_cast<int>(folds.assignment.size()) != n)
    throw ConfigError("backward_recursion_step: fold plan does not cover every unit");
  if (static_cast<int>(mu_per_fold.size()) != folds.folds)
    throw ConfigError("backward_recursion_step: need one fitted mu per fold");

  std::vector<double> v(n);
  std::vector<double> hrow(panel.history_dim(t));
  for (int i = 0; i < n; ++i) {
    const int k = folds.assignment[i];
    if (k < 0 || k >= folds.folds) throw ConfigError("backward_recursion_step: unit lacks a fold assignment");
    panel.history(t, i, hrow.data());
    v[i] = mu_per_fold[k].predict(panel.steps[t].treatment[i] + delta_t, hrow);
  }
  return v;
}

EstimateReport estimate_point_outcome_regression(const Panel& panel, const OutcomeRegressionConfig& config,
                                                 Eigen::VectorXd* beta_out) {
  if (panel.layout != Layout::point) throw ConfigError("estimate_point_outcome_regression requires a point panel");
  panel.validate();
  config.blip.validate();
  if (config.blip.times() != 1) throw ConfigError("point outcome regression wants a single-time blip");
  if (!config.mu_basis.uses_treatment())
    throw ConfigError("mu basis must depend on the treatment, otherwise the shifted prediction is degenerate");

  const int n = panel.n_units();
  const int hdim = panel.history_dim(0);
  const int p = config.mu_basis.dim();
  const int d = config.blip.dim(0);
  const std::vector<double>& y = panel.terminal_outcome();
  const std::vector<double>& treat = panel.steps[0].treatment;

  Eigen::MatrixXd x(n, p), xg(n, p);
  Eigen::MatrixXd s_rows(n, d);
  Eigen::VectorXd yy(n), delta_eff(n);
  std::vector<double> hrow(hdim), row(p);
  for (int i = 0; i < n; ++i) {
    panel.history(0, i, hrow.data());
    const double g = config.policy.apply(0, hrow, treat[i]);
    delta_eff[i] = g - treat[i];
    config.mu_basis.eval(treat[i], hrow, row.data());
    for (int c = 0; c < p; ++c) x(i, c) = row[c];
    config.mu_basis.eval(g, hrow, row.data());
    for (int c = 0; c < p; ++c) xg(i, c) = row[c];
    Eigen::VectorXd s = config.blip.bases[0].eval(0.0, hrow);
    s_rows.row(i) = s.transpose();
    yy[i] = y[i];
  }

  // beta block: b = dmu/dbeta, i.e. plain least squares of Y on x
  const Eigen::VectorXd beta = least_squares(x, yy);
  if (beta_out) *beta_out = beta;

  // psi block: sum s c^T psi = sum s {Y - mu(g(A,L); beta)} with c = -delta_eff s
  Eigen::VectorXd mu_g = xg * beta;
  if (config.mu_perturbation) {
    for (int i = 0; i < n; ++i) {
      panel.history(0, i, hrow.data());
      mu_g[i] += config.mu_perturbation(config.policy.apply(0, hrow, treat[i]), hrow);
    }
  }
  Eigen::MatrixXd sc = Eigen::MatrixXd::Zero(d, d); // sum s c^T
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) {
    sc.noalias() += s_rows.row(i).transpose() * (-delta_eff[i] * s_rows.row(i));
    rhs.noalias() += s_rows.row(i).transpose() * (yy[i] - mu_g[i]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sc);
  if (!lu.isInvertible()) throw NumericError("outcome regression: singular psi block");
  const Eigen::VectorXd psi = lu.solve(rhs);

  // stacked sandwich over theta = (beta, psi)
  const int q = p + d;
  Eigen::MatrixXd moments(n, q);
  Eigen::MatrixXd gmat = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < n; ++i) {
    const double e_beta = yy[i] - x.row(i).dot(beta);
    const double e_psi = yy[i] - (-delta_eff[i]) * s_rows.row(i).dot(psi) - mu_g[i];
    moments.row(i).head(p) = x.row(i) * e_beta;
    moments.row(i).tail(d) = s_rows.row(i) * e_psi;
    gmat.topLeftCorner(p, p).noalias() -= x.row(i).transpose() * x.row(i);
    gmat.bottomLeftCorner(d, p).noalias() -= s_rows.row(i).transpose() * xg.row(i);
    gmat.bottomRightCorner(d, d).noalias() -= s_rows.row(i).transpose() * (-delta_eff[i] * s_rows.row(i));
  }
  gmat /= static_cast<double>(n);

  Eigen::MatrixXd influence_full;
  const Eigen::MatrixXd vfull = sandwich_variance(moments, gmat, &influence_full);

  EstimateReport report;
  report.psi = psi;
  report.vcov = vfull.bottomRightCorner(d, d);
  report.vcov = 0.5 * (report.vcov + report.vcov.transpose()).eval();
  report.jacobian = gmat;
  report.influence = influence_full.rightCols(d);
  for (int j = 0; j < d; ++j) report.component_names.push_back("psi0_" + std::to_string(j));
  finalize_wald(report);
  return report;
}

} // namespace mtp
