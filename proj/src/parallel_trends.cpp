#include "mtp/parallel_trends.hpp"

#include "mtp/errors.hpp"

namespace mtp {

namespace {

Eigen::VectorXd solve_index_block(const Eigen::MatrixXd& s_rows, const Eigen::MatrixXd& c_rows,
                                  const Eigen::VectorXd& resid, const char* which) {
  const int d = static_cast<int>(s_rows.cols());
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < s_rows.rows(); ++i) {
    lhs.noalias() += s_rows.row(i).transpose() * c_rows.row(i);
    rhs.noalias() += s_rows.row(i).transpose() * resid[i];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) throw NumericError(std::string("parallel trends: singular ") + which + " block");
  Eigen::VectorXd psi = lu.solve(rhs);
  if (!psi.allFinite()) throw NumericError(std::string("parallel trends: singular ") + which + " block");
  return psi;
}

} // namespace

EstimateReport estimate_pt_point(const Panel& panel, const PtPointConfig& config, TrendFit* trend_out) {
  if (panel.layout != Layout::pt_point) throw ConfigError("estimate_pt_point requires a pt-point panel");
  panel.validate();
  config.blip.validate();
  if (config.blip.times() != 1) throw ConfigError("pt-point blip must have a single time basis");
  config.policy.validate_for_parallel_trends(1);
  if (!config.mu_d_basis.uses_treatment())
    throw ConfigError("mu^d basis must depend on the treatment");

  const int n = panel.n_units();
  const int hdim = panel.history_dim(0);
  const int p = config.mu_d_basis.dim();
  const int d = config.blip.dim(0);
  const std::vector<double>& y0 = panel.outcome(0);
  const std::vector<double>& y1 = panel.outcome(1);
  const std::vector<double>& treat = panel.steps[0].treatment;

  Eigen::MatrixXd x(n, p), xg(n, p), s_rows(n, d), c_rows(n, d);
  Eigen::VectorXd dy(n);
  std::vector<double> hrow(hdim), row(p);
  for (int i = 0; i < n; ++i) {
    panel.history(0, i, hrow.data());
    const double g = config.policy.apply(0, hrow, treat[i]);
    dy[i] = y1[i] - y0[i];
    config.mu_d_basis.eval(treat[i], hrow, row.data());
    for (int c = 0; c < p; ++c) x(i, c) = row[c];
    config.mu_d_basis.eval(g, hrow, row.data());
    for (int c = 0; c < p; ++c) xg(i, c) = row[c];
    const Eigen::VectorXd s = config.blip.bases[0].eval(0.0, hrow);
    s_rows.row(i) = s.transpose();
    c_rows.row(i) = (-(g - treat[i]) * s).transpose();
  }

  const Eigen::VectorXd beta = least_squares(x, dy);
  const Eigen::VectorXd psi = solve_index_block(s_rows, c_rows, dy - xg * beta, "psi");

  if (trend_out) {
    trend_out->basis01 = config.mu_d_basis;
    trend_out->beta01 = beta;
  }

  // stacked sandwich over (beta, psi)
  const int q = p + d;
  Eigen::MatrixXd moments(n, q);
  Eigen::MatrixXd gmat = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < n; ++i) {
    const double e_beta = dy[i] - x.row(i).dot(beta);
    const double e_psi = dy[i] - c_rows.row(i).dot(psi) - xg.row(i).dot(beta);
    moments.row(i).head(p) = x.row(i) * e_beta;
    moments.row(i).tail(d) = s_rows.row(i) * e_psi;
    gmat.topLeftCorner(p, p).noalias() -= x.row(i).transpose() * x.row(i);
    gmat.bottomLeftCorner(d, p).noalias() -= s_rows.row(i).transpose() * xg.row(i);
    gmat.bottomRightCorner(d, d).noalias() -= s_rows.row(i).transpose() * c_rows.row(i);
  }
  gmat /= static_cast<double>(n);

  Eigen::MatrixXd influence_full;
  const Eigen::MatrixXd vfull = sandwich_variance(moments, gmat, &influence_full);

  EstimateReport report;
  report.psi = psi;
  report.vcov = 0.5 * (vfull.bottomRightCorner(d, d) + vfull.bottomRightCorner(d, d).transpose());
  report.jacobian = gmat;
  report.influence = influence_full.rightCols(d);
  for (int j = 0; j < d; ++j) report.component_names.push_back("psi0_" + std::to_string(j));
  finalize_wald(report);
  return report;
}

EstimateReport estimate_pt_two_period(const Panel& panel, const PtTwoPeriodConfig& config, TrendFit* trend_out) {
  if (panel.layout != Layout::pt_longitudinal || panel.horizon() != 2)
    throw ConfigError("estimate_pt_two_period requires a pt-longitudinal panel with T = 2");
  panel.validate();
  config.policy.validate_for_parallel_trends(2);
  if (config.s01.uses_treatment() || config.s12.uses_treatment() || config.s02.uses_treatment())
    throw ConfigError("blip bases must depend on the history only");
  if (!config.mu01_basis.uses_treatment() || !config.mu12_basis.uses_treatment() ||
      !config.mu02_basis.uses_treatment())
    throw ConfigError("every mu^d basis must depend on its treatment argument");

  const int n = panel.n_units();
  const int h0dim = panel.history_dim(0);
  const int h1dim = panel.history_dim(1);
  const std::vector<double>& y0 = panel.outcome(0);
  const std::vector<double>& y1 = panel.outcome(1);
  const std::vector<double>& y2 = panel.outcome(2);
  const std::vector<double>& a0 = panel.steps[0].treatment;
  const std::vector<double>& a1 = panel.steps[1].treatment;

  const int p1 = config.mu01_basis.dim();
  const int p2 = config.mu12_basis.dim();
  const int p3 = config.mu02_basis.dim();
  const int d1 = config.s01.dim();
  const int d2 = config.s12.dim();
  const int d3 = config.s02.dim();

  Eigen::MatrixXd x01(n, p1), x01g(n, p1), x12(n, p2), x12g(n, p2), x02(n, p3), x02g(n, p3);
  Eigen::MatrixXd s01(n, d1), c01(n, d1), s12(n, d2), c12(n, d2), s02(n, d3), c02(n, d3);
  Eigen::VectorXd dy01(n), dy12(n);

  std::vector<double> h0(h0dim), h1(h1dim), row(std::max({p1, p2, p3}));
  for (int i = 0; i < n; ++i) {
    panel.history(0, i, h0.data());
    panel.history(1, i, h1.data());
    const double g0 = config.policy.apply(0, h0, a0[i]);
    const double g1 = config.policy.apply(1, h1, a1[i]);
    dy01[i] = y1[i] - y0[i];
    dy12[i] = y2[i] - y1[i];

    config.mu01_basis.eval(a0[i], h0, row.data());
    for (int c = 0; c < p1; ++c) x01(i, c) = row[c];
    config.mu01_basis.eval(g0, h0, row.data());
    for (int c = 0; c < p1; ++c) x01g(i, c) = row[c];

    config.mu12_basis.eval(a1[i], h1, row.data());
    for (int c = 0; c < p2; ++c) x12(i, c) = row[c];
    config.mu12_basis.eval(g1, h1, row.data());
    for (int c = 0; c < p2; ++c) x12g(i, c) = row[c];

    config.mu02_basis.eval(a0[i], h0, row.data());
    for (int c = 0; c < p3; ++c) x02(i, c) = row[c];
    config.mu02_basis.eval(g0, h0, row.data());
    for (int c = 0; c < p3; ++c) x02g(i, c) = row[c];

    Eigen::VectorXd s = config.s01.eval(0.0, h0);
    s01.row(i) = s.transpose();
    c01.row(i) = (-(g0 - a0[i]) * s).transpose();
    s = config.s12.eval(0.0, h1);
    s12.row(i) = s.transpose();
    c12.row(i) = (-(g1 - a1[i]) * s).transpose();
    s = config.s02.eval(0.0, h0);
    s02.row(i) = s.transpose();
    c02.row(i) = (-(g0 - a0[i]) * s).transpose();
  }

  // Trend regressions. The composed pullback target keeps the natural A0 in
  // the treatment slot and applies the policy to A1 only; evaluating the
  // fitted mu^d_02 at (L0, g(L0,A0)) below then matches the identification
  // derivation (conditioning at A0 = g(l0,a0)).
  const Eigen::VectorXd beta01 = least_squares(x01, dy01);
  const Eigen::VectorXd beta12 = least_squares(x12, dy12);
  const Eigen::VectorXd target02 = x12g * beta12;
  const Eigen::VectorXd beta02 = least_squares(x02, target02);

  const Eigen::VectorXd psi01 = solve_index_block(s01, c01, dy01 - x01g * beta01, "psi01");
  const Eigen::VectorXd psi12 = solve_index_block(s12, c12, dy12 - x12g * beta12, "psi12");
  const Eigen::VectorXd mu02g = x02g * beta02;
  const Eigen::VectorXd resid02 = dy12 - c12 * psi12 + c01 * psi01 - mu02g;
  const Eigen::VectorXd psi02 = solve_index_block(s02, c02, resid02, "psi02");

  if (trend_out) {
    trend_out->basis01 = config.mu01_basis;
    trend_out->basis12 = config.mu12_basis;
    trend_out->basis02 = config.mu02_basis;
    trend_out->beta01 = beta01;
    trend_out->beta12 = beta12;
    trend_out->beta02 = beta02;
  }

  // stacked sandwich over theta = (beta01, beta12, beta02, psi01, psi12, psi02)
  const int q = p1 + p2 + p3 + d1 + d2 + d3;
  const int ob1 = 0, ob2 = p1, ob3 = p1 + p2;
  const int op1 = p1 + p2 + p3, op2 = op1 + d1, op3 = op2 + d2;
  Eigen::MatrixXd moments(n, q);
  Eigen::MatrixXd gmat = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < n; ++i) {
    const double e1 = dy01[i] - x01.row(i).dot(beta01);
    const double e2 = dy12[i] - x12.row(i).dot(beta12);
    const double e3 = x12g.row(i).dot(beta12) - x02.row(i).dot(beta02);
    const double e4 = dy01[i] - c01.row(i).dot(psi01) - x01g.row(i).dot(beta01);
    const double e5 = dy12[i] - c12.row(i).dot(psi12) - x12g.row(i).dot(beta12);
    const double e6 = resid02[i] - c02.row(i).dot(psi02);

    moments.row(i).segment(ob1, p1) = x01.row(i) * e1;
    moments.row(i).segment(ob2, p2) = x12.row(i) * e2;
    moments.row(i).segment(ob3, p3) = x02.row(i) * e3;
    moments.row(i).segment(op1, d1) = s01.row(i) * e4;
    moments.row(i).segment(op2, d2) = s12.row(i) * e5;
    moments.row(i).segment(op3, d3) = s02.row(i) * e6;

    gmat.block(ob1, ob1, p1, p1).noalias() -= x01.row(i).transpose() * x01.row(i);
    gmat.block(ob2, ob2, p2, p2).noalias() -= x12.row(i).transpose() * x12.row(i);
    gmat.block(ob3, ob2, p3, p2).noalias() += x02.row(i).transpose() * x12g.row(i);
    gmat.block(ob3, ob3, p3, p3).noalias() -= x02.row(i).transpose() * x02.row(i);
    gmat.block(op1, ob1, d1, p1).noalias() -= s01.row(i).transpose() * x01g.row(i);
    gmat.block(op1, op1, d1, d1).noalias() -= s01.row(i).transpose() * c01.row(i);
    gmat.block(op2, ob2, d2, p2).noalias() -= s12.row(i).transpose() * x12g.row(i);
    gmat.block(op2, op2, d2, d2).noalias() -= s12.row(i).transpose() * c12.row(i);
    gmat.block(op3, ob3, d3, p3).noalias() -= s02.row(i).transpose() * x02g.row(i);
    gmat.block(op3, op1, d3, d1).noalias() += s02.row(i).transpose() * c01.row(i);
    gmat.block(op3, op2, d3, d2).noalias() -= s02.row(i).transpose() * c12.row(i);
    gmat.block(op3, op3, d3, d3).noalias() -= s02.row(i).transpose() * c02.row(i);
  }
  gmat /= static_cast<double>(n);

  Eigen::MatrixXd influence_full;
  const Eigen::MatrixXd vfull = sandwich_variance(moments, gmat, &influence_full);

  const int dpsi = d1 + d2 + d3;
  EstimateReport report;
  report.psi.resize(dpsi);
  report.psi << psi01, psi12, psi02;
  report.vcov = 0.5 * (vfull.bottomRightCorner(dpsi, dpsi) + vfull.bottomRightCorner(dpsi, dpsi).transpose());
  report.jacobian = gmat;
  report.influence = influence_full.rightCols(dpsi);
  for (int j = 0; j < d1; ++j) report.component_names.push_back("psi01_" + std::to_string(j));
  for (int j = 0; j < d2; ++j) report.component_names.push_back("psi12_" + std::to_string(j));
  for (int j = 0; j < d3; ++j) report.component_names.push_back("psi02_" + std::to_string(j));
  finalize_wald(report);
  return report;
}

} // namespace mtp
