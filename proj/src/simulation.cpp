#include "mtp/simulation.hpp"

#include <cmath>

#include "mtp/errors.hpp"
#include "mtp/rng.hpp"

namespace mtp {

namespace {

Panel empty_panel(Layout layout, int horizon, int n) {
  Panel p;
  p.layout = layout;
  p.unit_ids.reserve(n);
  for (int i = 0; i < n; ++i) p.unit_ids.push_back(std::to_string(i));
  p.steps.resize(horizon);
  p.outcomes.resize(horizon + 1);
  return p;
}

} // namespace

Panel gen_point_dgp(const PointDgpParams& p, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_point_dgp: n must be positive");
  Panel panel = empty_panel(Layout::point, 1, n);
  panel.steps[0].covariates.assign(1, std::vector<double>(n));
  panel.steps[0].treatment.resize(n);
  panel.outcomes[1].resize(n);

  Rng rng = Rng::stream(seed, 0x9001ULL);
  for (int i = 0; i < n; ++i) {
    const double l = p.sd_l * rng.next_normal();
    const double a = p.theta[0] + p.theta[1] * l + p.theta[2] * l * l + p.sd_a * rng.next_normal();
    const double y = p.xi[0] + p.xi[1] * l + p.xi[2] * l * l + (p.beta[0] + p.beta[1] * l) * a +
                     p.sd_y * rng.next_normal();
    panel.steps[0].covariates[0][i] = l;
    panel.steps[0].treatment[i] = a;
    panel.outcomes[1][i] = y;
  }
  return panel;
}

Panel gen_longitudinal_dgp(const LongDgpParams& p, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_longitudinal_dgp: n must be positive");
  Panel panel = empty_panel(Layout::longitudinal, 2, n);
  panel.steps[0].covariates.assign(1, std::vector<double>(n));
  panel.steps[0].treatment.resize(n);
  panel.steps[1].covariates.assign(1, std::vector<double>(n));
  panel.steps[1].treatment.resize(n);
  panel.outcomes[2].resize(n);

  Rng rng = Rng::stream(seed, 0x9002ULL);
  for (int i = 0; i < n; ++i) {
    const double l0 = rng.next_normal();
    const double a0 = p.a0_slope * l0 + p.sd_a0 * rng.next_normal();
    const double l1 = p.rho[0] + p.rho[1] * l0 + p.rho[2] * a0 + p.sd_l1 * rng.next_normal();
    const double a1 = p.kappa[0] + p.kappa[1] * l0 + p.sd_a1 * rng.next_normal();
    const double b1 = p.beta1[0] + p.beta1[1] * l1 + p.beta1[2] * l0;
    const double y = b1 + (p.psi1[0] + p.psi1[1] * l1) * a1 + p.sd_y * rng.next_normal();
    panel.steps[0].covariates[0][i] = l0;
    panel.steps[0].treatment[i] = a0;
    panel.steps[1].covariates[0][i] = l1;
    panel.steps[1].treatment[i] = a1;
    panel.outcomes[2][i] = y;
  }
  return panel;
}

std::array<double, 2> calibrate_psi0(const LongDgpParams& p) {
  const double psi00 = p.rho[2] * p.beta1[1] + p.rho[2] * p.psi1[1] * (p.kappa[0] + p.delta1);
  const double psi01 = p.rho[2] * p.psi1[1] * p.kappa[1];
  return {psi00, psi01};
}

Eigen::VectorXd longitudinal_truth(const LongDgpParams& p) {
  const auto psi0 = calibrate_psi0(p);
  Eigen::VectorXd truth(4);
  truth << psi0[0], psi0[1], p.psi1[0], p.psi1[1];
  return truth;
}

Panel gen_pt_point_dgp(const PtPointDgpParams& p, int n, std::uint64_t seed, PtTruth* truth) {
  if (n < 1) throw ConfigError("gen_pt_point_dgp: n must be positive");
  Panel panel = empty_panel(Layout::pt_point, 1, n);
  panel.steps[0].covariates.assign(1, std::vector<double>(n));
  panel.steps[0].treatment.resize(n);
  panel.outcomes[0].resize(n);
  panel.outcomes[1].resize(n);

  Rng rng = Rng::stream(seed, 0x9003ULL);
  for (int i = 0; i < n; ++i) {
    const double l = rng.next_normal();
    const double u = rng.next_normal();
    const double a = p.theta[0] + p.theta[1] * l + p.confounding * (1.0 + p.interaction * l) * u + rng.next_normal();
    const double y0 = p.alpha0[0] + p.alpha0[1] * l + u + rng.next_normal();
    const double y1 = p.alpha1[0] + p.alpha1[1] * l + (p.tau[0] + p.tau[1] * l) * a + u + rng.next_normal();
    panel.steps[0].covariates[0][i] = l;
    panel.steps[0].treatment[i] = a;
    panel.outcomes[0][i] = y0;
    panel.outcomes[1][i] = y1;
  }
  if (truth) {
    truth->names = {"psi0_0", "psi0_1"};
    truth->psi.resize(2);
    truth->psi << p.tau[0], p.tau[1];
  }
  return panel;
}

Panel gen_pt_two_period_dgp(const PtTwoPeriodDgpParams& p, int n, std::uint64_t seed, PtTruth* truth) {
  if (n < 1) throw ConfigError("gen_pt_two_period_dgp: n must be positive");
  Panel panel = empty_panel(Layout::pt_longitudinal, 2, n);
  panel.steps[0].covariates.assign(1, std::vector<double>(n));
  panel.steps[0].treatment.resize(n);
  panel.steps[1].covariates.assign(1, std::vector<double>(n));
  panel.steps[1].treatment.resize(n);
  panel.outcomes[0].resize(n);
  panel.outcomes[1].resize(n);
  panel.outcomes[2].resize(n);

  Rng rng = Rng::stream(seed, 0x9004ULL);
  for (int i = 0; i < n; ++i) {
    const double l0 = rng.next_normal();
    const double u = rng.next_normal();
    const double a0 = p.a0_slope * l0 + p.confounding * u + rng.next_normal();
    const double y0 = p.alpha0[0] + p.alpha0[1] * l0 + u + rng.next_normal();
    const double l1 = p.rho[0] + p.rho[1] * l0 + p.rho[2] * a0 + p.sd_l1 * rng.next_normal();
    const double a1 = p.kappa[0] + p.kappa[1] * l0 + rng.next_normal();
    const double y1 = p.alpha1[0] + p.alpha1[1] * l0 + (p.tau01[0] + p.tau01[1] * l0) * a0 + u + rng.next_normal();
    const double y2 = p.alpha2[0] + p.alpha2[1] * l0 + p.alpha2[2] * l1 + (p.tau12[0] + p.tau12[1] * l1) * a1 +
                      p.beta02 * a0 + u + rng.next_normal();
    panel.steps[0].covariates[0][i] = l0;
    panel.steps[0].treatment[i] = a0;
    panel.steps[1].covariates[0][i] = l1;
    panel.steps[1].treatment[i] = a1;
    panel.outcomes[0][i] = y0;
    panel.outcomes[1][i] = y1;
    panel.outcomes[2][i] = y2;
  }
  if (truth) {
    // gamma02 has no a0 term because A1 is independent of (A0, L1) given L0
    truth->names = {"psi01_0", "psi01_1", "psi12_0", "psi12_1", "psi02_0", "psi02_1"};
    truth->psi.resize(6);
    const double psi02_0 = p.alpha2[2] * p.rho[2] + p.beta02 + p.tau12[1] * p.rho[2] * (p.kappa[0] + p.delta1);
    const double psi02_1 = p.tau12[1] * p.rho[2] * p.kappa[1];
    truth->psi << p.tau01[0], p.tau01[1], p.tau12[0], p.tau12[1], psi02_0, psi02_1;
  }
  return panel;
}

Panel gen_pt_dgp(PtDgpKind kind, double confounding, int n, std::uint64_t seed, PtTruth* truth) {
  if (kind == PtDgpKind::point) {
    PtPointDgpParams p;
    p.confounding = confounding;
    return gen_pt_point_dgp(p, n, seed, truth);
  }
  PtTwoPeriodDgpParams p;
  p.confounding = confounding;
  return gen_pt_two_period_dgp(p, n, seed, truth);
}

Panel to_exchangeability_view(const Panel& panel) {
  Panel out = panel;
  if (panel.layout == Layout::pt_point)
    out.layout = Layout::point;
  else if (panel.layout == Layout::pt_longitudinal)
    out.layout = Layout::longitudinal;
  for (int k = 0; k < out.horizon(); ++k) out.outcomes[k].clear();
  return out;
}

DgpSpec DgpSpec::make_point(const PointDgpParams& p) {
  DgpSpec s;
  s.family = Family::point;
  s.point = p;
  return s;
}

DgpSpec DgpSpec::make_longitudinal(const LongDgpParams& p) {
  DgpSpec s;
  s.family = Family::longitudinal;
  s.longitudinal = p;
  return s;
}

DgpSpec DgpSpec::make_pt_point(const PtPointDgpParams& p) {
  DgpSpec s;
  s.family = Family::pt_point;
  s.pt_point = p;
  return s;
}

DgpSpec DgpSpec::make_pt_two_period(const PtTwoPeriodDgpParams& p) {
  DgpSpec s;
  s.family = Family::pt_two_period;
  s.pt_two_period = p;
  return s;
}

OracleResult gformula_oracle(const DgpSpec& dgp, const PolicySpec& policy, int policy_start, long n_mc,
                             std::uint64_t seed) {
  if (n_mc < 2) throw ConfigError("gformula_oracle: n_mc must be at least 2");
  Rng rng = Rng::stream(seed, 0x09acULL);
  double sum = 0.0, sumsq = 0.0;

  for (long i = 0; i < n_mc; ++i) {
    double y = 0.0;
    switch (dgp.family) {
      case DgpSpec::Family::point: {
        const PointDgpParams& p = dgp.point;
        const double l = p.sd_l * rng.next_normal();
        double a = p.theta[0] + p.theta[1] * l + p.theta[2] * l * l + p.sd_a * rng.next_normal();
        const double h[1] = {l};
        if (policy_start <= 0) a = policy.apply(0, h, a);
        y = p.xi[0] + p.xi[1] * l + p.xi[2] * l * l + (p.beta[0] + p.beta[1] * l) * a + p.sd_y * rng.next_normal();
        break;
      }
      case DgpSpec::Family::longitudinal: {
        const LongDgpParams& p = dgp.longitudinal;
        const double l0 = rng.next_normal();
        double a0 = p.a0_slope * l0 + p.sd_a0 * rng.next_normal();
        const double h0[1] = {l0};
        if (policy_start <= 0) a0 = policy.apply(0, h0, a0);
        const double l1 = p.rho[0] + p.rho[1] * l0 + p.rho[2] * a0 + p.sd_l1 * rng.next_normal();
        double a1 = p.kappa[0] + p.kappa[1] * l0 + p.sd_a1 * rng.next_normal();
        const double h1[3] = {l0, l1, a0};
        if (policy_start <= 1) a1 = policy.apply(1, h1, a1);
        const double b1 = p.beta1[0] + p.beta1[1] * l1 + p.beta1[2] * l0;
        y = b1 + (p.psi1[0] + p.psi1[1] * l1) * a1 + p.sd_y * rng.next_normal();
        break;
      }
      case DgpSpec::Family::pt_point: {
        const PtPointDgpParams& p = dgp.pt_point;
        const double l = rng.next_normal();
        const double u = rng.next_normal();
        double a = p.theta[0] + p.theta[1] * l + p.confounding * (1.0 + p.interaction * l) * u + rng.next_normal();
        rng.next_normal(); // Y0 noise slot, keeps draw order aligned with gen_pt_point_dgp
        const double h[1] = {l};
        if (policy_start <= 0) a = policy.apply(0, h, a);
        y = p.alpha1[0] + p.alpha1[1] * l + (p.tau[0] + p.tau[1] * l) * a + u + rng.next_normal();
        break;
      }
      case DgpSpec::Family::pt_two_period: {
        const PtTwoPeriodDgpParams& p = dgp.pt_two_period;
        const double l0 = rng.next_normal();
        const double u = rng.next_normal();
        double a0 = p.a0_slope * l0 + p.confounding * u + rng.next_normal();
        rng.next_normal(); // Y0 noise
        const double h0[1] = {l0};
        if (policy_start <= 0) a0 = policy.apply(0, h0, a0);
        const double l1 = p.rho[0] + p.rho[1] * l0 + p.rho[2] * a0 + p.sd_l1 * rng.next_normal();
        double a1 = p.kappa[0] + p.kappa[1] * l0 + rng.next_normal();
        rng.next_normal(); // Y1 noise
        const double h1[3] = {l0, l1, a0};
        if (policy_start <= 1) a1 = policy.apply(1, h1, a1);
        y = p.alpha2[0] + p.alpha2[1] * l0 + p.alpha2[2] * l1 + (p.tau12[0] + p.tau12[1] * l1) * a1 +
            p.beta02 * a0 + u + rng.next_normal();
        break;
      }
    }
    sum += y;
    sumsq += y * y;
  }

  OracleResult res;
  res.n_mc = n_mc;
  res.mean = sum / static_cast<double>(n_mc);
  const double var = (sumsq - static_cast<double>(n_mc) * res.mean * res.mean) / static_cast<double>(n_mc - 1);
  res.se = std::sqrt(std::max(0.0, var) / static_cast<double>(n_mc));
  return res;
}

OrthogonalConfig default_point_design(const PointDgpParams& params, int folds, std::uint64_t seed) {
  OrthogonalConfig cfg;
  cfg.policy = PolicySpec::shift(params.delta);
  cfg.blip.bases = {LinearBasis::intercept_and({0})};
  cfg.mu_learners = {LearnerConfig::least_squares(LinearBasis({BasisTerm::intercept(), BasisTerm::hist(0),
                                                               BasisTerm::hist2(0, 0), BasisTerm::treat(),
                                                               BasisTerm::treat_hist(0)}))};
  cfg.m_learners = {LearnerConfig::least_squares(
      LinearBasis({BasisTerm::intercept(), BasisTerm::hist(0), BasisTerm::hist2(0, 0)}))};
  cfg.folds = folds;
  cfg.seed = seed;
  return cfg;
}

OrthogonalConfig default_longitudinal_design(const LongDgpParams& params, int folds, std::uint64_t seed) {
  OrthogonalConfig cfg;
  cfg.policy = PolicySpec::shift(std::vector<double>{params.delta0, params.delta1});
  // H_0 = (L0); H_1 = (L0, L1, A0)
  cfg.blip.bases = {LinearBasis::intercept_and({0}), LinearBasis::intercept_and({1})};
  cfg.mu_learners = {LearnerConfig::least_squares(LinearBasis({BasisTerm::intercept(), BasisTerm::hist(0),
                                                               BasisTerm::hist2(0, 0), BasisTerm::treat(),
                                                               BasisTerm::treat_hist(0)})),
                     LearnerConfig::least_squares(LinearBasis({BasisTerm::intercept(), BasisTerm::hist(0),
                                                               BasisTerm::hist(1), BasisTerm::treat(),
                                                               BasisTerm::treat_hist(1)}))};
  cfg.m_learners = {
      LearnerConfig::least_squares(LinearBasis({BasisTerm::intercept(), BasisTerm::hist(0)})),
      LearnerConfig::least_squares(LinearBasis({BasisTerm::intercept(), BasisTerm::hist(0), BasisTerm::hist(1)}))};
  cfg.folds = folds;
  cfg.seed = seed;
  return cfg;
}

OutcomeRegressionConfig default_point_or_design(const PointDgpParams& params, bool omit_l2) {
  OutcomeRegressionConfig cfg;
  cfg.policy = PolicySpec::shift(params.delta);
  cfg.blip.bases = {LinearBasis::intercept_and({0})};
  std::vector<BasisTerm> terms{BasisTerm::intercept(), BasisTerm::hist(0)};
  if (!omit_l2) terms.push_back(BasisTerm::hist2(0, 0));
  terms.push_back(BasisTerm::treat());
  terms.push_back(BasisTerm::treat_hist(0));
  cfg.mu_basis = LinearBasis(terms);
  return cfg;
}

PtPointConfig default_pt_point_design(const PtPointDgpParams& params) {
  PtPointConfig cfg;
  cfg.policy = PolicySpec::shift(params.delta);
  cfg.blip.bases = {LinearBasis::intercept_and({0})};
  cfg.mu_d_basis = LinearBasis(
      {BasisTerm::intercept(), BasisTerm::hist(0), BasisTerm::treat(), BasisTerm::treat_hist(0)});
  return cfg;
}

PtTwoPeriodConfig default_pt_two_period_design(const PtTwoPeriodDgpParams& params) {
  PtTwoPeriodConfig cfg;
  cfg.policy = PolicySpec::shift(std::vector<double>{params.delta0, params.delta1});
  cfg.s01 = LinearBasis::intercept_and({0});
  cfg.s12 = LinearBasis::intercept_and({1}); // L1 inside H_1 = (L0, L1, A0)
  cfg.s02 = LinearBasis::intercept_and({0});
  cfg.mu01_basis =
      LinearBasis({BasisTerm::intercept(), BasisTerm::hist(0), BasisTerm::treat(), BasisTerm::treat_hist(0)});
  cfg.mu12_basis = LinearBasis({BasisTerm::intercept(), BasisTerm::hist(0), BasisTerm::hist(1), BasisTerm::treat(),
                                BasisTerm::treat_hist(1), BasisTerm::hist(2), BasisTerm::hist2(2, 0)});
  cfg.mu02_basis = LinearBasis({BasisTerm::intercept(), BasisTerm::hist(0), BasisTerm::hist2(0, 0),
                                BasisTerm::treat(), BasisTerm::treat_hist(0)});
  return cfg;
}

} // namespace mtp
