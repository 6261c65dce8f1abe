#include "mtp/montecarlo.hpp"

#include <cmath>
#include <cstdio>

#include "mtp/errors.hpp"
#include "mtp/longitudinal.hpp"
#include "mtp/parallel.hpp"
#include "mtp/rng.hpp"

namespace mtp {

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

const char* mc_design_name(McDesign design) {
  switch (design) {
    case McDesign::point: return "point";
    case McDesign::longitudinal: return "longitudinal";
    case McDesign::pt_point: return "pt-point";
    case McDesign::pt_two_period: return "pt-two-period";
    case McDesign::point_or: return "point-or";
  }
  return "?";
}

McDesign mc_design_from_name(const std::string& name) {
  if (name == "point") return McDesign::point;
  if (name == "longitudinal") return McDesign::longitudinal;
  if (name == "pt-point" || name == "pt_point") return McDesign::pt_point;
  if (name == "pt-two-period" || name == "pt_two_period") return McDesign::pt_two_period;
  if (name == "point-or" || name == "point_or") return McDesign::point_or;
  throw ConfigError("unknown Monte Carlo design '" + name + "'");
}

namespace {

struct RepResult {
  bool ok = false;
  std::string error;
  Eigen::VectorXd psi, se, ci_lo, ci_hi;
  Eigen::VectorXd boot_lo, boot_hi;
};

struct DesignPlan {
  std::vector<std::string> names;
  Eigen::VectorXd truth;
  bool has_se = true;
};

} // namespace

MonteCarloSummary run_monte_carlo(const McConfig& config) {
  if (config.replicates < 2) throw ConfigError("run_monte_carlo: need at least 2 replicates");
  const int R = config.replicates;

  PtPointDgpParams pt_params = config.pt_point_params;
  pt_params.confounding = config.pt_confounding;
  PtTwoPeriodDgpParams pt2_params = config.pt_two_period_params;
  pt2_params.confounding = config.pt_confounding;

  DesignPlan plan;
  switch (config.design) {
    case McDesign::point:
    case McDesign::point_or: {
      plan.names = {"psi0_0", "psi0_1"};
      plan.truth.resize(2);
      plan.truth << config.point_params.beta[0], config.point_params.beta[1];
      break;
    }
    case McDesign::longitudinal: {
      plan.names = {"psi0_0", "psi0_1", "psi1_0", "psi1_1"};
      plan.truth = longitudinal_truth(config.long_params);
      break;
    }
    case McDesign::pt_point: {
      PtTruth truth;
      gen_pt_point_dgp(pt_params, 1, 0, &truth);
      plan.names = {"pt.psi0_0", "pt.psi0_1", "exch.psi0_0", "exch.psi0_1", "diff.psi0_0", "diff.psi0_1"};
      plan.truth.resize(6);
      plan.truth << truth.psi, truth.psi, Eigen::VectorXd::Zero(2);
      break;
    }
    case McDesign::pt_two_period: {
      PtTruth truth;
      gen_pt_two_period_dgp(pt2_params, 1, 0, &truth);
      plan.names = truth.names;
      plan.truth = truth.psi;
      break;
    }
  }
  const int dim = static_cast<int>(plan.names.size());

  std::vector<RepResult> results(R);
  parallel_for(R, [&](int r) {
    RepResult& out = results[r];
    Rng seeds = Rng::stream(config.seed, static_cast<std::uint64_t>(r));
    const std::uint64_t data_seed = seeds.next_u64();
    const std::uint64_t fit_seed = seeds.next_u64();
    const std::uint64_t boot_seed = seeds.next_u64();
    try {
      switch (config.design) {
        case McDesign::point: {
          const Panel panel = gen_point_dgp(config.point_params, config.n, data_seed);
          const OrthogonalConfig cfg = default_point_design(config.point_params, config.folds, fit_seed);
          const EstimateReport rep = estimate_point(panel, cfg);
          out.psi = rep.psi;
          out.se = rep.se;
          out.ci_lo = rep.ci_lo;
          out.ci_hi = rep.ci_hi;
          break;
        }
        case McDesign::point_or: {
          const Panel panel = gen_point_dgp(config.point_params, config.n, data_seed);
          const OutcomeRegressionConfig cfg = default_point_or_design(config.point_params);
          const EstimateReport rep = estimate_point_outcome_regression(panel, cfg);
          out.psi = rep.psi;
          out.se = rep.se;
          out.ci_lo = rep.ci_lo;
          out.ci_hi = rep.ci_hi;
          break;
        }
        case McDesign::longitudinal: {
          const Panel panel = gen_longitudinal_dgp(config.long_params, config.n, data_seed);
          const OrthogonalConfig cfg = default_longitudinal_design(config.long_params, config.folds, fit_seed);
          EstimateReport rep = estimate_longitudinal(panel, cfg);
          if (config.bootstrap > 0) {
            rep.bootstrap = bootstrap_ci(panel, cfg, config.bootstrap, boot_seed);
            out.boot_lo = rep.bootstrap->lo;
            out.boot_hi = rep.bootstrap->hi;
          }
          out.psi = rep.psi;
          out.se = rep.se;
          out.ci_lo = rep.ci_lo;
          out.ci_hi = rep.ci_hi;
          break;
        }
        case McDesign::pt_point: {
          const Panel panel = gen_pt_point_dgp(pt_params, config.n, data_seed);
          const PtPointConfig pt_cfg = default_pt_point_design(pt_params);
          const EstimateReport pt_rep = estimate_pt_point(panel, pt_cfg);
          PointDgpParams basis_params;
          basis_params.delta = pt_params.delta;
          const OrthogonalConfig exch_cfg = default_point_design(basis_params, config.folds, fit_seed);
          const EstimateReport exch_rep = estimate_point(to_exchangeability_view(panel), exch_cfg);
          out.psi.resize(6);
          out.psi << pt_rep.psi, exch_rep.psi, (pt_rep.psi - exch_rep.psi).eval();
          const double nan = std::numeric_limits<double>::quiet_NaN();
          out.se.resize(6);
          out.se << pt_rep.se, exch_rep.se, nan, nan;
          out.ci_lo.resize(6);
          out.ci_lo << pt_rep.ci_lo, exch_rep.ci_lo, nan, nan;
          out.ci_hi.resize(6);
          out.ci_hi << pt_rep.ci_hi, exch_rep.ci_hi, nan, nan;
          break;
        }
        case McDesign::pt_two_period: {
          const Panel panel = gen_pt_two_period_dgp(pt2_params, config.n, data_seed);
          const PtTwoPeriodConfig cfg = default_pt_two_period_design(pt2_params);
          const EstimateReport rep = estimate_pt_two_period(panel, cfg);
          out.psi = rep.psi;
          out.se = rep.se;
          out.ci_lo = rep.ci_lo;
          out.ci_hi = rep.ci_hi;
          break;
        }
      }
      out.ok = true;
    } catch (const Error& e) {
      out.error = e.what();
    }
  });

  MonteCarloSummary summary;
  summary.design = mc_design_name(config.design);
  summary.n = config.n;
  summary.replicates = R;
  summary.bootstrap = config.bootstrap;
  summary.seed = config.seed;
  summary.estimates.setConstant(R, dim, std::numeric_limits<double>::quiet_NaN());
  summary.standard_errors.setConstant(R, dim, std::numeric_limits<double>::quiet_NaN());

  for (int r = 0; r < R; ++r) {
    if (!results[r].ok) {
      ++summary.failures;
      if (summary.failure_messages.size() < 5) summary.failure_messages.push_back(results[r].error);
      continue;
    }
    summary.estimates.row(r) = results[r].psi.transpose();
    summary.standard_errors.row(r) = results[r].se.transpose();
  }
  if (summary.failures > 0.05 * R) {
    std::string msg = "run_monte_carlo: " + std::to_string(summary.failures) + " of " + std::to_string(R) +
                      " replicates failed (>5%)";
    for (const auto& m : summary.failure_messages) msg += "\n  " + m;
    throw NumericError(msg);
  }
  const int kept = R - summary.failures;

  for (int j = 0; j < dim; ++j) {
    ComponentSummary comp;
    comp.name = plan.names[j];
    comp.truth = plan.truth[j];
    std::vector<double> draws, sq_err, ses, cover, boot_cover;
    draws.reserve(kept);
    for (int r = 0; r < R; ++r) {
      const RepResult& res = results[r];
      if (!res.ok) continue;
      const double x = res.psi[j];
      draws.push_back(x);
      sq_err.push_back((x - comp.truth) * (x - comp.truth));
      if (std::isfinite(res.se[j])) {
        ses.push_back(res.se[j]);
        cover.push_back(comp.truth >= res.ci_lo[j] && comp.truth <= res.ci_hi[j] ? 1.0 : 0.0);
      }
      if (static_cast<int>(res.boot_lo.size()) > j)
        boot_cover.push_back(comp.truth >= res.boot_lo[j] && comp.truth <= res.boot_hi[j] ? 1.0 : 0.0);
    }
    const double mean = pairwise_sum(draws) / kept;
    comp.bias = mean - comp.truth;
    comp.rmse = std::sqrt(pairwise_sum(sq_err) / kept);
    std::vector<double> dev(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) dev[i] = (draws[i] - mean) * (draws[i] - mean);
    comp.emp_sd = kept > 1 ? std::sqrt(pairwise_sum(dev) / (kept - 1)) : 0.0;
    if (!ses.empty()) {
      comp.mean_se = pairwise_sum(ses) / static_cast<double>(ses.size());
      comp.cov_sandwich = pairwise_sum(cover) / static_cast<double>(cover.size());
    }
    if (!boot_cover.empty()) comp.cov_boot = pairwise_sum(boot_cover) / static_cast<double>(boot_cover.size());
    summary.components.push_back(std::move(comp));
  }
  return summary;
}

std::string MonteCarloSummary::table_text() const {
  char line[256];
  std::string out;
  std::string boot_note = bootstrap > 0 ? "  B=" + std::to_string(bootstrap) : "";
  std::snprintf(line, sizeof line, "design=%s  n=%d  R=%d  seed=%llu%s  failures=%d\n", design.c_str(), n, replicates,
                static_cast<unsigned long long>(seed), boot_note.c_str(), failures);
  out += line;
  std::snprintf(line, sizeof line, "%-12s %9s %9s %9s %9s %9s %7s %7s\n", "component", "truth", "bias", "rmse",
                "empsd", "meanse", "cov95", "boot95");
  out += line;
  for (const auto& c : components) {
    char se_buf[32], cov_buf[32], boot_buf[32];
    if (c.mean_se)
      std::snprintf(se_buf, sizeof se_buf, "%9.4f", *c.mean_se);
    else
      std::snprintf(se_buf, sizeof se_buf, "%9s", "-");
    if (c.cov_sandwich)
      std::snprintf(cov_buf, sizeof cov_buf, "%7.3f", *c.cov_sandwich);
    else
      std::snprintf(cov_buf, sizeof cov_buf, "%7s", "-");
    if (c.cov_boot)
      std::snprintf(boot_buf, sizeof boot_buf, "%7.3f", *c.cov_boot);
    else
      std::snprintf(boot_buf, sizeof boot_buf, "%7s", "-");
    std::snprintf(line, sizeof line, "%-12s %9.4f %9.4f %9.4f %9.4f %s %s %s\n", c.name.c_str(), c.truth, c.bias,
                  c.rmse, c.emp_sd, se_buf, cov_buf, boot_buf);
    out += line;
  }
  return out;
}

nlohmann::json MonteCarloSummary::to_json() const {
  nlohmann::json j;
  j["design"] = design;
  j["n"] = n;
  j["replicates"] = replicates;
  j["failures"] = failures;
  j["bootstrap"] = bootstrap;
  j["seed"] = seed;
  j["rng"] = rng_note;
  j["components"] = nlohmann::json::array();
  for (const auto& c : components) {
    nlohmann::json e;
    e["name"] = c.name;
    e["truth"] = c.truth;
    e["bias"] = c.bias;
    e["rmse"] = c.rmse;
    e["emp_sd"] = c.emp_sd;
    if (c.mean_se) e["mean_se"] = *c.mean_se;
    if (c.cov_sandwich) e["cov95_sandwich"] = *c.cov_sandwich;
    if (c.cov_boot) e["cov95_bootstrap"] = *c.cov_boot;
    j["components"].push_back(e);
  }
  return j;
}

std::string MonteCarloSummary::replicates_csv() const {
  std::string out = "rep,status";
  for (const auto& c : components) out += "," + c.name;
  for (const auto& c : components) out += "," + c.name + "_se";
  out += "\n";
  char buf[64];
  for (int r = 0; r < estimates.rows(); ++r) {
    const bool ok = std::isfinite(estimates(r, 0));
    out += std::to_string(r);
    out += ok ? ",ok" : ",failed";
    for (int j = 0; j < estimates.cols(); ++j) {
      if (std::isfinite(estimates(r, j)))
        std::snprintf(buf, sizeof buf, ",%.17g", estimates(r, j));
      else
        std::snprintf(buf, sizeof buf, ",");
      out += buf;
    }
    for (int j = 0; j < standard_errors.cols(); ++j) {
      if (std::isfinite(standard_errors(r, j)))
        std::snprintf(buf, sizeof buf, ",%.17g", standard_errors(r, j));
      else
        std::snprintf(buf, sizeof buf, ",");
      out += buf;
    }
    out += "\n";
  }
  return out;
}

} // namespace mtp
