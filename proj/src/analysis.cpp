#include "mtp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mtp/errors.hpp"
#include "mtp/longitudinal.hpp"
#include "mtp/version.hpp"

namespace mtp {

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

// Flat index of a covariate column inside H_t; "most recent" resolution,
// i.e. the time-t copy of the column.
int modifier_index(const ColumnMapping& columns, const std::string& name, int t) {
  const auto it = std::find(columns.covariates.begin(), columns.covariates.end(), name);
  if (it == columns.covariates.end())
    throw ConfigError("blip modifier '" + name + "' is not a mapped covariate column");
  const int pos = static_cast<int>(it - columns.covariates.begin());
  return t * static_cast<int>(columns.covariates.size()) + pos;
}

LinearBasis blip_basis_for_time(const AnalysisConfig& cfg, int t) {
  if (cfg.blip_terms_per_time) {
    const auto& per_time = *cfg.blip_terms_per_time;
    if (!per_time.is_array() || static_cast<int>(per_time.size()) <= t)
      throw ConfigError("blip terms must be an array with one entry per time");
    return LinearBasis::from_json(per_time[t]);
  }
  if (cfg.modifiers.empty()) throw ConfigError("blip spec needs modifiers or explicit terms");
  std::vector<int> idx;
  for (const auto& name : cfg.modifiers) idx.push_back(modifier_index(cfg.columns, name, t));
  return LinearBasis::intercept_and(idx);
}

LinearBasis default_mu_basis(const AnalysisConfig& cfg, const Panel& panel, int t) {
  std::vector<BasisTerm> terms{BasisTerm::intercept()};
  for (int j = 0; j < panel.history_dim(t); ++j) terms.push_back(BasisTerm::hist(j));
  terms.push_back(BasisTerm::treat());
  for (const auto& name : cfg.modifiers) terms.push_back(BasisTerm::treat_hist(modifier_index(cfg.columns, name, t)));
  return LinearBasis(terms);
}

LinearBasis default_m_basis(const Panel& panel, int t) {
  std::vector<BasisTerm> terms{BasisTerm::intercept()};
  for (int j = 0; j < panel.history_dim(t); ++j) terms.push_back(BasisTerm::hist(j));
  return LinearBasis(terms);
}

LinearBasis nuisance_basis(const std::optional<nlohmann::json>& nuisance, const char* key, int t,
                           const LinearBasis& fallback) {
  if (!nuisance || !nuisance->contains(key)) return fallback;
  const auto& spec = (*nuisance)[key];
  if (spec.is_array() && !spec.empty() && spec[0].is_array()) {
    if (static_cast<int>(spec.size()) <= t) throw ConfigError(std::string(key) + ": missing entry for time");
    return LinearBasis::from_json(spec[t]);
  }
  return LinearBasis::from_json(spec);
}

LearnerConfig make_learner(const AnalysisConfig& cfg, LinearBasis basis) {
  LearnerConfig lc;
  if (cfg.learner == "least-squares" || cfg.learner == "least_squares") {
    lc.kind = LearnerConfig::Kind::least_squares;
  } else if (cfg.learner == "boosted-trees" || cfg.learner == "boosted_trees") {
    lc.kind = LearnerConfig::Kind::boosted_trees;
  } else {
    throw ConfigError("unknown learner '" + cfg.learner + "'");
  }
  lc.basis = std::move(basis);
  return lc;
}

OrthogonalConfig build_orthogonal_config(const AnalysisConfig& cfg, const Panel& panel) {
  OrthogonalConfig oc;
  oc.policy = PolicySpec::from_json(cfg.policy_spec);
  const int T = panel.horizon();
  for (int t = 0; t < T; ++t) {
    oc.blip.bases.push_back(blip_basis_for_time(cfg, t));
    oc.mu_learners.push_back(make_learner(cfg, nuisance_basis(cfg.nuisance, "mu_terms", t, default_mu_basis(cfg, panel, t))));
    oc.m_learners.push_back(make_learner(cfg, nuisance_basis(cfg.nuisance, "m_terms", t, default_m_basis(panel, t))));
  }
  oc.folds = cfg.folds;
  oc.seed = cfg.seed;
  oc.clip = cfg.clip;
  if (cfg.ridge != 0.0) oc.ridge.assign(T, cfg.ridge);
  return oc;
}

std::vector<double> default_effect_grid(const Panel& panel, int column_index) {
  std::vector<double> col = panel.steps[0].covariates[column_index];
  std::sort(col.begin(), col.end());
  const std::size_t n = col.size();
  const double median = n % 2 == 1 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  std::vector<double> grid{col.front(), median, col.back()};
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

} // namespace

nlohmann::json AnalysisConfig::to_json() const {
  nlohmann::json j;
  if (!data_path.empty()) j["data"] = data_path;
  j["layout"] = layout_name(layout);
  nlohmann::json cols;
  cols["id"] = columns.id;
  cols["time"] = columns.time;
  cols["treatment"] = columns.treatment;
  cols["outcome"] = columns.outcome;
  if (!columns.baseline_outcome.empty()) cols["baseline_outcome"] = columns.baseline_outcome;
  cols["covariates"] = columns.covariates;
  j["columns"] = cols;
  j["policy"] = policy_spec;
  nlohmann::json blip;
  if (blip_terms_per_time)
    blip["terms"] = *blip_terms_per_time;
  else
    blip["modifiers"] = modifiers;
  j["blip"] = blip;
  j["estimator"] = estimator;
  j["learner"] = learner;
  j["folds"] = folds;
  j["seed"] = seed;
  j["bootstrap"] = bootstrap;
  j["clip"] = {clip.lo, clip.hi};
  j["ridge"] = ridge;
  if (nuisance) j["nuisance"] = *nuisance;
  if (!effect_grid.empty()) j["effect_grid"] = effect_grid;
  return j;
}

AnalysisConfig AnalysisConfig::from_json(const nlohmann::json& j) {
  AnalysisConfig cfg;
  cfg.data_path = j.value("data", std::string());
  cfg.layout = layout_from_name(j.value("layout", std::string("point")));
  if (j.contains("columns")) {
    const auto& c = j["columns"];
    cfg.columns.id = c.value("id", std::string("id"));
    cfg.columns.time = c.value("time", std::string("t"));
    cfg.columns.treatment = c.value("treatment", std::string("A"));
    cfg.columns.outcome = c.value("outcome", std::string("Y"));
    cfg.columns.baseline_outcome = c.value("baseline_outcome", std::string());
    if (c.contains("covariates")) cfg.columns.covariates = c["covariates"].get<std::vector<std::string>>();
  }
  if (!j.contains("policy")) throw ConfigError("config needs a policy block");
  cfg.policy_spec = j["policy"];
  PolicySpec::from_json(cfg.policy_spec); // fail early on malformed policies
  if (j.contains("blip")) {
    const auto& b = j["blip"];
    if (b.contains("modifiers")) cfg.modifiers = b["modifiers"].get<std::vector<std::string>>();
    if (b.contains("terms")) cfg.blip_terms_per_time = b["terms"];
  }
  cfg.estimator = j.value("estimator", std::string("orthogonal"));
  cfg.learner = j.value("learner", std::string("least-squares"));
  cfg.folds = j.value("folds", 5);
  cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
  cfg.bootstrap = j.value("bootstrap", 0);
  if (j.contains("clip")) {
    const auto& c = j["clip"];
    if (!c.is_array() || c.size() != 2) throw ConfigError("clip must be [lo, hi]");
    cfg.clip.lo = c[0].get<double>();
    cfg.clip.hi = c[1].get<double>();
  }
  cfg.ridge = j.value("ridge", 0.0);
  if (j.contains("nuisance")) cfg.nuisance = j["nuisance"];
  if (j.contains("effect_grid")) cfg.effect_grid = j["effect_grid"].get<std::vector<double>>();
  return cfg;
}

void validate_analysis(const AnalysisConfig& cfg, const Panel& panel) {
  panel.validate();
  const PolicySpec policy = PolicySpec::from_json(cfg.policy_spec);
  if (cfg.estimator == "orthogonal" || cfg.estimator == "outcome-regression")
    policy.validate_for_exchangeability(panel.horizon());
  else if (cfg.estimator == "pt")
    policy.validate_for_parallel_trends(panel.horizon());
  else
    throw ConfigError("unknown estimator '" + cfg.estimator + "'");

  if ((cfg.estimator == "pt") != Panel::is_pt(panel.layout))
    throw ConfigError("estimator '" + cfg.estimator + "' does not match layout '" +
                      std::string(layout_name(panel.layout)) + "'");
  for (int t = 0; t < panel.horizon(); ++t) {
    const LinearBasis b = blip_basis_for_time(cfg, t);
    if (b.max_history_index() >= panel.history_dim(t))
      throw ConfigError("blip basis at time " + std::to_string(t) + " exceeds the history dimension");
  }
}

ReportDocument run_analysis(const AnalysisConfig& cfg, const Panel& panel) {
  validate_analysis(cfg, panel);
  const PolicySpec policy = PolicySpec::from_json(cfg.policy_spec);

  EstimateReport est;
  if (cfg.estimator == "orthogonal") {
    OrthogonalConfig oc = build_orthogonal_config(cfg, panel);
    est = panel.layout == Layout::point ? estimate_point(panel, oc) : estimate_longitudinal(panel, oc);
    if (cfg.bootstrap > 0) est.bootstrap = bootstrap_ci(panel, oc, cfg.bootstrap, cfg.seed);
  } else if (cfg.estimator == "outcome-regression") {
    if (panel.layout != Layout::point) throw ConfigError("outcome-regression supports the point layout only");
    OutcomeRegressionConfig oc;
    oc.policy = policy;
    oc.blip.bases = {blip_basis_for_time(cfg, 0)};
    oc.mu_basis = nuisance_basis(cfg.nuisance, "mu_terms", 0, default_mu_basis(cfg, panel, 0));
    est = estimate_point_outcome_regression(panel, oc);
  } else { // pt
    if (panel.layout == Layout::pt_point) {
      PtPointConfig pc;
      pc.policy = policy;
      pc.blip.bases = {blip_basis_for_time(cfg, 0)};
      pc.mu_d_basis = nuisance_basis(cfg.nuisance, "mu_terms", 0, default_mu_basis(cfg, panel, 0));
      est = estimate_pt_point(panel, pc);
    } else {
      if (panel.horizon() != 2) throw ConfigError("the pt estimator supports T = 2 longitudinal panels");
      PtTwoPeriodConfig pc;
      pc.policy = policy;
      pc.s01 = blip_basis_for_time(cfg, 0);
      pc.s12 = blip_basis_for_time(cfg, 1);
      pc.s02 = blip_basis_for_time(cfg, 0);
      pc.mu01_basis = nuisance_basis(cfg.nuisance, "mu01_terms", 0, default_mu_basis(cfg, panel, 0));
      pc.mu12_basis = nuisance_basis(cfg.nuisance, "mu12_terms", 1, default_mu_basis(cfg, panel, 1));
      pc.mu02_basis = nuisance_basis(cfg.nuisance, "mu02_terms", 0, default_mu_basis(cfg, panel, 0));
      est = estimate_pt_two_period(panel, pc);
    }
  }

  ReportDocument doc;
  doc.tool_version = kVersion;
  doc.seed = cfg.seed;
  doc.config_echo = cfg.to_json();
  doc.estimator = cfg.estimator;
  doc.component_names = est.component_names;
  doc.psi = est.psi;
  doc.se = est.se;
  doc.ci_lo = est.ci_lo;
  doc.ci_hi = est.ci_hi;
  doc.vcov = est.vcov;
  doc.bootstrap = est.bootstrap;
  // 0 means no density ratio was evaluated (the PT path)
  doc.ratio_min = std::isfinite(est.diagnostics.ratio.seen_min) ? est.diagnostics.ratio.seen_min : 0.0;
  doc.ratio_max = std::isfinite(est.diagnostics.ratio.seen_max) ? est.diagnostics.ratio.seen_max : 0.0;
  doc.clip_low = est.diagnostics.ratio.below;
  doc.clip_high = est.diagnostics.ratio.above;
  doc.fold_sizes = est.diagnostics.fold_sizes;
  doc.ridge_used = est.diagnostics.ridge_used;

  const PolicySpec pol = policy;
  if (pol.kind() == PolicySpec::Kind::shift) doc.policy_delta = pol.delta(0);

  // Effect table: point layout, shift policy, blip = (1, modifier)
  if (panel.horizon() == 1 && pol.kind() == PolicySpec::Kind::shift && cfg.modifiers.size() == 1 &&
      !cfg.blip_terms_per_time && est.psi.size() == 2) {
    doc.modifier_name = cfg.modifiers[0];
    const int col = modifier_index(cfg.columns, cfg.modifiers[0], 0);
    std::vector<double> grid = cfg.effect_grid.empty() ? default_effect_grid(panel, col) : cfg.effect_grid;
    const double delta = pol.delta(0);
    for (double v : grid) {
      EffectRow row;
      row.at = v;
      Eigen::Vector2d s(1.0, v);
      row.effect = delta * (s[0] * est.psi[0] + s[1] * est.psi[1]);
      row.se = std::sqrt(delta * delta * (s.transpose() * est.vcov * s)(0));
      row.lo = row.effect - 1.96 * row.se;
      row.hi = row.effect + 1.96 * row.se;
      doc.effects.push_back(row);
    }
  }
  return doc;
}

nlohmann::json ReportDocument::to_json() const {
  nlohmann::json j;
  j["tool_version"] = tool_version;
  j["seed"] = seed;
  j["config"] = config_echo;
  j["estimator"] = estimator;
  j["policy_delta"] = policy_delta;
  j["components"] = component_names;
  j["psi"] = vector_to_json(psi);
  j["se"] = vector_to_json(se);
  j["ci_lo"] = vector_to_json(ci_lo);
  j["ci_hi"] = vector_to_json(ci_hi);
  j["vcov"] = matrix_to_json(vcov);
  if (bootstrap) {
    nlohmann::json b;
    b["replicates"] = bootstrap->replicates;
    b["dropped"] = bootstrap->dropped;
    b["lo"] = vector_to_json(bootstrap->lo);
    b["hi"] = vector_to_json(bootstrap->hi);
    b["sd"] = vector_to_json(bootstrap->sd);
    j["bootstrap"] = b;
  }
  if (!effects.empty()) {
    j["effect_modifier"] = modifier_name;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : effects) {
      rows.push_back({{"at", e.at}, {"effect", e.effect}, {"se", e.se}, {"lo", e.lo}, {"hi", e.hi}});
    }
    j["effects"] = rows;
  }
  nlohmann::json d;
  d["ratio_min"] = ratio_min;
  d["ratio_max"] = ratio_max;
  d["clip_low"] = clip_low;
  d["clip_high"] = clip_high;
  d["fold_sizes"] = fold_sizes;
  d["ridge_used"] = ridge_used;
  j["diagnostics"] = d;
  return j;
}

ReportDocument ReportDocument::from_json(const nlohmann::json& j) {
  ReportDocument doc;
  doc.tool_version = j.at("tool_version").get<std::string>();
  doc.seed = j.at("seed").get<std::uint64_t>();
  doc.config_echo = j.at("config");
  doc.estimator = j.at("estimator").get<std::string>();
  doc.policy_delta = j.at("policy_delta").get<double>();
  doc.component_names = j.at("components").get<std::vector<std::string>>();
  doc.psi = vector_from_json(j.at("psi"));
  doc.se = vector_from_json(j.at("se"));
  doc.ci_lo = vector_from_json(j.at("ci_lo"));
  doc.ci_hi = vector_from_json(j.at("ci_hi"));
  doc.vcov = matrix_from_json(j.at("vcov"));
  if (j.contains("bootstrap")) {
    BootstrapCi b;
    b.replicates = j["bootstrap"].at("replicates").get<int>();
    b.dropped = j["bootstrap"].at("dropped").get<int>();
    b.lo = vector_from_json(j["bootstrap"].at("lo"));
    b.hi = vector_from_json(j["bootstrap"].at("hi"));
    b.sd = vector_from_json(j["bootstrap"].at("sd"));
    doc.bootstrap = b;
  }
  if (j.contains("effects")) {
    doc.modifier_name = j.value("effect_modifier", std::string());
    for (const auto& e : j["effects"]) {
      EffectRow row;
      row.at = e.at("at").get<double>();
      row.effect = e.at("effect").get<double>();
      row.se = e.at("se").get<double>();
      row.lo = e.at("lo").get<double>();
      row.hi = e.at("hi").get<double>();
      doc.effects.push_back(row);
    }
  }
  const auto& d = j.at("diagnostics");
  doc.ratio_min = d.at("ratio_min").get<double>();
  doc.ratio_max = d.at("ratio_max").get<double>();
  doc.clip_low = d.at("clip_low").get<long>();
  doc.clip_high = d.at("clip_high").get<long>();
  doc.fold_sizes = d.at("fold_sizes").get<std::vector<int>>();
  doc.ridge_used = d.at("ridge_used").get<std::vector<double>>();
  return doc;
}

std::string ReportDocument::text_summary() const {
  std::ostringstream out;
  char line[256];
  out << "mtpsnmm " << tool_version << "  estimator=" << estimator << "  seed=" << seed << "\n";
  if (policy_delta != 0.0) out << "policy: shift delta=" << policy_delta << "\n";
  std::snprintf(line, sizeof line, "%-10s %12s %12s %12s %12s\n", "component", "estimate", "se", "ci_lo", "ci_hi");
  out << line;
  for (int j = 0; j < psi.size(); ++j) {
    std::snprintf(line, sizeof line, "%-10s %12.6f %12.6f %12.6f %12.6f\n", component_names[j].c_str(), psi[j], se[j],
                  ci_lo[j], ci_hi[j]);
    out << line;
  }
  if (bootstrap) {
    std::snprintf(line, sizeof line, "bootstrap: B=%d dropped=%d (percentile 95%% CIs)\n", bootstrap->replicates,
                  bootstrap->dropped);
    out << line;
    for (int j = 0; j < psi.size(); ++j) {
      std::snprintf(line, sizeof line, "%-10s boot_ci=[%.6f, %.6f] boot_sd=%.6f\n", component_names[j].c_str(),
                    bootstrap->lo[j], bootstrap->hi[j], bootstrap->sd[j]);
      out << line;
    }
  }
  if (!effects.empty()) {
    out << "effect of the shift at " << modifier_name << " values (delta-method 95% CIs):\n";
    for (const auto& e : effects) {
      std::snprintf(line, sizeof line, "  %s=%g: effect=%.6f se=%.6f ci=[%.6f, %.6f]\n", modifier_name.c_str(), e.at,
                    e.effect, e.se, e.lo, e.hi);
      out << line;
    }
  }
  if (clip_low + clip_high > 0)
    out << "density-ratio clipping events: " << clip_low << " low, " << clip_high << " high\n";
  return out.str();
}

} // namespace mtp
