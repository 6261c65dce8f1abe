#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "mtp/csv.hpp"
#include "mtp/estimators.hpp"
#include "mtp/parallel_trends.hpp"

namespace mtp {

// One JSON document drives an analysis; CLI flags override individual
// fields. See README for the schema.
struct AnalysisConfig {
  std::string data_path;
  Layout layout = Layout::point;
  ColumnMapping columns;
  nlohmann::json policy_spec;  // {"kind": "shift", "delta": ...}
  std::vector<std::string> modifiers; // blip s_t(H) = (1, modifiers...)
  std::optional<nlohmann::json> blip_terms_per_time; // explicit alternative to modifiers
  std::string estimator = "orthogonal"; // orthogonal | outcome-regression | pt
  std::string learner = "least-squares"; // least-squares | boosted-trees
  int folds = 5;
  std::uint64_t seed = 1;
  int bootstrap = 0;
  ClipBounds clip;
  double ridge = 0.0;
  std::optional<nlohmann::json> nuisance; // mu_terms / m_terms overrides (arrays or per-time arrays)
  std::vector<double> effect_grid; // empty = min/median/max of the modifier column

  nlohmann::json to_json() const;
  static AnalysisConfig from_json(const nlohmann::json& j);
};

struct EffectRow {
  double at = 0.0;     // modifier value v
  double effect = 0.0; // delta * s(v)' psi
  double se = 0.0;     // delta-method
  double lo = 0.0, hi = 0.0;
};

struct ReportDocument {
  std::string tool_version;
  std::uint64_t seed = 0;
  nlohmann::json config_echo;
  std::string estimator;
  double policy_delta = 0.0; // time-0 shift (0 when not a shift policy)
  std::vector<std::string> component_names;
  Eigen::VectorXd psi, se, ci_lo, ci_hi;
  Eigen::MatrixXd vcov;
  std::optional<BootstrapCi> bootstrap;
  std::string modifier_name;
  std::vector<EffectRow> effects;
  // diagnostics
  double ratio_min = 0.0, ratio_max = 0.0;
  long clip_low = 0, clip_high = 0;
  std::vector<int> fold_sizes;
  std::vector<double> ridge_used;

  nlohmann::json to_json() const;
  static ReportDocument from_json(const nlohmann::json& j);
  std::string text_summary() const;
};

ReportDocument run_analysis(const AnalysisConfig& config, const Panel& panel);

// Data/config cross-checks without fitting (the `validate` subcommand).
void validate_analysis(const AnalysisConfig& config, const Panel& panel);

} // namespace mtp
