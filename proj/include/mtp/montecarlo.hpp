#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtp/simulation.hpp"

namespace mtp {

// Stable pairwise summation; reduction order is fixed by the slot order, so
// aggregates do not depend on the thread count.
double pairwise_sum(std::span<const double> values);

enum class McDesign { point, longitudinal, pt_point, pt_two_period, point_or };

const char* mc_design_name(McDesign design);
McDesign mc_design_from_name(const std::string& name);

struct McConfig {
  McDesign design = McDesign::point;
  int n = 1000;
  int replicates = 200;
  std::uint64_t seed = 1;
  int folds = 5;
  int bootstrap = 0; // >0 adds bootstrap CIs (longitudinal design)
  double pt_confounding = 1.0;
  PointDgpParams point_params;
  LongDgpParams long_params;
  PtPointDgpParams pt_point_params;
  PtTwoPeriodDgpParams pt_two_period_params;
};

struct ComponentSummary {
  std::string name;
  double truth = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double emp_sd = 0.0;
  std::optional<double> mean_se;
  std::optional<double> cov_sandwich; // 95% Wald coverage
  std::optional<double> cov_boot;     // 95% percentile-bootstrap coverage
};

struct MonteCarloSummary {
  std::string design;
  int n = 0;
  int replicates = 0;
  int failures = 0;
  int bootstrap = 0;
  std::uint64_t seed = 0;
  std::vector<ComponentSummary> components;
  // per-replicate draws (columns follow `components`; failed replicates hold NaN)
  Eigen::MatrixXd estimates;
  Eigen::MatrixXd standard_errors;
  std::vector<std::string> failure_messages;
  std::string rng_note =
      "splitmix64 streams; replicate r draws data/fit/bootstrap seeds from stream (seed, r); normals via inverse CDF (AS241)";

  std::string table_text() const;
  nlohmann::json to_json() const;
  std::string replicates_csv() const;
};

// R independent replicates with derived seeds; aborts (ErrorCode::numeric)
// when more than 5% of replicates fail.
MonteCarloSummary run_monte_carlo(const McConfig& config);

} // namespace mtp
