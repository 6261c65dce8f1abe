#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace mtp {

// A modified treatment policy g_t(h_t, a_t) -> a_t^+.
//  - shift: a + delta_t (the primary policy; delta_t must be nonzero for
//    every estimated time under exchangeability, see validate_*).
//  - threshold_floor: 1{a < delta} * delta + 1{a >= delta} * a.
//  - custom: user map; evaluation failure surfaces as a policy-eval error.
class PolicySpec {
public:
  enum class Kind { shift, threshold_floor, custom };
  using CustomFn = std::function<double(int t, std::span<const double> h, double a)>;

  static PolicySpec shift(std::vector<double> deltas);
  static PolicySpec shift(double delta) { return shift(std::vector<double>{delta}); }
  static PolicySpec threshold_floor(double threshold);
  static PolicySpec custom(CustomFn fn);

  Kind kind() const { return kind_; }
  // Shift size for time t (shift policies). Single-delta specs broadcast
  // over times.
  double delta(int t) const;
  double threshold() const { return threshold_; }
  const std::vector<double>& deltas() const { return deltas_; }

  double apply(int t, std::span<const double> h, double a) const;

  // Exchangeability estimators require a shift policy with delta_t != 0 at
  // every time: the normal-equation matrix M_t = delta_t * sum s s^T is
  // identically zero otherwise and psi_t is unidentified.
  void validate_for_exchangeability(int horizon) const;
  // The PT path permits individual zero shifts but not all-zero.
  void validate_for_parallel_trends(int horizon) const;

  nlohmann::json to_json() const;
  static PolicySpec from_json(const nlohmann::json& spec);

private:
  Kind kind_ = Kind::shift;
  std::vector<double> deltas_;
  double threshold_ = 0.0;
  CustomFn custom_;
};

double apply_policy(const PolicySpec& policy, int t, std::span<const double> h, double a);

} // namespace mtp
