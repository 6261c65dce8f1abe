#include "mtp/policy.hpp"

#include <cmath>

#include "mtp/errors.hpp"

namespace mtp {

PolicySpec PolicySpec::shift(std::vector<double> deltas) {
  if (deltas.empty()) throw ConfigError("shift policy needs at least one delta");
  for (double d : deltas) {
    if (!std::isfinite(d)) throw ConfigError("shift delta must be finite");
  }
  PolicySpec p;
  p.kind_ = Kind::shift;
  p.deltas_ = std::move(deltas);
  return p;
}

PolicySpec PolicySpec::threshold_floor(double threshold) {
  if (!std::isfinite(threshold)) throw ConfigError("threshold must be finite");
  PolicySpec p;
  p.kind_ = Kind::threshold_floor;
  p.threshold_ = threshold;
  return p;
}

PolicySpec PolicySpec::custom(CustomFn fn) {
  if (!fn) throw ConfigError("custom policy needs a callable");
  PolicySpec p;
  p.kind_ = Kind::custom;
  p.custom_ = std::move(fn);
  return p;
}

double PolicySpec::delta(int t) const {
  if (kind_ != Kind::shift) throw ConfigError("delta() is only defined for shift policies");
  if (deltas_.size() == 1) return deltas_[0];
  if (t < 0 || t >= static_cast<int>(deltas_.size()))
    throw ConfigError("no shift delta configured for time " + std::to_string(t));
  return deltas_[t];
}

double PolicySpec::apply(int t, std::span<const double> h, double a) const {
  if (!std::isfinite(a)) throw DataError("apply_policy: treatment value is not finite");
  switch (kind_) {
    case Kind::shift:
      return a + delta(t);
    case Kind::threshold_floor:
      return a < threshold_ ? threshold_ : a;
    case Kind::custom: {
      double g;
      try {
        g = custom_(t, h, a);
      } catch (const std::exception& e) {
        throw NumericError(std::string("custom policy evaluation failed: ") + e.what());
      }
      if (!std::isfinite(g)) throw NumericError("custom policy returned a non-finite value");
      return g;
    }
  }
  throw ConfigError("unreachable policy kind");
}

void PolicySpec::validate_for_exchangeability(int horizon) const {
  if (kind_ != Kind::shift)
    throw ConfigError("the orthogonal exchangeability estimators support shift policies only");
  if (deltas_.size() != 1 && static_cast<int>(deltas_.size()) != horizon)
    throw ConfigError("shift policy has " + std::to_string(deltas_.size()) + " deltas for horizon " +
                      std::to_string(horizon));
  for (int t = 0; t < horizon; ++t) {
    if (delta(t) == 0.0)
      throw ConfigError("shift delta is zero at time " + std::to_string(t) +
                        "; psi_" + std::to_string(t) + " is unidentified (M_t = delta_t * sum s s^T vanishes)");
  }
}

void PolicySpec::validate_for_parallel_trends(int horizon) const {
  if (kind_ != Kind::shift) return;
  if (deltas_.size() != 1 && static_cast<int>(deltas_.size()) != horizon)
    throw ConfigError("shift policy has " + std::to_string(deltas_.size()) + " deltas for horizon " +
                      std::to_string(horizon));
  bool any_nonzero = false;
  for (int t = 0; t < horizon; ++t) any_nonzero = any_nonzero || delta(t) != 0.0;
  if (!any_nonzero) throw ConfigError("all shift deltas are zero; nothing to estimate");
}

nlohmann::json PolicySpec::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::shift:
      j["kind"] = "shift";
      if (deltas_.size() == 1)
        j["delta"] = deltas_[0];
      else
        j["delta"] = deltas_;
      break;
    case Kind::threshold_floor:
      j["kind"] = "threshold-floor";
      j["delta"] = threshold_;
      break;
    case Kind::custom:
      j["kind"] = "custom";
      break;
  }
  return j;
}

PolicySpec PolicySpec::from_json(const nlohmann::json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "shift") {
    const auto& d = spec.at("delta");
    if (d.is_array()) return shift(d.get<std::vector<double>>());
    return shift(d.get<double>());
  }
  if (kind == "threshold-floor" || kind == "threshold_floor") return threshold_floor(spec.at("delta").get<double>());
  if (kind == "custom") throw ConfigError("custom policies cannot be configured from JSON; register one in code");
  throw ConfigError("unknown policy kind '" + kind + "'");
}

double apply_policy(const PolicySpec& policy, int t, std::span<const double> h, double a) {
  return policy.apply(t, h, a);
}

} // namespace mtp
