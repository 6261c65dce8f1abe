#include "mtp/panel.hpp"

#include <cmath>
#include <unordered_set>

#include "mtp/errors.hpp"

namespace mtp {

const char* layout_name(Layout layout) {
  switch (layout) {
    case Layout::point: return "point";
    case Layout::longitudinal: return "longitudinal";
    case Layout::pt_point: return "pt-point";
    case Layout::pt_longitudinal: return "pt-longitudinal";
  }
  return "?";
}

Layout layout_from_name(const std::string& name) {
  if (name == "point") return Layout::point;
  if (name == "longitudinal") return Layout::longitudinal;
  if (name == "pt-point" || name == "pt_point") return Layout::pt_point;
  if (name == "pt-longitudinal" || name == "pt_longitudinal") return Layout::pt_longitudinal;
  throw ConfigError("unknown layout '" + name + "'");
}

const std::vector<double>& Panel::outcome(int k) const {
  if (!has_outcome(k)) throw DataError("outcome Y_" + std::to_string(k) + " is not present in the panel");
  return outcomes[k];
}

int Panel::history_dim(int t) const {
  int d = 0;
  for (int j = 0; j <= t; ++j) d += covariate_dim(j);
  return d + t; // A_0..A_{t-1}
}

void Panel::history(int t, int unit, double* out) const {
  int pos = 0;
  for (int j = 0; j <= t; ++j) {
    for (const auto& col : steps[j].covariates) out[pos++] = col[unit];
  }
  for (int j = 0; j < t; ++j) out[pos++] = steps[j].treatment[unit];
}

std::vector<double> Panel::history(int t, int unit) const {
  std::vector<double> h(history_dim(t));
  history(t, unit, h.data());
  return h;
}

void Panel::validate() const {
  const int n = n_units();
  const int T = horizon();
  if (n == 0) throw DataError("panel has no units");
  if (T == 0) throw DataError("panel has no time steps");

  if ((layout == Layout::point || layout == Layout::pt_point) && T != 1)
    throw DataError("point layouts require exactly one time step, got " + std::to_string(T));

  std::unordered_set<std::string> seen;
  for (const auto& id : unit_ids) {
    if (!seen.insert(id).second) throw DataError("duplicate unit id '" + id + "'");
  }

  auto check_column = [&](const std::vector<double>& col, const std::string& what) {
    if (static_cast<int>(col.size()) != n)
      throw DataError(what + " has " + std::to_string(col.size()) + " rows, expected " + std::to_string(n));
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(col[i]))
        throw DataError(what + " is not finite for unit '" + unit_ids[i] + "'");
    }
  };

  for (int t = 0; t < T; ++t) {
    check_column(steps[t].treatment, "treatment A_" + std::to_string(t));
    for (std::size_t c = 0; c < steps[t].covariates.size(); ++c)
      check_column(steps[t].covariates[c], "covariate " + std::to_string(c) + " at time " + std::to_string(t));
  }

  if (static_cast<int>(outcomes.size()) > T + 1)
    throw DataError("panel carries outcomes beyond Y_T");
  for (int k = 0; k < static_cast<int>(outcomes.size()); ++k) {
    if (!outcomes[k].empty()) check_column(outcomes[k], "outcome Y_" + std::to_string(k));
  }

  if (!has_outcome(T)) throw DataError("terminal outcome Y_" + std::to_string(T) + " is required");
  if (is_pt(layout)) {
    for (int k = 0; k <= T; ++k) {
      if (!has_outcome(k))
        throw DataError("parallel-trends layouts require outcomes at every time; Y_" + std::to_string(k) +
                        " is missing");
    }
  }
}

} // namespace mtp
