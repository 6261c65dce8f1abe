#pragma once

#include <span>
#include <string>
#include <vector>

namespace mtp {

// Panel layouts. Exchangeability layouts need the terminal outcome only;
// parallel-trends (pt) layouts need an outcome at every time 0..T.
enum class Layout { point, longitudinal, pt_point, pt_longitudinal };

const char* layout_name(Layout layout);
Layout layout_from_name(const std::string& name);

// Unit-by-time observational records. Data are stored columnar per time step;
// all units share the same horizon and covariate dimensions, no missing
// values survive construction. Immutable after validate(); shareable across
// threads.
class Panel {
public:
  struct TimeStep {
    // covariates[c][i] = covariate c of unit i at this time
    std::vector<std::vector<double>> covariates;
    std::vector<double> treatment;
  };

  Layout layout = Layout::point;
  std::vector<std::string> unit_ids;
  std::vector<TimeStep> steps;            // size T
  std::vector<std::vector<double>> outcomes; // outcomes[k] = Y_k, k = 0..T; empty if unmeasured

  int horizon() const { return static_cast<int>(steps.size()); }
  int n_units() const { return static_cast<int>(unit_ids.size()); }
  int covariate_dim(int t) const { return static_cast<int>(steps[t].covariates.size()); }

  bool has_outcome(int k) const {
    return k >= 0 && k < static_cast<int>(outcomes.size()) && !outcomes[k].empty();
  }
  const std::vector<double>& outcome(int k) const;
  const std::vector<double>& terminal_outcome() const { return outcome(horizon()); }

  // Flattened pre-treatment history H_t = (L_0, ..., L_t, A_0, ..., A_{t-1}).
  int history_dim(int t) const;
  void history(int t, int unit, double* out) const;
  std::vector<double> history(int t, int unit) const;

  // Throws DataError on structural problems (ragged data, NaNs, duplicate
  // ids, missing layout-required outcomes).
  void validate() const;

  static bool is_pt(Layout layout) { return layout == Layout::pt_point || layout == Layout::pt_longitudinal; }
};

} // namespace mtp
