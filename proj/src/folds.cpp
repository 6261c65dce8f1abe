#include "mtp/folds.hpp"

#include <numeric>

#include "mtp/errors.hpp"
#include "mtp/rng.hpp"

namespace mtp {

std::vector<int> FoldPlan::sizes() const {
  std::vector<int> s(folds, 0);
  for (int f : assignment) ++s[f];
  return s;
}

FoldPlan make_folds(int n, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("need at least 2 folds, got " + std::to_string(folds));
  if (folds > n) throw ConfigError("more folds (" + std::to_string(folds) + ") than units (" + std::to_string(n) + ")");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = Rng::stream(seed, 0x0f01d5ULL);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }

  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.assignment.resize(n);
  for (int i = 0; i < n; ++i) plan.assignment[perm[i]] = i % folds;
  return plan;
}

} // namespace mtp
