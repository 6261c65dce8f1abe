#pragma once

#include <cstdint>
#include <vector>

namespace mtp {

// Unit-level cross-fitting folds: a seeded permutation dealt round-robin.
// All time points of a unit share its fold.
struct FoldPlan {
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignment; // unit index -> fold in [0, folds)

  std::vector<int> sizes() const;
};

FoldPlan make_folds(int n, int folds, std::uint64_t seed);

} // namespace mtp
