#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mtp/learner.hpp"
#include "mtp/policy.hpp"

namespace mtp {

struct ClipBounds {
  double lo = 1e-3;
  double hi = 1e3;
};

struct ClipCounter {
  long below = 0;
  long above = 0;
  double seen_min = std::numeric_limits<double>::infinity();
  double seen_max = -std::numeric_limits<double>::infinity();

  void merge(const ClipCounter& other);
};

// Normal working-model density ratio phi(a - delta; m, sigma) / phi(a; m, sigma)
// = exp((2 u delta - delta^2) / (2 sigma^2)) with u = a - m. Clipping is
// counted, never silent. sigma = 0 is resolved by the limit (0, 1, or the
// upper clip depending on the exponent's sign).
double density_ratio(double a, double delta, double m_of_h, double sigma, const ClipBounds& clip,
                     ClipCounter* counter = nullptr);

double density_ratio(const TreatmentModel& model, double a, double delta, std::span<const double> h,
                     const ClipBounds& clip, ClipCounter* counter = nullptr);

// Adjoint pullback q~ = T_g^dagger q for the continuous shift case: an
// index-function value vector rescaled by the density ratio (q depends on h
// only, matching q_i = s_i in the estimators).
Eigen::VectorXd adjoint_pullback_shift(const Eigen::VectorXd& q, const TreatmentModel& model, double delta, double a,
                                       std::span<const double> h, const ClipBounds& clip,
                                       ClipCounter* counter = nullptr);

// Discrete treatment with a (possibly many-to-one) policy:
// q~(l, a_j) = sum_{a': g(a') = a_j} q(l, a') pi(a' | l) / pi(a_j | l).
// support/pmf/q are aligned; a positivity violation (pi(a_j|l) = 0 with a
// nonempty preimage) throws.
struct DiscreteLaw {
  std::vector<double> support;
  std::vector<double> pmf;
};

std::vector<double> adjoint_pullback_discrete(std::span<const double> q, const DiscreteLaw& law,
                                              const std::function<double(double)>& g);

} // namespace mtp
