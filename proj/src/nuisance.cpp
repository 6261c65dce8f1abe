#include "mtp/nuisance.hpp"

#include <cmath>

#include "mtp/errors.hpp"

namespace mtp {

void ClipCounter::merge(const ClipCounter& other) {
  below += other.below;
  above += other.above;
  seen_min = std::min(seen_min, other.seen_min);
  seen_max = std::max(seen_max, other.seen_max);
}

double density_ratio(double a, double delta, double m_of_h, double sigma, const ClipBounds& clip,
                     ClipCounter* counter) {
  if (!std::isfinite(a) || !std::isfinite(delta) || !std::isfinite(m_of_h) || !std::isfinite(sigma))
    throw NumericError("density_ratio: non-finite input");
  if (sigma < 0.0) throw NumericError("density_ratio: negative sigma");

  double r;
  if (delta == 0.0) {
    r = 1.0; // identical densities, exactly
  } else {
    const double u = a - m_of_h;
    const double num = 2.0 * u * delta - delta * delta;
    if (sigma == 0.0) {
      r = num < 0.0 ? 0.0 : (num > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    } else {
      r = std::exp(num / (2.0 * sigma * sigma));
    }
  }

  if (counter) {
    counter->seen_min = std::min(counter->seen_min, r);
    counter->seen_max = std::max(counter->seen_max, r);
  }
  if (r < clip.lo) {
    if (counter) ++counter->below;
    return clip.lo;
  }
  if (r > clip.hi) {
    if (counter) ++counter->above;
    return clip.hi;
  }
  return r;
}

double density_ratio(const TreatmentModel& model, double a, double delta, std::span<const double> h,
                     const ClipBounds& clip, ClipCounter* counter) {
  return density_ratio(a, delta, model.mean_at(h), model.sigma, clip, counter);
}

Eigen::VectorXd adjoint_pullback_shift(const Eigen::VectorXd& q, const TreatmentModel& model, double delta, double a,
                                       std::span<const double> h, const ClipBounds& clip, ClipCounter* counter) {
  return q * density_ratio(model, a, delta, h, clip, counter);
}

std::vector<double> adjoint_pullback_discrete(std::span<const double> q, const DiscreteLaw& law,
                                              const std::function<double(double)>& g) {
  const std::size_t m = law.support.size();
  if (law.pmf.size() != m || q.size() != m)
    throw ConfigError("adjoint_pullback_discrete: support, pmf and q must be aligned");

  // map the support through the policy once
  std::vector<double> image(m);
  for (std::size_t j = 0; j < m; ++j) image[j] = g(law.support[j]);

  std::vector<double> qt(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double num = 0.0;
    bool preimage = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (image[i] == law.support[j]) {
        preimage = true;
        num += q[i] * law.pmf[i];
      }
    }
    if (!preimage) {
      qt[j] = 0.0;
      continue;
    }
    if (!(law.pmf[j] > 0.0))
      throw DataError("adjoint_pullback_discrete: positivity violation, pi(a|l) = 0 at a modified value");
    qt[j] = num / law.pmf[j];
  }
  return qt;
}

} // namespace mtp
