#pragma once

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "qgeval/error.hpp"

namespace qgeval::stats {

inline double normal_cdf(double z) {
  if (std::isnan(z)) throw InvalidArgument("normal_cdf: NaN");
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

/// Upper tail 1 - normal_cdf(z) without cancellation.
inline double normal_sf(double z) { return normal_cdf(-z); }

inline double t_cdf(double t, double df) {
  if (!(df > 0.0) || !std::isfinite(df)) throw InvalidArgument("t_cdf: df must be positive");
  if (std::isnan(t)) throw InvalidArgument("t_cdf: NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), t);
}

inline double t_sf(double t, double df) { return t_cdf(-t, df); }

}  // namespace qgeval::stats
