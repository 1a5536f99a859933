#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "qgeval/error.hpp"
#include "qgeval/stats/distributions.hpp"
#include "qgeval/stats/test_result.hpp"

namespace qgeval::stats {

/// Williams (1959) test for the difference between two dependent
/// correlations r13 and r23 that share variable 3, where r12 is the
/// correlation between variables 1 and 2. With alternative=greater the
/// p-value is for r13 > r23; t has n - 3 degrees of freedom.
inline TestResult williams_test(double r12, double r13, double r23, std::size_t n,
                                Alternative alternative = Alternative::greater) {
  for (double r : {r12, r13, r23})
    if (!(r > -1.0 && r < 1.0)) throw InvalidArgument("williams_test: correlations must lie in (-1,1)");
  if (n < 4) throw InvalidArgument("williams_test: need n >= 4");
  double k = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
  if (k < -1e-12) throw InvalidArgument("williams_test: inconsistent correlation triple");
  k = std::max(k, 0.0);

  const double nd = static_cast<double>(n);
  const double rbar = (r13 + r23) / 2.0;
  const double denom = std::sqrt(2.0 * k * (nd - 1.0) / (nd - 3.0) + rbar * rbar * std::pow(1.0 - r12, 3));
  TestResult res;
  res.alternative = alternative;
  res.method = Method::normal_approx;
  res.n1 = n;
  res.n2 = n;
  if (denom == 0.0) {
    if (r13 == r23) {
      res.statistic = 0.0;
      res.p_value = alternative == Alternative::two_sided ? 1.0 : 0.5;
      return res;
    }
    throw InvalidArgument("williams_test: degenerate correlation triple");
  }
  const double t = (r13 - r23) * std::sqrt((nd - 1.0) * (1.0 + r12)) / denom;
  const double df = nd - 3.0;
  res.statistic = t;
  switch (alternative) {
    case Alternative::greater: res.p_value = t_sf(t, df); break;
    case Alternative::less: res.p_value = t_cdf(t, df); break;
    case Alternative::two_sided: res.p_value = std::min(1.0, 2.0 * t_sf(std::abs(t), df)); break;
  }
  return res;
}

}  // namespace qgeval::stats
