#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/stats/rank.hpp"

namespace qgeval::stats {

namespace detail {

inline void check_pair(std::span<const double> x, std::span<const double> y, const char* who) {
  if (x.size() != y.size()) throw InvalidArgument(std::string(who) + ": length mismatch");
  if (x.size() < 3) throw InvalidArgument(std::string(who) + ": need at least 3 observations");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw InvalidArgument(std::string(who) + ": non-finite value");
}

}  // namespace detail

inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y, "pearson");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson: constant input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::fmax(-1.0, std::fmin(1.0, r));
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y, "spearman");
  const auto rx = rank_with_ties(x);
  const auto ry = rank_with_ties(y);
  return pearson(rx, ry);
}

/// Kendall tau-b (tie-corrected; equals tau-a without ties).
inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y, "kendall_tau");
  double concordant_minus_discordant = 0.0;
  double pairs_untied_x = 0.0;
  double pairs_untied_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx != 0.0) pairs_untied_x += 1.0;
      if (dy != 0.0) pairs_untied_y += 1.0;
      if (dx != 0.0 && dy != 0.0) concordant_minus_discordant += (dx > 0) == (dy > 0) ? 1.0 : -1.0;
    }
  }
  if (pairs_untied_x == 0.0 || pairs_untied_y == 0.0) throw DegenerateInput("kendall_tau: all values tied");
  return concordant_minus_discordant / std::sqrt(pairs_untied_x * pairs_untied_y);
}

}  // namespace qgeval::stats
