#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "qgeval/error.hpp"

namespace qgeval::stats {

/// Midranks (1-based); tied values share the average of their positions.
inline std::vector<double> rank_with_ties(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("rank_with_ties: empty input");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("rank_with_ties: non-finite value");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
    i = j + 1;
  }
  return ranks;
}

/// Sizes of the groups of tied values.
inline std::vector<std::size_t> tie_groups(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> groups;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    groups.push_back(j - i);
    i = j;
  }
  return groups;
}

/// Sum over tie groups of t^3 - t.
inline double tie_term(std::span<const double> values) {
  double s = 0.0;
  for (auto t : tie_groups(values)) {
    const double d = static_cast<double>(t);
    s += d * d * d - d;
  }
  return s;
}

}  // namespace qgeval::stats
