#pragma once

// Wilcoxon rank-sum (Mann-Whitney) and signed-rank tests. Small samples
// without ties get exact p-values from the permutation distribution
// (integer subset-sum counts); everything else uses the normal
// approximation with tie-corrected variance and a 0.5 continuity
// correction. Two-sided p is min(1, 2 * min(greater, less)) on both paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/stats/distributions.hpp"
#include "qgeval/stats/rank.hpp"
#include "qgeval/stats/test_result.hpp"

namespace qgeval::stats {

inline constexpr std::size_t kExactRankSumMaxTotal = 12;
inline constexpr std::size_t kExactSignedRankMax = 12;

/// A sample as (x, y) pairs; the signed-rank test works on y - x.
struct PairedSample {
  std::vector<std::pair<double, double>> pairs;
};

namespace detail {

inline double combine_two_sided(double greater, double less) {
  return std::min(1.0, 2.0 * std::min(greater, less));
}

inline double pick(Alternative alt, double greater, double less) {
  switch (alt) {
    case Alternative::greater: return greater;
    case Alternative::less: return less;
    case Alternative::two_sided: return combine_two_sided(greater, less);
  }
  return 1.0;
}

// Normal approximation with continuity correction for a statistic whose
// null distribution has the given mean and variance.
inline double approx_p(double stat, double mean, double var, Alternative alt) {
  if (!(var > 0.0)) return 1.0;
  const double sd = std::sqrt(var);
  const double greater = normal_sf((stat - mean - 0.5) / sd);
  const double less = normal_cdf((stat - mean + 0.5) / sd);
  return pick(alt, std::min(1.0, greater), std::min(1.0, less));
}

// counts[s] = number of k-subsets of {1..n} with sum s.
inline std::vector<std::uint64_t> subset_sum_counts(std::size_t n, std::size_t k) {
  const std::size_t max_sum = n * (n + 1) / 2;
  // table[j][s] over subsets of size j
  std::vector<std::vector<std::uint64_t>> table(k + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
  table[0][0] = 1;
  for (std::size_t v = 1; v <= n; ++v) {
    for (std::size_t j = std::min(k, v); j >= 1; --j) {
      for (std::size_t s = max_sum; s >= v; --s) table[j][s] += table[j - 1][s - v];
    }
  }
  return table[k];
}

// counts[s] = number of subsets of {1..n} (any size) with sum s.
inline std::vector<std::uint64_t> all_subset_sum_counts(std::size_t n) {
  const std::size_t max_sum = n * (n + 1) / 2;
  std::vector<std::uint64_t> counts(max_sum + 1, 0);
  counts[0] = 1;
  for (std::size_t v = 1; v <= n; ++v)
    for (std::size_t s = max_sum; s >= v; --s) counts[s] += counts[s - v];
  return counts;
}

inline std::pair<double, double> tail_probabilities(const std::vector<std::uint64_t>& counts,
                                                    std::size_t observed) {
  std::uint64_t total = 0;
  std::uint64_t ge = 0;
  std::uint64_t le = 0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    total += counts[s];
    if (s >= observed) ge += counts[s];
    if (s <= observed) le += counts[s];
  }
  return {static_cast<double>(ge) / static_cast<double>(total),
          static_cast<double>(le) / static_cast<double>(total)};
}

}  // namespace detail

/// Tests whether x tends to be larger than y (alternative=greater).
/// The statistic is U for x: rank sum of x minus n1(n1+1)/2.
inline TestResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y,
                                    Alternative alternative = Alternative::greater) {
  if (x.empty() || y.empty()) throw InvalidArgument("wilcoxon_rank_sum: empty sample");
  std::vector<double> all(x.begin(), x.end());
  all.insert(all.end(), y.begin(), y.end());
  const auto ranks = rank_with_ties(all);
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  const std::size_t n = n1 + n2;
  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  const double n1d = static_cast<double>(n1);
  const double n2d = static_cast<double>(n2);
  const double nd = static_cast<double>(n);

  TestResult res;
  res.statistic = r1 - n1d * (n1d + 1.0) / 2.0;
  res.alternative = alternative;
  res.n1 = n1;
  res.n2 = n2;

  const double ties = tie_term(all);
  if (n <= kExactRankSumMaxTotal && ties == 0.0) {
    const auto counts = detail::subset_sum_counts(n, n1);
    const auto [greater, less] = detail::tail_probabilities(counts, static_cast<std::size_t>(std::lround(r1)));
    res.method = Method::exact;
    res.p_value = detail::pick(alternative, greater, less);
    return res;
  }
  const double mean = n1d * n2d / 2.0;
  const double var = n1d * n2d / 12.0 * ((nd + 1.0) - ties / (nd * (nd - 1.0)));
  res.method = Method::normal_approx;
  res.p_value = detail::approx_p(res.statistic, mean, var, alternative);
  return res;
}

/// Tests whether y - x tends to be positive (alternative=greater).
/// Zero differences are dropped; the statistic is the positive rank sum.
inline TestResult wilcoxon_signed_rank(const PairedSample& sample,
                                       Alternative alternative = Alternative::greater) {
  if (sample.pairs.empty()) throw InvalidArgument("wilcoxon_signed_rank: empty sample");
  std::vector<double> diffs;
  for (const auto& [x, y] : sample.pairs) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidArgument("wilcoxon_signed_rank: non-finite value");
    const double d = y - x;
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw DegenerateInput("wilcoxon_signed_rank: all differences are zero");
  std::vector<double> mags(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) mags[i] = std::abs(diffs[i]);
  const auto ranks = rank_with_ties(mags);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i)
    if (diffs[i] > 0.0) w_plus += ranks[i];

  const std::size_t n = diffs.size();
  const double nd = static_cast<double>(n);
  TestResult res;
  res.statistic = w_plus;
  res.alternative = alternative;
  res.n1 = n;
  res.n2 = n;

  const double ties = tie_term(mags);
  if (n <= kExactSignedRankMax && ties == 0.0) {
    const auto counts = detail::all_subset_sum_counts(n);
    const auto [greater, less] = detail::tail_probabilities(counts, static_cast<std::size_t>(std::lround(w_plus)));
    res.method = Method::exact;
    res.p_value = detail::pick(alternative, greater, less);
    return res;
  }
  const double mean = nd * (nd + 1.0) / 4.0;
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - ties / 48.0;
  res.method = Method::normal_approx;
  res.p_value = detail::approx_p(w_plus, mean, var, alternative);
  return res;
}

}  // namespace qgeval::stats
