#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/human_eval/standardize.hpp"
#include "qgeval/stats/wilcoxon.hpp"

namespace qgeval::human_eval {

/// cells[i][j]: system i significantly outperforms system j.
struct SignificanceMatrix {
  std::vector<std::string> systems;  // sorted by z_overall, descending
  std::vector<std::vector<bool>> cells;
  std::vector<std::vector<double>> p_values;
  double threshold = 0.1;
};

/// Pairwise one-sided rank-sum tests on per-question overall z scores.
inline SignificanceMatrix significance_matrix(const Standardized& z, double threshold,
                                              stats::Alternative alternative = stats::Alternative::greater) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw InvalidArgument("significance_matrix: threshold must lie in (0,1)");
  const auto table = system_scores(z);
  if (table.rows.size() < 2) throw InvalidArgument("significance_matrix: need at least 2 systems");

  std::map<std::string, std::vector<double>> samples;
  for (const auto& q : z.questions) samples[q.system].push_back(q.overall);

  SignificanceMatrix m;
  m.threshold = threshold;
  for (const auto& r : table.rows) m.systems.push_back(r.system);
  const std::size_t k = m.systems.size();
  m.cells.assign(k, std::vector<bool>(k, false));
  m.p_values.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const auto t = stats::wilcoxon_rank_sum(samples[m.systems[i]], samples[m.systems[j]], alternative);
      m.p_values[i][j] = t.p_value;
      m.cells[i][j] = t.p_value < threshold;
    }
  }
  return m;
}

/// Fraction of off-diagonal cells on which two matrices agree, after
/// aligning systems by name.
inline double matrix_overlap(const SignificanceMatrix& a, const SignificanceMatrix& b) {
  const std::size_t k = a.systems.size();
  if (k != b.systems.size()) throw InvalidArgument("matrix_overlap: different system sets");
  std::map<std::string, std::size_t> pos_b;
  for (std::size_t i = 0; i < k; ++i) pos_b[b.systems[i]] = i;
  if (pos_b.size() != k) throw InvalidArgument("matrix_overlap: duplicate system names");
  for (const auto& s : a.systems)
    if (!pos_b.count(s)) throw InvalidArgument("matrix_overlap: different system sets");
  if (k < 2) throw InvalidArgument("matrix_overlap: need at least 2 systems");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      if (a.cells[i][j] == b.cells[pos_b[a.systems[i]]][pos_b[a.systems[j]]]) ++agree;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(k * (k - 1));
}

}  // namespace qgeval::human_eval
