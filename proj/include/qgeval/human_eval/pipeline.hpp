#pragma once

// qc_filter -> standardize -> system_scores -> significance_matrix.

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/human_eval/qc.hpp"
#include "qgeval/human_eval/significance.hpp"
#include "qgeval/human_eval/standardize.hpp"
#include "qgeval/human_eval/types.hpp"

namespace qgeval::human_eval {

struct AnalysisConfig {
  double alpha = 0.05;
  double sig_threshold = 0.1;
  std::vector<std::string> criteria = default_criteria();
  SigmaConvention sigma = SigmaConvention::population;
};

struct Analysis {
  QCResult qc;
  Standardized z;
  SystemScoreTable systems;
  std::optional<SignificanceMatrix> matrix;  // absent with fewer than 2 systems
  std::vector<std::string> warnings;
};

/// When no worker passes quality control the result has an empty system
/// table and no matrix.
inline Analysis analyze(std::span<const RatingRecord> ratings, const AnalysisConfig& cfg = {}) {
  Analysis a;
  a.qc = qc_filter(ratings, cfg.alpha, cfg.criteria);
  if (a.qc.passed_ratings.empty()) return a;
  a.z = standardize(a.qc.passed_ratings, cfg.criteria, cfg.sigma);
  std::vector<std::string> expected;
  for (const auto& r : ratings)
    if (std::find(expected.begin(), expected.end(), r.system) == expected.end()) expected.push_back(r.system);
  std::sort(expected.begin(), expected.end());
  a.systems = system_scores(a.z, expected);
  a.warnings = a.systems.warnings;
  for (const auto& [w, why] : a.z.excluded) a.warnings.push_back("worker '" + w + "' excluded: " + why);
  if (a.systems.rows.size() >= 2) {
    a.matrix = significance_matrix(a.z, cfg.sig_threshold);
  } else {
    a.warnings.push_back("fewer than 2 systems scored; no significance matrix");
  }
  return a;
}

}  // namespace qgeval::human_eval
