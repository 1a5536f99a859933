#pragma once

// Correlation of automatic metric columns with human system scores, plus
// pairwise Williams tests between metrics.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/human_eval/standardize.hpp"
#include "qgeval/stats/correlation.hpp"
#include "qgeval/stats/williams.hpp"

namespace qgeval::human_eval {

struct MetricColumn {
  std::string name;
  std::map<std::string, double> scores;  // system -> score
};

struct MetricCorrelation {
  std::string metric;
  std::size_t n = 0;
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
};

struct WilliamsComparison {
  std::string metric_a;
  std::string metric_b;
  std::size_t n = 0;
  double r12 = 0.0;  // metric a vs metric b
  double r13 = 0.0;  // metric a vs human
  double r23 = 0.0;  // metric b vs human
  double t = 0.0;
  double p_value = 1.0;  // one-tailed: a correlates more strongly than b
};

struct CorrelationReport {
  std::vector<MetricCorrelation> metrics;
  std::vector<WilliamsComparison> williams;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::pair<std::vector<double>, std::vector<double>> aligned(
    const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto& [sys, v] : a) {
    auto it = b.find(sys);
    if (it == b.end()) continue;
    out.first.push_back(v);
    out.second.push_back(it->second);
  }
  return out;
}

}  // namespace detail

/// `human` maps system -> overall z. Each metric is correlated over the
/// systems it covers; Williams tests use the systems both metrics cover.
inline CorrelationReport correlate_metrics(const std::map<std::string, double>& human,
                                           const std::vector<MetricColumn>& columns) {
  CorrelationReport rep;
  std::vector<const MetricColumn*> usable;
  for (const auto& col : columns) {
    const auto [m, h] = detail::aligned(col.scores, human);
    if (m.size() < 3) {
      rep.warnings.push_back("metric '" + col.name + "' covers fewer than 3 systems; omitted");
      continue;
    }
    try {
      rep.metrics.push_back({col.name, m.size(), stats::pearson(m, h), stats::spearman(m, h),
                             stats::kendall_tau(m, h)});
      usable.push_back(&col);
    } catch (const DegenerateInput& e) {
      rep.warnings.push_back("metric '" + col.name + "': " + e.what());
    }
  }
  for (const auto* a : usable) {
    for (const auto* b : usable) {
      if (a == b) continue;
      std::map<std::string, double> shared_a;
      std::map<std::string, double> shared_b;
      std::map<std::string, double> shared_h;
      for (const auto& [sys, va] : a->scores) {
        auto ib = b->scores.find(sys);
        auto ih = human.find(sys);
        if (ib == b->scores.end() || ih == human.end()) continue;
        shared_a[sys] = va;
        shared_b[sys] = ib->second;
        shared_h[sys] = ih->second;
      }
      WilliamsComparison w{a->name, b->name, shared_a.size(), 0, 0, 0, 0, 1.0};
      try {
        const auto [xa, xb] = detail::aligned(shared_a, shared_b);
        const auto [ya, h1] = detail::aligned(shared_a, shared_h);
        const auto [yb, h2] = detail::aligned(shared_b, shared_h);
        w.r12 = stats::pearson(xa, xb);
        w.r13 = stats::pearson(ya, h1);
        w.r23 = stats::pearson(yb, h2);
        const auto t = stats::williams_test(w.r12, w.r13, w.r23, w.n);
        w.t = t.statistic;
        w.p_value = t.p_value;
        rep.williams.push_back(w);
      } catch (const std::exception& e) {
        rep.warnings.push_back("williams " + a->name + " vs " + b->name + ": " + e.what());
      }
    }
  }
  return rep;
}

inline CorrelationReport correlate_metrics(const SystemScoreTable& table, const std::vector<MetricColumn>& columns) {
  std::map<std::string, double> human;
  for (const auto& r : table.rows) human[r.system] = r.z_overall;
  return correlate_metrics(human, columns);
}

}  // namespace qgeval::human_eval
