#pragma once

// Per-rater z-standardisation and system-level aggregation.
//
// Each worker's mean and standard deviation are taken over every raw score
// they gave (all criteria, all item kinds). Bad references are then dropped,
// a repeat is averaged into its ordinary item, and every remaining
// (worker, question) pair is one evaluated question of its system.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/human_eval/types.hpp"

namespace qgeval::human_eval {

enum class SigmaConvention { population, sample };

struct WorkerStats {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;

  double z(double raw) const { return (raw - mean) / sd; }
};

struct QuestionScore {
  std::string worker_id;
  std::string hit_id;
  std::string item_id;  // the ORD item
  std::string system;
  std::vector<double> z;  // per criterion
  double overall = 0.0;
};

struct Standardized {
  std::vector<std::string> criteria;
  std::vector<QuestionScore> questions;
  std::map<std::string, WorkerStats> workers;
  std::map<std::string, std::string> excluded;  // worker -> reason
};

inline WorkerStats worker_stats(std::span<const double> raw, SigmaConvention sigma) {
  WorkerStats s;
  s.n = raw.size();
  if (raw.empty()) return s;
  for (double v : raw) s.mean += v;
  s.mean /= static_cast<double>(raw.size());
  double ss = 0.0;
  for (double v : raw) ss += (v - s.mean) * (v - s.mean);
  const double denom = sigma == SigmaConvention::population ? static_cast<double>(raw.size())
                                                            : static_cast<double>(raw.size()) - 1.0;
  s.sd = denom > 0.0 ? std::sqrt(ss / denom) : 0.0;
  return s;
}

inline Standardized standardize(std::span<const RatingRecord> ratings,
                                const std::vector<std::string>& criteria = default_criteria(),
                                SigmaConvention sigma = SigmaConvention::population) {
  if (criteria.empty()) throw InvalidArgument("standardize: no criteria");
  Standardized out;
  out.criteria = criteria;

  std::map<std::string, std::vector<const RatingRecord*>> by_worker;
  for (const auto& r : ratings) {
    validate(r);
    by_worker[r.worker_id].push_back(&r);
  }

  for (const auto& [worker, rs] : by_worker) {
    std::vector<double> raw;
    raw.reserve(rs.size() * criteria.size());
    for (const auto* r : rs)
      for (const auto& c : criteria) raw.push_back(r->score(c));
    const auto st = worker_stats(raw, sigma);
    if (!(st.sd > 0.0)) {
      out.excluded[worker] = "constant-rater";
      continue;
    }
    out.workers[worker] = st;

    struct Acc {
      std::string system;
      std::vector<double> sum;
      std::size_t count = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const auto* r : rs) {
      if (r->kind == ItemKind::badref) continue;
      const std::string& target = r->kind == ItemKind::ord ? r->item_id : *r->pair_of;
      auto& a = acc[{r->hit_id, target}];
      if (a.sum.empty()) a.sum.assign(criteria.size(), 0.0);
      if (r->kind == ItemKind::ord || a.system.empty()) a.system = r->system;
      for (std::size_t c = 0; c < criteria.size(); ++c) a.sum[c] += st.z(r->score(criteria[c]));
      ++a.count;
    }
    for (auto& [key, a] : acc) {
      QuestionScore q{worker, key.first, key.second, a.system, {}, 0.0};
      q.z.resize(criteria.size());
      for (std::size_t c = 0; c < criteria.size(); ++c) {
        q.z[c] = a.sum[c] / static_cast<double>(a.count);
        q.overall += q.z[c];
      }
      q.overall /= static_cast<double>(criteria.size());
      out.questions.push_back(std::move(q));
    }
  }
  return out;
}

struct SystemScore {
  std::string system;
  std::size_t n = 0;
  double z_overall = 0.0;
  std::vector<double> z_criteria;
};

struct SystemScoreTable {
  std::vector<std::string> criteria;
  std::vector<SystemScore> rows;  // sorted by z_overall, descending
  std::vector<std::string> warnings;

  const SystemScore* find(const std::string& system) const {
    for (const auto& r : rows)
      if (r.system == system) return &r;
    return nullptr;
  }
};

/// Systems listed in `expected` without any rating produce a warning.
inline SystemScoreTable system_scores(const Standardized& z, const std::vector<std::string>& expected = {}) {
  SystemScoreTable table;
  table.criteria = z.criteria;
  const std::size_t nc = z.criteria.size();
  std::map<std::string, SystemScore> acc;
  for (const auto& q : z.questions) {
    auto& s = acc[q.system];
    if (s.z_criteria.empty()) {
      s.system = q.system;
      s.z_criteria.assign(nc, 0.0);
    }
    for (std::size_t c = 0; c < nc; ++c) s.z_criteria[c] += q.z[c];
    ++s.n;
  }
  for (auto& [name, s] : acc) {
    s.z_overall = 0.0;
    for (double& v : s.z_criteria) {
      v /= static_cast<double>(s.n);
      s.z_overall += v;
    }
    s.z_overall /= static_cast<double>(nc);
    table.rows.push_back(s);
  }
  for (const auto& e : expected)
    if (!acc.count(e)) table.warnings.push_back("system '" + e + "' has no ratings; omitted");
  std::sort(table.rows.begin(), table.rows.end(), [](const SystemScore& a, const SystemScore& b) {
    return a.z_overall != b.z_overall ? a.z_overall > b.z_overall : a.system < b.system;
  });
  return table;
}

}  // namespace qgeval::human_eval
