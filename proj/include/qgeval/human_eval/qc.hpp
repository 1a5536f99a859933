#pragma once

// Worker quality control: per worker, a one-sided Wilcoxon signed-rank test
// that ordinary items score higher than their bad references, pooling every
// criterion of every (ORD, BADREF) pair the worker rated.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/human_eval/types.hpp"
#include "qgeval/stats/wilcoxon.hpp"

namespace qgeval::human_eval {

struct WorkerQC {
  std::optional<double> p_value;
  bool passed = false;
  std::string reason;  // "pass", "fail", "no-qc-evidence" or "degenerate"
  std::size_t n_pairs = 0;
};

struct QCResult {
  std::set<std::string> passed_workers;
  std::vector<RatingRecord> passed_ratings;
  std::map<std::string, WorkerQC> report;
};

/// Paired (BADREF, ORD) scores for one worker, in deterministic order.
inline stats::PairedSample qc_pairs(std::span<const RatingRecord> worker_ratings,
                                    const std::vector<std::string>& criteria) {
  std::map<std::pair<std::string, std::string>, const RatingRecord*> ord;
  for (const auto& r : worker_ratings)
    if (r.kind == ItemKind::ord) ord[{r.hit_id, r.item_id}] = &r;
  std::vector<const RatingRecord*> bad;
  for (const auto& r : worker_ratings)
    if (r.kind == ItemKind::badref) bad.push_back(&r);
  std::sort(bad.begin(), bad.end(), [](const RatingRecord* a, const RatingRecord* b) {
    return std::tie(a->hit_id, a->item_id) < std::tie(b->hit_id, b->item_id);
  });
  stats::PairedSample sample;
  for (const RatingRecord* b : bad) {
    if (!b->pair_of) continue;
    auto it = ord.find({b->hit_id, *b->pair_of});
    if (it == ord.end()) continue;
    for (const auto& c : criteria) sample.pairs.emplace_back(b->score(c), it->second->score(c));
  }
  return sample;
}

inline QCResult qc_filter(std::span<const RatingRecord> ratings, double alpha,
                          const std::vector<std::string>& criteria = default_criteria()) {
  if (ratings.empty()) throw InvalidArgument("qc_filter: no ratings");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("qc_filter: alpha must lie in (0,1)");
  std::map<std::string, std::vector<RatingRecord>> by_worker;
  for (const auto& r : ratings) by_worker[r.worker_id].push_back(r);

  QCResult out;
  for (const auto& [worker, rs] : by_worker) {
    WorkerQC qc;
    const auto sample = qc_pairs(rs, criteria);
    qc.n_pairs = sample.pairs.size();
    if (sample.pairs.empty()) {
      qc.reason = "no-qc-evidence";
    } else {
      try {
        const auto t = stats::wilcoxon_signed_rank(sample, stats::Alternative::greater);
        qc.p_value = t.p_value;
        qc.passed = t.p_value < alpha;
        qc.reason = qc.passed ? "pass" : "fail";
      } catch (const DegenerateInput&) {
        qc.reason = "degenerate";
      }
    }
    if (qc.passed) out.passed_workers.insert(worker);
    out.report.emplace(worker, qc);
  }
  for (const auto& r : ratings)
    if (out.passed_workers.count(r.worker_id)) out.passed_ratings.push_back(r);
  return out;
}

}  // namespace qgeval::human_eval
