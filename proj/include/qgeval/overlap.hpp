#pragma once

// Reference-based n-gram metrics. All scores are on a 0..100 scale.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/text.hpp"

namespace qgeval {

struct MetricScore {
  double value = 0.0;
  std::string metric_name;
  std::optional<std::string> warning;
};

enum class Smoothing { none, epsilon };

namespace detail {

inline double f1(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

inline void require_references(const std::vector<TokenSequence>& refs, const char* who) {
  if (refs.empty()) throw InvalidArgument(std::string(who) + ": empty reference list");
}

// Reference length closest to the candidate length; ties go to the shorter one.
inline std::size_t closest_ref_length(std::size_t cand_len, const std::vector<TokenSequence>& refs) {
  std::size_t best = refs.front().size();
  for (const auto& r : refs) {
    auto d = [&](std::size_t x) {
      return x > cand_len ? x - cand_len : cand_len - x;
    };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
  }
  return best;
}

}  // namespace detail

/// Sentence BLEU with per-n-gram max clipping over references and the
/// closest-length brevity penalty.
inline MetricScore bleu(const TokenSequence& candidate, const std::vector<TokenSequence>& references,
                        int max_n = 4, Smoothing smoothing = Smoothing::none) {
  detail::require_references(references, "bleu");
  if (max_n < 1 || max_n > 4) throw InvalidArgument("bleu: max_n must be in [1,4]");
  MetricScore out{0.0, "BLEU-" + std::to_string(max_n), std::nullopt};
  if (candidate.empty()) {
    out.warning = "empty candidate";
    return out;
  }

  constexpr double kEpsilon = 0.1;
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const auto cand_counts = ngrams(candidate, static_cast<std::size_t>(n));
    const std::size_t total = total_count(cand_counts);
    std::size_t clipped = 0;
    if (total > 0) {
      std::vector<NGramCounts> ref_counts;
      ref_counts.reserve(references.size());
      for (const auto& r : references) ref_counts.push_back(ngrams(r, static_cast<std::size_t>(n)));
      for (const auto& [gram, c] : cand_counts) {
        std::size_t max_ref = 0;
        for (const auto& rc : ref_counts) {
          auto it = rc.find(gram);
          if (it != rc.end()) max_ref = std::max(max_ref, it->second);
        }
        clipped += std::min(c, max_ref);
      }
    }
    // No unigram overlap at all scores 0 even when smoothing.
    if (n == 1 && clipped == 0) return out;
    double numerator = static_cast<double>(clipped);
    double denominator = static_cast<double>(total);
    if (total == 0 || clipped == 0) {
      if (smoothing == Smoothing::none) return out;
      numerator = kEpsilon;
      if (total == 0) denominator = 1.0;
    }
    log_sum += std::log(numerator / denominator);
  }

  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(detail::closest_ref_length(candidate.size(), references));
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  out.value = 100.0 * bp * std::exp(log_sum / max_n);
  return out;
}

/// Google sentence GLEU: min(precision, recall) over all 1..max_n n-grams.
/// With several references the best-matching reference wins.
inline MetricScore gleu(const TokenSequence& candidate, const std::vector<TokenSequence>& references,
                        int max_n = 4) {
  detail::require_references(references, "gleu");
  if (max_n < 1 || max_n > 4) throw InvalidArgument("gleu: max_n must be in [1,4]");
  MetricScore out{0.0, "GLEU", std::nullopt};
  if (candidate.empty()) {
    out.warning = "empty candidate";
    return out;
  }
  double best = 0.0;
  for (const auto& ref : references) {
    std::size_t matches = 0;
    std::size_t cand_total = 0;
    std::size_t ref_total = 0;
    for (int n = 1; n <= max_n; ++n) {
      const auto cc = ngrams(candidate, static_cast<std::size_t>(n));
      const auto rc = ngrams(ref, static_cast<std::size_t>(n));
      cand_total += total_count(cc);
      ref_total += total_count(rc);
      for (const auto& [gram, c] : cc) {
        auto it = rc.find(gram);
        if (it != rc.end()) matches += std::min(c, it->second);
      }
    }
    if (cand_total == 0 || ref_total == 0) continue;
    const double p = static_cast<double>(matches) / static_cast<double>(cand_total);
    const double r = static_cast<double>(matches) / static_cast<double>(ref_total);
    best = std::max(best, std::min(p, r));
  }
  out.value = 100.0 * best;
  return out;
}

/// ROUGE-L F1 from the longest common subsequence.
inline MetricScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
  if (candidate.empty() || reference.empty()) throw InvalidArgument("rouge_l: empty input");
  const double l = static_cast<double>(lcs_length(candidate, reference));
  const double p = l / static_cast<double>(candidate.size());
  const double r = l / static_cast<double>(reference.size());
  return {100.0 * detail::f1(p, r), "ROUGE-L", std::nullopt};
}

/// beta * answerability + (1 - beta) * metric, named "Q-<metric>".
inline MetricScore q_combine(const MetricScore& metric, const MetricScore& answerability, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("q_combine: beta must be in [0,1]");
  return {beta * answerability.value + (1.0 - beta) * metric.value, "Q-" + metric.metric_name,
          std::nullopt};
}

}  // namespace qgeval
