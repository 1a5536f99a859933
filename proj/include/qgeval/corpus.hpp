#pragma once

// Corpus-level driver for the reference-based metrics: one row of scores
// per item, system scores as the mean of item scores.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qgeval/answerability.hpp"
#include "qgeval/meteor.hpp"
#include "qgeval/overlap.hpp"
#include "qgeval/qascore.hpp"
#include "qgeval/text.hpp"

namespace qgeval {

inline const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> cols{"BLEU-1", "BLEU-2",  "BLEU-3",        "BLEU-4",  "GLEU",
                                             "ROUGE-L", "METEOR", "Answerability", "Q-BLEU1", "Q-BLEU4"};
  return cols;
}

struct MetricOptions {
  Smoothing smoothing = Smoothing::epsilon;
  AnswerabilityConfig answerability;
  const SynonymTable* synonyms = nullptr;
};

struct ItemMetrics {
  std::string id;
  std::string system;
  std::vector<double> values;  // aligned with metric_columns()
};

inline ItemMetrics item_metrics(const std::string& id, const std::string& system, const TokenSequence& cand,
                                const TokenSequence& ref, const MetricOptions& opt) {
  ItemMetrics m{id, system, {}};
  const std::vector<TokenSequence> refs{ref};
  std::vector<MetricScore> b;
  for (int n = 1; n <= 4; ++n) b.push_back(bleu(cand, refs, n, opt.smoothing));
  const auto ans = answerability(cand, ref, opt.answerability);
  m.values = {b[0].value,
              b[1].value,
              b[2].value,
              b[3].value,
              gleu(cand, refs).value,
              rouge_l(cand, ref).value,
              meteor(cand, ref, opt.synonyms).value,
              ans.value,
              q_combine(b[0], ans, opt.answerability.beta).value,
              q_combine(b[3], ans, opt.answerability.beta).value};
  return m;
}

struct CorpusMetrics {
  std::vector<ItemMetrics> items;
  std::map<std::string, std::vector<double>> systems;  // mean per column
  std::map<std::string, std::size_t> system_counts;
  std::size_t skipped = 0;  // items without a reference or with empty text
};

inline CorpusMetrics corpus_metrics(std::span<const EvalItem> items, const MetricOptions& opt = {}) {
  opt.answerability.validate();
  CorpusMetrics out;
  const std::size_t k = metric_columns().size();
  for (const auto& it : items) {
    if (!it.reference) {
      ++out.skipped;
      continue;
    }
    const auto cand = tokenize(it.question);
    const auto ref = tokenize(*it.reference);
    if (cand.empty() || ref.empty()) {
      ++out.skipped;
      continue;
    }
    out.items.push_back(item_metrics(it.id, it.system, cand, ref, opt));
    auto& acc = out.systems[it.system];
    if (acc.empty()) acc.assign(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) acc[c] += out.items.back().values[c];
    ++out.system_counts[it.system];
  }
  for (auto& [sys, acc] : out.systems)
    for (double& v : acc) v /= static_cast<double>(out.system_counts[sys]);
  return out;
}

}  // namespace qgeval
