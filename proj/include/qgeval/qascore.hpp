#pragma once

// QAScore: a reference-free question score. Every word of the answer is
// masked in turn; a masked language model sees
//   passage <eos> question <eos> answer-with-one-word-masked
// and the log-probability it assigns to the true word is that word's score.
// A question's score is the sum over answer words.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qgeval/answerability.hpp"
#include "qgeval/error.hpp"
#include "qgeval/random.hpp"
#include "qgeval/text.hpp"

namespace qgeval {

struct EvalItem {
  std::string id;
  std::string system;
  std::string passage;
  std::string question;
  std::string answer;
  std::optional<std::string> reference;
};

/// Answer words as seen by every model: a plain whitespace split.
inline std::vector<std::string> answer_words(std::string_view answer) { return split_words(answer); }

/// Numerically stable log-softmax.
inline std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) throw InvalidArgument("log_softmax: empty input");
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : logits) {
    if (!std::isfinite(x)) throw InvalidArgument("log_softmax: non-finite logit");
    hi = std::max(hi, x);
  }
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - hi);
  const double log_norm = hi + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_norm;
  return out;
}

/// Log-probability of the true token (the one-hot target picks one entry).
inline double true_word_loglik(std::span<const double> log_probs, std::size_t true_index) {
  if (true_index >= log_probs.size()) throw InvalidArgument("true_word_loglik: index out of range");
  return log_probs[true_index];
}

class MaskedLanguageModel {
 public:
  virtual ~MaskedLanguageModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t vocab_size() const = 0;

  /// Log-likelihood (<= 0) of answer word `word_index` when it alone is masked.
  virtual double word_log_likelihood(const std::string& passage, const std::string& question,
                                     const std::string& answer, std::size_t word_index) const = 0;

  /// All answer words at once; models with a batched transport override this.
  virtual std::vector<double> answer_log_likelihoods(const std::string& passage,
                                                     const std::string& question,
                                                     const std::string& answer) const {
    const auto n = answer_words(answer).size();
    std::vector<double> out(n);
    for (std::size_t w = 0; w < n; ++w) {
      try {
        out[w] = word_log_likelihood(passage, question, answer, w);
      } catch (const ModelError&) {
        throw;
      } catch (const TransportError&) {
        throw;
      } catch (const std::exception& e) {
        throw ModelError(e.what(), w);
      }
    }
    return out;
  }

  /// False for single-flight models; the corpus driver then serialises calls.
  virtual bool concurrent_safe() const { return true; }
};

struct MockMLMOptions {
  std::uint64_t seed = 0;
  /// Logits are drawn uniformly from [-logit_scale, logit_scale]; 0 gives a uniform model.
  double logit_scale = 4.0;
  /// Added to the logit of every favoured vocabulary token.
  double cooccurrence_bias = 0.0;
  /// Passage tokens within this many positions of a question content word are favoured.
  std::size_t cooccurrence_window = 0;
};

/// Deterministic stand-in for a real masked LM. The logit vector for a
/// masked position is a pure function of (seed, masked input text, word
/// index): key = splitmix64(fnv1a64(text) ^ splitmix64(seed) ^ index*0x9e3779b97f4a7c15),
/// logit[c] = scale*(2*u(splitmix64(key + c)) - 1) + bias*favoured(c),
/// with u(x) = (x >> 11) * 2^-53. Unknown words map to vocabulary index 0.
class MockMLM : public MaskedLanguageModel {
 public:
  MockMLM(std::vector<std::string> vocab, MockMLMOptions options = {})
      : vocab_(std::move(vocab)), options_(options) {
    if (vocab_.empty()) throw InvalidArgument("MockMLM: empty vocabulary");
    for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], i);
  }

  /// "<unk>" followed by the sorted distinct tokens of every passage,
  /// question and answer in the corpus.
  static std::vector<std::string> corpus_vocab(std::span<const EvalItem> items) {
    std::set<std::string> words;
    for (const auto& it : items)
      for (const auto* text : {&it.passage, &it.question, &it.answer})
        for (auto& t : tokenize(*text).tokens) words.insert(t);
    words.erase("<unk>");
    std::vector<std::string> vocab{"<unk>"};
    vocab.insert(vocab.end(), words.begin(), words.end());
    return vocab;
  }

  std::string name() const override { return "mock"; }
  std::size_t vocab_size() const override { return vocab_.size(); }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }

  static std::string masked_input(const std::string& passage, const std::string& question,
                                  const std::vector<std::string>& words, std::size_t word_index) {
    std::string text = passage + " <eos> " + question + " <eos>";
    for (std::size_t i = 0; i < words.size(); ++i) {
      text += ' ';
      text += i == word_index ? std::string("<mask>") : words[i];
    }
    return text;
  }

  std::vector<double> logits(const std::string& passage, const std::string& question,
                             const std::string& answer, std::size_t word_index) const {
    const auto words = answer_words(answer);
    if (word_index >= words.size()) throw ModelError("MockMLM: word index out of range", word_index);
    const std::string text = masked_input(passage, question, words, word_index);
    const std::uint64_t key = splitmix64(fnv1a64(text) ^ splitmix64(options_.seed) ^
                                         (static_cast<std::uint64_t>(word_index) * 0x9e3779b97f4a7c15ULL));
    std::vector<double> out(vocab_.size());
    for (std::size_t c = 0; c < vocab_.size(); ++c) {
      const double u = static_cast<double>(splitmix64(key + c) >> 11) * 0x1.0p-53;
      out[c] = options_.logit_scale * (2.0 * u - 1.0);
    }
    if (options_.cooccurrence_bias != 0.0 && options_.cooccurrence_window > 0) {
      for (const auto& tok : favoured_tokens(passage, question)) {
        auto it = index_.find(tok);
        if (it != index_.end()) out[it->second] += options_.cooccurrence_bias;
      }
    }
    return out;
  }

  std::size_t token_index(const std::string& word) const {
    const auto toks = tokenize(word).tokens;
    if (toks.size() != 1) return 0;
    auto it = index_.find(toks.front());
    return it == index_.end() ? 0 : it->second;
  }

  double word_log_likelihood(const std::string& passage, const std::string& question,
                             const std::string& answer, std::size_t word_index) const override {
    const auto lg = logits(passage, question, answer, word_index);
    const auto lp = log_softmax(lg);
    return true_word_loglik(lp, token_index(answer_words(answer)[word_index]));
  }

  /// Passage tokens near an occurrence of any question content word.
  std::set<std::string> favoured_tokens(const std::string& passage, const std::string& question) const {
    static const auto stop = [] {
      auto s = default_function_words();
      for (auto& q : default_question_words()) s.insert(q);
      return s;
    }();
    std::set<std::string> cues;
    for (auto& t : tokenize(question).tokens)
      if (!stop.count(t)) cues.insert(t);
    const auto p = tokenize(passage).tokens;
    std::set<std::string> out;
    const std::size_t w = options_.cooccurrence_window;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!cues.count(p[i])) continue;
      const std::size_t lo = i >= w ? i - w : 0;
      const std::size_t hi = std::min(p.size(), i + w + 1);
      for (std::size_t j = lo; j < hi; ++j) out.insert(p[j]);
    }
    return out;
  }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  MockMLMOptions options_;
};

struct QAScoreResult {
  std::vector<std::pair<std::string, double>> per_word;
  double total = 0.0;
  double per_word_mean = 0.0;
  std::size_t word_count = 0;
};

/// Validates per-word log-likelihoods for `item` and sums them.
inline QAScoreResult qascore_from_logliks(const EvalItem& item, std::span<const double> ll) {
  const auto words = answer_words(item.answer);
  if (words.empty()) throw InvalidArgument("qascore: empty answer for item '" + item.id + "'");
  if (ll.size() != words.size())
    throw ModelError("qascore: model returned " + std::to_string(ll.size()) + " scores for " +
                         std::to_string(words.size()) + " answer words",
                     std::min(ll.size(), words.size()));
  QAScoreResult res;
  res.word_count = words.size();
  res.per_word.reserve(words.size());
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (!std::isfinite(ll[w]) || ll[w] > 0.0)
      throw ModelError("qascore: model returned an invalid log-likelihood", w);
    res.per_word.emplace_back(words[w], ll[w]);
    res.total += ll[w];
  }
  res.per_word_mean = res.total / static_cast<double>(res.word_count);
  return res;
}

inline QAScoreResult qascore_question(const EvalItem& item, const MaskedLanguageModel& model) {
  if (answer_words(item.answer).empty()) throw InvalidArgument("qascore: empty answer for item '" + item.id + "'");
  return qascore_from_logliks(item, model.answer_log_likelihoods(item.passage, item.question, item.answer));
}

enum class QAScoreAggregation { per_word_mean, sum };

/// Scores every item; runs on `workers` threads when the model allows it.
/// Results are returned in input order.
inline std::vector<QAScoreResult> qascore_corpus(std::span<const EvalItem> items,
                                                 const MaskedLanguageModel& model,
                                                 unsigned workers = 1) {
  std::vector<QAScoreResult> out(items.size());
  if (workers <= 1 || !model.concurrent_safe() || items.size() < 2) {
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = qascore_question(items[i], model);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
          try {
            out[i] = qascore_question(items[i], model);
          } catch (...) {
            std::lock_guard lock(err_mu);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

/// Mean of per-item statistics, summed in item-id order.
inline double aggregate_system(std::span<const EvalItem> items, std::span<const QAScoreResult> results,
                               QAScoreAggregation how) {
  if (items.empty()) throw InvalidArgument("qascore_system: no items");
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].id != items[b].id ? items[a].id < items[b].id : a < b;
  });
  double sum = 0.0;
  for (auto i : order)
    sum += how == QAScoreAggregation::per_word_mean ? results[i].per_word_mean : results[i].total;
  return sum / static_cast<double>(items.size());
}

inline double qascore_system(std::span<const EvalItem> items, const MaskedLanguageModel& model,
                             QAScoreAggregation how = QAScoreAggregation::per_word_mean,
                             unsigned workers = 1) {
  if (items.empty()) throw InvalidArgument("qascore_system: no items");
  const auto results = qascore_corpus(items, model, workers);
  return aggregate_system(items, results, how);
}

}  // namespace qgeval
