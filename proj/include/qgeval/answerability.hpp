#pragma once

// Answerability: weighted precision/recall over four element types
// (relevant content words, named entities, question-type words and
// function words), and its convex combination with another metric.

#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/overlap.hpp"
#include "qgeval/text.hpp"

namespace qgeval {

enum class ElementType { content = 0, named_entity = 1, question_type = 2, function_word = 3 };

inline constexpr std::array<ElementType, 4> kElementTypes = {
    ElementType::content, ElementType::named_entity, ElementType::question_type,
    ElementType::function_word};

inline const char* to_string(ElementType t) {
  switch (t) {
    case ElementType::content: return "content";
    case ElementType::named_entity: return "named_entity";
    case ElementType::question_type: return "question_type";
    case ElementType::function_word: return "function_word";
  }
  return "?";
}

/// Marks which token positions are named entities.
class EntityTagger {
 public:
  virtual ~EntityTagger() = default;
  virtual std::vector<bool> tag(const TokenSequence& seq) const = 0;
};

/// Gazetteer lookup plus a capitalization heuristic: an all-caps token of
/// two or more letters, or a capitalized token that is not sentence-initial.
class HeuristicEntityTagger : public EntityTagger {
 public:
  explicit HeuristicEntityTagger(std::set<std::string> gazetteer = {})
      : gazetteer_(std::move(gazetteer)) {}

  std::vector<bool> tag(const TokenSequence& seq) const override {
    std::vector<bool> out(seq.size(), false);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (gazetteer_.count(seq.tokens[i])) {
        out[i] = true;
        continue;
      }
      const std::string& s = i < seq.surface.size() ? seq.surface[i] : seq.tokens[i];
      std::size_t letters = 0;
      std::size_t upper = 0;
      for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (std::isalpha(u)) {
          ++letters;
          if (std::isupper(u)) ++upper;
        }
      }
      if (letters >= 2 && upper == letters) {
        out[i] = true;
      } else if (i > 0 && !s.empty() && std::isupper(static_cast<unsigned char>(s.front()))) {
        out[i] = true;
      }
    }
    return out;
  }

 private:
  std::set<std::string> gazetteer_;
};

inline std::set<std::string> default_function_words() {
  return {"a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any",
          "are", "as", "at", "be", "because", "been", "before", "being", "below", "between",
          "both", "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during",
          "each", "few", "for", "from", "further", "had", "has", "have", "having", "he", "her",
          "here", "hers", "herself", "him", "himself", "his", "i", "if", "in", "into", "is", "it",
          "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "of",
          "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over",
          "own", "same", "she", "should", "so", "some", "such", "than", "that", "the", "their",
          "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those",
          "through", "to", "too", "under", "until", "up", "very", "was", "we", "were", "while",
          "will", "with", "would", "you", "your", "yours", "yourself", "yourselves"};
}

inline std::set<std::string> default_question_words() {
  return {"what", "which", "who", "whom", "whose", "when", "where", "why", "how"};
}

struct AnswerabilityConfig {
  // Indexed by ElementType.
  std::array<double, 4> weights{0.55, 0.25, 0.15, 0.05};
  double beta = 0.2;
  std::set<std::string> function_words = default_function_words();
  std::set<std::string> question_words = default_question_words();
  std::shared_ptr<const EntityTagger> ner = std::make_shared<HeuristicEntityTagger>();

  double weight(ElementType t) const { return weights[static_cast<std::size_t>(t)]; }

  void validate() const {
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("answerability: weights must lie in [0,1]");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("answerability: weights must sum to 1");
    if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("answerability: beta must lie in [0,1]");
    if (!ner) throw InvalidArgument("answerability: no entity tagger");
  }
};

namespace detail {

inline std::set<std::string> load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open lexicon: " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto words = split_words(line);
    if (!words.empty() && words.front().front() != '#') out.insert(ascii_lower(words.front()));
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && is_space(s[a])) ++a;
  while (b > a && is_space(s[b - 1])) --b;
  return s.substr(a, b - a);
}

}  // namespace detail

/// Reads the flat `key = value` config. Unknown keys are rejected.
inline AnswerabilityConfig load_answerability_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open answerability config: " + path.string());
  AnswerabilityConfig cfg;
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  std::set<std::string> gazetteer;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    auto number = [&] {
      try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": bad number '" +
                              value + "'");
      }
    };
    if (key == "weights.content") {
      cfg.weights[0] = number();
    } else if (key == "weights.ne") {
      cfg.weights[1] = number();
    } else if (key == "weights.qt") {
      cfg.weights[2] = number();
    } else if (key == "weights.fn") {
      cfg.weights[3] = number();
    } else if (key == "beta") {
      cfg.beta = number();
    } else if (key == "function_words") {
      cfg.function_words = detail::load_lexicon(resolve(value));
    } else if (key == "question_words") {
      cfg.question_words = detail::load_lexicon(resolve(value));
    } else if (key == "gazetteer") {
      gazetteer = detail::load_lexicon(resolve(value));
    } else {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key +
                            "'");
    }
  }
  cfg.ner = std::make_shared<HeuristicEntityTagger>(std::move(gazetteer));
  cfg.validate();
  return cfg;
}

/// Element type per token position; std::nullopt never occurs for
/// non-empty tokens since anything unclassified is a content word.
/// Precedence: question type > named entity > function word > content.
inline std::vector<std::optional<ElementType>> classify_elements(const TokenSequence& seq,
                                                                 const AnswerabilityConfig& config) {
  std::vector<std::optional<ElementType>> out(seq.size());
  if (seq.empty()) return out;
  const auto entities = config.ner->tag(seq);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& tok = seq.tokens[i];
    if (tok.empty()) continue;
    if (config.question_words.count(tok)) {
      out[i] = ElementType::question_type;
    } else if (i < entities.size() && entities[i]) {
      out[i] = ElementType::named_entity;
    } else if (config.function_words.count(tok)) {
      out[i] = ElementType::function_word;
    } else {
      out[i] = ElementType::content;
    }
  }
  return out;
}

struct ElementCounts {
  std::array<std::map<std::string, std::size_t>, 4> by_type;

  std::size_t k(ElementType t) const {
    std::size_t n = 0;
    for (const auto& [tok, c] : by_type[static_cast<std::size_t>(t)]) n += c;
    return n;
  }
};

inline ElementCounts count_elements(const TokenSequence& seq, const AnswerabilityConfig& config) {
  ElementCounts counts;
  const auto types = classify_elements(seq, config);
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (types[i]) ++counts.by_type[static_cast<std::size_t>(*types[i])][seq.tokens[i]];
  return counts;
}

/// Number of t-typed tokens of one side with a matching t-typed token on
/// the other (clipped multiset intersection, hence symmetric).
inline std::size_t matched_elements(const ElementCounts& a, const ElementCounts& b, ElementType t) {
  const auto& ma = a.by_type[static_cast<std::size_t>(t)];
  const auto& mb = b.by_type[static_cast<std::size_t>(t)];
  std::size_t h = 0;
  for (const auto& [tok, c] : ma) {
    auto it = mb.find(tok);
    if (it != mb.end()) h += std::min(c, it->second);
  }
  return h;
}

/// F1 of weighted per-type precision and recall. A type absent from one
/// side drops out of that side's sum and the remaining weights are
/// renormalised.
inline MetricScore answerability(const TokenSequence& candidate, const TokenSequence& reference,
                                 const AnswerabilityConfig& config) {
  if (candidate.empty() || reference.empty()) throw InvalidArgument("answerability: empty input");
  config.validate();
  const auto cq = count_elements(candidate, config);
  const auto cr = count_elements(reference, config);

  auto weighted = [&](const ElementCounts& denom_side) {
    double num = 0.0;
    double wsum = 0.0;
    for (auto t : kElementTypes) {
      const std::size_t k = denom_side.k(t);
      if (k == 0) continue;
      const double w = config.weight(t);
      wsum += w;
      num += w * static_cast<double>(matched_elements(cq, cr, t)) / static_cast<double>(k);
    }
    return wsum > 0.0 ? num / wsum : 0.0;
  };

  const double p = weighted(cq);
  const double r = weighted(cr);
  return {100.0 * detail::f1(p, r), "Answerability", std::nullopt};
}

}  // namespace qgeval
