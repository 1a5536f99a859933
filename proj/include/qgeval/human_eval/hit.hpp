#pragma once

// HIT construction: 11 ordinary questions (one per system, Human included)
// plus 6 bad references and 3 exact repeats, fully shuffled.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/human_eval/types.hpp"
#include "qgeval/random.hpp"
#include "qgeval/text.hpp"

namespace qgeval::human_eval {

inline constexpr std::size_t kHitItems = 20;
inline constexpr std::size_t kHitSystems = 11;
inline constexpr std::size_t kRepeatSystems = 2;
inline constexpr std::size_t kBadrefSystems = 5;

/// Length of the replaced span for an n-word question. n = 5 is not covered
/// by the rule table and is assigned 2 words; n >= 21 uses
/// floor(n/5) literally even though that dips below the 16..20 value.
inline std::size_t bad_reference_span_length(std::size_t n) {
  if (n == 0) throw InvalidArgument("bad_reference_span_length: empty question");
  if (n <= 3) return 1;
  if (n <= 5) return 2;
  if (n <= 8) return 3;
  if (n <= 15) return 4;
  if (n <= 20) return 5;
  return n / 5;
}

struct DonorPassage {
  std::string id;
  std::vector<std::string> words;
};

struct BadReference {
  std::vector<std::string> words;
  std::size_t span_start = 0;
  std::size_t span_length = 0;
  std::string donor_id;
};

/// Replaces a random contiguous span with a same-length span taken from a
/// different passage. For questions longer than two words the first and
/// last words are never replaced.
inline BadReference make_bad_reference(std::span<const std::string> question,
                                       std::span<const DonorPassage> corpus,
                                       const std::string& current_passage_id, Rng& rng) {
  const std::size_t n = question.size();
  if (n == 0) throw InvalidArgument("make_bad_reference: empty question");
  const std::size_t m = bad_reference_span_length(n);

  std::vector<const DonorPassage*> donors;
  for (const auto& p : corpus)
    if (p.id != current_passage_id && p.words.size() >= m) donors.push_back(&p);
  if (donors.empty()) throw InvalidArgument("make_bad_reference: no eligible donor passage");

  const std::size_t lo = n > 2 ? 1 : 0;
  const std::size_t hi = n > 2 ? n - 1 : n;  // exclusive bound for the span end
  const std::size_t start = lo + rng.index(hi - lo - m + 1);

  BadReference out;
  out.span_start = start;
  out.span_length = m;
  const std::vector<std::string> original(question.begin() + static_cast<std::ptrdiff_t>(start),
                                          question.begin() + static_cast<std::ptrdiff_t>(start + m));
  std::vector<std::string> replacement;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const DonorPassage& d = *donors[rng.index(donors.size())];
    const std::size_t at = rng.index(d.words.size() - m + 1);
    replacement.assign(d.words.begin() + static_cast<std::ptrdiff_t>(at),
                       d.words.begin() + static_cast<std::ptrdiff_t>(at + m));
    out.donor_id = d.id;
    if (replacement != original) break;
  }
  out.words.assign(question.begin(), question.end());
  std::copy(replacement.begin(), replacement.end(), out.words.begin() + static_cast<std::ptrdiff_t>(start));
  return out;
}

struct HitItem {
  std::string item_id;
  std::string system;
  ItemKind kind = ItemKind::ord;
  std::optional<std::string> pair_of;
  std::string question;
};

struct Hit {
  std::string hit_id;
  std::string passage;
  std::string answer;
  std::vector<HitItem> items;
};

/// `questions` maps each of the 11 systems (Human included) to its question.
inline Hit build_hit(const std::string& hit_id, const std::string& passage_id, const std::string& passage,
                     const std::string& answer, const std::map<std::string, std::string>& questions,
                     std::span<const DonorPassage> donors, Rng& rng,
                     const std::string& human_system = kHumanSystem) {
  if (questions.size() != kHitSystems)
    throw InvalidArgument("build_hit: expected " + std::to_string(kHitSystems) + " systems, got " +
                          std::to_string(questions.size()));
  if (!questions.count(human_system))
    throw InvalidArgument("build_hit: missing '" + human_system + "' system");

  std::vector<std::string> others;
  for (const auto& [sys, q] : questions)
    if (sys != human_system) others.push_back(sys);
  rng.shuffle(others);

  Hit hit{hit_id, passage, answer, {}};
  auto ord_id = [&](const std::string& sys) { return hit_id + ":" + sys + ":ORD"; };
  auto add_ord = [&](const std::string& sys) {
    hit.items.push_back({ord_id(sys), sys, ItemKind::ord, std::nullopt, questions.at(sys)});
  };
  auto add_repeat = [&](const std::string& sys) {
    hit.items.push_back({hit_id + ":" + sys + ":REPEAT", sys, ItemKind::repeat, ord_id(sys), questions.at(sys)});
  };
  auto add_badref = [&](const std::string& sys) {
    const auto words = split_words(questions.at(sys));
    if (words.empty()) throw InvalidArgument("build_hit: empty question for system '" + sys + "'");
    const auto bad = make_bad_reference(words, donors, passage_id, rng);
    hit.items.push_back({hit_id + ":" + sys + ":BADREF", sys, ItemKind::badref, ord_id(sys), join(bad.words)});
  };

  add_ord(human_system);
  add_repeat(human_system);
  add_badref(human_system);
  for (std::size_t i = 0; i < others.size(); ++i) {
    add_ord(others[i]);
    if (i < kRepeatSystems) {
      add_repeat(others[i]);
    } else if (i < kRepeatSystems + kBadrefSystems) {
      add_badref(others[i]);
    }
  }
  rng.shuffle(hit.items);
  return hit;
}

}  // namespace qgeval::human_eval
