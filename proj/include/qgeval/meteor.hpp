#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/overlap.hpp"
#include "qgeval/text.hpp"

namespace qgeval {

/// token -> synonyms. Matching checks both directions.
using SynonymTable = std::map<std::string, std::set<std::string>>;

/// Tab-separated: head token, then its synonyms. Blank lines and lines
/// starting with '#' are skipped.
inline SynonymTable load_synonym_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open synonym table: " + path.string());
  SynonymTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      fields.push_back(detail::ascii_lower(line.substr(start, tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    auto& syns = table[fields.front()];
    for (std::size_t i = 1; i < fields.size(); ++i)
      if (!fields[i].empty()) syns.insert(fields[i]);
  }
  return table;
}

struct MeteorAlignment {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (candidate, reference), sorted
  std::size_t chunks = 0;
};

namespace detail {

inline bool are_synonyms(const SynonymTable& table, const std::string& a, const std::string& b) {
  auto has = [&](const std::string& head, const std::string& other) {
    auto it = table.find(head);
    return it != table.end() && it->second.count(other) > 0;
  };
  return has(a, b) || has(b, a);
}

}  // namespace detail

/// Staged unigram alignment: exact, then Porter stem, then synonyms.
/// Within a stage candidate tokens are visited right to left and each takes
/// the last unmatched reference token that qualifies, so repeated words pair
/// up from the end (the NLTK convention).
inline MeteorAlignment meteor_align(const TokenSequence& candidate, const TokenSequence& reference,
                                    const SynonymTable* synonyms = nullptr) {
  const auto& c = candidate.tokens;
  const auto& r = reference.tokens;
  std::vector<bool> c_used(c.size(), false);
  std::vector<bool> r_used(r.size(), false);
  MeteorAlignment al;

  auto stage = [&](auto&& same) {
    for (std::size_t i = c.size(); i-- > 0;) {
      if (c_used[i]) continue;
      for (std::size_t j = r.size(); j-- > 0;) {
        if (r_used[j] || !same(i, j)) continue;
        c_used[i] = r_used[j] = true;
        al.matches.emplace_back(i, j);
        break;
      }
    }
  };

  stage([&](std::size_t i, std::size_t j) { return c[i] == r[j]; });

  std::vector<std::string> c_stem(c.size());
  std::vector<std::string> r_stem(r.size());
  for (std::size_t i = 0; i < c.size(); ++i) c_stem[i] = c[i].empty() ? c[i] : porter_stem(c[i]);
  for (std::size_t j = 0; j < r.size(); ++j) r_stem[j] = r[j].empty() ? r[j] : porter_stem(r[j]);
  stage([&](std::size_t i, std::size_t j) { return c_stem[i] == r_stem[j]; });

  if (synonyms != nullptr) {
    stage([&](std::size_t i, std::size_t j) { return detail::are_synonyms(*synonyms, c[i], r[j]); });
  }

  std::sort(al.matches.begin(), al.matches.end());
  for (std::size_t k = 0; k < al.matches.size(); ++k) {
    const bool continues = k > 0 && al.matches[k].first == al.matches[k - 1].first + 1 &&
                           al.matches[k].second == al.matches[k - 1].second + 1;
    if (!continues) ++al.chunks;
  }
  return al;
}

/// Classical METEOR: Fmean = 10PR/(R+9P) times (1 - 0.5 (chunks/matches)^3).
inline MetricScore meteor(const TokenSequence& candidate, const TokenSequence& reference,
                          const SynonymTable* synonyms = nullptr) {
  if (candidate.empty() || reference.empty()) throw InvalidArgument("meteor: empty input");
  const auto al = meteor_align(candidate, reference, synonyms);
  MetricScore out{0.0, "METEOR", std::nullopt};
  const double m = static_cast<double>(al.matches.size());
  if (m == 0.0) return out;
  const double p = m / static_cast<double>(candidate.size());
  const double r = m / static_cast<double>(reference.size());
  const double fmean = 10.0 * p * r / (r + 9.0 * p);
  const double frag = static_cast<double>(al.chunks) / m;
  const double penalty = 0.5 * frag * frag * frag;
  out.value = 100.0 * fmean * (1.0 - penalty);
  return out;
}

}  // namespace qgeval
