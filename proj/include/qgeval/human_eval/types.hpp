#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgeval/error.hpp"

namespace qgeval::human_eval {

enum class ItemKind { ord, repeat, badref };

inline const char* to_string(ItemKind k) {
  switch (k) {
    case ItemKind::ord: return "ORD";
    case ItemKind::repeat: return "REPEAT";
    case ItemKind::badref: return "BADREF";
  }
  return "?";
}

inline ItemKind parse_item_kind(std::string_view s) {
  if (s == "ORD") return ItemKind::ord;
  if (s == "REPEAT") return ItemKind::repeat;
  if (s == "BADREF") return ItemKind::badref;
  throw InvalidArgument("unknown item kind '" + std::string(s) + "'");
}

inline std::vector<std::string> default_criteria() {
  return {"understandability", "relevancy", "answerability", "appropriateness"};
}

inline constexpr const char* kHumanSystem = "Human";

struct RatingRecord {
  std::string worker_id;
  std::string hit_id;
  std::string item_id;
  std::string system;
  ItemKind kind = ItemKind::ord;
  std::optional<std::string> pair_of;
  std::map<std::string, double> scores;

  /// Score for a criterion; throws when missing.
  double score(const std::string& criterion) const {
    auto it = scores.find(criterion);
    if (it == scores.end())
      throw InvalidArgument("rating " + hit_id + "/" + item_id + " by " + worker_id +
                            " has no score for '" + criterion + "'");
    return it->second;
  }
};

/// Checks the record invariants that do not need the rest of the HIT.
inline void validate(const RatingRecord& r) {
  if (r.kind != ItemKind::ord && !r.pair_of)
    throw InvalidArgument("rating " + r.hit_id + "/" + r.item_id + ": " + to_string(r.kind) +
                          " item without pair_of");
  for (const auto& [c, v] : r.scores)
    if (!(v >= 0.0 && v <= 100.0))
      throw InvalidArgument("rating " + r.hit_id + "/" + r.item_id + ": score for '" + c +
                            "' outside [0,100]");
}

}  // namespace qgeval::human_eval
