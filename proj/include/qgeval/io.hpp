#pragma once

// File formats: JSONL record streams (items, ratings, HITs), CSV tables and
// the SVG significance heatmap.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgeval/error.hpp"
#include "qgeval/human_eval/correlate.hpp"
#include "qgeval/human_eval/hit.hpp"
#include "qgeval/human_eval/significance.hpp"
#include "qgeval/human_eval/types.hpp"
#include "qgeval/qascore.hpp"

namespace qgeval::io {

using nlohmann::json;
using nlohmann::ordered_json;

/// Calls `fn(json, line_number)` for every non-blank line. Parse errors and
/// exceptions from `fn` are rethrown as InvalidArgument naming the line.
inline void read_jsonl(const std::filesystem::path& path, const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line), lineno);
    } catch (const std::exception& e) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline EvalItem item_from_json(const json& j) {
  EvalItem it;
  it.id = j.at("id").get<std::string>();
  it.system = j.at("system").get<std::string>();
  it.passage = j.at("passage").get<std::string>();
  it.question = j.at("question").get<std::string>();
  it.answer = j.at("answer").get<std::string>();
  if (j.contains("reference") && !j["reference"].is_null()) it.reference = j["reference"].get<std::string>();
  if (it.id.empty()) throw InvalidArgument("empty id");
  if (it.passage.empty() || it.question.empty() || it.answer.empty())
    throw InvalidArgument("item '" + it.id + "': passage, question and answer must be non-empty");
  return it;
}

inline ordered_json item_to_json(const EvalItem& it) {
  ordered_json j;
  j["id"] = it.id;
  j["system"] = it.system;
  j["passage"] = it.passage;
  j["question"] = it.question;
  j["answer"] = it.answer;
  if (it.reference) j["reference"] = *it.reference;
  return j;
}

inline std::vector<EvalItem> read_items(const std::filesystem::path& path) {
  std::vector<EvalItem> items;
  std::map<std::string, std::size_t> seen;
  read_jsonl(path, [&](const json& j, std::size_t lineno) {
    auto it = item_from_json(j);
    if (auto [pos, fresh] = seen.emplace(it.id, lineno); !fresh)
      throw InvalidArgument("duplicate id '" + it.id + "' (first seen on line " + std::to_string(pos->second) + ")");
    items.push_back(std::move(it));
  });
  return items;
}

inline human_eval::RatingRecord rating_from_json(const json& j) {
  human_eval::RatingRecord r;
  r.worker_id = j.at("worker_id").get<std::string>();
  r.hit_id = j.at("hit_id").get<std::string>();
  r.item_id = j.at("item_id").get<std::string>();
  r.system = j.at("system").get<std::string>();
  r.kind = human_eval::parse_item_kind(j.at("kind").get<std::string>());
  if (j.contains("pair_of") && !j["pair_of"].is_null()) r.pair_of = j["pair_of"].get<std::string>();
  for (const auto& [k, v] : j.at("scores").items()) r.scores[k] = v.get<double>();
  human_eval::validate(r);
  return r;
}

inline ordered_json rating_to_json(const human_eval::RatingRecord& r) {
  ordered_json j;
  j["worker_id"] = r.worker_id;
  j["hit_id"] = r.hit_id;
  j["item_id"] = r.item_id;
  j["system"] = r.system;
  j["kind"] = human_eval::to_string(r.kind);
  j["pair_of"] = r.pair_of ? ordered_json(*r.pair_of) : ordered_json(nullptr);
  ordered_json scores = ordered_json::object();
  for (const auto& [k, v] : r.scores) scores[k] = v;
  j["scores"] = scores;
  return j;
}

inline std::vector<human_eval::RatingRecord> read_ratings(const std::filesystem::path& path) {
  std::vector<human_eval::RatingRecord> out;
  read_jsonl(path, [&](const json& j, std::size_t) { out.push_back(rating_from_json(j)); });
  return out;
}

inline ordered_json hit_to_json(const human_eval::Hit& h) {
  ordered_json j;
  j["hit_id"] = h.hit_id;
  j["passage"] = h.passage;
  j["answer"] = h.answer;
  ordered_json items = ordered_json::array();
  for (const auto& it : h.items) {
    ordered_json o;
    o["item_id"] = it.item_id;
    o["system"] = it.system;
    o["kind"] = human_eval::to_string(it.kind);
    o["pair_of"] = it.pair_of ? ordered_json(*it.pair_of) : ordered_json(nullptr);
    o["question"] = it.question;
    items.push_back(std::move(o));
  }
  j["items"] = std::move(items);
  return j;
}

inline human_eval::Hit hit_from_json(const json& j) {
  human_eval::Hit h;
  h.hit_id = j.at("hit_id").get<std::string>();
  h.passage = j.at("passage").get<std::string>();
  h.answer = j.at("answer").get<std::string>();
  for (const auto& o : j.at("items")) {
    human_eval::HitItem it;
    it.item_id = o.at("item_id").get<std::string>();
    it.system = o.at("system").get<std::string>();
    it.kind = human_eval::parse_item_kind(o.at("kind").get<std::string>());
    if (o.contains("pair_of") && !o["pair_of"].is_null()) it.pair_of = o["pair_of"].get<std::string>();
    it.question = o.at("question").get<std::string>();
    h.items.push_back(std::move(it));
  }
  return h;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Fixed six-decimal formatting so outputs are byte-stable.
inline std::string fmt(double v, int precision = 6) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  std::string s(buf);
  if (s == "-0." + std::string(static_cast<std::size_t>(precision), '0')) s.erase(0, 1);
  return s;
}

inline std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw InvalidArgument("CSV has no column '" + name + "'");
  }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    auto fields = parse_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.header.size()) + " fields");
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw InvalidArgument(path.string() + ": empty CSV");
  return t;
}

/// Parses a numeric CSV cell; blank or "--" means missing.
inline std::optional<double> parse_cell(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return std::nullopt;
  std::size_t b = s.find_last_not_of(" \t");
  const std::string v = s.substr(a, b - a + 1);
  if (v == "--" || v == "NA" || v == "na") return std::nullopt;
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + v + "'");
  }
  if (used != v.size()) throw InvalidArgument("not a number: '" + v + "'");
  return d;
}

/// System-score table: a `system` column, a human-score column and one
/// column per metric (kept in file order).
struct ScoreTable {
  std::map<std::string, double> human;
  std::vector<human_eval::MetricColumn> metrics;
};

inline ScoreTable read_score_table(const std::filesystem::path& path, const std::string& human_column = "z",
                                   const std::string& system_column = "system") {
  const auto csv = read_csv(path);
  const std::size_t sys = csv.column(system_column);
  const std::size_t hum = csv.column(human_column);
  ScoreTable t;
  for (std::size_t c = 0; c < csv.header.size(); ++c)
    if (c != sys && c != hum) t.metrics.push_back({csv.header[c], {}});
  for (const auto& row : csv.rows) {
    const std::string& name = row[sys];
    if (auto v = parse_cell(row[hum])) t.human[name] = *v;
    std::size_t k = 0;
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
      if (c == sys || c == hum) continue;
      if (auto v = parse_cell(row[c])) t.metrics[k].scores[name] = *v;
      ++k;
    }
  }
  return t;
}

inline std::string significance_csv(const human_eval::SignificanceMatrix& m) {
  std::ostringstream os;
  os << "system";
  for (const auto& s : m.systems) os << ',' << csv_field(s);
  os << '\n';
  for (std::size_t i = 0; i < m.systems.size(); ++i) {
    os << csv_field(m.systems[i]);
    for (std::size_t j = 0; j < m.systems.size(); ++j) os << ',' << (m.cells[i][j] ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

inline human_eval::SignificanceMatrix read_significance_csv(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  human_eval::SignificanceMatrix m;
  m.systems.assign(csv.header.begin() + 1, csv.header.end());
  const std::size_t k = m.systems.size();
  if (csv.rows.size() != k) throw InvalidArgument(path.string() + ": matrix is not square");
  m.cells.assign(k, std::vector<bool>(k, false));
  m.p_values.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    if (csv.rows[i][0] != m.systems[i])
      throw InvalidArgument(path.string() + ": row " + std::to_string(i + 1) + " is '" + csv.rows[i][0] +
                            "', expected '" + m.systems[i] + "'");
    for (std::size_t j = 0; j < k; ++j) {
      const auto& cell = csv.rows[i][j + 1];
      if (cell != "0" && cell != "1") throw InvalidArgument(path.string() + ": cells must be 0 or 1");
      m.cells[i][j] = cell == "1";
    }
  }
  return m;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Grid with a filled cell wherever the row system beats the column system.
inline std::string heatmap_svg(const human_eval::SignificanceMatrix& m) {
  const std::size_t k = m.systems.size();
  const int cell = 28;
  const int margin = 130;
  const int size = margin + static_cast<int>(k) * cell + 10;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < k; ++i) {
    const int y = margin + static_cast<int>(i) * cell;
    os << "  <text x=\"" << margin - 6 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">"
       << xml_escape(m.systems[i]) << "</text>\n";
    const int x = margin + static_cast<int>(i) * cell + cell / 2;
    os << "  <text transform=\"translate(" << x + 4 << "," << margin - 6 << ") rotate(-60)\">"
       << xml_escape(m.systems[i]) << "</text>\n";
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const int x = margin + static_cast<int>(j) * cell;
      const int y = margin + static_cast<int>(i) * cell;
      const char* fill = i == j ? "#dddddd" : (m.cells[i][j] ? "#2b6cb0" : "#ffffff");
      os << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
         << "\" fill=\"" << fill << "\" stroke=\"#888888\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << content;
  if (!out) throw InvalidArgument("write failed: " + path.string());
}

}  // namespace qgeval::io
