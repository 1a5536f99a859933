#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace qgeval::fixture {

inline std::filesystem::path data_dir() { return QGEVAL_DATA_DIR; }
inline std::filesystem::path test_data_dir() { return QGEVAL_TEST_DATA_DIR; }

inline nlohmann::json load_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("missing test data: " + p.string());
  return nlohmann::json::parse(in);
}

inline nlohmann::json oracle(const std::string& name) { return load_json(test_data_dir() / "oracles" / (name + ".json")); }

}  // namespace qgeval::fixture
