#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

// Oracle value stored in fixtures/<name>.json.
inline double fixture_oracle(const std::string& name) {
  std::ifstream in(std::string(FRACSURF_FIXTURE_DIR) + "/" + name + ".json");
  if (!in) throw std::runtime_error("missing fixture " + name);
  return nlohmann::json::parse(in).at("oracle_value").get<double>();
}
