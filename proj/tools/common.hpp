#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spde/csv.hpp"

namespace cli {

using ordered_json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos
                                                    : comma - pos);
    if (!tok.empty()) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("invalid numeric list element: " + tok);
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty numeric list: " + text);
  return out;
}

inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos
                                                    : comma - pos);
    if (!tok.empty()) {
      try {
        out.push_back(spde::parse_seed(tok));
      } catch (const std::exception&) {
        throw ConfigError("invalid seed list element: " + tok);
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty seed list: " + text);
  return out;
}

inline void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir);
}

inline void write_json(const std::string& file, const ordered_json& j) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  os << j.dump(2) << "\n";
}

}  // namespace cli
