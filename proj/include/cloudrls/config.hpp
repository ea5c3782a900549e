#pragma once

#include "cloudrls/scenario.hpp"
#include "cloudrls/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cloudrls {

/// Flat sectioned key-value text, e.g.
///
///   [scenario]
///   agents = 100      # comment
///   theta = 0.9, 0.4
///   p_rows = 1 0 0; 0 0 1
///
/// Parse errors and type errors carry "source:line" diagnostics.
class ConfigDoc {
 public:
  static ConfigDoc parse(const std::string& text, const std::string& source = "<config>");

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  Vector get_vector(const std::string& section, const std::string& key) const;  // comma list
  std::vector<int> get_int_list(const std::string& section, const std::string& key) const;
  Matrix get_matrix(const std::string& section, const std::string& key) const;  // rows split by ';'

  /// Throws ConfigError naming the first key that was never read. Catches
  /// typos and options in the wrong section.
  void require_all_consumed() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };

  const Entry* find(const std::string& section, const std::string& key) const;
  const Entry& require(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const Entry& e, const std::string& msg) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// ScenarioConfig <-> config text. Parsing validates the result; serializing
/// and re-parsing reproduces the same scenario.
ScenarioConfig scenario_from_config(const ConfigDoc& doc);
ScenarioConfig scenario_from_text(const std::string& text, const std::string& source = "<config>");
std::string scenario_to_text(const ScenarioConfig& config);

}  // namespace cloudrls
