#pragma once

#include "cloudrls/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cloudrls {

/// Doubles round-trip exactly through this formatting (17 significant digits).
std::string format_double(double v);

/// Writes content to a temporary file in the target directory, then renames
/// it over the destination, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t v);

/// Buffered CSV writer with a fixed header; finish() persists atomically.
class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void finish();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  size_t columns_;
  std::string buffer_;
  bool finished_ = false;
};

/// Minimal CSV reader for the files this toolkit writes (no quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static CsvTable read(const std::filesystem::path& path);
  int column(const std::string& name) const;  // -1 when absent
};

}  // namespace cloudrls
