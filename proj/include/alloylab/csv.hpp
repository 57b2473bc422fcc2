#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace alloylab {

// Shortest round-trip decimal representation, '.' separator, locale free.
std::string format_double(double value);

// RFC-4180 writer: header row, comma separated, CRLF line endings, quoting
// only where required. Every table starts with config_hash and seed columns.
class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> columns, std::string config_hash, std::uint64_t seed);

  void add_row(std::vector<std::string> fields);
  std::string render() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::string config_hash_;
  std::string seed_;
};

}  // namespace alloylab
