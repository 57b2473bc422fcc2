#include "alloylab/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "alloylab/errors.hpp"

namespace alloylab {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quote(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> columns, std::string config_hash,
                     std::uint64_t seed)
    : columns_(std::move(columns)), config_hash_(std::move(config_hash)),
      seed_(std::to_string(seed)) {}

void CsvWriter::add_row(std::vector<std::string> fields) {
  if (fields.size() != columns_.size())
    throw ConfigError("csv row width does not match the header");
  rows_.push_back(std::move(fields));
}

std::string CsvWriter::render() const {
  std::string out = "config_hash,seed";
  for (const auto& c : columns_) out += "," + quote(c);
  out += "\r\n";
  for (const auto& row : rows_) {
    out += config_hash_ + "," + seed_;
    for (const auto& f : row) out += "," + quote(f);
    out += "\r\n";
  }
  return out;
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << render();
}

}  // namespace alloylab
