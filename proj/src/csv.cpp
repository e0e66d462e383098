#include "jscc/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace jscc {

std::string format_g9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), width_(header.size()) {
  if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
  for (size_t i = 0; i < header.size(); ++i)
    out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_)
    throw std::runtime_error("CsvWriter: row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i)
    out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

void Manifest::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}
void Manifest::set(const std::string& key, double value) {
  entries_.emplace_back(key, format_g9(value));
}
void Manifest::set(const std::string& key, int64_t value) {
  entries_.emplace_back(key, std::to_string(value));
}

void Manifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("Manifest: cannot open " + path);
  for (const auto& [k, v] : entries_) out << k << "=" << v << "\n";
}

}  // namespace jscc
