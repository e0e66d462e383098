#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

// CSV and manifest emission. The dialect is pinned for byte-stable golden
// files: comma separator, '.' decimal point, LF line endings, numbers at 9
// significant digits, infinities as the literal token `inf`.

namespace jscc {

// 9-significant-digit rendering; never locale-dependent.
std::string format_g9(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  // A row of preformatted cells.
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  size_t width_;
};

// key=value lines, keys written in insertion order.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int64_t value);
  void write(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace jscc
