#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "spiral/common.hpp"

namespace spiral::io {

std::string format_double(double v);

// CSV file with a tool/version/digest header line; all numbers are written
// with round-trip precision so identical runs produce identical bytes.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& digest);

  void comment(const std::string& text);
  void columns(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

}  // namespace spiral::io
