#include "spiral/csv.hpp"

#include <cstdio>

namespace spiral::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& digest) : out_(path) {
  if (!out_) throw ConfigError("cannot open output file: " + path);
  out_ << "# " << kToolName << " " << kToolVersion << " digest=" << digest << "\n";
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::columns(const std::vector<std::string>& names) {
  for (size_t k = 0; k < names.size(); ++k) {
    out_ << names[k] << (k + 1 < names.size() ? "," : "\n");
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  for (size_t k = 0; k < values.size(); ++k) {
    out_ << format_double(values[k]) << (k + 1 < values.size() ? "," : "\n");
  }
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
  for (size_t k = 0; k < cells.size(); ++k) {
    out_ << cells[k] << (k + 1 < cells.size() ? "," : "\n");
  }
}

}  // namespace spiral::io
