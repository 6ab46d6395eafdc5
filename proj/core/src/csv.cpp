// SPDX-License-Identifier: Apache-2.0
#include "sparls/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace sparls::csv {

std::string format(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

Writer::Writer(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("csv: cannot open " + path);
}

void Writer::header(const std::vector<std::string>& names) { raw_row(names); }

void Writer::row(const std::vector<double>& values) {
  std::string line;
  for (size_t j = 0; j < values.size(); ++j) {
    if (j) line += ',';
    line += format(values[j]);
  }
  line += '\n';
  out_ << line;
}

void Writer::raw_row(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t j = 0; j < cells.size(); ++j) {
    if (j) line += ',';
    line += cells[j];
  }
  line += '\n';
  out_ << line;
}

}  // namespace sparls::csv
