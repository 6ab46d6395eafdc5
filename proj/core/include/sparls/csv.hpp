// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace sparls::csv {

// Deterministic %.12g formatting shared by every CSV artifact.
std::string format(double value);

class Writer {
 public:
  explicit Writer(const std::string& path);

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  // Mixed row: already-formatted cells.
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

}  // namespace sparls::csv
