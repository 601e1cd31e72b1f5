#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "orbitsym/chart.hpp"
#include "orbitsym/solver.hpp"

namespace orbitsym {

/// Chart persistence as a single JSON document (grid arrays, field arrays,
/// seam descriptor, metadata) and CSV table output.  Numbers are written in
/// shortest round-trip form, so identical data gives identical bytes.

void save_chart(const Chart& chart, const std::filesystem::path& path);
Chart load_chart(const std::filesystem::path& path);

/// Minimal CSV writer: fixed header, rows of shortest-round-trip doubles.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  ~CsvWriter();
  void row(const std::vector<double>& values);

 private:
  struct Impl;
  Impl* impl_;
};

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace orbitsym
