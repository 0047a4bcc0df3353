#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cpv/errors.hpp"

namespace cpv::csv {

// All floating-point report output goes through fmt(): 12 significant digits,
// so emitted files are stable under re-runs and byte-comparable.
std::string fmt(double v);

// Strict full-token parse; accepts "inf"/"nan" spellings from fmt().
bool try_double(const std::string& field, double& out);
double to_double(const std::string& field, const std::string& context);
long to_long(const std::string& field, const std::string& context);

// Quote-aware single-line split / join ("" escapes a quote inside quotes).
std::vector<std::string> split(const std::string& line);
std::string join(const std::vector<std::string>& fields);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<long> line_numbers;  // 1-based source line per row
};

Table read(const std::string& path);

class Writer {
 public:
  explicit Writer(const std::string& path);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
};

// Hourly column names: h00, h01, ... (three digits past h99).
std::string hour_col(int t);
std::vector<std::string> hour_cols(int hours);

// FNV-1a 64-bit over raw file bytes, as 16 lowercase hex chars.
std::string checksum_file(const std::string& path);

}  // namespace cpv::csv
