#include "cpv/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace cpv::csv {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // fold -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

bool try_double(const std::string& field, double& out) {
  if (field.empty()) return false;
  const char* begin = field.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + field.size();
}

double to_double(const std::string& field, const std::string& context) {
  double v = 0.0;
  if (!try_double(field, v)) throw InputError(context + ": not a number: '" + field + "'");
  return v;
}

long to_long(const std::string& field, const std::string& context) {
  if (field.empty()) throw InputError(context + ": empty integer field");
  const char* begin = field.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end != begin + field.size())
    throw InputError(context + ": not an integer: '" + field + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

static bool needs_quoting(const std::string& f) {
  return f.find_first_of(",\"\n") != std::string::npos;
}

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    if (needs_quoting(fields[i])) {
      line += '"';
      for (char c : fields[i]) {
        line += c;
        if (c == '"') line += '"';
      }
      line += '"';
    } else {
      line += fields[i];
    }
  }
  return line;
}

Table read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  Table table;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (table.header.empty()) {
      table.header = split(line);
    } else {
      table.rows.push_back(split(line));
      table.line_numbers.push_back(line_no);
    }
  }
  if (table.header.empty()) throw InputError("'" + path + "' is empty (missing header)");
  return table;
}

Writer::Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw InputError("cannot write '" + path + "'");
}

void Writer::row(const std::vector<std::string>& fields) {
  out_ << join(fields) << '\n';
  if (!out_) throw InputError("write failed on '" + path_ + "'");
}

void Writer::close() {
  out_.close();
  if (out_.fail()) throw InputError("write failed on '" + path_ + "'");
}

std::string hour_col(int t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "h%02d", t);
  return buf;
}

std::vector<std::string> hour_cols(int hours) {
  std::vector<std::string> cols;
  cols.reserve(static_cast<std::size_t>(hours));
  for (int t = 0; t < hours; ++t) cols.push_back(hour_col(t));
  return cols;
}

std::string checksum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "' for checksumming");
  std::uint64_t hash = 1469598103934665603ull;  // FNV offset basis
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ull;  // FNV prime
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
  return out;
}

}  // namespace cpv::csv
