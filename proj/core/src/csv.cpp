#include "macsim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace macsim::csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Integral values print without exponent or fraction (100, not 1e+02).
  if (v == std::floor(v) && std::fabs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  char buf[40];
  // Otherwise the shortest representation that round-trips a double.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

std::string format_int(long long v) { return std::to_string(v); }

Writer::Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw DataError("cannot open for writing: " + path);
}

void Writer::row(const std::vector<std::string>& fields) {
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n\r") != std::string::npos)
      throw DataError("field needs quoting, unsupported in " + path_ + ": " + f);
    if (i) line += ',';
    line += f;
  }
  line += '\n';
  out_ << line;
  if (!out_) throw DataError("write failed: " + path_);
}

void Writer::close() {
  if (out_.is_open()) {
    out_.close();
    if (!out_) throw DataError("close failed: " + path_);
  }
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for reading: " + path);
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    auto fields = split_line(line);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  if (first) throw DataError("empty csv file: " + path);
  return t;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("bad number '" + s + "' in " + context);
  }
}

long long parse_int(const std::string& s, const std::string& context) {
  try {
    size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("bad integer '" + s + "' in " + context);
  }
}

}  // namespace macsim::csv
