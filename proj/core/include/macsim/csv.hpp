#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "macsim/error.hpp"

namespace macsim::csv {

// Deterministic decimal rendering, shortest round-trip form. All CSV output
// goes through this so that reruns with the same seed are byte-identical.
std::string format_double(double v);
std::string format_int(long long v);

// Fields in this project never contain commas, quotes or newlines (they are
// categorical codes and numbers), so no quoting is implemented; the writer
// rejects values that would need it instead of silently corrupting output.
class Writer {
 public:
  explicit Writer(const std::string& path);
  void row(const std::vector<std::string>& fields);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

std::vector<std::string> split_line(std::string_view line);

// Reads the whole file; first row is returned as `header`.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
Table read_file(const std::string& path);

double parse_double(const std::string& s, const std::string& context);
long long parse_int(const std::string& s, const std::string& context);

}  // namespace macsim::csv
