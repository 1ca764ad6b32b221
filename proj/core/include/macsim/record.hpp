#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "macsim/error.hpp"
#include "macsim/rng.hpp"

namespace macsim {

// A missing value is the empty string, matching its CSV encoding (empty field).
inline constexpr const char* kMissing = "";

inline bool is_missing(const std::string& v) { return v.empty(); }

struct Record {
  int64_t recid = 0;
  std::vector<std::string> values;  // one per schema variable, in schema order
};

// Value domain of one variable. Either a uniform categorical with `cardinality`
// codes, or a two-tier draw: `head_code` with probability `head_prob`, else one
// of `cardinality` tail codes. Codes are rendered as decimal strings offset by
// `code_base` so files look like administrative category codes.
struct VariableSpec {
  std::string name;
  uint64_t cardinality = 2;
  int64_t code_base = 0;
  double head_prob = 0.0;     // 0 disables the two-tier head
  std::string head_code;

  std::string code_at(uint64_t index) const;
  std::string draw(Engine& eng) const;
};

struct Schema {
  std::vector<VariableSpec> variables;
  std::string blocking_variable;
  std::vector<std::string> linking_variables;

  size_t variable_index(const std::string& name) const;  // throws ConfigError
  size_t blocking_index() const { return variable_index(blocking_variable); }
  std::vector<size_t> linking_indices() const;
  void validate() const;
};

// Two files with known truth. truth[x] is the file_y index of x's true match.
// The default generator uses the prefix convention: X is the leading slice of
// Y, so truth is the identity map.
struct FilePair {
  std::vector<Record> file_y;
  std::vector<Record> file_x;
  std::vector<int64_t> truth;
};

// records csv: header "recid,<var>,...", missing encoded as empty field.
void write_records_csv(const std::string& path, const Schema& schema,
                       const std::vector<Record>& records);
std::vector<Record> read_records_csv(const std::string& path, const Schema& schema);

// truth csv: header "x_recid,y_recid".
void write_truth_csv(const std::string& path, const FilePair& pair);

// Rebuilds the index-based truth map from recid pairs.
std::vector<int64_t> read_truth_csv(const std::string& path,
                                    const std::vector<Record>& file_x,
                                    const std::vector<Record>& file_y);

}  // namespace macsim
