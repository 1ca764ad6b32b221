#include "macsim/record.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "macsim/csv.hpp"

namespace macsim {

std::string VariableSpec::code_at(uint64_t index) const {
  return std::to_string(code_base + static_cast<int64_t>(index));
}

std::string VariableSpec::draw(Engine& eng) const {
  if (head_prob > 0.0 && chance(eng, head_prob)) return head_code;
  return code_at(uniform_below(eng, cardinality));
}

size_t Schema::variable_index(const std::string& name) const {
  for (size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return i;
  throw ConfigError("schema has no variable named '" + name + "'");
}

std::vector<size_t> Schema::linking_indices() const {
  std::vector<size_t> idx;
  idx.reserve(linking_variables.size());
  for (const auto& name : linking_variables) idx.push_back(variable_index(name));
  return idx;
}

void Schema::validate() const {
  if (variables.empty()) throw ConfigError("schema has no variables");
  std::unordered_set<std::string> names;
  for (const auto& v : variables) {
    if (v.name.empty()) throw ConfigError("schema variable with empty name");
    if (v.name == "recid") throw ConfigError("'recid' is reserved, not a schema variable");
    if (!names.insert(v.name).second)
      throw ConfigError("duplicate schema variable '" + v.name + "'");
    if (v.cardinality == 0) throw ConfigError("variable '" + v.name + "' has cardinality 0");
    if (v.head_prob < 0.0 || v.head_prob > 1.0)
      throw ConfigError("variable '" + v.name + "' head_prob outside [0,1]");
    if (v.head_prob > 0.0 && v.head_code.empty())
      throw ConfigError("variable '" + v.name + "' has head_prob but no head_code");
  }
  variable_index(blocking_variable);
  if (linking_variables.empty()) throw ConfigError("schema has no linking variables");
  std::unordered_set<std::string> linking;
  for (const auto& name : linking_variables) {
    variable_index(name);
    if (!linking.insert(name).second)
      throw ConfigError("duplicate linking variable '" + name + "'");
  }
}

void write_records_csv(const std::string& path, const Schema& schema,
                       const std::vector<Record>& records) {
  csv::Writer w(path);
  std::vector<std::string> header{"recid"};
  for (const auto& v : schema.variables) header.push_back(v.name);
  w.row(header);
  std::vector<std::string> row;
  for (const auto& r : records) {
    row.clear();
    row.push_back(csv::format_int(r.recid));
    for (const auto& v : r.values) row.push_back(v);
    w.row(row);
  }
  w.close();
}

std::vector<Record> read_records_csv(const std::string& path, const Schema& schema) {
  auto table = csv::read_file(path);
  if (table.header.size() != schema.variables.size() + 1 || table.header[0] != "recid")
    throw DataError("unexpected header in " + path);
  for (size_t i = 0; i < schema.variables.size(); ++i)
    if (table.header[i + 1] != schema.variables[i].name)
      throw DataError("header mismatch in " + path + ": expected '" +
                      schema.variables[i].name + "', got '" + table.header[i + 1] + "'");
  std::vector<Record> records;
  records.reserve(table.rows.size());
  for (auto& fields : table.rows) {
    if (fields.size() != table.header.size())
      throw DataError("ragged row in " + path);
    Record r;
    r.recid = csv::parse_int(fields[0], path);
    r.values.assign(fields.begin() + 1, fields.end());
    records.push_back(std::move(r));
  }
  return records;
}

void write_truth_csv(const std::string& path, const FilePair& pair) {
  csv::Writer w(path);
  w.row({"x_recid", "y_recid"});
  for (size_t i = 0; i < pair.truth.size(); ++i) {
    int64_t y = pair.truth[i];
    w.row({csv::format_int(pair.file_x[i].recid), csv::format_int(pair.file_y[y].recid)});
  }
  w.close();
}

std::vector<int64_t> read_truth_csv(const std::string& path,
                                    const std::vector<Record>& file_x,
                                    const std::vector<Record>& file_y) {
  auto table = csv::read_file(path);
  if (table.header != std::vector<std::string>{"x_recid", "y_recid"})
    throw DataError("unexpected header in " + path);
  std::unordered_map<int64_t, int64_t> x_by_recid, y_by_recid;
  for (size_t i = 0; i < file_x.size(); ++i) x_by_recid[file_x[i].recid] = static_cast<int64_t>(i);
  for (size_t j = 0; j < file_y.size(); ++j) y_by_recid[file_y[j].recid] = static_cast<int64_t>(j);
  std::vector<int64_t> truth(file_x.size(), -1);
  std::unordered_set<int64_t> used_y;
  for (const auto& fields : table.rows) {
    if (fields.size() != 2) throw DataError("ragged row in " + path);
    int64_t xr = csv::parse_int(fields[0], path);
    int64_t yr = csv::parse_int(fields[1], path);
    auto xi = x_by_recid.find(xr);
    auto yj = y_by_recid.find(yr);
    if (xi == x_by_recid.end()) throw DataError(path + ": unknown x recid " + fields[0]);
    if (yj == y_by_recid.end()) throw DataError(path + ": unknown y recid " + fields[1]);
    if (truth[xi->second] != -1) throw DataError(path + ": duplicate x recid " + fields[0]);
    if (!used_y.insert(yj->second).second)
      throw DataError(path + ": truth map not injective at y recid " + fields[1]);
    truth[xi->second] = yj->second;
  }
  for (size_t i = 0; i < truth.size(); ++i)
    if (truth[i] == -1)
      throw DataError(path + ": missing truth row for x recid " +
                      std::to_string(file_x[i].recid));
  return truth;
}

}  // namespace macsim
