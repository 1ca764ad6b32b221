#include "macsim/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "macsim/csv.hpp"

namespace macsim {

TernaryArray::TernaryArray(size_t rows, size_t cols, size_t vars)
    : rows_(rows), cols_(cols), vars_(vars), words_((rows * cols * vars + 31) / 32, 0) {}

std::vector<Cell> TernaryArray::unpack() const {
  std::vector<Cell> plain(size());
  for (size_t i = 0; i < plain.size(); ++i) plain[i] = get_linear(i);
  return plain;
}

TernaryArray TernaryArray::pack(size_t rows, size_t cols, size_t vars,
                                const std::vector<Cell>& plain) {
  TernaryArray a(rows, cols, vars);
  assert(plain.size() == a.size());
  for (size_t i = 0; i < plain.size(); ++i) a.set_linear(i, plain[i]);
  return a;
}

size_t AgreementMatrix::matched_row_count() const {
  size_t n = 0;
  for (int32_t c : matched_col) n += (c != kNoMatch);
  return n;
}

void MUGParams::validate() const {
  if (m.empty() || m.size() != u.size() || m.size() != g.size())
    throw ConfigError("mug params: inconsistent variable counts");
  for (size_t l = 0; l < m.size(); ++l) {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(m[l]) || !in01(u[l]) || !in01(g[l]))
      throw ConfigError("mug params outside [0,1] at variable " + std::to_string(l));
    if (m[l] + g[l] > 1.0 + 1e-12 || u[l] + g[l] > 1.0 + 1e-12)
      throw ConfigError("mug params violate m+g<=1 / u+g<=1 at variable " + std::to_string(l));
  }
}

std::vector<AgreementMatrix> build_blocks(const FilePair& pair, const Schema& schema,
                                          size_t cell_budget) {
  schema.validate();
  const size_t blocking = schema.blocking_index();
  const auto linking = schema.linking_indices();
  const size_t L = linking.size();

  // std::map keeps blocks ordered by id, which fixes output order everywhere.
  std::map<std::string, std::pair<std::vector<int32_t>, std::vector<int32_t>>> groups;
  for (size_t j = 0; j < pair.file_y.size(); ++j) {
    const std::string& key = pair.file_y[j].values[blocking];
    if (is_missing(key)) continue;
    groups[key].first.push_back(static_cast<int32_t>(j));
  }
  for (size_t i = 0; i < pair.file_x.size(); ++i) {
    const std::string& key = pair.file_x[i].values[blocking];
    if (is_missing(key)) continue;
    groups[key].second.push_back(static_cast<int32_t>(i));
  }

  std::vector<AgreementMatrix> blocks;
  for (auto& [key, group] : groups) {
    auto& [ys, xs] = group;
    if (ys.empty() || xs.empty()) continue;

    AgreementMatrix block;
    block.block_id = key;
    block.y_ids = std::move(ys);
    block.x_ids = std::move(xs);

    const size_t rows = block.x_ids.size();
    const size_t cols = block.y_ids.size();
    if (rows * cols * L > cell_budget)
      throw DataError("block '" + key + "' needs " + std::to_string(rows * cols * L) +
                      " cells, over the budget of " + std::to_string(cell_budget) +
                      "; check the blocking variable");

    block.cells = TernaryArray(rows, cols, L);
    for (size_t bi = 0; bi < rows; ++bi) {
      const Record& x = pair.file_x[block.x_ids[bi]];
      for (size_t l = 0; l < L; ++l) {
        const std::string& xv = x.values[linking[l]];
        const size_t base = block.cells.index(bi, l, 0);
        for (size_t bj = 0; bj < cols; ++bj) {
          const std::string& yv = pair.file_y[block.y_ids[bj]].values[linking[l]];
          Cell c;
          if (is_missing(xv) || is_missing(yv)) c = 0;
          else c = (xv == yv) ? Cell{1} : Cell{-1};
          block.cells.set_linear(base + bj, c);
        }
      }
    }

    block.matched_col.assign(rows, kNoMatch);
    for (size_t bi = 0; bi < rows; ++bi) {
      int64_t t = pair.truth[block.x_ids[bi]];
      auto it = std::find(block.y_ids.begin(), block.y_ids.end(), static_cast<int32_t>(t));
      if (it != block.y_ids.end())
        block.matched_col[bi] = static_cast<int32_t>(it - block.y_ids.begin());
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

MugCounts& MugCounts::operator+=(const MugCounts& o) {
  if (matched_agree.empty()) *this = MugCounts(o.matched_agree.size());
  for (size_t l = 0; l < matched_agree.size(); ++l) {
    matched_agree[l] += o.matched_agree[l];
    nonmatched_agree[l] += o.nonmatched_agree[l];
    missing[l] += o.missing[l];
  }
  matched_pairs += o.matched_pairs;
  total_pairs += o.total_pairs;
  return *this;
}

MugCounts count_block(const AgreementMatrix& matrix) {
  const size_t L = matrix.vars();
  MugCounts counts(L);
  const size_t rows = matrix.rows(), cols = matrix.cols();
  counts.total_pairs = static_cast<int64_t>(rows * cols);
  for (size_t i = 0; i < rows; ++i) {
    const int32_t mc = matrix.matched_col[i];
    counts.matched_pairs += (mc != kNoMatch);
    for (size_t l = 0; l < L; ++l) {
      const size_t base = matrix.cells.index(i, l, 0);
      for (size_t j = 0; j < cols; ++j) {
        Cell c = matrix.cells.get_linear(base + j);
        if (c == 0) ++counts.missing[l];
        else if (c == 1) {
          if (static_cast<int32_t>(j) == mc) ++counts.matched_agree[l];
          else ++counts.nonmatched_agree[l];
        }
      }
    }
  }
  return counts;
}

MUGParams mug_from_counts(const MugCounts& counts) {
  if (counts.matched_pairs == 0) throw DataError("mug estimation: no matched pairs in any block");
  const int64_t nonmatched = counts.total_pairs - counts.matched_pairs;
  if (nonmatched == 0) throw DataError("mug estimation: no non-matched pairs in any block");

  const size_t L = counts.matched_agree.size();
  MUGParams p;
  p.m.resize(L);
  p.u.resize(L);
  p.g.resize(L);
  for (size_t l = 0; l < L; ++l) {
    p.g[l] = static_cast<double>(counts.missing[l]) / static_cast<double>(counts.total_pairs);
    const double lo = kMugClampEpsilon;
    const double hi = std::max(lo, 1.0 - p.g[l] - kMugClampEpsilon);
    auto clamp = [&](double v) { return std::clamp(v, lo, hi); };
    p.m[l] = clamp(static_cast<double>(counts.matched_agree[l]) /
                   static_cast<double>(counts.matched_pairs));
    p.u[l] = clamp(static_cast<double>(counts.nonmatched_agree[l]) /
                   static_cast<double>(nonmatched));
  }
  return p;
}

MUGParams estimate_mug(const std::vector<AgreementMatrix>& blocks) {
  if (blocks.empty()) throw DataError("mug estimation: no blocks");
  MugCounts pooled(blocks.front().vars());
  for (const auto& block : blocks) pooled += count_block(block);
  return mug_from_counts(pooled);
}

AgreementMatrix sample_matrix(size_t rows, size_t cols, const MUGParams& params,
                              uint64_t seed, SampleMode mode) {
  params.validate();
  if (cols < rows) throw ConfigError("sample_matrix needs cols >= rows for the diagonal truth");
  const size_t L = params.vars();

  AgreementMatrix matrix;
  matrix.block_id = "synthetic";
  matrix.x_ids.resize(rows);
  matrix.y_ids.resize(cols);
  for (size_t i = 0; i < rows; ++i) matrix.x_ids[i] = static_cast<int32_t>(i);
  for (size_t j = 0; j < cols; ++j) matrix.y_ids[j] = static_cast<int32_t>(j);
  matrix.matched_col.resize(rows);
  for (size_t i = 0; i < rows; ++i) matrix.matched_col[i] = static_cast<int32_t>(i);
  matrix.cells = TernaryArray(rows, cols, L);

  Engine eng = make_engine(seed, "sample_matrix", 0);

  auto draw_cell = [&](double pr_agree, double pr_missing) -> Cell {
    double r = uniform01(eng);
    if (r < pr_missing) return 0;
    if (r < pr_missing + pr_agree) return 1;
    return -1;
  };

  // Fills `slots` with exact rounded counts of missing/agree cells, placed
  // uniformly at random (partial Fisher-Yates on the slot list).
  auto quota_fill = [&](std::vector<size_t>& slots, double pr_agree, double pr_missing,
                        auto&& write) {
    const size_t n = slots.size();
    size_t n_missing = static_cast<size_t>(std::llround(pr_missing * static_cast<double>(n)));
    size_t n_agree = static_cast<size_t>(std::llround(pr_agree * static_cast<double>(n)));
    n_missing = std::min(n_missing, n);
    n_agree = std::min(n_agree, n - n_missing);
    for (size_t k = 0; k < n; ++k) {
      size_t pick = k + uniform_below(eng, n - k);
      std::swap(slots[k], slots[pick]);
      Cell c = k < n_missing ? Cell{0} : (k < n_missing + n_agree ? Cell{1} : Cell{-1});
      write(slots[k], c);
    }
  };

  for (size_t l = 0; l < L; ++l) {
    if (mode == SampleMode::kBernoulli) {
      for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j)
          matrix.cells.set(i, l, j, draw_cell(j == i ? params.m[l] : params.u[l], params.g[l]));
      continue;
    }
    // Matched cells: one quota across the diagonal.
    std::vector<size_t> diag(rows);
    for (size_t i = 0; i < rows; ++i) diag[i] = i;
    quota_fill(diag, params.m[l], params.g[l],
               [&](size_t i, Cell c) { matrix.cells.set(i, l, i, c); });
    // Non-matched cells: a quota per row, so rows frozen by a missing matched
    // cell still carry the target marginal exactly.
    for (size_t i = 0; i < rows; ++i) {
      std::vector<size_t> off;
      off.reserve(cols - 1);
      for (size_t j = 0; j < cols; ++j)
        if (j != i) off.push_back(j);
      quota_fill(off, params.u[l], params.g[l],
                 [&](size_t j, Cell c) { matrix.cells.set(i, l, j, c); });
    }
  }
  return matrix;
}

void write_agreement_csv(const std::string& path, const AgreementMatrix& matrix) {
  csv::Writer w(path);
  w.row({"i", "j", "l", "cell"});
  for (size_t i = 0; i < matrix.rows(); ++i)
    for (size_t j = 0; j < matrix.cols(); ++j)
      for (size_t l = 0; l < matrix.vars(); ++l)
        w.row({csv::format_int(static_cast<long long>(i)),
               csv::format_int(static_cast<long long>(j)),
               csv::format_int(static_cast<long long>(l)),
               csv::format_int(matrix.cells.get(i, l, j))});
  w.close();
}

void write_mug_csv(const std::string& path, const MUGParams& params,
                   const std::vector<std::string>& variable_names) {
  if (variable_names.size() != params.vars())
    throw ConfigError("mug csv: name count does not match variable count");
  csv::Writer w(path);
  w.row({"variable", "m", "u", "g"});
  for (size_t l = 0; l < params.vars(); ++l)
    w.row({variable_names[l], csv::format_double(params.m[l]), csv::format_double(params.u[l]),
           csv::format_double(params.g[l])});
  w.close();
}

MUGParams read_mug_csv(const std::string& path) {
  auto table = csv::read_file(path);
  if (table.header != std::vector<std::string>{"variable", "m", "u", "g"})
    throw DataError("unexpected header in " + path);
  MUGParams p;
  for (const auto& row : table.rows) {
    if (row.size() != 4) throw DataError("ragged row in " + path);
    p.m.push_back(csv::parse_double(row[1], path));
    p.u.push_back(csv::parse_double(row[2], path));
    p.g.push_back(csv::parse_double(row[3], path));
  }
  p.validate();
  return p;
}

}  // namespace macsim
