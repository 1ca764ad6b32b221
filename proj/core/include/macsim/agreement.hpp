#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "macsim/record.hpp"

namespace macsim {

using Cell = int8_t;  // 1 agree, -1 disagree, 0 missing

// Dense ternary array over (row, variable, column), 2 bits per cell. The
// column index varies fastest, so a (row, variable) slice is contiguous --
// that slice is the unit both the chain's row updates and the weight
// accumulation sweep over. unpack()/pack() are the plain int8 reference
// representation; behavioural equality with it is covered by tests.
class TernaryArray {
 public:
  TernaryArray() = default;
  TernaryArray(size_t rows, size_t cols, size_t vars);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t vars() const { return vars_; }
  size_t size() const { return rows_ * cols_ * vars_; }

  size_t index(size_t row, size_t var, size_t col) const {
    assert(row < rows_ && var < vars_ && col < cols_);
    return (row * vars_ + var) * cols_ + col;
  }

  Cell get(size_t row, size_t var, size_t col) const { return get_linear(index(row, var, col)); }
  void set(size_t row, size_t var, size_t col, Cell v) { set_linear(index(row, var, col), v); }

  Cell get_linear(size_t i) const {
    unsigned code = (words_[i >> 5] >> ((i & 31u) * 2)) & 3u;
    return kDecode[code];
  }

  void set_linear(size_t i, Cell v) {
    uint64_t& w = words_[i >> 5];
    unsigned shift = (i & 31u) * 2;
    w = (w & ~(uint64_t{3} << shift)) | (uint64_t{encode(v)} << shift);
  }

  std::vector<Cell> unpack() const;
  static TernaryArray pack(size_t rows, size_t cols, size_t vars,
                           const std::vector<Cell>& plain);

  bool operator==(const TernaryArray& other) const = default;

  static unsigned encode(Cell v) {
    assert(v == 0 || v == 1 || v == -1);
    return v == 0 ? 0u : (v == 1 ? 1u : 2u);
  }

 private:
  static constexpr Cell kDecode[4] = {0, 1, -1, 0};
  size_t rows_ = 0, cols_ = 0, vars_ = 0;
  std::vector<uint64_t> words_;
};

inline constexpr int32_t kNoMatch = -1;

// One block's comparison data: every X record in the block against every Y
// record in the block, over all linking variables.
struct AgreementMatrix {
  std::string block_id;
  std::vector<int32_t> x_ids;        // global indices into FilePair::file_x
  std::vector<int32_t> y_ids;        // global indices into FilePair::file_y
  TernaryArray cells;
  std::vector<int32_t> matched_col;  // block-local column of the true match, or kNoMatch

  size_t rows() const { return x_ids.size(); }
  size_t cols() const { return y_ids.size(); }
  size_t vars() const { return cells.vars(); }
  size_t matched_row_count() const;
};

struct MUGParams {
  std::vector<double> m, u, g;  // per linking variable

  size_t vars() const { return m.size(); }
  void validate() const;
};

inline constexpr double kMugClampEpsilon = 1e-4;

// Guard against an accidental unblocked dense build; rows*cols*vars per block.
inline constexpr size_t kDefaultCellBudget = 200'000'000;

// One matrix per blocking value present in both files, ordered by block id.
// Records with a missing blocking value are left out entirely: they cannot be
// assigned to a block and are structurally unlinkable here.
std::vector<AgreementMatrix> build_blocks(const FilePair& pair, const Schema& schema,
                                          size_t cell_budget = kDefaultCellBudget);

// Pooled counts for one block; summed across blocks by estimate_mug.
struct MugCounts {
  std::vector<int64_t> matched_agree, nonmatched_agree, missing;
  int64_t matched_pairs = 0;
  int64_t total_pairs = 0;

  MugCounts() = default;
  explicit MugCounts(size_t vars)
      : matched_agree(vars, 0), nonmatched_agree(vars, 0), missing(vars, 0) {}
  MugCounts& operator+=(const MugCounts& o);
};

MugCounts count_block(const AgreementMatrix& matrix);

// m = agree|matched, u = agree|non-matched, g = missing over all pairs.
// m and u are clamped into [eps, 1-g-eps] so downstream logs and ratio
// denominators stay finite.
MUGParams estimate_mug(const std::vector<AgreementMatrix>& blocks);
MUGParams mug_from_counts(const MugCounts& counts);

enum class SampleMode {
  kQuota,      // exact per-stratum cell counts (rounded), random placement
  kBernoulli,  // iid per-cell draws
};

// Synthetic matrix drawn from the given marginals with matched pairs on the
// diagonal; used by stationarity checks and `diagnose --synthetic`.
AgreementMatrix sample_matrix(size_t rows, size_t cols, const MUGParams& params,
                              uint64_t seed, SampleMode mode = SampleMode::kQuota);

// Debug persistence: rows of (i, j, l, cell), block-local indices.
void write_agreement_csv(const std::string& path, const AgreementMatrix& matrix);

void write_mug_csv(const std::string& path, const MUGParams& params,
                   const std::vector<std::string>& variable_names);
MUGParams read_mug_csv(const std::string& path);

}  // namespace macsim
