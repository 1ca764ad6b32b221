#pragma once

#include "macsim/agreement.hpp"
#include "macsim/csv.hpp"

namespace macsim {

// Per-variable log-likelihood-ratio weights (natural log). Missing always
// contributes 0, so it drops out of the composite sum.
struct WeightTable {
  std::vector<double> agree;     // log(m/u)
  std::vector<double> disagree;  // log((1-m-g)/(1-u-g))

  size_t vars() const { return agree.size(); }
  double at(size_t var, Cell cell) const {
    return cell == 0 ? 0.0 : (cell == 1 ? agree[var] : disagree[var]);
  }
};

WeightTable weight_table(const MUGParams& params);

// Composite weights for one block, rows x cols.
struct WeightMatrix {
  size_t rows = 0, cols = 0;
  std::vector<double> w;  // row-major

  double at(size_t i, size_t j) const { return w[i * cols + j]; }
};

WeightMatrix composite_weights(const AgreementMatrix& matrix, const WeightTable& table);

struct Link {
  int32_t x = 0, y = 0;  // block-local indices
  double weight = 0.0;
};

// One-to-one partial assignment; x_partner/y_partner give kNoMatch for
// unlinked records.
struct LinkSet {
  double cutoff = 0.0;
  std::vector<Link> links;              // in greedy acceptance order
  std::vector<int32_t> x_partner;       // size rows
  std::vector<int32_t> y_partner;       // size cols
};

// Pairs sorted once by (weight desc, i asc, j asc); linking at a cutoff walks
// the prefix with weight > cutoff and greedily accepts pairs whose records are
// both free. Sorting is the expensive part, so sweeps over many cutoffs reuse
// one ranking.
class PairRanking {
 public:
  explicit PairRanking(const WeightMatrix& weights);
  LinkSet link(double cutoff) const;
  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  double max_weight() const;  // -inf when there are no pairs

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<uint32_t> order_;  // pair index = i * cols + j
  std::vector<double> w_;
};

LinkSet greedy_link(const WeightMatrix& weights, double cutoff);

// links csv: block_id,x_recid,y_recid,weight (one file across blocks).
class LinkCsvWriter {
 public:
  explicit LinkCsvWriter(const std::string& path);
  void block(const AgreementMatrix& matrix, const FilePair& pair, const LinkSet& links);
  void close();

 private:
  csv::Writer writer_;
};

}  // namespace macsim
