#include "macsim/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "macsim/error.hpp"

namespace macsim {

WeightTable weight_table(const MUGParams& params) {
  params.validate();
  WeightTable table;
  const size_t vars = params.m.size();
  table.agree.resize(vars);
  table.disagree.resize(vars);
  for (size_t l = 0; l < vars; ++l) {
    const double m = params.m[l], u = params.u[l], g = params.g[l];
    if (u <= 0.0 || 1.0 - u - g <= 0.0)
      throw DataError("weight_table: u and 1-u-g must be positive for variable " +
                      std::to_string(l));
    table.agree[l] = std::log(m / u);
    table.disagree[l] = std::log((1.0 - m - g) / (1.0 - u - g));
  }
  return table;
}

WeightMatrix composite_weights(const AgreementMatrix& matrix, const WeightTable& table) {
  if (table.vars() != matrix.vars())
    throw DataError("composite_weights: weight table has " + std::to_string(table.vars()) +
                    " variables, matrix has " + std::to_string(matrix.vars()));
  WeightMatrix out;
  out.rows = matrix.rows();
  out.cols = matrix.cols();
  out.w.assign(out.rows * out.cols, 0.0);
  // Cells are laid out with the column index fastest, so accumulate one
  // (row, var) slice at a time.
  for (size_t i = 0; i < out.rows; ++i) {
    double* row = out.w.data() + i * out.cols;
    for (size_t l = 0; l < matrix.vars(); ++l) {
      const double wa = table.agree[l], wd = table.disagree[l];
      const size_t base = matrix.cells.index(i, l, 0);
      for (size_t j = 0; j < out.cols; ++j) {
        const Cell c = matrix.cells.get_linear(base + j);
        if (c == 1)
          row[j] += wa;
        else if (c == -1)
          row[j] += wd;
      }
    }
  }
  return out;
}

PairRanking::PairRanking(const WeightMatrix& weights)
    : rows_(weights.rows), cols_(weights.cols), w_(weights.w) {
  if (rows_ * cols_ > std::numeric_limits<uint32_t>::max())
    throw DataError("PairRanking: block too large to rank");
  order_.resize(rows_ * cols_);
  for (uint32_t p = 0; p < order_.size(); ++p) order_[p] = p;
  // Ties broken by ascending (i, j); with row-major pair indices that is just
  // ascending pair index, which std::sort's strict weak ordering gives us by
  // comparing indices directly.
  std::sort(order_.begin(), order_.end(), [&](uint32_t a, uint32_t b) {
    if (w_[a] != w_[b]) return w_[a] > w_[b];
    return a < b;
  });
}

double PairRanking::max_weight() const {
  if (order_.empty()) return -std::numeric_limits<double>::infinity();
  return w_[order_.front()];
}

LinkSet PairRanking::link(double cutoff) const {
  LinkSet out;
  out.cutoff = cutoff;
  out.x_partner.assign(rows_, kNoMatch);
  out.y_partner.assign(cols_, kNoMatch);
  for (uint32_t p : order_) {
    const double w = w_[p];
    if (!(w > cutoff)) break;  // sorted descending, nothing further qualifies
    const int32_t i = static_cast<int32_t>(p / cols_);
    const int32_t j = static_cast<int32_t>(p % cols_);
    if (out.x_partner[i] != kNoMatch || out.y_partner[j] != kNoMatch) continue;
    out.x_partner[i] = j;
    out.y_partner[j] = i;
    out.links.push_back({i, j, w});
  }
  return out;
}

LinkSet greedy_link(const WeightMatrix& weights, double cutoff) {
  return PairRanking(weights).link(cutoff);
}

LinkCsvWriter::LinkCsvWriter(const std::string& path) : writer_(path) {
  writer_.row({"block_id", "x_recid", "y_recid", "weight"});
}

void LinkCsvWriter::block(const AgreementMatrix& matrix, const FilePair& pair,
                          const LinkSet& links) {
  for (const Link& link : links.links) {
    const int64_t x_recid = pair.file_x[matrix.x_ids[link.x]].recid;
    const int64_t y_recid = pair.file_y[matrix.y_ids[link.y]].recid;
    writer_.row({matrix.block_id, csv::format_int(x_recid), csv::format_int(y_recid),
                 csv::format_double(link.weight)});
  }
}

void LinkCsvWriter::close() { writer_.close(); }

}  // namespace macsim
