#pragma once

#include "macsim/csv.hpp"
#include "macsim/linkage.hpp"

namespace macsim {

struct ConcordanceCounts {
  int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  int64_t total() const { return tp + fp + fn + tn; }
  ConcordanceCounts& operator+=(const ConcordanceCounts& o);
};

// Classify one block's link set against the true column mapping. The
// evaluated universe is the block's full cross product (rows x cols);
// cross-block pairs are structural non-links and are not counted.
ConcordanceCounts concordance(const LinkSet& links, const std::vector<int32_t>& matched_col,
                              int64_t n_pairs_evaluated);

// Ratios with an empty denominator are reported as 0 with the matching
// *_defined flag cleared (an empty link set has FDR 0 by convention, not NaN).
// accuracy is tp/(tp+fn): the share of true matches recovered, whose
// denominator is fixed by the data rather than by the linker's output.
struct MetricReport {
  double sensitivity = 0, specificity = 0, fdr = 0, fnr = 0, fpr = 0, accuracy = 0;
  bool sensitivity_defined = true, specificity_defined = true, fdr_defined = true,
       fnr_defined = true, fpr_defined = true, accuracy_defined = true;

  double sensitivity_pct() const { return 100.0 * sensitivity; }
  double specificity_pct() const { return 100.0 * specificity; }
};

MetricReport metric_report(const ConcordanceCounts& c);

// Per X-record: fraction of simulations whose assigned partner (possibly
// "unlinked") is identical to the observed one. A record unlinked in both is
// a correct reproduction.
struct PerRecordAccuracy {
  std::vector<double> fraction;  // one per X row of the block
  uint64_t n_sims = 0;

  double mean() const;
};

// Streaming form so a long simulation never has to keep all link sets alive.
class RelinkAccumulator {
 public:
  explicit RelinkAccumulator(const LinkSet& observed);
  void add(const LinkSet& simulated);
  PerRecordAccuracy finish() const;

 private:
  std::vector<int32_t> observed_partner_;
  std::vector<uint64_t> agree_;
  uint64_t n_sims_ = 0;
};

PerRecordAccuracy per_record_accuracy(const LinkSet& observed,
                                      const std::vector<LinkSet>& simulated);

// metrics csv: rows of (metric, value) — the six ratios, the two percentage
// forms, the raw counts, and 0/1 rows for any cleared *_defined flag.
void write_metrics_csv(const std::string& path, const ConcordanceCounts& counts,
                       const MetricReport& report);

// per-record csv: x_recid, accuracy, n_sims.
void write_per_record_csv(const std::string& path, const std::vector<int64_t>& x_recids,
                          const PerRecordAccuracy& acc);

}  // namespace macsim
