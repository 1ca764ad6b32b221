#include "macsim/metrics.hpp"

#include "macsim/error.hpp"

namespace macsim {

ConcordanceCounts& ConcordanceCounts::operator+=(const ConcordanceCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConcordanceCounts concordance(const LinkSet& links, const std::vector<int32_t>& matched_col,
                              int64_t n_pairs_evaluated) {
  if (links.x_partner.size() != matched_col.size())
    throw DataError("concordance: link set covers " + std::to_string(links.x_partner.size()) +
                    " X records, truth covers " + std::to_string(matched_col.size()));
  ConcordanceCounts c;
  for (size_t i = 0; i < matched_col.size(); ++i) {
    const int32_t linked = links.x_partner[i];
    const int32_t truth = matched_col[i];
    if (linked != kNoMatch) {
      if (linked == truth)
        ++c.tp;
      else
        ++c.fp;
    }
    if (truth != kNoMatch && linked != truth) ++c.fn;
  }
  c.tn = n_pairs_evaluated - c.tp - c.fp - c.fn;
  if (c.tn < 0)
    throw DataError("concordance: pair universe " + std::to_string(n_pairs_evaluated) +
                    " smaller than classified counts");
  return c;
}

namespace {

double ratio(int64_t num, int64_t den, bool& defined) {
  if (den == 0) {
    defined = false;
    return 0.0;
  }
  defined = true;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricReport metric_report(const ConcordanceCounts& c) {
  MetricReport r;
  r.sensitivity = ratio(c.tp, c.tp + c.fn, r.sensitivity_defined);
  r.specificity = ratio(c.tn, c.tn + c.fp, r.specificity_defined);
  r.fdr = ratio(c.fp, c.tp + c.fp, r.fdr_defined);
  r.fnr = ratio(c.fn, c.tp + c.fn, r.fnr_defined);
  r.fpr = ratio(c.fp, c.fp + c.tn, r.fpr_defined);
  r.accuracy = ratio(c.tp, c.tp + c.fn, r.accuracy_defined);
  return r;
}

double PerRecordAccuracy::mean() const {
  if (fraction.empty()) return 0.0;
  double sum = 0.0;
  for (double f : fraction) sum += f;
  return sum / static_cast<double>(fraction.size());
}

RelinkAccumulator::RelinkAccumulator(const LinkSet& observed)
    : observed_partner_(observed.x_partner), agree_(observed.x_partner.size(), 0) {}

void RelinkAccumulator::add(const LinkSet& simulated) {
  if (simulated.x_partner.size() != observed_partner_.size())
    throw DataError("RelinkAccumulator: simulated link set covers " +
                    std::to_string(simulated.x_partner.size()) + " X records, observed covers " +
                    std::to_string(observed_partner_.size()));
  for (size_t i = 0; i < observed_partner_.size(); ++i)
    if (simulated.x_partner[i] == observed_partner_[i]) ++agree_[i];
  ++n_sims_;
}

PerRecordAccuracy RelinkAccumulator::finish() const {
  PerRecordAccuracy acc;
  acc.n_sims = n_sims_;
  acc.fraction.resize(agree_.size());
  for (size_t i = 0; i < agree_.size(); ++i)
    acc.fraction[i] =
        n_sims_ == 0 ? 0.0 : static_cast<double>(agree_[i]) / static_cast<double>(n_sims_);
  return acc;
}

PerRecordAccuracy per_record_accuracy(const LinkSet& observed,
                                      const std::vector<LinkSet>& simulated) {
  RelinkAccumulator acc(observed);
  for (const LinkSet& s : simulated) acc.add(s);
  return acc.finish();
}

void write_metrics_csv(const std::string& path, const ConcordanceCounts& counts,
                       const MetricReport& report) {
  csv::Writer w(path);
  w.row({"metric", "value"});
  w.row({"tp", csv::format_int(counts.tp)});
  w.row({"fp", csv::format_int(counts.fp)});
  w.row({"fn", csv::format_int(counts.fn)});
  w.row({"tn", csv::format_int(counts.tn)});
  w.row({"sensitivity", csv::format_double(report.sensitivity)});
  w.row({"specificity", csv::format_double(report.specificity)});
  w.row({"sensitivity_pct", csv::format_double(report.sensitivity_pct())});
  w.row({"specificity_pct", csv::format_double(report.specificity_pct())});
  w.row({"fdr", csv::format_double(report.fdr)});
  w.row({"fnr", csv::format_double(report.fnr)});
  w.row({"fpr", csv::format_double(report.fpr)});
  w.row({"accuracy", csv::format_double(report.accuracy)});
  auto flag = [&](const char* name, bool defined) {
    if (!defined) w.row({name, "0"});
  };
  flag("sensitivity_defined", report.sensitivity_defined);
  flag("specificity_defined", report.specificity_defined);
  flag("fdr_defined", report.fdr_defined);
  flag("fnr_defined", report.fnr_defined);
  flag("fpr_defined", report.fpr_defined);
  flag("accuracy_defined", report.accuracy_defined);
  w.close();
}

void write_per_record_csv(const std::string& path, const std::vector<int64_t>& x_recids,
                          const PerRecordAccuracy& acc) {
  if (x_recids.size() != acc.fraction.size())
    throw DataError("write_per_record_csv: " + std::to_string(x_recids.size()) +
                    " recids for " + std::to_string(acc.fraction.size()) + " accuracy rows");
  csv::Writer w(path);
  w.row({"x_recid", "accuracy", "n_sims"});
  for (size_t i = 0; i < x_recids.size(); ++i)
    w.row({csv::format_int(x_recids[i]), csv::format_double(acc.fraction[i]),
           csv::format_int(static_cast<long long>(acc.n_sims))});
  w.close();
}

}  // namespace macsim
