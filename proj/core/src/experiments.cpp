#include "macsim/experiments.hpp"

#include <algorithm>

#include "macsim/error.hpp"
#include "macsim/parallel.hpp"

namespace macsim {

std::vector<size_t> default_block_grid() { return {6, 12, 18, 24, 30, 36, 42, 48, 54, 59}; }

std::vector<double> default_cutoff_grid() {
  std::vector<double> grid;
  for (int c = -15; c <= 20; ++c) grid.push_back(static_cast<double>(c));
  return grid;
}

void SweepConfig::validate() const {
  if (n_simulations < 1) throw ConfigError("sweep: n_simulations must be at least 1");
  if (sweeps_per_sim < 1) throw ConfigError("sweep: sweeps_per_sim must be at least 1");
  auto check_increasing = [](const auto& grid, const char* name) {
    if (grid.empty()) throw ConfigError(std::string("sweep: ") + name + " grid is empty");
    for (size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw ConfigError(std::string("sweep: ") + name + " grid must be strictly increasing");
  };
  if (mode == Mode::kBlockSize)
    check_increasing(block_grid, "block-size");
  else
    check_increasing(cutoff_grid, "cutoff");
}

namespace {

// First k X rows of a block against all of its Y columns.
AgreementMatrix head_rows(const AgreementMatrix& block, size_t k) {
  AgreementMatrix sub;
  sub.block_id = block.block_id;
  sub.x_ids.assign(block.x_ids.begin(), block.x_ids.begin() + static_cast<ptrdiff_t>(k));
  sub.y_ids = block.y_ids;
  sub.matched_col.assign(block.matched_col.begin(),
                         block.matched_col.begin() + static_cast<ptrdiff_t>(k));
  sub.cells = TernaryArray(k, block.cols(), block.vars());
  const size_t n = sub.cells.size();  // prefix of the parent layout
  for (size_t c = 0; c < n; ++c) sub.cells.set_linear(c, block.cells.get_linear(c));
  return sub;
}

struct SimMetrics {
  double accuracy = 0, fdr = 0, fnr = 0, sensitivity = 0, specificity = 0;
};

SimMetrics against_truth(const LinkSet& links, const std::vector<int32_t>& matched_col,
                         int64_t universe, ConcordanceCounts& counts_out) {
  const ConcordanceCounts counts = concordance(links, matched_col, universe);
  const MetricReport report = metric_report(counts);
  counts_out += counts;
  return {report.accuracy, report.fdr, report.fnr, report.sensitivity, report.specificity};
}

std::vector<uint8_t> partner_agreement(const LinkSet& observed, const LinkSet& simulated) {
  std::vector<uint8_t> agree(observed.x_partner.size());
  for (size_t r = 0; r < agree.size(); ++r)
    agree[r] = simulated.x_partner[r] == observed.x_partner[r] ? 1 : 0;
  return agree;
}

struct ChainSnapshot {
  AgreementMatrix matrix;
  std::vector<double> matched_rate, nonmatched_rate;
};

// One replicate chain evolved from `start` for burn-in plus the configured
// number of sweeps; the final state is the simulated snapshot.
ChainSnapshot simulate_snapshot(const AgreementMatrix& start, const TransitionTable& table,
                                const SweepConfig& cfg, uint64_t seed) {
  ChainState chain(start, table, seed);
  chain.run((cfg.burn_in_sweeps + cfg.sweeps_per_sim) * chain.default_sweep_length());
  ChainSnapshot snap;
  snap.matched_rate.resize(start.vars());
  snap.nonmatched_rate.resize(start.vars());
  for (size_t l = 0; l < start.vars(); ++l) {
    snap.matched_rate[l] = chain.matched_agree_rate(l);
    snap.nonmatched_rate[l] = chain.nonmatched_agree_rate(l);
  }
  snap.matrix = chain.matrix();
  return snap;
}

}  // namespace

SweepResult run_block_sweep(const AgreementMatrix& block, const MUGParams& params,
                            const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SweepConfig::Mode::kBlockSize)
    throw ConfigError("run_block_sweep: config mode is not block-size");
  const std::vector<size_t>& grid = cfg.block_grid;
  if (grid.back() > block.rows())
    throw ConfigError("run_block_sweep: grid size " + std::to_string(grid.back()) +
                      " exceeds the " + std::to_string(block.rows()) + " X records available");

  const WeightTable table = weight_table(params);
  const TransitionTable ttable = transition_table(params);
  const size_t n_grid = grid.size();
  const uint64_t n_sims = cfg.n_simulations;

  std::vector<AgreementMatrix> subs;
  std::vector<LinkSet> observed;
  subs.reserve(n_grid);
  observed.reserve(n_grid);
  for (size_t k : grid) {
    subs.push_back(head_rows(block, k));
    observed.push_back(greedy_link(composite_weights(subs.back(), table), cfg.base_cutoff));
  }

  struct Slot {
    SimMetrics metrics;
    ConcordanceCounts counts;
    std::vector<uint8_t> agree;
    std::vector<double> matched_rate, nonmatched_rate;
  };
  std::vector<Slot> slots(n_grid * n_sims);

  parallel_for(slots.size(), cfg.workers, [&](size_t item) {
    const size_t g = item / n_sims;
    const AgreementMatrix& sub = subs[g];
    ChainSnapshot snap =
        simulate_snapshot(sub, ttable, cfg, derive_seed(cfg.seed, "block_sim", item));
    const LinkSet links = greedy_link(composite_weights(snap.matrix, table), cfg.base_cutoff);
    Slot& slot = slots[item];
    slot.metrics = against_truth(links, sub.matched_col,
                                 static_cast<int64_t>(sub.rows() * sub.cols()), slot.counts);
    slot.agree = partner_agreement(observed[g], links);
    slot.matched_rate = std::move(snap.matched_rate);
    slot.nonmatched_rate = std::move(snap.nonmatched_rate);
  });

  SweepResult result;
  result.per_record_cutoff = cfg.base_cutoff;
  result.per_record_rows = grid.back();
  for (size_t g = 0; g < n_grid; ++g) {
    const size_t k = grid[g];
    SimMetrics sums;
    ConcordanceCounts pooled;
    uint64_t agree_total = 0;
    std::vector<uint64_t> record_agree(k, 0);
    for (uint64_t s = 0; s < n_sims; ++s) {
      const Slot& slot = slots[g * n_sims + s];
      sums.accuracy += slot.metrics.accuracy;
      sums.fdr += slot.metrics.fdr;
      sums.fnr += slot.metrics.fnr;
      sums.sensitivity += slot.metrics.sensitivity;
      sums.specificity += slot.metrics.specificity;
      pooled += slot.counts;
      for (size_t r = 0; r < k; ++r) {
        agree_total += slot.agree[r];
        record_agree[r] += slot.agree[r];
      }
      for (size_t l = 0; l < slot.matched_rate.size(); ++l)
        result.diagnostics.push_back({static_cast<double>(k), s, static_cast<uint32_t>(l),
                                      slot.matched_rate[l], slot.nonmatched_rate[l]});
    }
    const auto denom = static_cast<double>(n_sims);
    const MetricReport pooled_report = metric_report(pooled);
    SweepRow row;
    row.sweep_value = static_cast<double>(k);
    row.accuracy = static_cast<double>(agree_total) / (static_cast<double>(k) * denom);
    row.fdr = sums.fdr / denom;
    row.fnr = sums.fnr / denom;
    row.sensitivity = sums.sensitivity / denom;
    row.specificity = sums.specificity / denom;
    row.pooled_fdr = pooled_report.fdr;
    row.pooled_fnr = pooled_report.fnr;
    row.n_sims = n_sims;
    result.rows.push_back(row);

    if (g + 1 == n_grid) {
      result.per_record.n_sims = n_sims;
      result.per_record.fraction.resize(k);
      for (size_t r = 0; r < k; ++r)
        result.per_record.fraction[r] = static_cast<double>(record_agree[r]) / denom;
    }
  }
  return result;
}

SweepResult run_cutoff_sweep(const AgreementMatrix& block, const MUGParams& params,
                             const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SweepConfig::Mode::kCutoff)
    throw ConfigError("run_cutoff_sweep: config mode is not cutoff");
  const std::vector<double>& grid = cfg.cutoff_grid;
  const size_t n_grid = grid.size();
  const uint64_t n_sims = cfg.n_simulations;
  const auto universe = static_cast<int64_t>(block.rows() * block.cols());

  const WeightTable table = weight_table(params);
  const TransitionTable ttable = transition_table(params);

  const PairRanking observed_ranking(composite_weights(block, table));
  std::vector<LinkSet> observed;
  observed.reserve(n_grid);
  for (double c : grid) observed.push_back(observed_ranking.link(c));
  const LinkSet observed_base = observed_ranking.link(cfg.base_cutoff);

  struct Slot {
    std::vector<SimMetrics> metrics;        // per grid cutoff
    std::vector<ConcordanceCounts> counts;  // per grid cutoff
    std::vector<uint8_t> agree;             // at the base cutoff
    std::vector<double> matched_rate, nonmatched_rate;
  };
  std::vector<Slot> slots(n_sims);

  parallel_for(n_sims, cfg.workers, [&](size_t s) {
    ChainSnapshot snap =
        simulate_snapshot(block, ttable, cfg, derive_seed(cfg.seed, "cutoff_sim", s));
    const PairRanking ranking(composite_weights(snap.matrix, table));
    Slot& slot = slots[s];
    slot.metrics.resize(n_grid);
    slot.counts.resize(n_grid);
    for (size_t ci = 0; ci < n_grid; ++ci) {
      const LinkSet links = ranking.link(grid[ci]);
      slot.metrics[ci] = against_truth(links, block.matched_col, universe, slot.counts[ci]);
      // Per-record agreement compares links at the same cutoff on both sides.
      if (grid[ci] == cfg.base_cutoff) slot.agree = partner_agreement(observed[ci], links);
    }
    if (slot.agree.empty())
      slot.agree = partner_agreement(observed_base, ranking.link(cfg.base_cutoff));
    slot.matched_rate = std::move(snap.matched_rate);
    slot.nonmatched_rate = std::move(snap.nonmatched_rate);
  });

  SweepResult result;
  result.per_record_cutoff = cfg.base_cutoff;
  result.per_record_rows = block.rows();
  result.rows.resize(n_grid);
  std::vector<uint64_t> record_agree(block.rows(), 0);
  std::vector<ConcordanceCounts> pooled(n_grid);
  for (uint64_t s = 0; s < n_sims; ++s) {
    const Slot& slot = slots[s];
    for (size_t ci = 0; ci < n_grid; ++ci) {
      SweepRow& row = result.rows[ci];
      row.accuracy += slot.metrics[ci].accuracy;
      row.fdr += slot.metrics[ci].fdr;
      row.fnr += slot.metrics[ci].fnr;
      row.sensitivity += slot.metrics[ci].sensitivity;
      row.specificity += slot.metrics[ci].specificity;
      pooled[ci] += slot.counts[ci];
    }
    for (size_t r = 0; r < record_agree.size(); ++r) record_agree[r] += slot.agree[r];
    for (size_t l = 0; l < slot.matched_rate.size(); ++l)
      result.diagnostics.push_back(
          {0.0, s, static_cast<uint32_t>(l), slot.matched_rate[l], slot.nonmatched_rate[l]});
  }
  const auto denom = static_cast<double>(n_sims);
  for (size_t ci = 0; ci < n_grid; ++ci) {
    SweepRow& row = result.rows[ci];
    row.sweep_value = grid[ci];
    row.accuracy /= denom;
    row.fdr /= denom;
    row.fnr /= denom;
    row.sensitivity /= denom;
    row.specificity /= denom;
    const MetricReport pooled_report = metric_report(pooled[ci]);
    row.pooled_fdr = pooled_report.fdr;
    row.pooled_fnr = pooled_report.fnr;
    row.n_sims = n_sims;
  }
  result.per_record.n_sims = n_sims;
  result.per_record.fraction.resize(record_agree.size());
  for (size_t r = 0; r < record_agree.size(); ++r)
    result.per_record.fraction[r] = static_cast<double>(record_agree[r]) / denom;
  return result;
}

CutoffChoice recommend_cutoff(const SweepResult& result, const CutoffPolicy& policy) {
  if (result.rows.empty()) throw ConfigError("recommend_cutoff: empty sweep result");
  const SweepRow* best = nullptr;
  for (const SweepRow& row : result.rows) {
    if (row.fdr > policy.max_fdr || row.fnr > policy.max_fnr) continue;
    // >= prefers the later (larger) cutoff on accuracy ties.
    if (!best || row.accuracy >= best->accuracy) best = &row;
  }
  if (best) return {best->sweep_value, true};
  for (const SweepRow& row : result.rows)
    if (!best || row.accuracy >= best->accuracy) best = &row;
  return {best->sweep_value, false};
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  csv::Writer w(path);
  w.row({"sweep_value", "accuracy", "fdr", "fnr", "sensitivity", "specificity", "n_sims"});
  for (const SweepRow& row : result.rows)
    w.row({csv::format_double(row.sweep_value), csv::format_double(row.accuracy),
           csv::format_double(row.fdr), csv::format_double(row.fnr),
           csv::format_double(row.sensitivity), csv::format_double(row.specificity),
           csv::format_int(static_cast<long long>(row.n_sims))});
  w.close();
}

void write_sweep_pooled_csv(const std::string& path, const SweepResult& result) {
  csv::Writer w(path);
  w.row({"sweep_value", "pooled_fdr", "pooled_fnr", "n_sims"});
  for (const SweepRow& row : result.rows)
    w.row({csv::format_double(row.sweep_value), csv::format_double(row.pooled_fdr),
           csv::format_double(row.pooled_fnr),
           csv::format_int(static_cast<long long>(row.n_sims))});
  w.close();
}

void write_sweep_diagnostics_csv(const std::string& path, const SweepResult& result) {
  csv::Writer w(path);
  w.row({"sweep_value", "sim", "variable", "matched_agree_rate", "nonmatched_agree_rate"});
  for (const DiagnosticRow& row : result.diagnostics)
    w.row({csv::format_double(row.sweep_value), csv::format_int(static_cast<long long>(row.sim)),
           csv::format_int(row.variable), csv::format_double(row.matched_rate),
           csv::format_double(row.nonmatched_rate)});
  w.close();
}

}  // namespace macsim
