#pragma once

#include "macsim/chain.hpp"
#include "macsim/metrics.hpp"

namespace macsim {

std::vector<size_t> default_block_grid();    // 6, 12, ..., 54, 59
std::vector<double> default_cutoff_grid();   // -15, -14, ..., +20

struct SweepConfig {
  enum class Mode { kBlockSize, kCutoff };

  Mode mode = Mode::kCutoff;
  uint64_t n_simulations = 1000;
  double base_cutoff = 0.0;          // linking threshold outside the cutoff grid
  std::vector<double> cutoff_grid;   // cutoff mode; strictly increasing
  std::vector<size_t> block_grid;    // block mode; strictly increasing
  uint64_t seed = 0;
  unsigned workers = 0;              // 0 -> machine default
  uint64_t sweeps_per_sim = 1;       // chain sweeps per simulated snapshot
  uint64_t burn_in_sweeps = 0;

  void validate() const;
};

struct SweepRow {
  double sweep_value = 0;  // block size or cutoff
  double accuracy = 0, fdr = 0, fnr = 0, sensitivity = 0, specificity = 0;
  // fdr/fnr above are per-simulation means (the primary form); the pooled
  // variants ratio the summed concordance counts instead.
  double pooled_fdr = 0, pooled_fnr = 0;
  uint64_t n_sims = 0;
};

// Chain marginals per simulated snapshot, for stationarity monitoring.
// sweep_value is the block size in block mode; cutoff mode shares one
// snapshot batch across the whole grid, so sweep_value is 0 there.
struct DiagnosticRow {
  double sweep_value = 0;
  uint64_t sim = 0;
  uint32_t variable = 0;
  double matched_rate = 0, nonmatched_rate = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // one per grid point, in grid order
  std::vector<DiagnosticRow> diagnostics;

  // Relink agreement against the observed links at per_record_cutoff; block
  // mode reports the largest grid size, cutoff mode the base cutoff. The
  // fractions align with the first per_record_rows X rows of the block.
  PerRecordAccuracy per_record;
  size_t per_record_rows = 0;
  double per_record_cutoff = 0;
};

// Both sweeps run against one reference block with externally estimated
// parameters (estimate once, globally — a 6-row sub-block is far too small
// to re-estimate from). Each simulation is an independent replicate chain
// evolved from the observed matrix under its own derived seed, which keeps
// results byte-identical for any worker count.

// For each grid size k: the first k X rows of the block against all of its
// Y columns, linked at base_cutoff, with mean per-record relink agreement
// as the accuracy column and truth-based metric means alongside.
SweepResult run_block_sweep(const AgreementMatrix& block, const MUGParams& params,
                            const SweepConfig& cfg);

// One snapshot batch, relinked at every grid cutoff. Observed links are
// recomputed per cutoff too, so all measures at a grid point refer to that
// cutoff. The accuracy column is the per-simulation mean of tp/(tp+fn)
// against truth (its denominator is fixed by the data, so it falls to 0
// once the cutoff passes the largest composite weight).
SweepResult run_cutoff_sweep(const AgreementMatrix& block, const MUGParams& params,
                             const SweepConfig& cfg);

struct CutoffPolicy {
  double max_fdr = 0.02;
  double max_fnr = 0.10;
};

struct CutoffChoice {
  double cutoff = 0;
  bool constraints_met = false;  // false: no grid point satisfied the policy
                                 // and the choice is best-effort on accuracy
};

// Highest-accuracy grid point subject to the policy bounds; ties toward the
// larger cutoff. Requires a cutoff-mode result.
CutoffChoice recommend_cutoff(const SweepResult& result, const CutoffPolicy& policy = {});

// sweep csv: sweep_value, accuracy, fdr, fnr, sensitivity, specificity, n_sims.
void write_sweep_csv(const std::string& path, const SweepResult& result);
// pooled companion: sweep_value, pooled_fdr, pooled_fnr, n_sims.
void write_sweep_pooled_csv(const std::string& path, const SweepResult& result);
// diagnostics csv: sweep_value, sim, variable, matched_agree_rate, nonmatched_agree_rate.
void write_sweep_diagnostics_csv(const std::string& path, const SweepResult& result);

}  // namespace macsim
