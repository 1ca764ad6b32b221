#pragma once

#include <functional>

#include "macsim/agreement.hpp"
#include "macsim/csv.hpp"
#include "macsim/rng.hpp"

namespace macsim {

// Elementary-update probabilities for one linking variable. p1/p2 drive the
// matched-pair cell (1->-1 / -1->1); q1/q2/q3 drive -1->1 flips of non-match
// cells in the three cases of the update rule. q3 is 1 by construction.
struct TransitionParams {
  double p1 = 0, p2 = 0, q1 = 0, q2 = 0, q3 = 1;
};

using TransitionTable = std::vector<TransitionParams>;

// Two regimes split at u = (1-g)/2:
//   u <= (1-g)/2:  p1 = (1-m-g)/m,                     q1 = q2 = u/(1-u-g)
//   u >  (1-g)/2:  p1 = (1-m-g)(1-u-g)/(m(3u+g-1)),    q1 = q2 = 1
// and in both: p2 = p1*m/(1-m-g), q3 = 1. Every output must land in [0,1]
// (up to round-off, which is snapped); anything else means the inputs cannot
// be maintained by this kernel and is a hard error.
TransitionParams transition_params(double m, double u, double g);
TransitionTable transition_table(const MUGParams& params);

// One chain owns a private copy of the matrix plus its RNG stream; it is not
// shareable across threads mid-run. Rows whose true match is outside the
// block (matched_col == kNoMatch) are frozen: never selected, never updated.
//
// One elementary step, in draw order:
//   1. i uniform over non-frozen rows, then l uniform over variables.
//   2. Matched cell A(i, l, matched_col[i]): if 0, the step is a no-op
//      (no transition is defined from missing). If 1, flip to -1 with
//      probability p1; if -1, flip to 1 with probability p2. One variate is
//      consumed for this decision whenever the cell is non-missing.
//   3. Non-match cells j != matched_col in ascending j, same (i, l) slice:
//      - matched flipped 1->-1:  cells at 1 forced to -1 (no draw); cells at
//        -1 flip to 1 with probability q1 (one draw each)
//      - matched flipped -1->1:  forced 1->-1; -1 flips with q2
//      - matched stayed -1:      -1 flips with q3; cells at 1 untouched
//      - matched stayed 1:       no action
//      Missing cells are never examined and consume no draws.
// step_count advances once per call regardless of outcome.
class ChainState {
 public:
  ChainState(const AgreementMatrix& start, TransitionTable params, uint64_t seed);

  void step();
  void run(uint64_t n_steps);

  // One expected visit per live matched cell: #non-frozen rows x #variables.
  uint64_t default_sweep_length() const { return eligible_rows_.size() * vars_; }

  const AgreementMatrix& matrix() const { return mat_; }
  uint64_t step_count() const { return steps_; }
  size_t eligible_rows() const { return eligible_rows_.size(); }

  // Empirical agreement rates over the current matrix, maintained
  // incrementally; missing cells stay in the denominators, mirroring how
  // m/u are estimated from data.
  double matched_agree_rate(size_t var) const;
  double nonmatched_agree_rate(size_t var) const;
  int64_t matched_agree_count(size_t var) const { return matched_agree_[var]; }
  int64_t nonmatched_agree_count(size_t var) const { return nonmatched_agree_[var]; }

 private:
  AgreementMatrix mat_;
  TransitionTable params_;
  Engine eng_;
  std::vector<uint32_t> eligible_rows_;
  std::vector<int64_t> matched_agree_, nonmatched_agree_;
  size_t cols_ = 0, vars_ = 0;
  uint64_t steps_ = 0;
};

struct ChainConfig {
  uint64_t n_samples = 1;
  uint64_t sweep_length = 0;    // 0 -> ChainState::default_sweep_length()
  uint64_t burn_in_sweeps = 0;  // none by default: the start matrix already
                                // carries the target marginals
};

// Evolves one chain from `initial`, invoking on_sample(sample_index, state)
// after each retained sweep; n_samples sweeps are retained after burn-in.
// The callback sees the live state and must copy what it keeps.
void sample_chain(const AgreementMatrix& initial, const TransitionTable& params,
                  const ChainConfig& cfg, uint64_t seed,
                  const std::function<void(uint64_t, const ChainState&)>& on_sample);

// Stationarity monitoring: one row per (snapshot, variable) with the
// empirical matched/non-matched agreement rates at that snapshot.
class DiagnosticsCsvWriter {
 public:
  explicit DiagnosticsCsvWriter(const std::string& path);
  void sample(uint64_t sample_index, const ChainState& state);
  void close();

 private:
  csv::Writer writer_;
};

// Snapshot persistence: agreement triples with a leading snapshot index.
void append_snapshot_csv(csv::Writer& writer, uint64_t sample_index,
                         const AgreementMatrix& matrix);
csv::Writer make_snapshot_writer(const std::string& path);

}  // namespace macsim
