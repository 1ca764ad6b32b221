#include "macsim/chain.hpp"

#include <cmath>
#include <string>

#include "macsim/error.hpp"

namespace macsim {

namespace {

// Round-off slack when snapping computed probabilities onto [0,1]. Branch
// arithmetic like p1*m/(1-m-g) is algebraically 1 but can land an ulp above.
constexpr double kSnapTolerance = 1e-9;

double snap_unit(double v, const char* name, double m, double u, double g) {
  if (v >= 0.0 && v <= 1.0) return v;
  if (v > 1.0 && v <= 1.0 + kSnapTolerance) return 1.0;
  if (v < 0.0 && v >= -kSnapTolerance) return 0.0;
  throw DataError("transition_params: " + std::string(name) + " = " + std::to_string(v) +
                  " outside [0,1] for m=" + std::to_string(m) + " u=" + std::to_string(u) +
                  " g=" + std::to_string(g) + "; marginals not maintainable");
}

}  // namespace

TransitionParams transition_params(double m, double u, double g) {
  const double md = 1.0 - m - g;  // P(disagree | matched)
  const double ud = 1.0 - u - g;  // P(disagree | non-matched)
  TransitionParams tp;
  if (u <= 0.5 * (1.0 - g)) {
    tp.p1 = md / m;
    tp.q1 = tp.q2 = u / ud;
  } else {
    tp.p1 = md * ud / (m * (3.0 * u + g - 1.0));
    tp.q1 = tp.q2 = 1.0;
  }
  tp.p2 = tp.p1 * m / md;
  tp.q3 = 1.0;
  tp.p1 = snap_unit(tp.p1, "p1", m, u, g);
  tp.p2 = snap_unit(tp.p2, "p2", m, u, g);
  tp.q1 = snap_unit(tp.q1, "q1", m, u, g);
  tp.q2 = snap_unit(tp.q2, "q2", m, u, g);
  tp.q3 = snap_unit(tp.q3, "q3", m, u, g);
  return tp;
}

TransitionTable transition_table(const MUGParams& params) {
  params.validate();
  TransitionTable table(params.vars());
  for (size_t l = 0; l < params.vars(); ++l)
    table[l] = transition_params(params.m[l], params.u[l], params.g[l]);
  return table;
}

ChainState::ChainState(const AgreementMatrix& start, TransitionTable params, uint64_t seed)
    : mat_(start),
      params_(std::move(params)),
      eng_(make_engine(seed, "chain", 0)),
      cols_(start.cols()),
      vars_(start.vars()) {
  if (params_.size() != vars_)
    throw DataError("ChainState: " + std::to_string(params_.size()) + " transition rows for " +
                    std::to_string(vars_) + " variables");
  eligible_rows_.reserve(mat_.rows());
  for (size_t i = 0; i < mat_.rows(); ++i)
    if (mat_.matched_col[i] != kNoMatch) eligible_rows_.push_back(static_cast<uint32_t>(i));
  if (eligible_rows_.empty())
    throw DataError("ChainState: no rows with an in-block match; nothing to simulate");

  matched_agree_.assign(vars_, 0);
  nonmatched_agree_.assign(vars_, 0);
  for (size_t i = 0; i < mat_.rows(); ++i) {
    const int32_t mc = mat_.matched_col[i];
    for (size_t l = 0; l < vars_; ++l) {
      const size_t base = mat_.cells.index(i, l, 0);
      for (size_t j = 0; j < cols_; ++j) {
        if (mat_.cells.get_linear(base + j) != 1) continue;
        if (static_cast<int32_t>(j) == mc)
          ++matched_agree_[l];
        else
          ++nonmatched_agree_[l];
      }
    }
  }
}

void ChainState::step() {
  ++steps_;
  const uint32_t i = eligible_rows_[uniform_below(eng_, eligible_rows_.size())];
  const size_t l = uniform_below(eng_, vars_);
  const TransitionParams& tp = params_[l];
  const auto mc = static_cast<size_t>(mat_.matched_col[i]);
  const size_t base = mat_.cells.index(i, l, 0);

  const Cell matched = mat_.cells.get_linear(base + mc);
  if (matched == 0) return;  // no transition defined from missing

  double q;
  bool force_disagree;
  if (matched == 1) {
    if (!chance(eng_, tp.p1)) return;  // 1 stays 1: no non-match action
    mat_.cells.set_linear(base + mc, -1);
    --matched_agree_[l];
    q = tp.q1;
    force_disagree = true;
  } else if (chance(eng_, tp.p2)) {
    mat_.cells.set_linear(base + mc, 1);
    ++matched_agree_[l];
    q = tp.q2;
    force_disagree = true;
  } else {
    q = tp.q3;
    force_disagree = false;
  }

  for (size_t j = 0; j < cols_; ++j) {
    if (j == mc) continue;
    const Cell c = mat_.cells.get_linear(base + j);
    if (c == 1) {
      if (force_disagree) {
        mat_.cells.set_linear(base + j, -1);
        --nonmatched_agree_[l];
      }
    } else if (c == -1) {
      if (chance(eng_, q)) {
        mat_.cells.set_linear(base + j, 1);
        ++nonmatched_agree_[l];
      }
    }
  }
}

void ChainState::run(uint64_t n_steps) {
  for (uint64_t s = 0; s < n_steps; ++s) step();
}

double ChainState::matched_agree_rate(size_t var) const {
  return static_cast<double>(matched_agree_[var]) / static_cast<double>(eligible_rows_.size());
}

double ChainState::nonmatched_agree_rate(size_t var) const {
  const auto nonmatched =
      static_cast<double>(mat_.rows() * cols_ - eligible_rows_.size());
  return static_cast<double>(nonmatched_agree_[var]) / nonmatched;
}

void sample_chain(const AgreementMatrix& initial, const TransitionTable& params,
                  const ChainConfig& cfg, uint64_t seed,
                  const std::function<void(uint64_t, const ChainState&)>& on_sample) {
  if (cfg.n_samples < 1) throw ConfigError("sample_chain: n_samples must be at least 1");
  ChainState state(initial, params, seed);
  const uint64_t sweep =
      cfg.sweep_length > 0 ? cfg.sweep_length : state.default_sweep_length();
  if (sweep < 1) throw ConfigError("sample_chain: sweep_length must be at least 1");
  state.run(cfg.burn_in_sweeps * sweep);
  for (uint64_t s = 0; s < cfg.n_samples; ++s) {
    state.run(sweep);
    if (on_sample) on_sample(s, state);
  }
}

DiagnosticsCsvWriter::DiagnosticsCsvWriter(const std::string& path) : writer_(path) {
  writer_.row({"snapshot", "variable", "matched_agree_rate", "nonmatched_agree_rate"});
}

void DiagnosticsCsvWriter::sample(uint64_t sample_index, const ChainState& state) {
  for (size_t l = 0; l < state.matrix().vars(); ++l) {
    writer_.row({csv::format_int(static_cast<long long>(sample_index)),
                 csv::format_int(static_cast<long long>(l)),
                 csv::format_double(state.matched_agree_rate(l)),
                 csv::format_double(state.nonmatched_agree_rate(l))});
  }
}

void DiagnosticsCsvWriter::close() { writer_.close(); }

csv::Writer make_snapshot_writer(const std::string& path) {
  csv::Writer writer(path);
  writer.row({"snapshot", "i", "j", "l", "cell"});
  return writer;
}

void append_snapshot_csv(csv::Writer& writer, uint64_t sample_index,
                         const AgreementMatrix& matrix) {
  for (size_t i = 0; i < matrix.rows(); ++i)
    for (size_t j = 0; j < matrix.cols(); ++j)
      for (size_t l = 0; l < matrix.vars(); ++l)
        writer.row({csv::format_int(static_cast<long long>(sample_index)),
                    csv::format_int(static_cast<long long>(i)),
                    csv::format_int(static_cast<long long>(j)),
                    csv::format_int(static_cast<long long>(l)),
                    csv::format_int(matrix.cells.get(i, l, j))});
}

}  // namespace macsim
