#pragma once

#include "macsim/experiments.hpp"
#include "macsim/synthdata.hpp"

namespace macsim {

// Everything a run needs, resolvable from (defaults <- config file <- env
// <- flags), later sources winning. The file is JSON with sections data /
// schema / errors / link / chain / sweep plus top-level seed and workers;
// unknown keys are rejected by name so typos fail loudly.
struct RunConfig {
  // data
  size_t n_y = 400;
  size_t n_x = 59;
  Schema schema;
  ErrorConfig errors;

  // link
  double cutoff = 0.0;
  size_t cell_budget = kDefaultCellBudget;

  // chain (diagnose subcommand)
  ChainConfig chain;

  // sweep
  SweepConfig sweep;

  uint64_t seed = 1;
  unsigned workers = 0;  // 0 = machine default

  void validate() const;
};

// Desk-scale defaults: one block of 59 X vs 400 Y records, six linking
// variables of mixed cardinality (one with a 75%-dominant head code), 2%
// error rate with half the errors becoming missing values, 1000 simulations.
RunConfig default_config();

RunConfig load_config(const std::string& path);

// Env overrides for the knobs that mirror CLI flags: MACSIM_SEED,
// MACSIM_WORKERS, MACSIM_CUTOFF. Flags are applied after this by the CLI, so
// precedence is flag > env > config file > default.
void apply_env_overrides(RunConfig& cfg);

// Resolved snapshot for manifests and companion metadata.
std::string config_to_json(const RunConfig& cfg);

}  // namespace macsim
