#pragma once

#include "macsim/record.hpp"

namespace macsim {

// Controlled corruption of file X. Each linking value is independently hit
// with its variable's probability; a hit is replaced by a value drawn
// uniformly from file Y's column (which may coincide with the original), or
// set to missing with `missing_fraction`. The blocking variable is left alone
// unless `corrupt_blocking` is set, so every X record's true match stays in
// its block by default.
struct ErrorConfig {
  std::vector<double> rate;   // per schema variable, aligned with Schema::variables
  double missing_fraction = 0.5;
  bool corrupt_blocking = false;
  uint64_t seed = 0;

  void validate(const Schema& schema) const;
};

// Draws n_y records independently per variable, then takes the first n_x as
// file X (prefix convention, truth = identity). recids are 1-based row
// numbers shared between the files.
FilePair generate_population(size_t n_y, size_t n_x, const Schema& schema, uint64_t seed);

FilePair inject_errors(const FilePair& pair, const Schema& schema, const ErrorConfig& cfg);

}  // namespace macsim
