#include "macsim/synthdata.hpp"

namespace macsim {

void ErrorConfig::validate(const Schema& schema) const {
  if (rate.size() != schema.variables.size())
    throw ConfigError("error rates: expected " + std::to_string(schema.variables.size()) +
                      " entries, got " + std::to_string(rate.size()));
  for (size_t v = 0; v < rate.size(); ++v)
    if (!(rate[v] >= 0.0 && rate[v] <= 1.0))
      throw ConfigError("error rate for '" + schema.variables[v].name + "' outside [0,1]");
  if (!(missing_fraction >= 0.0 && missing_fraction <= 1.0))
    throw ConfigError("missing_fraction outside [0,1]");
}

FilePair generate_population(size_t n_y, size_t n_x, const Schema& schema, uint64_t seed) {
  schema.validate();
  if (n_y == 0 || n_x == 0) throw ConfigError("file sizes must be positive");
  if (n_x > n_y) throw ConfigError("n_x exceeds n_y");

  Engine eng = make_engine(seed, "generate", 0);
  FilePair pair;
  pair.file_y.reserve(n_y);
  for (size_t j = 0; j < n_y; ++j) {
    Record r;
    r.recid = static_cast<int64_t>(j) + 1;
    r.values.reserve(schema.variables.size());
    for (const auto& var : schema.variables) r.values.push_back(var.draw(eng));
    pair.file_y.push_back(std::move(r));
  }
  pair.file_x.assign(pair.file_y.begin(), pair.file_y.begin() + static_cast<long>(n_x));
  pair.truth.resize(n_x);
  for (size_t i = 0; i < n_x; ++i) pair.truth[i] = static_cast<int64_t>(i);
  return pair;
}

FilePair inject_errors(const FilePair& pair, const Schema& schema, const ErrorConfig& cfg) {
  schema.validate();
  cfg.validate(schema);
  const size_t blocking = schema.blocking_index();
  const size_t n_y = pair.file_y.size();

  FilePair out = pair;
  Engine eng = make_engine(cfg.seed, "errors", 0);
  for (auto& record : out.file_x) {
    for (size_t v = 0; v < schema.variables.size(); ++v) {
      if (v == blocking && !cfg.corrupt_blocking) continue;
      if (!chance(eng, cfg.rate[v])) continue;
      if (chance(eng, cfg.missing_fraction)) {
        record.values[v] = kMissing;
      } else {
        size_t donor = uniform_below(eng, n_y);
        record.values[v] = pair.file_y[donor].values[v];
      }
    }
  }
  return out;
}

}  // namespace macsim
