#include "macsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "macsim/error.hpp"

namespace macsim {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("config: unknown key '" + item.key() + "' in " + section);
  }
}

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

uint64_t get_u64(const json& j, const std::string& where, const char* key, uint64_t fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || (v->is_number_integer() && v->get<int64_t>() < 0))
    throw ConfigError("config: " + where + "." + key + " must be a non-negative integer");
  return v->get<uint64_t>();
}

double get_num(const json& j, const std::string& where, const char* key, double fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number())
    throw ConfigError("config: " + where + "." + key + " must be a number");
  return v->get<double>();
}

bool get_bool(const json& j, const std::string& where, const char* key, bool fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError("config: " + where + "." + key + " must be a boolean");
  return v->get<bool>();
}

std::string get_str(const json& j, const std::string& where, const char* key,
                    const std::string& fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError("config: " + where + "." + key + " must be a string");
  return v->get<std::string>();
}

Schema parse_schema(const json& j) {
  check_keys(j, "schema", {"variables", "blocking_variable", "linking_variables"});
  const json* vars = find(j, "variables");
  if (!vars || !vars->is_array() || vars->empty())
    throw ConfigError("config: schema.variables must be a non-empty array");
  Schema schema;
  for (const json& vj : *vars) {
    if (!vj.is_object()) throw ConfigError("config: schema.variables entries must be objects");
    check_keys(vj, "schema.variables[]",
               {"name", "cardinality", "code_base", "head_prob", "head_code"});
    VariableSpec spec;
    spec.name = get_str(vj, "schema.variables[]", "name", "");
    if (spec.name.empty())
      throw ConfigError("config: schema.variables[].name is required");
    spec.cardinality = get_u64(vj, "schema." + spec.name, "cardinality", 2);
    const json* base = find(vj, "code_base");
    if (base) {
      if (!base->is_number_integer())
        throw ConfigError("config: schema." + spec.name + ".code_base must be an integer");
      spec.code_base = base->get<int64_t>();
    }
    spec.head_prob = get_num(vj, "schema." + spec.name, "head_prob", 0.0);
    spec.head_code = get_str(vj, "schema." + spec.name, "head_code", "");
    schema.variables.push_back(std::move(spec));
  }
  schema.blocking_variable = get_str(j, "schema", "blocking_variable", "");
  if (schema.blocking_variable.empty())
    throw ConfigError("config: schema.blocking_variable is required");
  const json* linking = find(j, "linking_variables");
  if (linking) {
    if (!linking->is_array())
      throw ConfigError("config: schema.linking_variables must be an array");
    for (const json& name : *linking) {
      if (!name.is_string())
        throw ConfigError("config: schema.linking_variables entries must be strings");
      schema.linking_variables.push_back(name.get<std::string>());
    }
  } else {
    for (const VariableSpec& spec : schema.variables)
      if (spec.name != schema.blocking_variable)
        schema.linking_variables.push_back(spec.name);
  }
  return schema;
}

std::vector<double> parse_error_rate(const json& v, size_t n_vars) {
  std::vector<double> rate;
  if (v.is_number()) {
    rate.assign(n_vars, v.get<double>());
  } else if (v.is_array()) {
    if (v.size() != n_vars)
      throw ConfigError("config: errors.rate has " + std::to_string(v.size()) +
                        " entries for " + std::to_string(n_vars) + " schema variables");
    for (const json& r : v) {
      if (!r.is_number()) throw ConfigError("config: errors.rate entries must be numbers");
      rate.push_back(r.get<double>());
    }
  } else {
    throw ConfigError("config: errors.rate must be a number or an array");
  }
  return rate;
}

std::vector<double> parse_double_grid(const json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(std::string("config: sweep.") + key + " must be an array");
  std::vector<double> grid;
  for (const json& g : v) {
    if (!g.is_number())
      throw ConfigError(std::string("config: sweep.") + key + " entries must be numbers");
    grid.push_back(g.get<double>());
  }
  return grid;
}

std::vector<size_t> parse_size_grid(const json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(std::string("config: sweep.") + key + " must be an array");
  std::vector<size_t> grid;
  for (const json& g : v) {
    if (!g.is_number_integer() || g.get<int64_t>() < 1)
      throw ConfigError(std::string("config: sweep.") + key + " entries must be positive integers");
    grid.push_back(g.get<size_t>());
  }
  return grid;
}

}  // namespace

void RunConfig::validate() const {
  schema.validate();
  errors.validate(schema);
  if (n_y == 0 || n_x == 0) throw ConfigError("config: data.n_y and data.n_x must be positive");
  if (n_x > n_y)
    throw ConfigError("config: data.n_x (" + std::to_string(n_x) +
                      ") cannot exceed data.n_y (" + std::to_string(n_y) + ")");
  if (cell_budget == 0) throw ConfigError("config: link.cell_budget must be positive");
  if (chain.n_samples < 1) throw ConfigError("config: chain.n_samples must be at least 1");
  sweep.validate();
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.schema.variables = {
      {"sa1", 1, 11201, 0.0, ""},    // blocking: one statistical area at desk scale
      {"mb", 200, 3001, 0.0, ""},    // address block
      {"bday", 31, 1, 0.0, ""},      // day of birth
      {"byear", 80, 1930, 0.0, ""},  // year of birth
      {"sex", 2, 1, 0.0, ""},
      {"eye", 5, 1, 0.0, ""},            // eye colour
      {"cob", 300, 2000, 0.75, "1101"},  // country of birth, one dominant code
  };
  cfg.schema.blocking_variable = "sa1";
  cfg.schema.linking_variables = {"mb", "bday", "byear", "sex", "eye", "cob"};
  cfg.errors.rate.assign(cfg.schema.variables.size(), 0.02);
  cfg.errors.missing_fraction = 0.5;
  cfg.sweep.cutoff_grid = default_cutoff_grid();
  cfg.sweep.block_grid = default_block_grid();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();

  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: " + path + ": top level must be an object");

  RunConfig cfg = default_config();
  check_keys(j, "top level", {"data", "schema", "errors", "link", "chain", "sweep", "seed",
                              "workers"});

  if (const json* schema = find(j, "schema")) cfg.schema = parse_schema(*schema);
  const size_t n_vars = cfg.schema.variables.size();
  cfg.errors.rate.assign(n_vars, 0.02);

  if (const json* data = find(j, "data")) {
    check_keys(*data, "data", {"n_y", "n_x"});
    cfg.n_y = get_u64(*data, "data", "n_y", cfg.n_y);
    cfg.n_x = get_u64(*data, "data", "n_x", cfg.n_x);
  }
  if (const json* errors = find(j, "errors")) {
    check_keys(*errors, "errors", {"rate", "missing_fraction", "corrupt_blocking"});
    if (const json* rate = find(*errors, "rate")) cfg.errors.rate = parse_error_rate(*rate, n_vars);
    cfg.errors.missing_fraction =
        get_num(*errors, "errors", "missing_fraction", cfg.errors.missing_fraction);
    cfg.errors.corrupt_blocking =
        get_bool(*errors, "errors", "corrupt_blocking", cfg.errors.corrupt_blocking);
  }
  if (const json* link = find(j, "link")) {
    check_keys(*link, "link", {"cutoff", "cell_budget"});
    cfg.cutoff = get_num(*link, "link", "cutoff", cfg.cutoff);
    cfg.cell_budget = get_u64(*link, "link", "cell_budget", cfg.cell_budget);
  }
  if (const json* chain = find(j, "chain")) {
    check_keys(*chain, "chain", {"n_samples", "sweep_length", "burn_in_sweeps"});
    cfg.chain.n_samples = get_u64(*chain, "chain", "n_samples", cfg.chain.n_samples);
    cfg.chain.sweep_length = get_u64(*chain, "chain", "sweep_length", cfg.chain.sweep_length);
    cfg.chain.burn_in_sweeps =
        get_u64(*chain, "chain", "burn_in_sweeps", cfg.chain.burn_in_sweeps);
  }
  if (const json* sweep = find(j, "sweep")) {
    check_keys(*sweep, "sweep",
               {"mode", "n_simulations", "base_cutoff", "cutoff_grid", "block_grid",
                "sweeps_per_sim", "burn_in_sweeps"});
    const std::string mode = get_str(*sweep, "sweep", "mode", "cutoff");
    if (mode == "cutoff")
      cfg.sweep.mode = SweepConfig::Mode::kCutoff;
    else if (mode == "block")
      cfg.sweep.mode = SweepConfig::Mode::kBlockSize;
    else
      throw ConfigError("config: sweep.mode must be 'cutoff' or 'block', got '" + mode + "'");
    cfg.sweep.n_simulations =
        get_u64(*sweep, "sweep", "n_simulations", cfg.sweep.n_simulations);
    cfg.sweep.base_cutoff = get_num(*sweep, "sweep", "base_cutoff", cfg.sweep.base_cutoff);
    if (const json* grid = find(*sweep, "cutoff_grid"))
      cfg.sweep.cutoff_grid = parse_double_grid(*grid, "cutoff_grid");
    if (const json* grid = find(*sweep, "block_grid"))
      cfg.sweep.block_grid = parse_size_grid(*grid, "block_grid");
    cfg.sweep.sweeps_per_sim =
        get_u64(*sweep, "sweep", "sweeps_per_sim", cfg.sweep.sweeps_per_sim);
    cfg.sweep.burn_in_sweeps =
        get_u64(*sweep, "sweep", "burn_in_sweeps", cfg.sweep.burn_in_sweeps);
  }
  cfg.seed = get_u64(j, "top level", "seed", cfg.seed);
  cfg.workers = static_cast<unsigned>(get_u64(j, "top level", "workers", cfg.workers));

  cfg.validate();
  return cfg;
}

namespace {

uint64_t env_u64(const char* name, const char* value) {
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(value, &end, 10);
  if (end == value || *end != '\0')
    throw ConfigError(std::string("config: ") + name + " must be an unsigned integer, got '" +
                      value + "'");
  return parsed;
}

double env_double(const char* name, const char* value) {
  char* end = nullptr;
  const double parsed = std::strtod(value, &end);
  if (end == value || *end != '\0')
    throw ConfigError(std::string("config: ") + name + " must be a number, got '" + value + "'");
  return parsed;
}

}  // namespace

void apply_env_overrides(RunConfig& cfg) {
  if (const char* seed = std::getenv("MACSIM_SEED")) cfg.seed = env_u64("MACSIM_SEED", seed);
  if (const char* workers = std::getenv("MACSIM_WORKERS"))
    cfg.workers = static_cast<unsigned>(env_u64("MACSIM_WORKERS", workers));
  if (const char* cutoff = std::getenv("MACSIM_CUTOFF"))
    cfg.cutoff = env_double("MACSIM_CUTOFF", cutoff);
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["data"] = {{"n_y", cfg.n_y}, {"n_x", cfg.n_x}};
  json vars = json::array();
  for (const VariableSpec& spec : cfg.schema.variables) {
    json vj;
    vj["name"] = spec.name;
    vj["cardinality"] = spec.cardinality;
    vj["code_base"] = spec.code_base;
    if (spec.head_prob > 0.0) {
      vj["head_prob"] = spec.head_prob;
      vj["head_code"] = spec.head_code;
    }
    vars.push_back(std::move(vj));
  }
  j["schema"] = {{"variables", std::move(vars)},
                 {"blocking_variable", cfg.schema.blocking_variable},
                 {"linking_variables", cfg.schema.linking_variables}};
  j["errors"] = {{"rate", cfg.errors.rate},
                 {"missing_fraction", cfg.errors.missing_fraction},
                 {"corrupt_blocking", cfg.errors.corrupt_blocking}};
  j["link"] = {{"cutoff", cfg.cutoff}, {"cell_budget", cfg.cell_budget}};
  j["chain"] = {{"n_samples", cfg.chain.n_samples},
                {"sweep_length", cfg.chain.sweep_length},
                {"burn_in_sweeps", cfg.chain.burn_in_sweeps}};
  j["sweep"] = {
      {"mode", cfg.sweep.mode == SweepConfig::Mode::kCutoff ? "cutoff" : "block"},
      {"n_simulations", cfg.sweep.n_simulations},
      {"base_cutoff", cfg.sweep.base_cutoff},
      {"cutoff_grid", cfg.sweep.cutoff_grid},
      {"block_grid", cfg.sweep.block_grid},
      {"sweeps_per_sim", cfg.sweep.sweeps_per_sim},
      {"burn_in_sweeps", cfg.sweep.burn_in_sweeps},
  };
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  return j.dump(2);
}

}  // namespace macsim
