// Command line front door. Subcommands:
//   generate  synthesize file_y.csv / file_x.csv / truth.csv
//   link      agreement matrices -> m/u/g estimates -> greedy links -> metrics
//   sweep     block-size or cutoff sweep over chain resamples
//   diagnose  chain marginal rates per retained sweep, for stationarity checks
//
// Option precedence: flag > environment (MACSIM_*) > config file > default.
// Exit codes: 0 ok, 2 configuration/usage error, 3 data error, 4 runtime error.
// Every run that gets past configuration writes <out>/manifest.json, even on
// failure, with per-artifact checksums and an error status when applicable.

#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "macsim/config.hpp"
#include "macsim/error.hpp"
#include "macsim/manifest.hpp"
#include "macsim/metrics.hpp"
#include "macsim/version.hpp"

namespace fs = std::filesystem;
using namespace macsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

struct Options {
  std::string subcommand;
  std::string config_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<double> cutoff;
  std::string x_path, y_path, truth_path;
  std::string mode;  // sweep only: "block" or "cutoff"
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value ? std::string(value) : fallback;
}

RunConfig resolve_config(const Options& opt) {
  const std::string path =
      opt.config_path.empty() ? env_or("MACSIM_CONFIG", "") : opt.config_path;
  RunConfig cfg = path.empty() ? default_config() : load_config(path);
  apply_env_overrides(cfg);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.workers) cfg.workers = *opt.workers;
  if (opt.cutoff) {
    cfg.cutoff = *opt.cutoff;
    cfg.sweep.base_cutoff = *opt.cutoff;
  }
  if (!opt.mode.empty()) {
    if (opt.mode == "block")
      cfg.sweep.mode = SweepConfig::Mode::kBlockSize;
    else if (opt.mode == "cutoff")
      cfg.sweep.mode = SweepConfig::Mode::kCutoff;
    else
      throw ConfigError("sweep: --mode must be 'block' or 'cutoff', got '" + opt.mode + "'");
  }
  cfg.validate();
  return cfg;
}

std::string resolve_out_dir(const Options& opt) {
  std::string dir = opt.out_dir.empty() ? env_or("MACSIM_OUT", ".") : opt.out_dir;
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

// Data for link/sweep/diagnose: either the three CSVs or regenerated from the
// config (same seed, same bytes as a prior `generate`).
FilePair resolve_data(const Options& opt, const RunConfig& cfg, RunManifest& manifest) {
  const bool any = !opt.x_path.empty() || !opt.y_path.empty() || !opt.truth_path.empty();
  if (!any) {
    FilePair clean = generate_population(cfg.n_y, cfg.n_x, cfg.schema, cfg.seed);
    ErrorConfig errors = cfg.errors;
    errors.seed = cfg.seed;
    return inject_errors(clean, cfg.schema, errors);
  }
  if (opt.x_path.empty() || opt.y_path.empty() || opt.truth_path.empty())
    throw ConfigError("--x, --y and --truth must be given together");
  manifest.inputs.push_back(opt.x_path);
  manifest.inputs.push_back(opt.y_path);
  manifest.inputs.push_back(opt.truth_path);
  FilePair pair;
  pair.file_y = read_records_csv(opt.y_path, cfg.schema);
  pair.file_x = read_records_csv(opt.x_path, cfg.schema);
  pair.truth = read_truth_csv(opt.truth_path, pair.file_x, pair.file_y);
  return pair;
}

// The block the sweeps and the diagnose chain run on: most X rows, then
// smaller id on ties.
const AgreementMatrix& reference_block(const std::vector<AgreementMatrix>& blocks) {
  if (blocks.empty()) throw DataError("no blocks shared between the two files");
  const AgreementMatrix* best = &blocks.front();
  for (const AgreementMatrix& block : blocks)
    if (block.rows() > best->rows()) best = &block;
  return *best;
}

std::vector<std::string> linking_names(const Schema& schema) {
  return schema.linking_variables;
}

int run_generate(const Options& opt, const RunConfig& cfg, const std::string& out,
                 RunManifest& manifest) {
  FilePair clean = generate_population(cfg.n_y, cfg.n_x, cfg.schema, cfg.seed);
  ErrorConfig errors = cfg.errors;
  errors.seed = cfg.seed;
  const FilePair pair = inject_errors(clean, cfg.schema, errors);

  const std::string y_path = join(out, "file_y.csv");
  const std::string x_path = join(out, "file_x.csv");
  const std::string truth_path = join(out, "truth.csv");
  write_records_csv(y_path, cfg.schema, pair.file_y);
  manifest.artifacts.push_back(y_path);
  write_records_csv(x_path, cfg.schema, pair.file_x);
  manifest.artifacts.push_back(x_path);
  write_truth_csv(truth_path, pair);
  manifest.artifacts.push_back(truth_path);

  std::cout << "generate: " << pair.file_y.size() << " Y records, " << pair.file_x.size()
            << " X records -> " << out << "\n";
  (void)opt;
  return kExitOk;
}

int run_link(const Options& opt, const RunConfig& cfg, const std::string& out,
             RunManifest& manifest) {
  const FilePair pair = resolve_data(opt, cfg, manifest);
  const std::vector<AgreementMatrix> blocks = build_blocks(pair, cfg.schema, cfg.cell_budget);

  const std::string links_path = join(out, "links.csv");
  const std::string metrics_path = join(out, "metrics.csv");
  ConcordanceCounts totals;
  size_t n_links = 0;

  if (blocks.empty()) {
    // Disjoint blocking values: nothing to compare. Emit empty links and an
    // all-undefined metric report rather than failing.
    LinkCsvWriter links(links_path);
    links.close();
    manifest.artifacts.push_back(links_path);
    write_metrics_csv(metrics_path, totals, metric_report(totals));
    manifest.artifacts.push_back(metrics_path);
    std::cout << "link: no shared blocking values; empty report written\n";
    return kExitOk;
  }

  const MUGParams params = estimate_mug(blocks);
  const std::string mug_path = join(out, "mug.csv");
  write_mug_csv(mug_path, params, linking_names(cfg.schema));
  manifest.artifacts.push_back(mug_path);

  const WeightTable table = weight_table(params);
  LinkCsvWriter links(links_path);
  for (const AgreementMatrix& block : blocks) {
    const LinkSet set = greedy_link(composite_weights(block, table), cfg.cutoff);
    links.block(block, pair, set);
    totals += concordance(set, block.matched_col,
                          static_cast<int64_t>(block.rows() * block.cols()));
    n_links += set.links.size();
  }
  links.close();
  manifest.artifacts.push_back(links_path);
  write_metrics_csv(metrics_path, totals, metric_report(totals));
  manifest.artifacts.push_back(metrics_path);

  std::cout << "link: " << blocks.size() << " block(s), " << n_links << " links at cutoff "
            << cfg.cutoff << "\n";
  return kExitOk;
}

int run_sweep(const Options& opt, const RunConfig& cfg, const std::string& out,
              RunManifest& manifest) {
  const FilePair pair = resolve_data(opt, cfg, manifest);
  const std::vector<AgreementMatrix> blocks = build_blocks(pair, cfg.schema, cfg.cell_budget);
  const MUGParams params = estimate_mug(blocks);
  const AgreementMatrix& block = reference_block(blocks);

  SweepConfig sweep = cfg.sweep;
  sweep.seed = cfg.seed;
  sweep.workers = cfg.workers;

  const bool block_mode = sweep.mode == SweepConfig::Mode::kBlockSize;
  const SweepResult result =
      block_mode ? run_block_sweep(block, params, sweep) : run_cutoff_sweep(block, params, sweep);

  const std::string sweep_path = join(out, "sweep.csv");
  write_sweep_csv(sweep_path, result);
  manifest.artifacts.push_back(sweep_path);
  const std::string pooled_path = join(out, "sweep_pooled.csv");
  write_sweep_pooled_csv(pooled_path, result);
  manifest.artifacts.push_back(pooled_path);

  std::vector<int64_t> recids;
  recids.reserve(result.per_record_rows);
  for (size_t r = 0; r < result.per_record_rows; ++r)
    recids.push_back(pair.file_x[block.x_ids[r]].recid);
  const std::string per_record_path = join(out, "per_record.csv");
  write_per_record_csv(per_record_path, recids, result.per_record);
  manifest.artifacts.push_back(per_record_path);

  const std::string diag_path = join(out, "diagnostics.csv");
  write_sweep_diagnostics_csv(diag_path, result);
  manifest.artifacts.push_back(diag_path);

  const std::string mug_path = join(out, "mug.csv");
  write_mug_csv(mug_path, params, linking_names(cfg.schema));
  manifest.artifacts.push_back(mug_path);

  std::cout << "sweep: " << (block_mode ? "block" : "cutoff") << " mode, " << result.rows.size()
            << " grid points, " << sweep.n_simulations << " simulations on block '"
            << block.block_id << "' (" << block.rows() << "x" << block.cols() << ")\n";
  if (!block_mode) {
    const CutoffChoice choice = recommend_cutoff(result);
    std::cout << "sweep: recommended cutoff " << choice.cutoff
              << (choice.constraints_met ? "" : " (best effort: no grid point met fdr/fnr bounds)")
              << "\n";
  }
  return kExitOk;
}

int run_diagnose(const Options& opt, const RunConfig& cfg, const std::string& out,
                 RunManifest& manifest) {
  const FilePair pair = resolve_data(opt, cfg, manifest);
  const std::vector<AgreementMatrix> blocks = build_blocks(pair, cfg.schema, cfg.cell_budget);
  const MUGParams params = estimate_mug(blocks);
  const AgreementMatrix& block = reference_block(blocks);

  const std::string mug_path = join(out, "mug.csv");
  write_mug_csv(mug_path, params, linking_names(cfg.schema));
  manifest.artifacts.push_back(mug_path);

  const std::string diag_path = join(out, "diagnostics.csv");
  DiagnosticsCsvWriter diag(diag_path);
  sample_chain(block, transition_table(params), cfg.chain, derive_seed(cfg.seed, "diagnose", 0),
               [&](uint64_t sample, const ChainState& state) { diag.sample(sample, state); });
  diag.close();
  manifest.artifacts.push_back(diag_path);

  std::cout << "diagnose: " << cfg.chain.n_samples << " retained sweeps on block '"
            << block.block_id << "' (" << block.rows() << "x" << block.cols() << ") -> "
            << diag_path << "\n";
  (void)opt;
  return kExitOk;
}

int dispatch(const Options& opt) {
  // Configuration problems abort before any artifact is written; anything
  // after this point leaves a manifest behind.
  const RunConfig cfg = resolve_config(opt);
  const std::string out = resolve_out_dir(opt);

  RunManifest manifest;
  manifest.subcommand = opt.subcommand;
  manifest.version = kVersion;
  manifest.seed = cfg.seed;
  manifest.config_json = config_to_json(cfg);
  if (!opt.config_path.empty()) manifest.inputs.push_back(opt.config_path);

  const auto started = std::chrono::steady_clock::now();
  auto seconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  int code = kExitRuntime;
  try {
    if (opt.subcommand == "generate")
      code = run_generate(opt, cfg, out, manifest);
    else if (opt.subcommand == "link")
      code = run_link(opt, cfg, out, manifest);
    else if (opt.subcommand == "sweep")
      code = run_sweep(opt, cfg, out, manifest);
    else
      code = run_diagnose(opt, cfg, out, manifest);
  } catch (const std::exception& e) {
    manifest.status = std::string("error: ") + e.what();
    manifest.duration_seconds = seconds();
    write_manifest_json(join(out, "manifest.json"), manifest);
    throw;
  }
  manifest.duration_seconds = seconds();
  write_manifest_json(join(out, "manifest.json"), manifest);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Record-linkage accuracy toolkit: synthetic file pairs, agreement matrices, "
               "greedy weight-based linking, and chain-resampling accuracy experiments."};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "JSON configuration file");
    cmd->add_option("--out", opt.out_dir, "output directory (default: . or MACSIM_OUT)");
    cmd->add_option("--seed", opt.seed, "master seed override");
    cmd->add_option("--workers", opt.workers, "worker thread cap (0 = machine default)");
    cmd->add_option("--cutoff", opt.cutoff, "linking cutoff override");
  };
  auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--x", opt.x_path, "file X records CSV (otherwise generated from config)");
    cmd->add_option("--y", opt.y_path, "file Y records CSV");
    cmd->add_option("--truth", opt.truth_path, "truth CSV mapping x_recid to y_recid");
  };

  add_common(app.add_subcommand("generate", "Write synthetic file_y/file_x/truth CSVs"));
  CLI::App* link = app.add_subcommand("link", "Estimate m/u/g, link greedily, report metrics");
  add_common(link);
  add_data(link);
  CLI::App* sweep = app.add_subcommand("sweep", "Accuracy sweep over block sizes or cutoffs");
  add_common(sweep);
  add_data(sweep);
  sweep->add_option("--mode", opt.mode, "block or cutoff (default from config)");
  CLI::App* diagnose = app.add_subcommand("diagnose", "Chain marginal rates per retained sweep");
  add_common(diagnose);
  add_data(diagnose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  opt.subcommand = app.get_subcommands().front()->get_name();

  try {
    return dispatch(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
