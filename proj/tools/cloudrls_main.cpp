// Command-line front end: runs estimators over scenario presets or config
// files, writes per-step trajectory CSVs plus a metrics table, and compares
// metrics files across runs.

#include "cloudrls/config.hpp"
#include "cloudrls/csv.hpp"
#include "cloudrls/metrics.hpp"
#include "cloudrls/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cloudrls;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  if (spec.empty()) throw ConfigError("--seeds: empty value");
  std::vector<std::uint64_t> seeds;
  if (spec.find(',') == std::string::npos) {
    // A plain integer is a seed count: run seeds 1..k.
    char* end = nullptr;
    const long long k = std::strtoll(spec.c_str(), &end, 10);
    if (end == spec.c_str() || *end != '\0' || k < 1)
      throw ConfigError("--seeds: '" + spec + "' is not a positive count or seed list");
    for (long long s = 1; s <= k; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    return seeds;
  }
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    char* end = nullptr;
    const unsigned long long s = std::strtoull(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError("--seeds: '" + tok + "' is not a seed");
    seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (seeds.empty()) throw ConfigError("--seeds: no seeds given");
  return seeds;
}

std::vector<Estimator> parse_estimators(const std::vector<std::string>& names) {
  std::vector<Estimator> out;
  for (const auto& raw : names) {
    std::istringstream in(raw);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      if (tok.empty()) continue;
      if (tok == "all") {
        for (Estimator e : all_estimators())
          if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
      } else {
        const Estimator e = parse_estimator(tok);
        if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
      }
    }
  }
  if (out.empty()) out.push_back(Estimator::AdmmRls);
  return out;
}

// component (1-based) -> global index (1-based), for P made of selection
// rows. Components without a dedicated row map to 0.
std::vector<int> global_component_map(const ScenarioConfig& cfg) {
  std::vector<int> map(static_cast<size_t>(cfg.n_theta()), 0);
  if (cfg.variant == ConsensusVariant::Full) {
    for (int i = 0; i < cfg.n_theta(); ++i) map[static_cast<size_t>(i)] = i + 1;
    return map;
  }
  const Matrix& P = cfg.P;
  for (int j = 0; j < P.rows(); ++j) {
    int nonzeros = 0, col = -1;
    for (int i = 0; i < P.cols(); ++i) {
      if (P(j, i) != 0.0) {
        ++nonzeros;
        col = i;
      }
    }
    if (nonzeros == 1 && P(j, col) == 1.0) map[static_cast<size_t>(col)] = j + 1;
  }
  return map;
}

std::string trajectories_filename(Estimator est, std::uint64_t seed) {
  return "trajectories_" + std::string(estimator_name(est)) + "_seed" + std::to_string(seed) +
         ".csv";
}

void write_trajectories(const fs::path& path, const ScenarioConfig& cfg, const Dataset& data,
                        const RunResult& run) {
  const std::vector<int> gmap = global_component_map(cfg);
  CsvWriter csv(path, {"t", "agent_id", "component", "theta_true", "theta_rls", "theta_fused",
                       "theta_global"});
  const bool has_local = !run.fused.empty();
  for (int t = 1; t <= run.horizon; ++t) {
    for (int n = 0; n < run.num_agents; ++n) {
      const auto& agent = data.agents[static_cast<size_t>(n)];
      for (int i = 0; i < run.n_theta; ++i) {
        const int g = gmap[static_cast<size_t>(i)];
        csv.row({std::to_string(t), std::to_string(n + 1), std::to_string(i + 1),
                 format_double(agent.truth(i, t - 1)),
                 has_local ? format_double(run.rls[static_cast<size_t>(n)](i, t - 1)) : "",
                 has_local ? format_double(run.fused[static_cast<size_t>(n)](i, t - 1)) : "",
                 g > 0 ? format_double(run.theta_g(g - 1, t - 1)) : ""});
      }
    }
  }
  csv.finish();
}

struct MetricsRow {
  Estimator estimator;
  std::uint64_t seed;
  Metrics metrics;
};

std::vector<std::string> metrics_header(const ScenarioConfig& cfg) {
  std::vector<std::string> h = {"estimator", "seed"};
  for (int i = 1; i <= cfg.n_g(); ++i) h.push_back("rmse_g_" + std::to_string(i));
  h.insert(h.end(), {"rmse_g_norm", "snr_min_db", "snr_mean_db", "snr_max_db", "admm_avg_iters"});
  if (cfg.variant == ConsensusVariant::ConstrainedPartial) {
    for (int i = 1; i <= cfg.n_theta(); ++i) h.push_back("viol_pct_" + std::to_string(i));
    h.push_back("viol_pct_avg");
  }
  return h;
}

std::vector<std::string> metrics_cells(const ScenarioConfig& cfg, const MetricsRow& row) {
  const Metrics& m = row.metrics;
  std::vector<std::string> cells = {estimator_name(row.estimator), std::to_string(row.seed)};
  for (Eigen::Index i = 0; i < m.rmse_global.size(); ++i)
    cells.push_back(format_double(m.rmse_global[i]));
  cells.push_back(format_double(m.rmse_global_norm));
  double mn = 0, mx = 0, mean = 0;
  if (!m.snr_db.empty()) {
    mn = *std::min_element(m.snr_db.begin(), m.snr_db.end());
    mx = *std::max_element(m.snr_db.begin(), m.snr_db.end());
    for (double v : m.snr_db) mean += v;
    mean /= static_cast<double>(m.snr_db.size());
  }
  cells.push_back(format_double(mn));
  cells.push_back(format_double(mean));
  cells.push_back(format_double(mx));
  cells.push_back(row.estimator == Estimator::AdmmRls ? format_double(m.avg_admm_iterations)
                                                      : "");
  if (cfg.variant == ConsensusVariant::ConstrainedPartial) {
    if (m.violations.avg_pct.size() == cfg.n_theta()) {
      for (Eigen::Index i = 0; i < m.violations.avg_pct.size(); ++i)
        cells.push_back(format_double(m.violations.avg_pct[i]));
      cells.push_back(format_double(m.violations.overall_avg_pct));
    } else {
      for (int i = 0; i < cfg.n_theta() + 1; ++i) cells.push_back("");
    }
  }
  return cells;
}

std::string summary_table(const ScenarioConfig& cfg, const std::vector<Estimator>& estimators,
                          const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << "scenario: " << cfg.name << " (agents=" << cfg.num_agents
      << ", horizon=" << cfg.horizon << ")\n";
  out << "rmse_g_norm across seeds\n\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %12s %12s %6s\n", "estimator", "mean", "std", "runs");
  out << line;
  for (Estimator e : estimators) {
    std::vector<double> norms;
    for (const auto& r : rows)
      if (r.estimator == e) norms.push_back(r.metrics.rmse_global_norm);
    if (norms.empty()) continue;
    double mean = 0;
    for (double v : norms) mean += v;
    mean /= static_cast<double>(norms.size());
    double var = 0;
    for (double v : norms) var += (v - mean) * (v - mean);
    const double stddev = norms.size() > 1 ? std::sqrt(var / static_cast<double>(norms.size() - 1))
                                           : 0.0;
    std::snprintf(line, sizeof(line), "%-10s %12.6f %12.6f %6zu\n", estimator_name(e), mean,
                  stddev, norms.size());
    out << line;
  }
  return out.str();
}

int cmd_run(const std::string& preset, const std::string& config_path,
            const std::vector<std::string>& estimator_names, const std::string& seeds_spec,
            const std::string& out_dir, std::optional<int> max_iters,
            std::optional<double> rho, std::optional<double> rho1, std::optional<double> rho2,
            std::optional<double> lambda, std::optional<double> tol) {
  if (preset.empty() == config_path.empty())
    throw ConfigError("exactly one of --preset or --config is required");

  ScenarioConfig cfg;
  if (!preset.empty()) {
    cfg = load_preset(preset);
  } else {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    cfg = scenario_from_text(text.str(), config_path);
  }
  if (max_iters) cfg.admm.max_iters = *max_iters;
  if (rho) cfg.penalties.rho = *rho;
  if (rho1) cfg.penalties.rho1 = *rho1;
  if (rho2) cfg.penalties.rho2 = *rho2;
  if (lambda) cfg.lambda = *lambda;
  if (tol) cfg.admm.primal_tol = *tol;
  cfg.validate();

  const std::vector<Estimator> estimators = parse_estimators(estimator_names);
  const std::vector<std::uint64_t> seeds = parse_seeds(seeds_spec);
  const fs::path out(out_dir);
  fs::create_directories(out);

  std::vector<std::string> emitted;

  {
    std::ostringstream run_meta;
    run_meta << "# resolved scenario and run inputs\n";
    run_meta << "# estimators =";
    for (Estimator e : estimators) run_meta << ' ' << estimator_name(e);
    run_meta << "\n# seeds =";
    for (auto s : seeds) run_meta << ' ' << s;
    run_meta << "\n\n";
    run_meta << scenario_to_text(cfg);
    write_file_atomic(out / "config_resolved.txt", run_meta.str());
    emitted.push_back("config_resolved.txt");
  }

  std::vector<MetricsRow> rows;
  for (const std::uint64_t seed : seeds) {
    ScenarioConfig seeded = cfg;
    seeded.seed = seed;
    const Dataset data = generate(seeded);
    if (data.magnitude_warning)
      std::cerr << "warning: generated outputs exceeded the magnitude guard (unstable "
                   "parameter law?) for seed "
                << seed << "\n";
    for (Estimator est : estimators) {
      const RunResult run = run_simulation(seeded, est, {}, &data);
      MetricsRow row{est, seed, compute_metrics(run, data)};
      const std::string traj_name = trajectories_filename(est, seed);
      write_trajectories(out / traj_name, seeded, data, run);
      emitted.push_back(traj_name);
      std::cout << estimator_name(est) << " seed=" << seed
                << " rmse_g_norm=" << format_double(row.metrics.rmse_global_norm) << "\n";
      rows.push_back(std::move(row));
    }
  }

  {
    CsvWriter csv(out / "metrics.csv", metrics_header(cfg));
    for (const auto& row : rows) csv.row(metrics_cells(cfg, row));
    csv.finish();
    emitted.push_back("metrics.csv");
  }
  {
    const std::string table = summary_table(cfg, estimators, rows);
    write_file_atomic(out / "summary.txt", table);
    emitted.push_back("summary.txt");
    std::cout << "\n" << table;
  }
  {
    CsvWriter manifest(out / "manifest.csv", {"file", "bytes", "fnv1a64"});
    for (const auto& name : emitted) {
      const fs::path p = out / name;
      manifest.row({name, std::to_string(fs::file_size(p)), to_hex(fnv1a64_file(p))});
    }
    manifest.finish();
  }
  std::cout << "wrote " << emitted.size() + 1 << " files to " << out_dir << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& files, const std::string& out_path) {
  if (files.empty()) throw ConfigError("compare: no metrics files given");

  std::vector<CsvTable> tables;
  for (const auto& f : files) tables.push_back(CsvTable::read(f));

  const auto& ref = tables.front().header;
  for (size_t i = 1; i < tables.size(); ++i) {
    for (const auto& col : ref)
      if (tables[i].column(col) < 0)
        throw ConfigError("compare: column '" + col + "' missing in '" + files[i] + "'");
    for (const auto& col : tables[i].header)
      if (tables.front().column(col) < 0)
        throw ConfigError("compare: column '" + col + "' unexpected in '" + files[i] + "'");
  }
  for (const auto& required : {std::string("estimator"), std::string("rmse_g_norm")})
    if (tables.front().column(required) < 0)
      throw ConfigError("compare: column '" + required + "' missing in '" + files.front() + "'");

  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> norms;
  for (size_t i = 0; i < tables.size(); ++i) {
    const int est_col = tables[i].column("estimator");
    const int norm_col = tables[i].column("rmse_g_norm");
    for (const auto& row : tables[i].rows) {
      const std::string& est = row[static_cast<size_t>(est_col)];
      if (!norms.count(est)) order.push_back(est);
      norms[est].push_back(std::strtod(row[static_cast<size_t>(norm_col)].c_str(), nullptr));
    }
  }
  if (order.empty()) throw ConfigError("compare: no data rows in the given metrics files");

  struct Agg {
    std::string estimator;
    size_t runs;
    double mean, stddev;
  };
  std::vector<Agg> aggs;
  for (const auto& est : order) {
    const auto& v = norms[est];
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double stddev = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    aggs.push_back({est, v.size(), mean, stddev});
  }
  std::stable_sort(aggs.begin(), aggs.end(),
                   [](const Agg& a, const Agg& b) { return a.mean < b.mean; });

  char line[160];
  std::snprintf(line, sizeof(line), "%-4s %-10s %12s %12s %6s\n", "rank", "estimator", "mean",
                "std", "runs");
  std::cout << line;
  for (size_t i = 0; i < aggs.size(); ++i) {
    std::snprintf(line, sizeof(line), "%-4zu %-10s %12.6f %12.6f %6zu\n", i + 1,
                  aggs[i].estimator.c_str(), aggs[i].mean, aggs[i].stddev, aggs[i].runs);
    std::cout << line;
  }

  if (!out_path.empty()) {
    CsvWriter csv(out_path, {"rank", "estimator", "runs", "mean_rmse_g_norm",
                             "std_rmse_g_norm"});
    for (size_t i = 0; i < aggs.size(); ++i)
      csv.row({std::to_string(i + 1), aggs[i].estimator, std::to_string(aggs[i].runs),
               format_double(aggs[i].mean), format_double(aggs[i].stddev)});
    csv.finish();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative least-squares estimation over a simulated node/cloud network"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run estimators on a scenario and write CSV outputs");
  std::string preset, config_path, seeds_spec = "1", out_dir = "out";
  std::vector<std::string> estimator_names;
  std::optional<int> max_iters;
  std::optional<double> rho, rho1, rho2, lambda, tol;
  run->add_option("--preset", preset, "Built-in scenario name (see `cloudrls presets`)")
      ->envname("CLOUDRLS_PRESET");
  run->add_option("--config", config_path, "Scenario config file")->envname("CLOUDRLS_CONFIG");
  run->add_option("--estimator", estimator_names,
                  "Estimator name, repeatable or comma-separated; 'all' runs every one")
      ->envname("CLOUDRLS_ESTIMATOR");
  run->add_option("--seeds", seeds_spec,
                  "Seed count k (runs seeds 1..k) or explicit comma-separated list")
      ->envname("CLOUDRLS_SEEDS");
  run->add_option("--out", out_dir, "Output directory")->envname("CLOUDRLS_OUT");
  run->add_option("--max-iters", max_iters, "Override solver max iterations")
      ->envname("CLOUDRLS_MAX_ITERS");
  run->add_option("--rho", rho, "Override consensus penalty")->envname("CLOUDRLS_RHO");
  run->add_option("--rho1", rho1, "Override box penalty (constrained mode)")
      ->envname("CLOUDRLS_RHO1");
  run->add_option("--rho2", rho2, "Override consensus penalty (constrained mode)")
      ->envname("CLOUDRLS_RHO2");
  run->add_option("--lambda", lambda, "Override forgetting factor")->envname("CLOUDRLS_LAMBDA");
  run->add_option("--tol", tol, "Override primal residual tolerance")->envname("CLOUDRLS_TOL");

  auto* compare = app.add_subcommand("compare", "Aggregate metrics files into a ranked table");
  std::vector<std::string> compare_files;
  std::string compare_out;
  compare->add_option("files", compare_files, "metrics.csv files")->required();
  compare->add_option("--out", compare_out, "Write the ranked table as CSV");

  auto* presets = app.add_subcommand("presets", "List built-in scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed())
      return cmd_run(preset, config_path, estimator_names, seeds_spec, out_dir, max_iters, rho,
                     rho1, rho2, lambda, tol);
    if (compare->parsed()) return cmd_compare(compare_files, compare_out);
    if (presets->parsed()) {
      for (const auto& name : preset_names()) std::cout << name << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
