// Command-line front end: experiment runs, sweeps, topology analysis and
// plot-data emission. Exit codes: 0 success, 1 configuration error,
// 2 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cccn/analysis.hpp"
#include "cccn/manifest.hpp"
#include "cccn/sweep.hpp"

namespace fs = std::filesystem;
using namespace cccn;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "1..5" expands inclusively; otherwise a comma list.
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  auto dots = s.find("..");
  if (dots != std::string::npos) {
    std::uint64_t lo = std::stoull(s.substr(0, dots));
    std::uint64_t hi = std::stoull(s.substr(dots + 2));
    for (std::uint64_t v = lo; v <= hi; ++v) seeds.push_back(v);
  } else {
    for (const std::string& tok : split_list(s)) seeds.push_back(std::stoull(tok));
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> vals;
  for (const std::string& tok : split_list(s)) vals.push_back(std::stod(tok));
  if (vals.empty()) throw ConfigError("empty value list");
  return vals;
}

std::vector<int> parse_nodes(const std::string& s) {
  std::vector<int> out;
  for (const std::string& tok : split_list(s)) out.push_back(std::stoi(tok));
  return out;
}

// Config files may carry a sweep plan next to the scenario keys.
struct RunPlan {
  ExperimentConfig cfg;
  std::string axis = "single";
  std::vector<double> values{0.0};
  std::vector<Mode> modes;
  std::vector<std::uint64_t> seeds;
};

RunPlan load_plan(const std::string& path) {
  RunPlan plan;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "sweep_axis") plan.axis = value;
    else if (key == "sweep_values") plan.values = parse_values(value);
    else if (key == "sweep_modes") {
      plan.modes.clear();
      for (const std::string& m : split_list(value)) plan.modes.push_back(parse_mode(m));
    } else if (key == "sweep_seeds") plan.seeds = parse_seeds(value);
    else plan.cfg.set(key, value);
  }
  return plan;
}

void emit_run_outputs(const RunPlan& plan, const std::string& config_path,
                      const std::string& out_dir, unsigned threads) {
  fs::create_directories(out_dir);
  std::vector<Mode> modes = plan.modes.empty() ? std::vector<Mode>{plan.cfg.mode}
                                               : plan.modes;
  std::vector<std::uint64_t> seeds =
      plan.seeds.empty() ? std::vector<std::uint64_t>{plan.cfg.seed} : plan.seeds;
  std::string log_path = out_dir + "/run.log";
  std::ofstream log;
  std::vector<RunResult> results;
  if (plan.axis == "single" && modes.size() == 1 && seeds.size() == 1 &&
      plan.cfg.verbosity >= 2) {
    // Single run with an event log.
    ExperimentConfig cfg = plan.cfg;
    cfg.mode = modes[0];
    cfg.seed = seeds[0];
    log.open(log_path);
    RunResult rr;
    rr.spec = {cfg, "single", "0"};
    rr.metrics = run_experiment(cfg, &log);
    results.push_back(std::move(rr));
  } else {
    results = run_sweep(plan.cfg, plan.axis, plan.values, modes, seeds, threads);
  }
  std::string csv_path = out_dir + "/metrics.csv";
  {
    std::ofstream csv(csv_path);
    write_csv(results, csv);
  }
  RunManifest manifest;
  manifest.config_path = config_path;
  manifest.resolved_config = plan.cfg.to_map();
  if (plan.axis != "single") {
    manifest.resolved_config["sweep_axis"] = plan.axis;
    std::string vals;
    for (double v : plan.values) vals += (vals.empty() ? "" : ",") + format_axis_value(v);
    manifest.resolved_config["sweep_values"] = vals;
  }
  if (!plan.modes.empty()) {
    std::string ms;
    for (Mode m : plan.modes) ms += std::string(ms.empty() ? "" : ",") + mode_name(m);
    manifest.resolved_config["sweep_modes"] = ms;
  }
  if (!plan.seeds.empty()) {
    std::string ss;
    for (std::uint64_t s : plan.seeds) ss += (ss.empty() ? "" : ",") + std::to_string(s);
    manifest.resolved_config["sweep_seeds"] = ss;
  }
  manifest.out_dir = out_dir;
  manifest.artifacts["metrics.csv"] = file_hash_hex(csv_path);
  if (log.is_open()) {
    log.close();
    manifest.artifacts["run.log"] = file_hash_hex(log_path);
  }
  manifest.save(out_dir + "/manifest.json");
  std::cout << "wrote " << csv_path << " (" << results.size() << " rows)\n";
}

RunPlan plan_from_manifest(const std::string& path) {
  RunManifest m = RunManifest::load(path);
  RunPlan plan;
  for (auto& [k, v] : m.resolved_config) {
    if (k == "sweep_axis") plan.axis = v;
    else if (k == "sweep_values") plan.values = parse_values(v);
    else if (k == "sweep_modes") {
      for (const std::string& s : split_list(v)) plan.modes.push_back(parse_mode(s));
    } else if (k == "sweep_seeds") plan.seeds = parse_seeds(v);
    else plan.cfg.set(k, v);
  }
  return plan;
}

int cmd_analyze(const std::string& topo_path, bool directed, const std::string& sources,
                const std::string& gateways_list, int n_publishers, int n_gateways,
                int m, int trials, std::uint64_t seed) {
  Digraph dag;
  std::vector<int> source_nodes = parse_nodes(sources);
  std::vector<int> gw = parse_nodes(gateways_list);
  if (directed) {
    std::ifstream in(topo_path);
    if (!in) throw ConfigError("cannot open topology file: " + topo_path);
    std::string line;
    std::vector<std::pair<int, int>> arcs;
    int maxn = -1;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      int u, v;
      if (!(ls >> u >> v)) continue;
      arcs.push_back({u, v});
      maxn = std::max({maxn, u, v});
    }
    dag.node_count = maxn + 1;
    for (auto [u, v] : arcs) dag.add_arc(u, v);
    if (source_nodes.empty()) {
      std::vector<int> indeg(dag.node_count, 0);
      for (auto [u, v] : dag.arcs) ++indeg[v];
      for (int i = 0; i < dag.node_count; ++i)
        if (indeg[i] == 0) source_nodes.push_back(i);
    }
    if (gw.empty()) {
      std::vector<int> outdeg(dag.node_count, 0);
      for (auto [u, v] : dag.arcs) ++outdeg[u];
      for (int i = 0; i < dag.node_count; ++i)
        if (outdeg[i] == 0) gw.push_back(i);
    }
  } else {
    Topology topo = load_topology_file(topo_path);
    if (source_nodes.empty() || gw.empty()) {
      RoleAssignment roles = assign_roles(topo, n_publishers, n_gateways);
      if (source_nodes.empty()) source_nodes = roles.publishers;
      if (gw.empty()) gw = roles.gateways;
    }
    dag = build_analysis_dag(topo, source_nodes, gw);
  }
  // Disconnected roles are reported, not fatal.
  AnalysisReport rep = analyze_delivery_dag(dag, source_nodes, gw, m, trials, seed);
  std::cout << "sources:";
  for (int s : source_nodes) std::cout << " " << s;
  std::cout << "\n" << rep.to_string();
  for (std::size_t i = 0; i < rep.per_gateway_mincut.size(); ++i)
    if (rep.per_gateway_mincut[i] == 0)
      std::cout << "note: gateway " << rep.gateways[i] << " unreachable from sources\n";
  return 0;
}

int cmd_plotdata(const std::vector<std::string>& files, const std::string& out_dir) {
  std::vector<CsvRow> rows;
  for (const std::string& f : files) {
    std::ifstream in(f);
    if (!in) throw ConfigError("cannot open CSV: " + f);
    auto part = read_metrics_csv(in, f);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (rows.empty()) throw Error("no data rows in input");
  PlotTable t = aggregate_rows(rows);
  fs::create_directories(out_dir);
  struct Item {
    const char* file;
    const char* label;
    const std::map<std::pair<std::string, std::string>, SeriesPoint>* metric;
  };
  std::vector<Item> items = {
      {"delay", "avg_download_delay_s", &t.delay},
      {"usage", "avg_link_usage", &t.usage},
      {"interests", "avg_interest_load", &t.interests},
  };
  for (const Item& it : items) {
    std::string path = out_dir + "/" + it.file + "_vs_" + t.axis_name + ".dat";
    std::ofstream out(path);
    write_plot_file(t, *it.metric, it.label, out);
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network-coded content-centric network simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  std::string run_config, run_manifest, run_out = "out", run_mode, run_seed;
  unsigned run_threads = 0;
  int run_verbosity = -1;
  run->add_option("--config", run_config, "key=value config file");
  run->add_option("--manifest", run_manifest, "replay a recorded manifest");
  run->add_option("--seed", run_seed, "seed or range, e.g. 7 or 1..5");
  run->add_option("--mode", run_mode, "IP | CCN | CCCN");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--threads", run_threads, "worker threads for multi-run plans");
  run->add_option("--verbosity", run_verbosity, ">=2 writes the event log");

  auto* sweep = app.add_subcommand("sweep", "sweep cache size or arrival rate");
  std::string sw_axis, sw_values, sw_modes = "CCN,CCCN,IP", sw_seeds = "1",
              sw_config, sw_out = "out";
  unsigned sw_threads = 0;
  sweep->add_option("--axis", sw_axis, "cache | rate")->required();
  sweep->add_option("--values", sw_values, "comma-separated axis values")->required();
  sweep->add_option("--modes", sw_modes, "comma-separated mode list");
  sweep->add_option("--seeds", sw_seeds, "seed list or range");
  sweep->add_option("--config", sw_config, "base config file");
  sweep->add_option("--out", sw_out, "output directory");
  sweep->add_option("--threads", sw_threads, "worker threads");

  auto* analyze = app.add_subcommand("analyze", "min-cut / coding-point / feasibility report");
  std::string an_topo, an_sources, an_gateways;
  bool an_directed = false;
  int an_pub = 5, an_gw = 15, an_m = 8, an_trials = 200;
  std::uint64_t an_seed = 1;
  analyze->add_option("--topology", an_topo, "edge-list file")->required();
  analyze->add_flag("--directed", an_directed, "treat the file as a delivery DAG");
  analyze->add_option("--sources", an_sources, "comma list of source nodes");
  analyze->add_option("--gateways", an_gateways, "comma list of gateway nodes");
  analyze->add_option("--publishers", an_pub, "publisher count when roles are derived");
  analyze->add_option("--gateway-count", an_gw, "gateway count when roles are derived");
  analyze->add_option("--m", an_m, "field bit width");
  analyze->add_option("--trials", an_trials, "full-rank sampling trials");
  analyze->add_option("--seed", an_seed, "sampling seed");

  auto* plotdata = app.add_subcommand("plotdata", "aggregate metric CSVs into plot columns");
  std::vector<std::string> pd_files;
  std::string pd_out = "plots";
  plotdata->add_option("files", pd_files, "metrics CSV files")->required();
  plotdata->add_option("--out", pd_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      RunPlan plan;
      std::string recorded_path = run_config;
      if (!run_manifest.empty()) {
        plan = plan_from_manifest(run_manifest);
        recorded_path = run_manifest;
      } else if (!run_config.empty()) {
        plan = load_plan(run_config);
      }
      if (!run_mode.empty()) {
        plan.cfg.mode = parse_mode(run_mode);
        plan.modes.clear();
      }
      if (!run_seed.empty()) plan.seeds = parse_seeds(run_seed);
      if (run_verbosity >= 0) plan.cfg.verbosity = run_verbosity;
      plan.cfg.validate();
      emit_run_outputs(plan, recorded_path, run_out, run_threads);
      return 0;
    }
    if (sweep->parsed()) {
      RunPlan plan;
      if (!sw_config.empty()) plan = load_plan(sw_config);
      plan.axis = sw_axis;
      plan.values = parse_values(sw_values);
      plan.modes.clear();
      for (const std::string& m : split_list(sw_modes)) plan.modes.push_back(parse_mode(m));
      plan.seeds = parse_seeds(sw_seeds);
      plan.cfg.validate();
      emit_run_outputs(plan, sw_config, sw_out, sw_threads);
      return 0;
    }
    if (analyze->parsed())
      return cmd_analyze(an_topo, an_directed, an_sources, an_gateways, an_pub, an_gw,
                         an_m, an_trials, an_seed);
    if (plotdata->parsed()) return cmd_plotdata(pd_files, pd_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidParameters& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
