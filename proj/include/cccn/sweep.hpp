#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cccn/sim.hpp"

namespace cccn {

struct RunSpec {
  ExperimentConfig cfg;
  std::string axis_name;   // "cache" | "rate" | "single"
  std::string axis_value;  // printed verbatim into the CSV
};

struct RunResult {
  RunSpec spec;
  MetricsReport metrics;
};

inline std::string format_axis_value(double v) {
  char buf[64];
  if (v == std::floor(v) && std::fabs(v) < 1e15)
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  else
    std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// One run per (axis value, mode, seed); the per-seed workloads are shared
// across modes so mode comparisons are paired. Independent runs may execute
// on several threads; results keep their deterministic order.
inline std::vector<RunResult> run_sweep(const ExperimentConfig& base,
                                        const std::string& axis,
                                        const std::vector<double>& values,
                                        const std::vector<Mode>& modes,
                                        const std::vector<std::uint64_t>& seeds,
                                        unsigned threads = 0) {
  if (values.empty()) throw InvalidParameters("empty sweep value list");
  std::vector<RunSpec> specs;
  for (double v : values)
    for (Mode m : modes)
      for (std::uint64_t s : seeds) {
        RunSpec spec;
        spec.cfg = base;
        spec.cfg.mode = m;
        spec.cfg.seed = s;
        spec.axis_name = axis;
        spec.axis_value = format_axis_value(v);
        if (axis == "cache")
          spec.cfg.cache_bytes = static_cast<long long>(v);
        else if (axis == "rate")
          spec.cfg.arrival_rate = v;
        else if (axis == "single")
          ;  // value is a label only
        else
          throw InvalidParameters("unknown sweep axis: " + axis);
        specs.push_back(std::move(spec));
      }
  std::vector<RunResult> results(specs.size());
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads < 1) threads = 1;
  threads = std::min<unsigned>(threads, specs.size());
  std::vector<std::thread> pool;
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= specs.size()) return;
      results[i].spec = specs[i];
      results[i].metrics = run_experiment(specs[i].cfg);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

inline void write_csv(const std::vector<RunResult>& results, std::ostream& out) {
  out << MetricsReport::csv_header() << "\n";
  for (const RunResult& r : results)
    out << r.metrics.csv_row(mode_name(r.spec.cfg.mode), r.spec.axis_name,
                             r.spec.axis_value, r.spec.cfg.seed)
        << "\n";
}

// ---- plot data aggregation ---------------------------------------------------

struct CsvRow {
  std::string mode, axis_name, axis_value;
  std::uint64_t seed = 0;
  double delay = 0, usage = 0, interests = 0;
  long completions = 0, requests = 0;
};

inline std::vector<CsvRow> read_metrics_csv(std::istream& in, const std::string& label) {
  std::string header;
  if (!std::getline(in, header) || header != MetricsReport::csv_header())
    throw Error("schema mismatch in " + label);
  std::vector<CsvRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    if (f.size() != 9) throw Error("schema mismatch in " + label);
    CsvRow r;
    r.mode = f[0];
    r.axis_name = f[1];
    r.axis_value = f[2];
    r.seed = std::stoull(f[3]);
    r.delay = std::stod(f[4]);
    r.usage = std::stod(f[5]);
    r.interests = std::stod(f[6]);
    r.completions = std::stol(f[7]);
    r.requests = std::stol(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

struct SeriesPoint {
  double mean = 0, stddev = 0;
  int n = 0;
};

// (axis_value, mode) -> per-metric mean and stddev across seeds.
struct PlotTable {
  std::string axis_name;
  std::vector<std::string> axis_values;  // in first-seen numeric order
  std::vector<std::string> modes;        // in first-seen order
  std::map<std::pair<std::string, std::string>, SeriesPoint> delay, usage, interests;
};

inline PlotTable aggregate_rows(const std::vector<CsvRow>& rows) {
  PlotTable t;
  std::map<std::pair<std::string, std::string>, std::vector<const CsvRow*>> groups;
  for (const CsvRow& r : rows) {
    if (t.axis_name.empty()) t.axis_name = r.axis_name;
    if (r.axis_name != t.axis_name) throw Error("mixed sweep axes in plot input");
    auto key = std::make_pair(r.axis_value, r.mode);
    groups[key].push_back(&r);
    if (std::find(t.axis_values.begin(), t.axis_values.end(), r.axis_value) ==
        t.axis_values.end())
      t.axis_values.push_back(r.axis_value);
    if (std::find(t.modes.begin(), t.modes.end(), r.mode) == t.modes.end())
      t.modes.push_back(r.mode);
  }
  std::sort(t.axis_values.begin(), t.axis_values.end(),
            [](const std::string& a, const std::string& b) {
              return std::stod(a) < std::stod(b);
            });
  auto stats = [](const std::vector<double>& xs) {
    SeriesPoint p;
    p.n = static_cast<int>(xs.size());
    for (double x : xs) p.mean += x;
    p.mean /= p.n;
    if (p.n > 1) {
      double ss = 0;
      for (double x : xs) ss += (x - p.mean) * (x - p.mean);
      p.stddev = std::sqrt(ss / (p.n - 1));
    }
    return p;
  };
  for (auto& [key, members] : groups) {
    std::vector<double> d, u, i;
    for (const CsvRow* r : members) {
      d.push_back(r->delay);
      u.push_back(r->usage);
      i.push_back(r->interests);
    }
    t.delay[key] = stats(d);
    t.usage[key] = stats(u);
    t.interests[key] = stats(i);
  }
  return t;
}

// Gnuplot-friendly columns: axis value, then mean and stddev per mode.
inline void write_plot_file(
    const PlotTable& t,
    const std::map<std::pair<std::string, std::string>, SeriesPoint>& metric,
    const std::string& metric_name, std::ostream& out) {
  out << "# " << metric_name << " vs " << t.axis_name << "\n# " << t.axis_name;
  for (const std::string& m : t.modes) out << " " << m << "_mean " << m << "_std";
  out << "\n";
  for (const std::string& v : t.axis_values) {
    out << v;
    for (const std::string& m : t.modes) {
      auto it = metric.find({v, m});
      if (it == metric.end())
        out << " nan nan";
      else {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " %.9f %.9f", it->second.mean, it->second.stddev);
        out << buf;
      }
    }
    out << "\n";
  }
}

}  // namespace cccn
