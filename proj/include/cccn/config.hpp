#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cccn/errors.hpp"
#include "cccn/packets.hpp"

namespace cccn {

// Scenario parameters. Defaults follow the experimental setup: 100-router
// BA core, 5 publishers, 15 gateways, Zipf 0.7 popularity, 10 x 10 MB
// segments per object, 1 Gbps links (100 unit edges), LFRU with a 20%
// unprivileged share, 5% coding processing overhead and 0.5-1% loss. The
// catalog and request volume default to the desk-scale profile; the full
// 50000-object profile is reachable through `catalog_size`.
struct ExperimentConfig {
  int nodes = 100;
  int m_attach = 4;
  int publishers = 5;
  int gateways = 15;
  long catalog_size = 1000;        // full profile: 50000
  double zipf_alpha = 0.7;
  int segments_per_object = 10;    // K
  long long segment_bytes = 10'000'000;
  double link_gbps = 1.0;
  int units_per_gbps = 100;
  // Data-plane link rate in segments per second per direction. The flow
  // model counts 100 parallel unit edges of 1 seg/s per link; this keeps the
  // delay model on the same footing.
  double link_capacity_seg_per_s = 100.0;
  // Publisher origin links are provisioned ingress, not a contended
  // resource; their rate is this multiple of a core link.
  double publisher_capacity_factor = 100.0;
  long long cache_bytes = 1'000'000'000;
  double arrival_rate = 100.0;     // lambda_j^d, per gateway, req/s
  double coding_overhead = 1.05;   // multiplier on data processing when coding
  double data_proc_time = 0.001;   // seconds per data packet at a router
  double prop_delay_unit = 0.001;  // seconds per topology delay unit
  double loss_rate = 0.0075;       // per data-packet hop
  Mode mode = Mode::ccn;
  double warmup_fraction = 0.2;
  long total_requests = 10000;     // drives duration when duration == 0
  double duration = 0.0;
  std::uint64_t seed = 1;
  int symbol_len = 64;             // payload field elements per segment
  int field_m = 8;
  int hop_limit = 32;
  double batch_tick = 0.01;        // co-residence window for coding decisions
  int stripe_limit = 1;            // equal-cost faces one object is striped over in CCCN
  bool coded_storage_replaces = true;  // batch cached as one combination
  bool coded_serve_always = false;     // paper-literal coded replies
  bool interior_coded_storage = true;  // relay caches keep batch combinations
  double rtt_timeout_factor = 4.0;
  int max_reissues = 5;
  long long max_events = 80'000'000;
  int verbosity = 0;

  double derived_duration() const {
    if (duration > 0) return duration;
    return static_cast<double>(total_requests) / (arrival_rate * gateways);
  }

  long cache_capacity_segments() const {
    return static_cast<long>(cache_bytes / segment_bytes);
  }

  void validate() const {
    if (nodes < 3) throw ConfigError("nodes must be >= 3");
    if (m_attach < 1 || m_attach >= nodes) throw ConfigError("require nodes > m_attach >= 1");
    if (publishers < 0 || gateways < 1 || publishers + gateways > nodes)
      throw ConfigError("publishers + gateways must fit in the node count");
    if (catalog_size < 1) throw ConfigError("catalog_size must be positive");
    if (zipf_alpha < 0) throw ConfigError("zipf_alpha must be >= 0");
    if (segments_per_object < 1) throw ConfigError("segments_per_object must be positive");
    if (segment_bytes < 1) throw ConfigError("segment_bytes must be positive");
    if (link_gbps <= 0) throw ConfigError("link_gbps must be positive");
    if (link_capacity_seg_per_s <= 0)
      throw ConfigError("link_capacity_seg_per_s must be positive");
    if (publisher_capacity_factor < 1)
      throw ConfigError("publisher_capacity_factor must be >= 1");
    if (units_per_gbps < 1) throw ConfigError("units_per_gbps must be positive");
    if (cache_bytes < 0) throw ConfigError("cache_bytes must be >= 0");
    if (arrival_rate <= 0) throw ConfigError("arrival_rate must be positive");
    if (coding_overhead < 1.0) throw ConfigError("coding_overhead must be >= 1");
    if (data_proc_time < 0 || prop_delay_unit < 0) throw ConfigError("times must be >= 0");
    if (loss_rate < 0 || loss_rate >= 1) throw ConfigError("loss_rate must be in [0,1)");
    if (warmup_fraction < 0 || warmup_fraction >= 1)
      throw ConfigError("warmup_fraction must be in [0,1)");
    if (total_requests < 0) throw ConfigError("total_requests must be >= 0");
    if (symbol_len < 1) throw ConfigError("symbol_len must be positive");
    if (field_m != 4 && field_m != 8 && field_m != 16)
      throw ConfigError("field_m must be one of 4, 8, 16");
    if (hop_limit < 1) throw ConfigError("hop_limit must be positive");
    if (batch_tick <= 0) throw ConfigError("batch_tick must be positive");
    if (stripe_limit < 1) throw ConfigError("stripe_limit must be >= 1");
    if (max_reissues < 0) throw ConfigError("max_reissues must be >= 0");
  }

  std::map<std::string, std::string> to_map() const;
  void set(const std::string& key, const std::string& value);
};

namespace detail {

inline long long parse_ll(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected integer, got '" + v + "'");
  }
}

inline double parse_d(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected number, got '" + v + "'");
  }
}

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

inline void ExperimentConfig::set(const std::string& key, const std::string& value) {
  using detail::parse_d;
  using detail::parse_ll;
  if (key == "nodes") nodes = static_cast<int>(parse_ll(key, value));
  else if (key == "m_attach") m_attach = static_cast<int>(parse_ll(key, value));
  else if (key == "publishers") publishers = static_cast<int>(parse_ll(key, value));
  else if (key == "gateways") gateways = static_cast<int>(parse_ll(key, value));
  else if (key == "catalog_size") catalog_size = static_cast<long>(parse_ll(key, value));
  else if (key == "zipf_alpha") zipf_alpha = parse_d(key, value);
  else if (key == "segments_per_object") segments_per_object = static_cast<int>(parse_ll(key, value));
  else if (key == "segment_bytes") segment_bytes = parse_ll(key, value);
  else if (key == "link_gbps") link_gbps = parse_d(key, value);
  else if (key == "units_per_gbps") units_per_gbps = static_cast<int>(parse_ll(key, value));
  else if (key == "link_capacity_seg_per_s") link_capacity_seg_per_s = parse_d(key, value);
  else if (key == "publisher_capacity_factor") publisher_capacity_factor = parse_d(key, value);
  else if (key == "cache_bytes") cache_bytes = parse_ll(key, value);
  else if (key == "arrival_rate") arrival_rate = parse_d(key, value);
  else if (key == "coding_overhead") coding_overhead = parse_d(key, value);
  else if (key == "data_proc_time") data_proc_time = parse_d(key, value);
  else if (key == "prop_delay_unit") prop_delay_unit = parse_d(key, value);
  else if (key == "loss_rate") loss_rate = parse_d(key, value);
  else if (key == "mode") mode = parse_mode(value);
  else if (key == "warmup_fraction") warmup_fraction = parse_d(key, value);
  else if (key == "total_requests") total_requests = static_cast<long>(parse_ll(key, value));
  else if (key == "duration") duration = parse_d(key, value);
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_ll(key, value));
  else if (key == "symbol_len") symbol_len = static_cast<int>(parse_ll(key, value));
  else if (key == "field_m") field_m = static_cast<int>(parse_ll(key, value));
  else if (key == "hop_limit") hop_limit = static_cast<int>(parse_ll(key, value));
  else if (key == "batch_tick") batch_tick = parse_d(key, value);
  else if (key == "stripe_limit") stripe_limit = static_cast<int>(parse_ll(key, value));
  else if (key == "coded_storage_replaces") coded_storage_replaces = parse_ll(key, value) != 0;
  else if (key == "coded_serve_always") coded_serve_always = parse_ll(key, value) != 0;
  else if (key == "interior_coded_storage") interior_coded_storage = parse_ll(key, value) != 0;
  else if (key == "rtt_timeout_factor") rtt_timeout_factor = parse_d(key, value);
  else if (key == "max_reissues") max_reissues = static_cast<int>(parse_ll(key, value));
  else if (key == "max_events") max_events = parse_ll(key, value);
  else if (key == "verbosity") verbosity = static_cast<int>(parse_ll(key, value));
  else throw ConfigError("unknown config key: " + key);
}

inline std::map<std::string, std::string> ExperimentConfig::to_map() const {
  using detail::fmt_double;
  std::map<std::string, std::string> m;
  m["nodes"] = std::to_string(nodes);
  m["m_attach"] = std::to_string(m_attach);
  m["publishers"] = std::to_string(publishers);
  m["gateways"] = std::to_string(gateways);
  m["catalog_size"] = std::to_string(catalog_size);
  m["zipf_alpha"] = fmt_double(zipf_alpha);
  m["segments_per_object"] = std::to_string(segments_per_object);
  m["segment_bytes"] = std::to_string(segment_bytes);
  m["link_gbps"] = fmt_double(link_gbps);
  m["units_per_gbps"] = std::to_string(units_per_gbps);
  m["link_capacity_seg_per_s"] = fmt_double(link_capacity_seg_per_s);
  m["publisher_capacity_factor"] = fmt_double(publisher_capacity_factor);
  m["cache_bytes"] = std::to_string(cache_bytes);
  m["arrival_rate"] = fmt_double(arrival_rate);
  m["coding_overhead"] = fmt_double(coding_overhead);
  m["data_proc_time"] = fmt_double(data_proc_time);
  m["prop_delay_unit"] = fmt_double(prop_delay_unit);
  m["loss_rate"] = fmt_double(loss_rate);
  m["mode"] = mode_name(mode);
  m["warmup_fraction"] = fmt_double(warmup_fraction);
  m["total_requests"] = std::to_string(total_requests);
  m["duration"] = fmt_double(duration);
  m["seed"] = std::to_string(seed);
  m["symbol_len"] = std::to_string(symbol_len);
  m["field_m"] = std::to_string(field_m);
  m["hop_limit"] = std::to_string(hop_limit);
  m["batch_tick"] = fmt_double(batch_tick);
  m["stripe_limit"] = std::to_string(stripe_limit);
  m["coded_storage_replaces"] = coded_storage_replaces ? "1" : "0";
  m["coded_serve_always"] = coded_serve_always ? "1" : "0";
  m["interior_coded_storage"] = interior_coded_storage ? "1" : "0";
  m["rtt_timeout_factor"] = fmt_double(rtt_timeout_factor);
  m["max_reissues"] = std::to_string(max_reissues);
  m["max_events"] = std::to_string(max_events);
  m["verbosity"] = std::to_string(verbosity);
  return m;
}

// Flat key=value file, `#` comments, blank lines ignored.
inline ExperimentConfig load_config(std::istream& in) {
  ExperimentConfig cfg;
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
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return load_config(in);
}

}  // namespace cccn
