#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "cccn/config.hpp"

namespace cccn {

inline std::uint64_t fnv1a_64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot hash missing file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a_64(bytes)));
  return buf;
}

// Every run emits a manifest: the resolved configuration plus a hash per
// emitted file, so any run can be replayed and byte-compared.
struct RunManifest {
  std::string config_path;
  std::map<std::string, std::string> resolved_config;
  std::string out_dir;
  std::map<std::string, std::string> artifacts;  // filename -> fnv1a-64 hex

  void save(const std::string& path) const {
    nlohmann::json j;
    j["config_path"] = config_path;
    j["resolved_config"] = resolved_config;
    j["out_dir"] = out_dir;
    j["artifacts"] = artifacts;
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
  }

  static RunManifest load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read manifest: " + path);
    nlohmann::json j;
    in >> j;
    RunManifest m;
    m.config_path = j.value("config_path", "");
    m.out_dir = j.value("out_dir", "");
    for (auto& [k, v] : j.at("resolved_config").items())
      m.resolved_config[k] = v.get<std::string>();
    if (j.contains("artifacts"))
      for (auto& [k, v] : j.at("artifacts").items())
        m.artifacts[k] = v.get<std::string>();
    return m;
  }

  ExperimentConfig to_config() const {
    ExperimentConfig cfg;
    for (auto& [k, v] : resolved_config) cfg.set(k, v);
    return cfg;
  }
};

}  // namespace cccn
