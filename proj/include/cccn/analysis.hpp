#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cccn/coding.hpp"
#include "cccn/netgraph.hpp"
#include "cccn/topology.hpp"

namespace cccn {

struct AnalysisReport {
  std::vector<int> gateways;
  std::vector<long long> per_gateway_mincut;
  long long min_mincut = 0;
  long long sum_mincut = 0;  // min-over-gateways and the weighted sum both matter
  std::vector<int> coding_points;
  DegreeReport degrees;
  int field_m = 8;
  double feasibility = 0.0;
  int fullrank_trials = 0;
  int fullrank_failures = 0;

  std::string to_string() const {
    std::ostringstream os;
    os << "gateway min-cuts:";
    for (std::size_t i = 0; i < gateways.size(); ++i)
      os << " R" << gateways[i] << "=" << per_gateway_mincut[i];
    os << "\nmin over gateways: " << min_mincut
       << "   weighted sum over gateways: " << sum_mincut << "\ncoding points:";
    if (coding_points.empty()) os << " none";
    for (int v : coding_points) os << " " << v;
    os << "\ndet degree bounds:";
    for (std::size_t i = 0; i < gateways.size(); ++i)
      os << " R" << gateways[i] << "=" << degrees.per_gateway_det_degree[i];
    os << "\npolynomial degree d (bound): " << degrees.total_degree
       << "\nfeasibility bound d/2^m (m=" << field_m << "): " << feasibility
       << "\nsampled full rank: " << (fullrank_trials - fullrank_failures) << "/"
       << fullrank_trials << " draws"
       << (fullrank_failures == 0 ? " (all decodable)" : "") << "\n";
    return os.str();
  }
};

// Orientation of an undirected topology into a delivery DAG: multi-source
// BFS levels from the source set, keeping the links that sit on a shortest
// path toward at least one gateway. Strictly increasing levels keep it
// acyclic regardless of how the per-source paths braid.
inline Digraph build_analysis_dag(const Topology& topo, const std::vector<int>& sources,
                                  const std::vector<int>& gateways) {
  int n = topo.node_count();
  std::vector<int> dist(n, -1);
  std::deque<int> q;
  for (int s : sources) {
    dist[s] = 0;
    q.push_back(s);
  }
  auto adj = topo.adjacency();
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (auto [v, li] : adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
  }
  std::vector<std::vector<int>> dist_g;
  for (int g : gateways) dist_g.push_back(topo.bfs_distances(g));
  auto useful = [&](int v) {
    for (std::size_t gi = 0; gi < gateways.size(); ++gi) {
      int g = gateways[gi];
      if (dist[g] < 0) continue;
      if (dist[v] >= 0 && dist_g[gi][v] >= 0 && dist[v] + dist_g[gi][v] == dist[g])
        return true;
    }
    return false;
  };
  Digraph dag;
  dag.node_count = n;
  for (const Link& l : topo.links()) {
    int u = l.u, v = l.v;
    if (dist[u] < 0 || dist[v] < 0) continue;
    int from = -1, to = -1;
    if (dist[v] == dist[u] + 1) { from = u; to = v; }
    else if (dist[u] == dist[v] + 1) { from = v; to = u; }
    else continue;
    if (!useful(from) || !useful(to)) continue;
    for (int c = 0; c < l.capacity_units; ++c) dag.add_arc(from, to);
  }
  return dag;
}

// Flow-feasibility tooling on a delivery DAG: per-gateway min-cut, coding points,
// the symbolic degree bound with its Schwartz-Zippel bound, and a sampled
// full-rank verdict under b = h = 1.
inline AnalysisReport analyze_delivery_dag(const Digraph& dag,
                                           const std::vector<int>& source_nodes,
                                           const std::vector<int>& gateways, int m,
                                           int trials, std::uint64_t seed) {
  AnalysisReport rep;
  rep.gateways = gateways;
  rep.field_m = m;
  std::set<int> src_set(source_nodes.begin(), source_nodes.end());
  for (int g : gateways)
    rep.per_gateway_mincut.push_back(
        src_set.count(g) ? 0 : max_flow_min_cut(dag, src_set, g));
  rep.min_mincut = rep.per_gateway_mincut.empty()
                       ? 0
                       : *std::min_element(rep.per_gateway_mincut.begin(),
                                           rep.per_gateway_mincut.end());
  for (long long c : rep.per_gateway_mincut) rep.sum_mincut += c;
  rep.coding_points = coding_points(dag, gateways);

  std::vector<SourceSpec> sources;
  for (std::size_t i = 0; i < source_nodes.size(); ++i)
    sources.push_back({source_nodes[i], static_cast<int>(i)});
  LineGraph lg = build_line_graph(dag);
  rep.degrees = transfer_degree_bound(lg, sources, gateways, true);
  rep.feasibility = feasibility_bound(rep.degrees.total_degree, m);

  Field field(FieldParams::standard(m));
  rep.fullrank_trials = trials;
  for (int t = 0; t < trials; ++t) {
    CodingAssignment ca = draw_coefficients(lg, sources, gateways, field.params(),
                                            Rng::derive(seed, t), true);
    SystemMatrices sm = build_system_matrices(lg, ca, sources, gateways);
    bool ok = true;
    for (std::size_t g = 0; g < gateways.size(); ++g) {
      TransferMatrix tm = compute_transfer_matrix(field, sm, static_cast<int>(g));
      if (!verify_full_rank(field, tm)) { ok = false; break; }
    }
    if (!ok) ++rep.fullrank_failures;
  }
  return rep;
}

}  // namespace cccn
