#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <set>
#include <vector>

#include "cccn/errors.hpp"
#include "cccn/topology.hpp"

namespace cccn {

// Directed multigraph; each arc is one unit-capacity edge.
struct Digraph {
  int node_count = 0;
  std::vector<std::pair<int, int>> arcs;  // (tail, head), parallel arcs allowed

  void add_arc(int u, int v) {
    if (u == v) throw InvalidParameters("self-loop rejected");
    if (u < 0 || v < 0 || u >= node_count || v >= node_count)
      throw InvalidParameters("arc endpoint out of range");
    arcs.push_back({u, v});
  }

  bool is_acyclic() const {
    std::vector<int> indeg(node_count, 0);
    for (auto [u, v] : arcs) ++indeg[v];
    std::deque<int> q;
    for (int i = 0; i < node_count; ++i)
      if (indeg[i] == 0) q.push_back(i);
    int seen = 0;
    std::vector<std::vector<int>> out(node_count);
    for (auto [u, v] : arcs) out[u].push_back(v);
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      ++seen;
      for (int v : out[u])
        if (--indeg[v] == 0) q.push_back(v);
    }
    return seen == node_count;
  }
};

// Unit-capacity expansion of a Topology: every link of capacity c yields
// c * units_per_gbps parallel unit arcs in each direction.
struct UnitGraph {
  int node_count = 0;
  std::vector<std::pair<int, int>> arcs;
  std::vector<int> multiplicity;  // parallel count per stored arc

  void add(int u, int v, int mult) {
    arcs.push_back({u, v});
    multiplicity.push_back(mult);
  }

  long long total_unit_edges() const {
    long long s = 0;
    for (int m : multiplicity) s += m;
    return s;
  }
};

inline UnitGraph expand_units(const Topology& t, int units_per_gbps = 1) {
  if (units_per_gbps < 1) throw InvalidParameters("units_per_gbps must be positive");
  UnitGraph g;
  g.node_count = t.node_count();
  for (const Link& l : t.links()) {
    int mult = l.capacity_units * units_per_gbps;
    g.add(l.u, l.v, mult);
    g.add(l.v, l.u, mult);
  }
  return g;
}

namespace detail {

// Edmonds-Karp with integer capacities (parallel unit edges collapsed).
class FlowNetwork {
 public:
  explicit FlowNetwork(int n) : head_(n) {}

  void add_arc(int u, int v, long long cap) {
    head_[u].push_back(static_cast<int>(to_.size()));
    to_.push_back(v);
    cap_.push_back(cap);
    head_[v].push_back(static_cast<int>(to_.size()));
    to_.push_back(u);
    cap_.push_back(0);  // residual twin at index ^ 1
  }

  long long max_flow(int s, int t) {
    long long flow = 0;
    const long long INF = std::numeric_limits<long long>::max();
    std::vector<int> parent_arc(head_.size());
    for (;;) {
      std::fill(parent_arc.begin(), parent_arc.end(), -1);
      parent_arc[s] = -2;
      std::deque<int> q{s};
      while (!q.empty() && parent_arc[t] == -1) {
        int u = q.front();
        q.pop_front();
        for (int a : head_[u])
          if (cap_[a] > 0 && parent_arc[to_[a]] == -1) {
            parent_arc[to_[a]] = a;
            q.push_back(to_[a]);
          }
      }
      if (parent_arc[t] == -1) return flow;
      long long push = INF;
      for (int v = t; v != s;) {
        int a = parent_arc[v];
        push = std::min(push, cap_[a]);
        v = to_[a ^ 1];
      }
      for (int v = t; v != s;) {
        int a = parent_arc[v];
        cap_[a] -= push;
        cap_[a ^ 1] += push;
        v = to_[a ^ 1];
      }
      flow += push;
    }
  }

 private:
  std::vector<std::vector<int>> head_;
  std::vector<int> to_;
  std::vector<long long> cap_;
};

}  // namespace detail

// Max flow from a virtual super-source (infinite-capacity arcs to every
// source) to the sink. On unit-capacity multigraphs this equals the min-cut
// and the number of edge-disjoint paths; 0 when the sink is unreachable.
inline long long max_flow_min_cut(const UnitGraph& g, const std::set<int>& sources, int sink) {
  if (sources.empty()) throw InvalidParameters("empty source set");
  if (sources.count(sink)) throw InvalidParameters("sink is a source");
  detail::FlowNetwork net(g.node_count + 1);
  int super = g.node_count;
  long long inf = 1;
  for (int m : g.multiplicity) inf += m;
  for (int s : sources) net.add_arc(super, s, inf);
  for (std::size_t i = 0; i < g.arcs.size(); ++i)
    net.add_arc(g.arcs[i].first, g.arcs[i].second, g.multiplicity[i]);
  return net.max_flow(super, sink);
}

inline long long max_flow_min_cut(const Digraph& g, const std::set<int>& sources, int sink) {
  UnitGraph u;
  u.node_count = g.node_count;
  for (auto [a, b] : g.arcs) u.add(a, b, 1);
  return max_flow_min_cut(u, sources, sink);
}

// Line graph of a delivery DAG: one vertex per arc, an arc e1 -> e2 whenever
// head(e1) = tail(e2). Its adjacency pattern is the structural pattern of T.
struct LineGraph {
  std::vector<std::pair<int, int>> vertices;  // the underlying arcs
  std::vector<std::pair<int, int>> arcs;      // (vertex index, vertex index)
};

inline LineGraph build_line_graph(const Digraph& g) {
  if (!g.is_acyclic()) throw CyclicDeliveryGraph();
  LineGraph lg;
  lg.vertices = g.arcs;
  std::vector<std::vector<int>> arcs_from(g.node_count);
  for (std::size_t i = 0; i < g.arcs.size(); ++i)
    arcs_from[g.arcs[i].first].push_back(static_cast<int>(i));
  for (std::size_t e1 = 0; e1 < g.arcs.size(); ++e1)
    for (int e2 : arcs_from[g.arcs[e1].second])
      lg.arcs.push_back({static_cast<int>(e1), e2});
  return lg;
}

// Longest path length in the DAG (arcs traversed); bounds the nilpotency
// index of T.
inline int longest_path_length(const Digraph& g) {
  if (!g.is_acyclic()) throw CyclicDeliveryGraph();
  std::vector<std::vector<int>> out(g.node_count);
  std::vector<int> indeg(g.node_count, 0);
  for (auto [u, v] : g.arcs) {
    out[u].push_back(v);
    ++indeg[v];
  }
  std::deque<int> q;
  std::vector<int> depth(g.node_count, 0);
  for (int i = 0; i < g.node_count; ++i)
    if (indeg[i] == 0) q.push_back(i);
  int best = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : out[u]) {
      depth[v] = std::max(depth[v], depth[u] + 1);
      best = std::max(best, depth[v]);
      if (--indeg[v] == 0) q.push_back(v);
    }
  }
  return best;
}

}  // namespace cccn
