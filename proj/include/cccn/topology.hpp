#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stack>
#include <string>
#include <vector>

#include "cccn/errors.hpp"
#include "cccn/rng.hpp"

namespace cccn {

struct Link {
  int u = 0;
  int v = 0;
  int capacity_units = 1;   // multiples of the base link rate (1 Gbps)
  int prop_delay = 1;       // time units per hop
};

// Undirected cache-router graph G = (V, E). Per-content delivery orientations
// are derived elsewhere; this container stays direction-free.
class Topology {
 public:
  explicit Topology(int node_count = 0) : node_count_(node_count) {}

  int node_count() const { return node_count_; }
  const std::vector<Link>& links() const { return links_; }

  void add_link(Link l) {
    if (l.u == l.v) throw InvalidParameters("self-loop rejected");
    if (l.u < 0 || l.v < 0 || l.u >= node_count_ || l.v >= node_count_)
      throw InvalidParameters("link endpoint out of range");
    if (l.capacity_units <= 0) throw InvalidParameters("capacity must be positive");
    links_.push_back(l);
  }

  // Adjacency as (neighbor, link index) pairs, both directions.
  std::vector<std::vector<std::pair<int, int>>> adjacency() const {
    std::vector<std::vector<std::pair<int, int>>> adj(node_count_);
    for (std::size_t i = 0; i < links_.size(); ++i) {
      adj[links_[i].u].push_back({links_[i].v, static_cast<int>(i)});
      adj[links_[i].v].push_back({links_[i].u, static_cast<int>(i)});
    }
    return adj;
  }

  std::vector<int> degrees() const {
    std::vector<int> deg(node_count_, 0);
    for (const Link& l : links_) {
      ++deg[l.u];
      ++deg[l.v];
    }
    return deg;
  }

  // Hop distances from src; -1 where unreachable.
  std::vector<int> bfs_distances(int src) const {
    std::vector<int> dist(node_count_, -1);
    auto adj = adjacency();
    std::deque<int> q{src};
    dist[src] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (auto [v, li] : adj[u])
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push_back(v);
        }
    }
    return dist;
  }

  bool connected() const {
    if (node_count_ == 0) return true;
    auto d = bfs_distances(0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
  }

 private:
  int node_count_;
  std::vector<Link> links_;
};

// Barabasi-Albert preferential attachment: triangle seed, m_attach edges per
// new node, duplicate targets redrawn. Reproducible from the seed alone.
inline Topology generate_ba(int n, int m_attach, std::uint64_t seed) {
  if (m_attach < 1 || n <= m_attach) throw InvalidParameters("require n > m_attach >= 1");
  Topology t(n);
  if (n < 3) {  // degenerate seeds below the triangle
    if (n == 2) t.add_link({0, 1, 1, 1});
    return t;
  }
  t.add_link({0, 1, 1, 1});
  t.add_link({1, 2, 1, 1});
  t.add_link({0, 2, 1, 1});
  Rng rng(seed);
  // One entry per edge endpoint; sampling it is degree-proportional.
  std::vector<int> endpoints = {0, 1, 1, 2, 0, 2};
  for (int v = 3; v < n; ++v) {
    std::vector<int> targets;
    while (static_cast<int>(targets.size()) < std::min(m_attach, v)) {
      int candidate = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), candidate) == targets.end())
        targets.push_back(candidate);
    }
    for (int tgt : targets) {
      t.add_link({v, tgt, 1, 1});
      endpoints.push_back(v);
      endpoints.push_back(tgt);
    }
  }
  return t;
}

// Brandes shortest-path betweenness, unweighted, endpoints excluded.
inline std::vector<double> betweenness_centrality(const Topology& t) {
  int n = t.node_count();
  std::vector<double> score(n, 0.0);
  auto adj = t.adjacency();
  for (int s = 0; s < n; ++s) {
    std::vector<std::vector<int>> preds(n);
    std::vector<double> sigma(n, 0.0), delta(n, 0.0);
    std::vector<int> dist(n, -1);
    std::vector<int> order;
    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<int> q{s};
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      order.push_back(u);
      for (auto [v, li] : adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push_back(v);
        }
        if (dist[v] == dist[u] + 1) {
          sigma[v] += sigma[u];
          preds[v].push_back(u);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int w = *it;
      for (int p : preds[w]) delta[p] += sigma[p] / sigma[w] * (1.0 + delta[w]);
      if (w != s) score[w] += delta[w];
    }
  }
  // Undirected: every pair was counted twice.
  for (double& x : score) x /= 2.0;
  return score;
}

struct RoleAssignment {
  std::vector<int> publishers;  // attach routers, highest centrality
  std::vector<int> gateways;    // lowest centrality
  std::vector<double> centrality;
};

inline RoleAssignment assign_roles(const Topology& t, int n_publishers, int n_gateways) {
  if (n_publishers + n_gateways > t.node_count())
    throw InvalidParameters("more roles than nodes");
  RoleAssignment roles;
  roles.centrality = betweenness_centrality(t);
  int n = t.node_count();
  std::vector<int> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  // Ties broken by lower node id.
  std::stable_sort(by_rank.begin(), by_rank.end(), [&](int a, int b) {
    if (roles.centrality[a] != roles.centrality[b])
      return roles.centrality[a] > roles.centrality[b];
    return a < b;
  });
  roles.publishers.assign(by_rank.begin(), by_rank.begin() + n_publishers);
  std::vector<int> rest(by_rank.begin() + n_publishers, by_rank.end());
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
    if (roles.centrality[a] != roles.centrality[b])
      return roles.centrality[a] < roles.centrality[b];
    return a < b;
  });
  roles.gateways.assign(rest.begin(), rest.begin() + n_gateways);
  std::sort(roles.publishers.begin(), roles.publishers.end());
  std::sort(roles.gateways.begin(), roles.gateways.end());
  return roles;
}

// Plain text edge list: one `u v capacity_units prop_delay` line per link,
// `#` starts a comment. Used by the CLI for fixed-topology regressions.
inline Topology load_topology(std::istream& in) {
  std::vector<Link> links;
  int max_node = -1;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Link l;
    if (!(ls >> l.u >> l.v)) continue;
    if (!(ls >> l.capacity_units)) l.capacity_units = 1;
    if (!(ls >> l.prop_delay)) l.prop_delay = 1;
    links.push_back(l);
    max_node = std::max({max_node, l.u, l.v});
  }
  Topology t(max_node + 1);
  for (const Link& l : links) t.add_link(l);
  return t;
}

inline Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameters("cannot open topology file: " + path);
  return load_topology(in);
}

inline void save_topology(const Topology& t, std::ostream& out) {
  out << "# node_count " << t.node_count() << "\n";
  for (const Link& l : t.links())
    out << l.u << " " << l.v << " " << l.capacity_units << " " << l.prop_delay << "\n";
}

}  // namespace cccn
