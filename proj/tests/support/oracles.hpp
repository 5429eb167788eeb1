#pragma once

// Independent brute-force oracles the implementation is checked against.
// Everything here favors obviousness over speed.

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "cccn/coding.hpp"
#include "cccn/matrix.hpp"
#include "cccn/netgraph.hpp"
#include "cccn/rng.hpp"

namespace oracle {

// Schoolbook carry-less multiply reduced modulo poly, no tables.
inline std::uint32_t gf_mul(std::uint32_t a, std::uint32_t b, std::uint32_t poly, int m) {
  std::uint32_t acc = 0;
  for (int i = 0; i < m; ++i)
    if (b >> i & 1u) acc ^= a << i;
  for (int d = 2 * m - 2; d >= m; --d)
    if (acc >> d & 1u) acc ^= poly << (d - m);
  return acc;
}

// Is the arc subset `removed` enough to disconnect all sources from sink?
inline bool disconnects(const cccn::Digraph& g, const std::set<int>& sources, int sink,
                        std::uint32_t removed_mask) {
  std::vector<int> stack(sources.begin(), sources.end());
  std::set<int> seen(sources.begin(), sources.end());
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (u == sink) return false;
    for (std::size_t a = 0; a < g.arcs.size(); ++a) {
      if (removed_mask >> a & 1u) continue;
      if (g.arcs[a].first != u) continue;
      if (seen.insert(g.arcs[a].second).second) stack.push_back(g.arcs[a].second);
    }
  }
  return true;
}

// Minimum disconnecting arc set by exhaustive subset search.
inline int brute_min_cut(const cccn::Digraph& g, const std::set<int>& sources, int sink) {
  int e = static_cast<int>(g.arcs.size());
  for (int size = 0; size <= e; ++size)
    for (std::uint32_t mask = 0; mask < (1u << e); ++mask) {
      if (__builtin_popcount(mask) != size) continue;
      if (disconnects(g, sources, sink, mask)) return size;
    }
  return e;
}

// Maximum number of arc-disjoint source->sink paths by exhaustive packing.
inline int max_disjoint_paths(const cccn::Digraph& g, const std::set<int>& sources, int sink,
                              std::uint32_t used_mask = 0) {
  // Find any path avoiding used arcs, then recurse over each choice of path.
  // Depth-first over paths; returns the best packing.
  struct Walker {
    const cccn::Digraph& g;
    const std::set<int>& sources;
    int sink;
    int best = 0;

    void paths_from(int u, std::uint32_t used, std::vector<int>& arcs_taken,
                    std::vector<std::vector<int>>& all_paths, std::set<int>& on_path) {
      if (u == sink) {
        all_paths.push_back(arcs_taken);
        return;
      }
      if (all_paths.size() > 400) return;  // plenty for <=10 arcs
      for (std::size_t a = 0; a < g.arcs.size(); ++a) {
        if (used >> a & 1u) continue;
        if (g.arcs[a].first != u) continue;
        if (on_path.count(g.arcs[a].second)) continue;
        arcs_taken.push_back(static_cast<int>(a));
        on_path.insert(g.arcs[a].second);
        paths_from(g.arcs[a].second, used | (1u << a), arcs_taken, all_paths, on_path);
        on_path.erase(g.arcs[a].second);
        arcs_taken.pop_back();
      }
    }

    int pack(std::uint32_t used) {
      int best_here = 0;
      for (int s : sources) {
        std::vector<std::vector<int>> all_paths;
        std::vector<int> taken;
        std::set<int> on_path{s};
        paths_from(s, used, taken, all_paths, on_path);
        for (const auto& path : all_paths) {
          std::uint32_t mask = used;
          for (int a : path) mask |= 1u << a;
          best_here = std::max(best_here, 1 + pack(mask));
        }
      }
      return best_here;
    }
  };
  Walker w{g, sources, sink};
  return w.pack(used_mask);
}

// Unrolls C_{k+1} = B^T Seg_k + T C_k with the source vector held constant
// until the fixed point, then reads the gateway observations. Column i of
// the returned matrix is the response to source i.
inline cccn::Matrix transfer_by_recurrence(const cccn::Field& f, const cccn::SystemMatrices& sm,
                                           int gateway) {
  using cccn::Matrix;
  std::size_t e = sm.T.rows();
  std::size_t n_sources = sm.B.rows();
  Matrix binj = sm.B.transposed();
  std::vector<int> slots;
  for (std::size_t s = 0; s < sm.observation_slots.size(); ++s)
    if (sm.observation_slots[s].first == gateway) slots.push_back(static_cast<int>(s));
  Matrix result(slots.size(), n_sources);
  for (std::size_t i = 0; i < n_sources; ++i) {
    Matrix seg(n_sources, 1);
    seg(i, 0) = 1;
    Matrix c(e, 1);
    for (std::size_t step = 0; step <= e + 2; ++step)
      c = cccn::mat_add(cccn::mat_mul(f, binj, seg), cccn::mat_mul(f, sm.T, c));
    Matrix w = cccn::mat_mul(f, sm.H, c);
    for (std::size_t r = 0; r < slots.size(); ++r) result(r, i) = w(slots[r], 0);
  }
  return result;
}

// Random connected-ish DAG with `nodes` nodes and up to `max_arcs` arcs,
// arcs oriented low id -> high id so acyclicity is structural.
inline cccn::Digraph random_dag(cccn::Rng& rng, int nodes, int max_arcs) {
  cccn::Digraph g;
  g.node_count = nodes;
  int arcs = 1 + static_cast<int>(rng.below(max_arcs));
  for (int i = 0; i < arcs; ++i) {
    int u = static_cast<int>(rng.below(nodes - 1));
    int v = u + 1 + static_cast<int>(rng.below(nodes - 1 - u));
    g.add_arc(u, v);
  }
  return g;
}

}  // namespace oracle
