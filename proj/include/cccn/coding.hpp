#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cccn/errors.hpp"
#include "cccn/gf.hpp"
#include "cccn/matrix.hpp"
#include "cccn/netgraph.hpp"
#include "cccn/rng.hpp"

namespace cccn {

// A payload plus its coding vector over the K segments of one content
// object. A plain segment i is the unit-vector special case e_i.
struct CodedSymbol {
  std::uint64_t content_id = 0;
  int generation_size = 0;  // K
  std::vector<FieldElement> coding_vector;
  std::vector<FieldElement> payload;

  static CodedSymbol plain(std::uint64_t content, int k, int segment,
                           std::vector<FieldElement> payload) {
    CodedSymbol s;
    s.content_id = content;
    s.generation_size = k;
    s.coding_vector.assign(k, 0);
    s.coding_vector[segment] = 1;
    s.payload = std::move(payload);
    return s;
  }

  bool is_plain() const {
    int nonzero = 0;
    for (FieldElement v : coding_vector)
      if (v) ++nonzero;
    return nonzero == 1 &&
           *std::max_element(coding_vector.begin(), coding_vector.end()) == 1;
  }

  // Segment index when the vector is the unit vector e_i, else -1.
  int plain_segment() const {
    if (!is_plain()) return -1;
    for (std::size_t i = 0; i < coding_vector.size(); ++i)
      if (coding_vector[i]) return static_cast<int>(i);
    return -1;
  }
};

// One injection point: `node` contributes source row `segment`.
struct SourceSpec {
  int node = 0;
  int segment = 0;
};

struct CodingAssignment {
  FieldParams field;
  std::uint64_t rng_seed = 0;
  std::vector<FieldElement> tau;                             // per line-graph arc
  std::vector<std::vector<FieldElement>> b;                  // [source][out-arc slot]
  std::vector<FieldElement> h;                               // per observation slot
  std::vector<std::vector<int>> source_out_arcs;             // [source] -> arc ids
  std::vector<std::pair<int, int>> observation_slots;        // (gateway idx, arc id)
};

// Uniform independent coefficients for every line-graph arc, source
// injection and gateway observation. `unit_injection` pins b = h = 1, the
// convention of the worked transform-matrix example.
inline CodingAssignment draw_coefficients(const LineGraph& lg,
                                          const std::vector<SourceSpec>& sources,
                                          const std::vector<int>& gateways,
                                          const FieldParams& field,
                                          std::uint64_t seed,
                                          bool unit_injection = false) {
  CodingAssignment ca;
  ca.field = field;
  ca.rng_seed = seed;
  Rng rng(seed);
  const std::uint32_t n = 1u << field.m;
  ca.tau.resize(lg.arcs.size());
  for (auto& t : ca.tau) t = static_cast<FieldElement>(rng.below(n));
  ca.b.resize(sources.size());
  ca.source_out_arcs.resize(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t e = 0; e < lg.vertices.size(); ++e)
      if (lg.vertices[e].first == sources[i].node)
        ca.source_out_arcs[i].push_back(static_cast<int>(e));
    for (std::size_t j = 0; j < ca.source_out_arcs[i].size(); ++j)
      ca.b[i].push_back(unit_injection ? FieldElement{1}
                                       : static_cast<FieldElement>(rng.below(n)));
  }
  for (std::size_t g = 0; g < gateways.size(); ++g)
    for (std::size_t e = 0; e < lg.vertices.size(); ++e)
      if (lg.vertices[e].second == gateways[g]) {
        ca.observation_slots.push_back({static_cast<int>(g), static_cast<int>(e)});
        ca.h.push_back(unit_injection ? FieldElement{1}
                                      : static_cast<FieldElement>(rng.below(n)));
      }
  return ca;
}

// The network-level matrix system. Orientation: T(dst, src) carries the
// coefficient of line-graph arc src -> dst, so symbol columns propagate as
// C' = T C. B is stored with source rows and edge columns; its
// transpose injects.
struct SystemMatrices {
  Matrix B;  // sources x E
  Matrix T;  // E x E
  Matrix H;  // observation slots x E
  std::vector<std::pair<int, int>> observation_slots;  // (gateway idx, arc id)
  int edge_count = 0;
};

inline SystemMatrices build_system_matrices(const LineGraph& lg,
                                            const CodingAssignment& ca,
                                            const std::vector<SourceSpec>& sources,
                                            const std::vector<int>& gateways) {
  const std::size_t E = lg.vertices.size();
  if (ca.tau.size() != lg.arcs.size() && !(lg.arcs.empty() && ca.tau.empty()))
    throw InconsistentStructure("coefficient count != line-graph arc count");
  if (ca.b.size() != sources.size())
    throw InconsistentStructure("injection rows != source count");
  SystemMatrices sm;
  sm.edge_count = static_cast<int>(E);
  sm.B = Matrix(sources.size(), E);
  sm.T = Matrix(E, E);
  sm.H = Matrix(ca.observation_slots.size(), E);
  sm.observation_slots = ca.observation_slots;
  for (std::size_t a = 0; a < lg.arcs.size(); ++a)
    sm.T(lg.arcs[a].second, lg.arcs[a].first) =
        Field::add(sm.T(lg.arcs[a].second, lg.arcs[a].first), ca.tau[a]);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (ca.b[i].size() != ca.source_out_arcs[i].size())
      throw InconsistentStructure("injection coefficients misaligned");
    for (std::size_t j = 0; j < ca.source_out_arcs[i].size(); ++j)
      sm.B(i, ca.source_out_arcs[i][j]) = ca.b[i][j];
  }
  for (std::size_t s = 0; s < ca.observation_slots.size(); ++s) {
    if (ca.observation_slots[s].first >= static_cast<int>(gateways.size()))
      throw InconsistentStructure("observation slot beyond gateway list");
    sm.H(s, ca.observation_slots[s].second) = ca.h[s];
  }
  return sm;
}

struct TransferMatrix {
  int gateway = 0;  // index into the gateway list
  Matrix t;         // observation slots of this gateway x sources
};

// I + T + T^2 + ... until the powers vanish; T from an acyclic delivery
// graph is nilpotent so this is the exact (I - T)^{-1}.
inline Matrix nilpotent_power_sum(const Field& f, const Matrix& t) {
  const std::size_t e = t.rows();
  Matrix sum = Matrix::identity(e);
  Matrix power = t;
  for (std::size_t i = 0; i < e && !power.is_zero(); ++i) {
    sum = mat_add(sum, power);
    power = mat_mul(f, power, t);
  }
  if (!power.is_zero()) throw CyclicDeliveryGraph();
  return sum;
}

inline TransferMatrix compute_transfer_matrix(const Field& f, const SystemMatrices& sm,
                                              int gateway) {
  Matrix reach = mat_mul(f, nilpotent_power_sum(f, sm.T), sm.B.transposed());
  std::vector<int> slots;
  for (std::size_t s = 0; s < sm.observation_slots.size(); ++s)
    if (sm.observation_slots[s].first == gateway) slots.push_back(static_cast<int>(s));
  Matrix hj(slots.size(), sm.H.cols());
  for (std::size_t r = 0; r < slots.size(); ++r)
    for (std::size_t c = 0; c < sm.H.cols(); ++c) hj(r, c) = sm.H(slots[r], c);
  TransferMatrix tm;
  tm.gateway = gateway;
  tm.t = mat_mul(f, hj, reach);
  return tm;
}

// Decodable iff the gateway sees one independent combination per source.
inline bool verify_full_rank(const Field& f, const TransferMatrix& tm) {
  return mat_rank(f, tm.t) == tm.t.cols();
}

// Schwartz-Zippel: P[prod_j det(T_j) = 0] <= d / 2^m.
inline double feasibility_bound(long long poly_degree, int m) {
  if (poly_degree < 0) return 1.0;  // identically zero product
  double b = static_cast<double>(poly_degree) / static_cast<double>(1u << m);
  return b > 1.0 ? 1.0 : b;
}

// ---- symbolic degree bookkeeping ------------------------------------------
// Upper bound on polynomial degrees in the drawn coefficients, tracked as
// max-plus arithmetic through the same power-series route. -1 marks the zero
// polynomial.

using DegMatrix = std::vector<std::vector<int>>;

namespace detail {

inline DegMatrix dmat(std::size_t r, std::size_t c) {
  return DegMatrix(r, std::vector<int>(c, -1));
}

inline DegMatrix dmat_mul(const DegMatrix& a, const DegMatrix& b) {
  DegMatrix out = dmat(a.size(), b.empty() ? 0 : b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] < 0) continue;
      for (std::size_t j = 0; j < out[i].size(); ++j)
        if (b[k][j] >= 0) out[i][j] = std::max(out[i][j], a[i][k] + b[k][j]);
    }
  return out;
}

inline DegMatrix dmat_add(const DegMatrix& a, const DegMatrix& b) {
  DegMatrix out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] = std::max(a[i][j], b[i][j]);
  return out;
}

inline bool dmat_all_zero(const DegMatrix& a) {
  for (const auto& row : a)
    for (int v : row)
      if (v >= 0) return false;
  return true;
}

// deg(det) <= min over orientations of the sum of row (column) maxima.
inline int dmat_det_bound(const DegMatrix& a) {
  long long by_row = 0, by_col = 0;
  std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    int mr = -1, mc = -1;
    for (std::size_t j = 0; j < n; ++j) {
      mr = std::max(mr, a[i][j]);
      mc = std::max(mc, a[j][i]);
    }
    if (mr < 0 || mc < 0) return -1;  // zero row or column: det == 0
    by_row += mr;
    by_col += mc;
  }
  return static_cast<int>(std::min(by_row, by_col));
}

}  // namespace detail

struct DegreeReport {
  std::vector<int> per_gateway_det_degree;  // -1: identically singular
  long long total_degree = 0;               // degree bound of prod_j det(T_j)
  bool identically_singular = false;
};

// Degree bound of prod_j det(T_j) as a polynomial in the drawn coefficients.
// tau entries count degree 1; b/h count 1 unless pinned to unit constants.
inline DegreeReport transfer_degree_bound(const LineGraph& lg,
                                          const std::vector<SourceSpec>& sources,
                                          const std::vector<int>& gateways,
                                          bool unit_injection = true) {
  const std::size_t E = lg.vertices.size();
  DegMatrix T = detail::dmat(E, E);
  for (auto [from, to] : lg.arcs) T[to][from] = 1;
  DegMatrix Binj = detail::dmat(E, sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i)
    for (std::size_t e = 0; e < E; ++e)
      if (lg.vertices[e].first == sources[i].node) Binj[e][i] = unit_injection ? 0 : 1;
  DegMatrix sum = detail::dmat(E, E);
  for (std::size_t i = 0; i < E; ++i) sum[i][i] = 0;
  DegMatrix power = T;
  for (std::size_t i = 0; i < E && !detail::dmat_all_zero(power); ++i) {
    sum = detail::dmat_add(sum, power);
    power = detail::dmat_mul(power, T);
  }
  DegMatrix reach = detail::dmat_mul(sum, Binj);
  DegreeReport report;
  for (int g : gateways) {
    std::vector<int> in_arcs;
    for (std::size_t e = 0; e < E; ++e)
      if (lg.vertices[e].second == g) in_arcs.push_back(static_cast<int>(e));
    DegMatrix tj = detail::dmat(in_arcs.size(), sources.size());
    for (std::size_t r = 0; r < in_arcs.size(); ++r)
      for (std::size_t c = 0; c < sources.size(); ++c)
        if (reach[in_arcs[r]][c] >= 0)
          tj[r][c] = reach[in_arcs[r]][c] + (unit_injection ? 0 : 1);
    int d = tj.size() == sources.size() ? detail::dmat_det_bound(tj) : -1;
    report.per_gateway_det_degree.push_back(d);
    if (d < 0)
      report.identically_singular = true;
    else
      report.total_degree += d;
  }
  if (report.identically_singular) report.total_degree = -1;
  return report;
}

// Junction nodes where disjoint flows overlap: in-degree >= 2 and not a
// decode point.
inline std::vector<int> coding_points(const Digraph& g, const std::vector<int>& gateways) {
  std::vector<int> indeg(g.node_count, 0);
  for (auto [u, v] : g.arcs) ++indeg[v];
  std::vector<int> points;
  for (int v = 0; v < g.node_count; ++v)
    if (indeg[v] >= 2 &&
        std::find(gateways.begin(), gateways.end(), v) == gateways.end())
      points.push_back(v);
  return points;
}

// ---- node-level encode / gateway decode ------------------------------------

struct LocalSegment {
  int segment = 0;
  std::vector<FieldElement> payload;
};

// c_out = sum tau_k c_k + sum b_i e_i, payload combined with the same
// coefficients so vector and payload stay consistent.
inline CodedSymbol encode_node(const Field& f, std::uint64_t content_id, int k,
                               const std::vector<CodedSymbol>& incoming,
                               const std::vector<FieldElement>& taus,
                               const std::vector<LocalSegment>& locals,
                               const std::vector<FieldElement>& bs) {
  if (incoming.empty() && locals.empty()) throw NothingToEncode();
  if (incoming.size() != taus.size() || locals.size() != bs.size())
    throw InconsistentStructure("coefficient count mismatch");
  std::size_t payload_len = incoming.empty() ? locals[0].payload.size()
                                             : incoming[0].payload.size();
  CodedSymbol out;
  out.content_id = content_id;
  out.generation_size = k;
  out.coding_vector.assign(k, 0);
  out.payload.assign(payload_len, 0);
  for (std::size_t i = 0; i < incoming.size(); ++i) {
    const CodedSymbol& in = incoming[i];
    if (in.content_id != content_id || in.generation_size != k) throw MixedGeneration();
    for (int c = 0; c < k; ++c)
      out.coding_vector[c] =
          Field::add(out.coding_vector[c], f.mul(taus[i], in.coding_vector[c]));
    for (std::size_t p = 0; p < payload_len; ++p)
      out.payload[p] = Field::add(out.payload[p], f.mul(taus[i], in.payload[p]));
  }
  for (std::size_t i = 0; i < locals.size(); ++i) {
    out.coding_vector[locals[i].segment] =
        Field::add(out.coding_vector[locals[i].segment], bs[i]);
    for (std::size_t p = 0; p < payload_len; ++p)
      out.payload[p] = Field::add(out.payload[p], f.mul(bs[i], locals[i].payload[p]));
  }
  return out;
}

// Incremental reduced-echelon basis of coding vectors with payloads carried
// through the same row operations. Backs innovation checks, cache admission
// and the gateway decoder.
class EchelonBasis {
 public:
  explicit EchelonBasis(int k) : k_(k) {}

  int rank() const { return static_cast<int>(rows_.size()); }
  int generation_size() const { return k_; }

  // Returns false (and discards) when the vector lies in the current span.
  bool add(const Field& f, std::vector<FieldElement> vec, std::vector<FieldElement> payload) {
    reduce(f, vec, payload);
    int pivot = first_nonzero(vec);
    if (pivot < 0) return false;
    FieldElement inv = f.inv(vec[pivot]);
    scale(f, vec, payload, inv);
    // Back-eliminate the new pivot from existing rows to stay in RREF.
    for (Row& row : rows_) {
      FieldElement factor = row.vec[pivot];
      if (!factor) continue;
      axpy(f, row.vec, vec, factor);
      axpy(f, row.payload, payload, factor);
    }
    Row r{pivot, std::move(vec), std::move(payload)};
    auto it = std::lower_bound(rows_.begin(), rows_.end(), r,
                               [](const Row& a, const Row& b) { return a.pivot < b.pivot; });
    rows_.insert(it, std::move(r));
    return true;
  }

  bool would_be_innovative(const Field& f, std::vector<FieldElement> vec) const {
    std::vector<FieldElement> dummy;
    reduce(f, vec, dummy);
    return first_nonzero(vec) >= 0;
  }

  // e_segment lies in the span iff its RREF row is exactly the unit vector.
  bool segment_recoverable(int segment) const {
    const Row* row = row_with_pivot(segment);
    if (!row) return false;
    for (int c = 0; c < k_; ++c)
      if (row->vec[c] != (c == segment ? 1 : 0)) return false;
    return true;
  }

  std::optional<std::vector<FieldElement>> segment_payload(int segment) const {
    if (!segment_recoverable(segment)) return std::nullopt;
    return row_with_pivot(segment)->payload;
  }

 private:
  struct Row {
    int pivot;
    std::vector<FieldElement> vec;
    std::vector<FieldElement> payload;
  };

  static int first_nonzero(const std::vector<FieldElement>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i]) return static_cast<int>(i);
    return -1;
  }

  static void scale(const Field& f, std::vector<FieldElement>& vec,
                    std::vector<FieldElement>& payload, FieldElement c) {
    for (auto& x : vec) x = f.mul(x, c);
    for (auto& x : payload) x = f.mul(x, c);
  }

  // dst += factor * src
  static void axpy(const Field& f, std::vector<FieldElement>& dst,
                   const std::vector<FieldElement>& src, FieldElement factor) {
    for (std::size_t i = 0; i < dst.size() && i < src.size(); ++i)
      dst[i] = Field::add(dst[i], f.mul(factor, src[i]));
  }

  void reduce(const Field& f, std::vector<FieldElement>& vec,
              std::vector<FieldElement>& payload) const {
    for (const Row& row : rows_) {
      FieldElement factor = vec[row.pivot];
      if (!factor) continue;
      axpy(f, vec, row.vec, factor);
      if (!payload.empty()) axpy(f, payload, row.payload, factor);
    }
  }

  const Row* row_with_pivot(int segment) const {
    for (const Row& r : rows_)
      if (r.pivot == segment) return &r;
    return nullptr;
  }

  int k_;
  std::vector<Row> rows_;
};

inline bool is_innovative(const Field& f, const CodedSymbol& sym,
                          const std::vector<CodedSymbol>& basis) {
  if (sym.coding_vector.empty()) return false;
  EchelonBasis eb(sym.generation_size);
  for (const CodedSymbol& b : basis) {
    if (b.content_id != sym.content_id || b.generation_size != sym.generation_size)
      throw MixedGeneration();
    eb.add(f, b.coding_vector, {});
  }
  return eb.would_be_innovative(f, sym.coding_vector);
}

// Solves the received system; requires rank K across the stacked vectors.
inline std::vector<std::pair<int, std::vector<FieldElement>>> decode_gateway(
    const Field& f, const std::vector<CodedSymbol>& symbols) {
  if (symbols.empty()) throw InsufficientRank();
  const int k = symbols[0].generation_size;
  EchelonBasis eb(k);
  for (const CodedSymbol& s : symbols) {
    if (s.content_id != symbols[0].content_id || s.generation_size != k)
      throw MixedGeneration();
    eb.add(f, s.coding_vector, s.payload);
  }
  if (eb.rank() < k) throw InsufficientRank();
  std::vector<std::pair<int, std::vector<FieldElement>>> out;
  for (int seg = 0; seg < k; ++seg) out.push_back({seg, *eb.segment_payload(seg)});
  return out;
}

}  // namespace cccn
