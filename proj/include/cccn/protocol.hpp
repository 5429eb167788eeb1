#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cccn/cache.hpp"
#include "cccn/coding.hpp"
#include "cccn/packets.hpp"
#include "cccn/rng.hpp"
#include "cccn/topology.hpp"

namespace cccn {

using FaceId = std::int64_t;

// Core faces carry the neighbor's node id. Negative ids are virtual:
// the attached publisher and per-request consumer-space faces.
constexpr FaceId kPublisherFace = -1;
constexpr FaceId kConsumerFaceBase = -1000;

inline FaceId consumer_face(std::uint64_t request_id) {
  return kConsumerFaceBase - static_cast<FaceId>(request_id);
}
inline bool is_consumer_face(FaceId f) { return f <= kConsumerFaceBase; }
inline std::uint64_t request_of_face(FaceId f) {
  return static_cast<std::uint64_t>(kConsumerFaceBase - f);
}

// Deterministic per-(content, segment, position) payload elements, so plain
// segments never need storage and every decoded payload can be audited.
inline std::vector<FieldElement> payload_of(std::uint64_t content, int segment,
                                            int symbol_len, FieldElement mask) {
  std::vector<FieldElement> p(symbol_len);
  Rng rng(Rng::derive(content * 131ULL + 7, static_cast<std::uint64_t>(segment)));
  for (auto& e : p) e = static_cast<FieldElement>(rng.next()) & mask;
  return p;
}

// ---- PIT --------------------------------------------------------------------

struct PitFace {
  FaceId face = 0;
  std::uint64_t nonce = 0;
};

// Relay accounting is exact: the entry keeps the echelon basis of every
// coding vector it forwarded, restricted to its wanted coordinates. A symbol
// is relayed only while it adds rank for this entry, and the entry dies the
// moment a rank-complete set has passed - combination-satisfied entries
// cannot linger, and redundant combinations stop cascading.
struct PitEntry {
  std::uint64_t content_id = 0;
  std::vector<int> wanted;  // sorted; the aggregation key with content_id
  std::vector<PitFace> downstream;
  std::set<int> outstanding;  // segments not yet seen as plain data
  double created = 0.0;
  double expiry = 0.0;
  EchelonBasis forwarded{0};

  bool satisfied() const {
    return forwarded.rank() >= static_cast<int>(wanted.size());
  }

  std::vector<FieldElement> restrict(const std::vector<FieldElement>& vec) const {
    std::vector<FieldElement> r(wanted.size(), 0);
    for (std::size_t i = 0; i < wanted.size(); ++i)
      if (wanted[i] < static_cast<int>(vec.size())) r[i] = vec[wanted[i]];
    return r;
  }

  // True when the symbol still carries information for this entry.
  bool offer(const Field& f, const std::vector<FieldElement>& coding_vector) {
    return forwarded.add(f, restrict(coding_vector), {});
  }

  void reset_for_retransmit() {
    forwarded = EchelonBasis(static_cast<int>(wanted.size()));
    outstanding.clear();
    outstanding.insert(wanted.begin(), wanted.end());
  }
};

enum class PitOutcome { new_entry, aggregated, duplicate, retransmit };

class Pit {
 public:
  // Same face with a fresh nonce is a consumer retransmission: the entry is
  // refreshed and the interest forwarded again instead of being absorbed.
  PitOutcome aggregate(std::uint64_t content, const std::vector<int>& wanted,
                       FaceId face, std::uint64_t nonce, double now, double lifetime) {
    auto& list = entries_[content];
    sweep_list(list, now);
    for (PitEntry& e : list)
      if (e.wanted == wanted) {
        for (PitFace& pf : e.downstream) {
          if (pf.face == face && pf.nonce == nonce) return PitOutcome::duplicate;
          if (pf.face == face) {
            pf.nonce = nonce;
            e.expiry = std::max(e.expiry, now + lifetime);
            e.reset_for_retransmit();  // the consumer evidently still waits
            return PitOutcome::retransmit;
          }
        }
        e.downstream.push_back({face, nonce});
        e.expiry = std::max(e.expiry, now + lifetime);
        return PitOutcome::aggregated;
      }
    PitEntry e;
    e.content_id = content;
    e.wanted = wanted;
    e.downstream.push_back({face, nonce});
    e.outstanding.insert(wanted.begin(), wanted.end());
    e.created = now;
    e.expiry = now + lifetime;
    e.forwarded = EchelonBasis(static_cast<int>(wanted.size()));
    list.push_back(std::move(e));
    return PitOutcome::new_entry;
  }

  // Live entries for a content object.
  std::vector<PitEntry*> match(std::uint64_t content, double now) {
    auto it = entries_.find(content);
    std::vector<PitEntry*> out;
    if (it == entries_.end()) return out;
    sweep_list(it->second, now);
    for (PitEntry& e : it->second) out.push_back(&e);
    return out;
  }

  // Marks a plain segment satisfied everywhere; satisfied entries go.
  void consume(const Field& f, std::uint64_t content, int segment, int k) {
    auto it = entries_.find(content);
    if (it == entries_.end()) return;
    auto& list = it->second;
    for (PitEntry& e : list)
      if (e.outstanding.erase(segment)) {
        std::vector<FieldElement> unit(k, 0);
        unit[segment] = 1;
        e.offer(f, unit);
      }
    list.erase(std::remove_if(list.begin(), list.end(),
                              [](const PitEntry& e) { return e.satisfied(); }),
               list.end());
    if (list.empty()) entries_.erase(it);
  }

  void drop_satisfied(std::uint64_t content) {
    auto it = entries_.find(content);
    if (it == entries_.end()) return;
    auto& list = it->second;
    list.erase(std::remove_if(list.begin(), list.end(),
                              [](const PitEntry& e) { return e.satisfied(); }),
               list.end());
    if (list.empty()) entries_.erase(it);
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto& [c, list] : entries_) n += list.size();
    return n;
  }

 private:
  static void sweep_list(std::vector<PitEntry>& list, double now) {
    list.erase(std::remove_if(list.begin(), list.end(),
                              [now](const PitEntry& e) { return e.expiry <= now; }),
               list.end());
  }

  std::unordered_map<std::uint64_t, std::vector<PitEntry>> entries_;
};

// ---- FIB --------------------------------------------------------------------

// Static shortest-path routing toward each publisher's attach router. Every
// (name, segment) prefix maps to one fixed face; when several equal-cost
// faces exist, CCCN stripes segments across them so a content object is
// delivered over edge-disjoint-leaning paths (the multi-source setting the
// coding feasibility results assume), while CCN and IP pin an object to one.
class Fib {
 public:
  Fib() = default;

  Fib(const Topology& topo, const std::vector<int>& publisher_routers) {
    int n = topo.node_count();
    dist_.assign(publisher_routers.size(), {});
    hops_.assign(n, std::vector<std::vector<int>>(publisher_routers.size()));
    auto adj = topo.adjacency();
    for (std::size_t p = 0; p < publisher_routers.size(); ++p) {
      dist_[p] = topo.bfs_distances(publisher_routers[p]);
      for (int v = 0; v < n; ++v) {
        if (dist_[p][v] <= 0) continue;  // attach router forwards to the publisher face
        std::vector<int>& hops = hops_[v][p];
        for (auto [nbr, li] : adj[v])
          if (dist_[p][nbr] == dist_[p][v] - 1) hops.push_back(nbr);
        std::sort(hops.begin(), hops.end());
        hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
      }
    }
  }

  int distance(int node, int publisher) const { return dist_[publisher][node]; }

  const std::vector<int>& hops(int node, int publisher) const {
    return hops_[node][publisher];
  }

  FaceId face_for(int node, int publisher, std::uint64_t content, int segment,
                  Mode mode, int stripe_limit = 2) const {
    if (dist_[publisher][node] == 0) return kPublisherFace;
    const std::vector<int>& h = hops_[node][publisher];
    std::uint64_t base = content % h.size();
    if (mode != Mode::cccn) return h[base];
    std::uint64_t stripes =
        std::min<std::uint64_t>(h.size(), std::max(1, stripe_limit));
    return h[(base + static_cast<std::uint64_t>(segment) % stripes) % h.size()];
  }

  // Partition of the wanted set by forwarding face, face-ascending.
  std::vector<std::pair<FaceId, std::vector<int>>> split(
      int node, int publisher, std::uint64_t content, const std::vector<int>& wanted,
      Mode mode, int stripe_limit = 2) const {
    std::map<FaceId, std::vector<int>> parts;
    for (int seg : wanted)
      parts[face_for(node, publisher, content, seg, mode, stripe_limit)].push_back(seg);
    return {parts.begin(), parts.end()};
  }

 private:
  std::vector<std::vector<int>> dist_;                 // [publisher][node]
  std::vector<std::vector<std::vector<int>>> hops_;    // [node][publisher]
};

// ---- node state -------------------------------------------------------------

struct NodeCounters {
  long long interests_in = 0;
  long long interests_forwarded = 0;
  long long interests_aggregated = 0;
  long long interests_dropped_hoplimit = 0;
  long long interests_dropped_nonce = 0;
  long long data_in = 0;
  long long data_forwarded = 0;
  long long data_discarded = 0;
  long long plain_replies = 0;
  long long coded_replies = 0;
  long long coding_ops = 0;
  long long combine_inputs = 0;
  long long cache_hits_plain = 0;
  long long cache_hits_coded = 0;
  long long multi_edge_batches = 0;
};

struct Node {
  int id = 0;
  bool is_gateway = false;
  int attached_publisher = -1;  // publisher index whose origin face is here
  ContentStore cs{0};
  Pit pit;
  std::unordered_map<std::uint64_t, std::unordered_set<std::uint64_t>> seen_nonces;
  std::unordered_map<std::uint64_t, EchelonBasis> decode_buffers;  // gateway only
  // Rank already served from this cache per (content, origin), so two
  // sub-interests of one request can never both draw on the same stored
  // degrees of freedom.
  std::unordered_map<std::uint64_t, EchelonBasis> serve_memory;
  std::deque<std::uint64_t> serve_memory_order;
  NodeCounters counters;

  EchelonBasis& serve_state(std::uint64_t content, std::uint64_t origin, int k) {
    std::uint64_t key = content * 0x9e3779b97f4a7c15ULL ^ origin;
    auto it = serve_memory.find(key);
    if (it != serve_memory.end()) return it->second;
    if (serve_memory.size() >= 8192) {
      serve_memory.erase(serve_memory_order.front());
      serve_memory_order.pop_front();
    }
    serve_memory_order.push_back(key);
    return serve_memory.try_emplace(key, k).first->second;
  }
};

struct NodeEnv {
  const Field* field = nullptr;
  int k = 10;
  int symbol_len = 64;
  Mode mode = Mode::ccn;
  long long segment_bytes = 10'000'000;
  double pit_lifetime = 1.0;
  int hop_limit = 32;
  int stripe_limit = 1;  // max equal-cost faces one object is striped over
  // Whether a multi-symbol batch is cached as one combination in place of
  // its plain members (true) or the combination is stored alongside them.
  bool coded_storage_replaces = true;
  // Store batch combinations at relay caches at all. Gateways always keep
  // the coded symbols they receive.
  bool interior_coded_storage = true;
  // Paper-literal interest handling replies with whatever innovative coded
  // symbols are stored and always forwards the unmodified interest. The
  // default only answers when the stored rank covers the whole residual,
  // which is when the reply actually displaces upstream traffic.
  bool coded_serve_always = false;
};

inline DataPacket make_plain_data(const NodeEnv& env, const std::string& name,
                                  std::uint64_t content, int segment) {
  CodedSymbol sym = CodedSymbol::plain(
      content, env.k, segment,
      payload_of(content, segment, env.symbol_len, env.field->mask()));
  return DataPacket::from_symbol(name, std::move(sym), env.segment_bytes);
}

// ---- Algorithm 1: interest handling ----------------------------------------

struct InterestActions {
  std::vector<DataPacket> replies;  // sent back on the arrival face
  std::vector<std::pair<FaceId, InterestPacket>> forwards;
  bool dropped = false;
  const char* drop_reason = "";
  int aggregated = 0;  // sub-interests absorbed by existing PIT entries
};

// Cache check, partial replies, interest rewrite and PIT-gated forwarding.
// Coded cache hits are served as freshly recoded combinations and the
// segments their rank covers are dropped from the forwarded interest.
inline InterestActions handle_interest(Node& node, const NodeEnv& env, const Fib& fib,
                                       int publisher, const InterestPacket& pkt,
                                       FaceId in_face, double now, Rng& rng) {
  InterestActions out;
  ++node.counters.interests_in;
  if (pkt.hop_limit <= 0) {
    out.dropped = true;
    out.drop_reason = "hop-limit";
    ++node.counters.interests_dropped_hoplimit;
    return out;
  }
  auto& nonces = node.seen_nonces[pkt.content_id];
  if (!nonces.insert(pkt.nonce).second) {
    out.dropped = true;
    out.drop_reason = "duplicate-nonce";
    ++node.counters.interests_dropped_nonce;
    return out;
  }

  std::vector<int> wanted = pkt.wanted(env.k);
  std::vector<int> residual = wanted;
  if (env.mode != Mode::ip) {
    LookupResult lr = node.cs.lookup(pkt.content_id, wanted, now);
    node.counters.cache_hits_plain += static_cast<long long>(lr.plain_hits.size());
    for (int seg : lr.plain_hits) {
      out.replies.push_back(make_plain_data(env, pkt.name, pkt.content_id, seg));
      ++node.counters.plain_replies;
    }
    residual = lr.missing;
    if (!residual.empty() && env.mode == Mode::cccn && !pkt.plain_only &&
        !lr.coded_hits.empty()) {
      // Coded hits substitute for the upstream fetch only when the stored
      // rank covers the entire residual beyond what this cache has already
      // served toward the same consumer request. Replies are fresh random
      // recodings; replaying the stored vectors verbatim would hand a
      // retrying or sibling interest nothing new.
      std::set<int> missing(residual.begin(), residual.end());
      EchelonBasis& memory = node.serve_state(pkt.content_id, pkt.origin, env.k);
      EchelonBasis selection = memory;
      for (int s = 0; s < env.k; ++s)
        if (!missing.count(s)) {
          std::vector<FieldElement> unit(env.k, 0);
          unit[s] = 1;
          selection.add(*env.field, std::move(unit), {});
        }
      std::vector<CodedSymbol> selected;
      for (const CodedSymbol& sym : lr.coded_hits)
        if (selection.add(*env.field, sym.coding_vector, {})) selected.push_back(sym);
      // The residual interest is dropped only when the served rank covers
      // it completely - "the rest" is then empty. A partly covering store
      // still replies (the surplus absorbs losses) but the whole residual
      // stays in the forwarded interest: skipping single segments would tie
      // their recovery to the slowest plain chain.
      bool full_cover = !selected.empty();
      for (int s : residual) {
        std::vector<FieldElement> unit(env.k, 0);
        unit[s] = 1;
        if (selection.would_be_innovative(*env.field, unit)) {
          full_cover = false;
          break;
        }
      }
      if (!selected.empty() && (env.coded_serve_always || full_cover)) {
        for (std::size_t i = 0; i < selected.size(); ++i) {
          std::vector<FieldElement> cs(selected.size());
          CodedSymbol mix;
          for (int attempt = 0; attempt < 4; ++attempt) {
            for (auto& c : cs)
              c = static_cast<FieldElement>(rng.below(1u << env.field->m()));
            mix = encode_node(*env.field, pkt.content_id, env.k, selected, cs, {}, {});
            if (memory.would_be_innovative(*env.field, mix.coding_vector)) break;
          }
          if (!memory.add(*env.field, mix.coding_vector, {})) {
            mix = selected[i];
            memory.add(*env.field, mix.coding_vector, {});
          }
          out.replies.push_back(
              DataPacket::from_symbol(pkt.name, std::move(mix), env.segment_bytes));
          ++node.counters.coded_replies;
          ++node.counters.cache_hits_coded;
        }
        if (full_cover && !env.coded_serve_always) residual.clear();
      }
    }
  }
  if (residual.empty()) return out;

  auto parts =
      fib.split(node.id, publisher, pkt.content_id, residual, env.mode, env.stripe_limit);
  for (auto& [face, part] : parts) {
    std::uint64_t child_nonce = pkt.nonce;
    if (parts.size() > 1) {
      std::uint64_t digest = 0;
      for (int s : part) digest = digest * 31 + static_cast<std::uint64_t>(s) + 1;
      child_nonce = Rng::derive(pkt.nonce, digest);
    }
    PitOutcome po =
        node.pit.aggregate(pkt.content_id, part, in_face, pkt.nonce, now, env.pit_lifetime);
    if (po == PitOutcome::new_entry || po == PitOutcome::retransmit) {
      InterestPacket sub = make_interest(pkt.name, pkt.content_id, part, env.k,
                                         pkt.hop_limit - 1, child_nonce, pkt.plain_only);
      sub.origin = pkt.origin;
      out.forwards.push_back({face, std::move(sub)});
      ++node.counters.interests_forwarded;
    } else if (po == PitOutcome::aggregated) {
      ++out.aggregated;
      ++node.counters.interests_aggregated;
    }
  }
  return out;
}

// ---- Algorithm 2: coding decision -------------------------------------------

struct ArrivedData {
  DataPacket pkt;
  FaceId in_face = 0;
};

struct DataActions {
  std::vector<std::pair<FaceId, DataPacket>> forwards;
  int coding_ops = 0;
  int combine_inputs = 0;
  int discarded = 0;
  int stored = 0;
};

namespace detail {

inline std::vector<int> identity_key(const DataPacket& p) { return p.d_info; }

// A packet is relayed toward an entry's faces only while its coding vector
// adds rank for that entry; anything redundant stops here.
inline std::vector<FaceId> faces_for_packet(const Field& f, Pit& pit,
                                            const DataPacket& pkt,
                                            const std::set<FaceId>& exclude, double now) {
  std::set<FaceId> faces;
  bool any_offer = false;
  for (PitEntry* e : pit.match(pkt.content_id, now)) {
    if (e->satisfied()) continue;
    std::vector<FaceId> candidate;
    for (const PitFace& pf : e->downstream)
      if (!exclude.count(pf.face)) candidate.push_back(pf.face);
    if (candidate.empty()) continue;
    if (!e->offer(f, pkt.symbol.coding_vector)) continue;
    any_offer = true;
    faces.insert(candidate.begin(), candidate.end());
  }
  if (any_offer) pit.drop_satisfied(pkt.content_id);
  return {faces.begin(), faces.end()};
}

}  // namespace detail

inline void cs_draw(Rng& rng, const NodeEnv& env, FieldElement& c) {
  c = static_cast<FieldElement>(rng.below(1u << env.field->m()));
}

// Batch handling of the data packets of one content object that are
// co-resident at a router within one processing step.
//   CASE 1: copies of one segment set arriving on different edges with a PIT
//           match collapse into one fresh combination per downstream face.
//   CASE 2: arrivals on different edges at a custodian are combined with the
//           locally held segments (the b terms) before forwarding.
//   CASE 3: same-edge arrivals are cached and relayed without combining.
// Forwarding always follows live PIT faces; unsolicited data is discarded.
inline DataActions coding_decision(Node& node, const NodeEnv& env,
                                   const std::vector<ArrivedData>& batch, Rng& rng,
                                   double now) {
  DataActions out;
  if (batch.empty()) return out;
  const std::uint64_t content = batch[0].pkt.content_id;
  const std::string& name = batch[0].pkt.name;
  node.counters.data_in += static_cast<long long>(batch.size());

  std::set<FaceId> in_faces;
  for (const ArrivedData& a : batch) in_faces.insert(a.in_face);
  const bool multi_edge = in_faces.size() >= 2 && env.mode == Mode::cccn;
  if (in_faces.size() >= 2) ++node.counters.multi_edge_batches;

  std::vector<bool> consumed(batch.size(), false);
  // Keyed on the coding vector: exact duplicates collapse, distinct
  // combinations of the same segment span do not.
  std::set<std::pair<FaceId, std::vector<FieldElement>>> already_sent;

  auto forward_packet = [&](const DataPacket& pkt, const std::vector<FaceId>& faces) {
    bool sent = false;
    for (FaceId f : faces) {
      if (!already_sent.insert({f, pkt.symbol.coding_vector}).second) continue;
      out.forwards.push_back({f, pkt});
      ++node.counters.data_forwarded;
      sent = true;
    }
    return sent;
  };

  auto lfru_store = [&](const DataPacket& pkt) {
    if (env.mode == Mode::ip) return;
    StoredItem item;
    item.content_id = pkt.content_id;
    if (pkt.d_type == 0) {
      item.kind = ItemKind::plain;
      item.segment = pkt.symbol.plain_segment();
    } else {
      item.kind = ItemKind::coded;
      item.symbol = pkt.symbol;
    }
    node.cs.insert(item, now);
    ++out.stored;
  };

  auto fresh_coeffs = [&](std::size_t n) {
    std::vector<FieldElement> cs(n);
    for (auto& c : cs) cs_draw(rng, env, c);
    return cs;
  };

  // CASE 1: same-identity groups spanning several in-edges.
  if (multi_edge) {
    std::map<std::vector<int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < batch.size(); ++i)
      groups[detail::identity_key(batch[i].pkt)].push_back(i);
    for (auto& [key, members] : groups) {
      if (members.size() < 2) continue;
      std::set<FaceId> member_faces;
      for (std::size_t i : members) member_faces.insert(batch[i].in_face);
      if (member_faces.size() < 2) continue;
      std::vector<FaceId> faces = detail::faces_for_packet(
          *env.field, node.pit, batch[members[0]].pkt, member_faces, now);
      if (faces.empty()) continue;
      std::vector<CodedSymbol> inputs;
      for (std::size_t i : members) inputs.push_back(batch[i].pkt.symbol);
      bool forwarded = false;
      for (FaceId f : faces) {
        CodedSymbol combined =
            encode_node(*env.field, content, env.k, inputs, fresh_coeffs(inputs.size()), {}, {});
        if (std::all_of(combined.coding_vector.begin(), combined.coding_vector.end(),
                        [](FieldElement v) { return v == 0; }))
          continue;  // zero draw; counted against the feasibility bound
        DataPacket dp = DataPacket::from_symbol(name, std::move(combined), env.segment_bytes);
        forwarded |= forward_packet(dp, {f});
        if (f == faces.front()) lfru_store(dp);
      }
      ++out.coding_ops;
      out.combine_inputs += static_cast<int>(members.size());
      ++node.counters.coding_ops;
      node.counters.combine_inputs += static_cast<long long>(members.size());
      for (int seg : key) node.pit.consume(*env.field, content, seg, env.k);
      for (std::size_t i : members) consumed[i] = true;
      if (!forwarded) out.discarded += static_cast<int>(members.size());
    }
  }

  // CASE 2: residual multi-edge arrivals at a custodian are mixed with every
  // locally held segment of the object. Each downstream face receives as
  // many independent combinations as it still has outstanding segments in
  // the combined span, so no receiver loses degrees of freedom, while the
  // extra locally injected dimensions ride along as loss protection.
  if (multi_edge) {
    std::vector<std::size_t> residual;
    std::set<FaceId> residual_faces;
    for (std::size_t i = 0; i < batch.size(); ++i)
      if (!consumed[i]) {
        residual.push_back(i);
        residual_faces.insert(batch[i].in_face);
      }
    std::vector<int> held = node.cs.plain_segments(content);
    if (residual.size() >= 2 && residual_faces.size() >= 2 && !held.empty()) {
      std::set<int> outstanding_union;
      for (PitEntry* e : node.pit.match(content, now))
        outstanding_union.insert(e->outstanding.begin(), e->outstanding.end());
      std::vector<LocalSegment> locals;
      for (int seg : held)
        if (outstanding_union.count(seg))
          locals.push_back(
              {seg, payload_of(content, seg, env.symbol_len, env.field->mask())});
      std::vector<CodedSymbol> inputs;
      std::set<int> span;
      for (std::size_t i : residual) {
        inputs.push_back(batch[i].pkt.symbol);
        for (int s : batch[i].pkt.d_info) span.insert(s);
      }
      for (const LocalSegment& l : locals) span.insert(l.segment);
      std::size_t dims =
          std::min<std::size_t>(inputs.size() + locals.size(), span.size());
      std::map<FaceId, std::set<int>> face_missing;
      for (PitEntry* e : node.pit.match(content, now)) {
        std::set<int> overlap;
        for (int s : e->outstanding)
          if (span.count(s)) overlap.insert(s);
        if (overlap.empty()) continue;
        for (const PitFace& pf : e->downstream)
          if (!residual_faces.count(pf.face))
            face_missing[pf.face].insert(overlap.begin(), overlap.end());
      }
      std::map<FaceId, std::size_t> need;
      for (auto& [f, missing] : face_missing) need[f] = missing.size();
      if (!need.empty()) {
        bool forwarded = false;
        bool stored = false;
        for (auto& [f, n_needed] : need) {
          std::size_t combos = std::min(dims, n_needed);
          for (std::size_t c = 0; c < combos; ++c) {
            CodedSymbol combined = encode_node(*env.field, content, env.k, inputs,
                                               fresh_coeffs(inputs.size()), locals,
                                               fresh_coeffs(locals.size()));
            if (std::all_of(combined.coding_vector.begin(), combined.coding_vector.end(),
                            [](FieldElement v) { return v == 0; }))
              continue;
            DataPacket dp =
                DataPacket::from_symbol(name, std::move(combined), env.segment_bytes);
            forwarded |= forward_packet(dp, {f});
            if (!stored) {
              lfru_store(dp);
              stored = true;
            }
          }
        }
        ++out.coding_ops;
        out.combine_inputs += static_cast<int>(residual.size());
        ++node.counters.coding_ops;
        node.counters.combine_inputs += static_cast<long long>(residual.size());
        for (std::size_t i : residual) consumed[i] = true;
        if (!forwarded) out.discarded += static_cast<int>(residual.size());
      }
    }
  }

  // CASE 3 and everything else: cache decision, PIT-face relay, consume.
  // A CCCN router offered several co-resident symbols of one generation
  // stores a single fresh combination of them - one slot covering the whole
  // span - instead of one slot per segment; relaying is untouched.
  std::vector<std::size_t> relayed;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (consumed[i]) continue;
    const DataPacket& pkt = batch[i].pkt;
    std::vector<FaceId> faces =
        detail::faces_for_packet(*env.field, node.pit, pkt, {batch[i].in_face}, now);
    if (faces.empty()) {
      ++out.discarded;
      ++node.counters.data_discarded;
      continue;
    }
    relayed.push_back(i);
    forward_packet(pkt, faces);
    if (pkt.d_type == 0)
      node.pit.consume(*env.field, content, pkt.symbol.plain_segment(), env.k);
  }
  bool storage_coded =
      env.mode == Mode::cccn && env.interior_coded_storage && relayed.size() >= 2;
  if (!(storage_coded && env.coded_storage_replaces))
    for (std::size_t i : relayed) lfru_store(batch[i].pkt);
  if (storage_coded) {
    std::vector<CodedSymbol> inputs;
    for (std::size_t i : relayed) inputs.push_back(batch[i].pkt.symbol);
    CodedSymbol combo =
        encode_node(*env.field, content, env.k, inputs, fresh_coeffs(inputs.size()), {}, {});
    if (!std::all_of(combo.coding_vector.begin(), combo.coding_vector.end(),
                     [](FieldElement v) { return v == 0; })) {
      lfru_store(DataPacket::from_symbol(name, std::move(combo), env.segment_bytes));
      ++out.coding_ops;
      ++node.counters.coding_ops;
    }
  }
  return out;
}

// ---- Algorithm 3: receiver gateway processing -------------------------------

struct GatewayDelivery {
  // Newly recoverable segments, decoded payloads attached.
  std::vector<std::pair<int, std::vector<FieldElement>>> delivered;
  bool innovative = false;
};

// Every arriving symbol - plain or coded - feeds the per-generation decode
// buffer, so later combinations reduce against the segments the gateway
// already knows. Each segment that becomes recoverable is released to the
// consumer space and offered to the cache at once.
inline GatewayDelivery gateway_process(Node& node, const NodeEnv& env,
                                       const DataPacket& pkt, double now) {
  GatewayDelivery out;
  auto [it, created] = node.decode_buffers.try_emplace(pkt.content_id, env.k);
  EchelonBasis& basis = it->second;
  std::vector<bool> before(env.k);
  for (int s = 0; s < env.k; ++s) before[s] = basis.segment_recoverable(s);
  out.innovative = basis.add(*env.field, pkt.symbol.coding_vector, pkt.symbol.payload);
  if (!out.innovative) return out;
  for (int s = 0; s < env.k; ++s)
    if (!before[s] && basis.segment_recoverable(s)) {
      out.delivered.push_back({s, *basis.segment_payload(s)});
      StoredItem item;
      item.content_id = pkt.content_id;
      item.kind = ItemKind::plain;
      item.segment = s;
      node.cs.insert(item, now);
    }
  return out;
}

}  // namespace cccn
