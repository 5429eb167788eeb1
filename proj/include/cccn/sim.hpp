#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "cccn/cache.hpp"
#include "cccn/config.hpp"
#include "cccn/protocol.hpp"
#include "cccn/topology.hpp"
#include "cccn/workload.hpp"

namespace cccn {

// The three steady-state metrics plus the raw counters they derive from.
// `avg_download_delay_s` is the per-request mean completion time;
// `literal_ratio_req_per_s` is the figure caption's stated ratio (requests
// over time), reported separately because it reads as a throughput.
struct MetricsReport {
  double avg_download_delay_s = 0.0;
  double literal_ratio_req_per_s = 0.0;
  double avg_link_usage = 0.0;
  double avg_interest_load = 0.0;
  long requests = 0;
  long completions = 0;
  long incompletes = 0;
  long long interests_core = 0;
  long long data_transmissions = 0;
  long long data_lost = 0;
  long long data_discarded = 0;
  long long delivered_segments = 0;
  long long coding_ops = 0;
  long long cache_hits_plain = 0;
  long long cache_hits_coded = 0;
  long long reissues = 0;
  long links_involved = 0;
  bool event_cap_hit = false;

  std::string csv_row(const std::string& mode, const std::string& axis_name,
                      const std::string& axis_value, std::uint64_t seed) const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%llu,%.9f,%.9f,%.9f,%ld,%ld",
                  mode.c_str(), axis_name.c_str(), axis_value.c_str(),
                  static_cast<unsigned long long>(seed), avg_download_delay_s,
                  avg_link_usage, avg_interest_load, completions, requests);
    return buf;
  }

  static const char* csv_header() {
    return "mode,axis_name,axis_value,seed,avg_download_delay_s,avg_link_usage,"
           "avg_interest_load,completions,requests";
  }
};

// Deterministic discrete-event run of one scenario: builds the topology,
// roles and FIBs, seeds the publishers, drives the Poisson workload through
// the mode-appropriate node logic, and reduces the post-warmup event stream
// to a MetricsReport. Identical (config, seed) pairs replay bit-identically.
class Simulator {
 public:
  explicit Simulator(const ExperimentConfig& cfg, std::ostream* event_log = nullptr)
      : cfg_(cfg), log_(event_log) {
    cfg_.validate();
    field_ = std::make_unique<Field>(FieldParams::standard(cfg_.field_m));
    env_.field = field_.get();
    env_.k = cfg_.segments_per_object;
    env_.symbol_len = cfg_.symbol_len;
    env_.mode = cfg_.mode;
    env_.segment_bytes = cfg_.segment_bytes;
    env_.hop_limit = cfg_.hop_limit;
    env_.stripe_limit = cfg_.stripe_limit;
    env_.coded_storage_replaces = cfg_.coded_storage_replaces;
    env_.coded_serve_always = cfg_.coded_serve_always;
    env_.interior_coded_storage = cfg_.interior_coded_storage;
    build_network();
  }

  MetricsReport run() {
    schedule_first_arrivals();
    MetricsReport report;
    long long processed = 0;
    while (!queue_.empty()) {
      if (processed++ >= cfg_.max_events) {
        report.event_cap_hit = true;
        break;
      }
      Scheduled ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      std::visit([&](auto&& e) { handle(e); }, *ev.payload);
    }
    finalize(report);
    return report;
  }

  // Audit access for conservation tests.
  long long data_sent() const { return data_sent_; }
  long long data_lost() const { return data_lost_; }
  long long data_arrived() const { return data_arrived_; }

  const Topology& topology() const { return topo_; }
  const RoleAssignment& roles() const { return roles_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  // ---- events ---------------------------------------------------------------
  struct EvArrival { int gateway_slot; };
  struct EvInterest { InterestPacket pkt; int to_node; FaceId in_face; };
  struct EvData {
    DataPacket pkt;
    int to_node;
    FaceId in_face;
    int link;
    bool lost;
    std::shared_ptr<const std::vector<int>> ip_route;  // IP mode reverse path
    int route_pos = 0;
    std::uint64_t ip_request = 0;
  };
  struct EvPublisherServe { InterestPacket pkt; int publisher; };
  struct EvIpRequest {
    std::uint64_t request;
    std::shared_ptr<const std::vector<int>> path;  // gateway .. attach router
    int pos;
    std::vector<int> want;
  };
  struct EvFlush { int node; };
  struct EvTimer { std::uint64_t request; int attempt; };

  using Event = std::variant<EvArrival, EvInterest, EvData, EvPublisherServe,
                             EvIpRequest, EvFlush, EvTimer>;

  struct Scheduled {
    double time;
    std::uint64_t seq;
    std::shared_ptr<Event> payload;
    bool operator>(const Scheduled& o) const {
      if (time != o.time) return time > o.time;
      return seq > o.seq;
    }
  };

  void schedule(double t, Event e) {
    queue_.push({t, seq_++, std::make_shared<Event>(std::move(e))});
  }

  // ---- construction ----------------------------------------------------------
  void build_network() {
    topo_ = generate_ba(cfg_.nodes, cfg_.m_attach, Rng::derive(cfg_.seed, 101));
    roles_ = assign_roles(topo_, cfg_.publishers, cfg_.gateways);
    fib_ = Fib(topo_, roles_.publishers);
    nodes_.resize(cfg_.nodes);
    long cap = cfg_.cache_capacity_segments();
    for (int v = 0; v < cfg_.nodes; ++v) {
      nodes_[v].id = v;
      nodes_[v].cs = ContentStore(cfg_.mode == Mode::ip ? 0 : cap, field_.get());
      node_rng_.emplace_back(Rng::derive(cfg_.seed, 7000 + v));
    }
    for (std::size_t p = 0; p < roles_.publishers.size(); ++p)
      nodes_[roles_.publishers[p]].attached_publisher = static_cast<int>(p);
    gateway_slot_of_.assign(cfg_.nodes, -1);
    for (std::size_t g = 0; g < roles_.gateways.size(); ++g) {
      nodes_[roles_.gateways[g]].is_gateway = true;
      gateway_slot_of_[roles_.gateways[g]] = static_cast<int>(g);
    }

    // Directed core links, then one attach link pair per publisher.
    auto add_link = [&](int label_u, int label_v, double capacity_bps, bool core) {
      link_index_[{label_u, label_v}] = static_cast<int>(link_capacity_.size());
      link_capacity_.push_back(capacity_bps);
      link_inflight_.push_back(0);
      link_is_core_.push_back(core);
      link_traffic_bits_.push_back(0.0);
      link_prop_.push_back(cfg_.prop_delay_unit);
    };
    double bps_per_link = cfg_.link_capacity_seg_per_s * cfg_.segment_bytes * 8.0;
    for (const Link& l : topo_.links()) {
      double bps = bps_per_link * l.capacity_units;
      add_link(l.u, l.v, bps, true);
      add_link(l.v, l.u, bps, true);
      link_prop_[link_capacity_.size() - 1] = l.prop_delay * cfg_.prop_delay_unit;
      link_prop_[link_capacity_.size() - 2] = l.prop_delay * cfg_.prop_delay_unit;
    }
    double pub_bps = bps_per_link * cfg_.publisher_capacity_factor;
    for (std::size_t p = 0; p < roles_.publishers.size(); ++p) {
      int r = roles_.publishers[p];
      add_link(publisher_label(static_cast<int>(p)), r, pub_bps, false);
      add_link(r, publisher_label(static_cast<int>(p)), pub_bps, false);
    }

    zipf_ = std::make_unique<ZipfSampler>(cfg_.catalog_size, cfg_.zipf_alpha);
    for (int g = 0; g < cfg_.gateways; ++g)
      workloads_.emplace_back(zipf_.get(), cfg_.arrival_rate, cfg_.seed, g);
    loss_rng_ = Rng(Rng::derive(cfg_.seed, 31337));
    nonce_rng_ = Rng(Rng::derive(cfg_.seed, 41411));
    inbox_.resize(cfg_.nodes);
    flush_scheduled_.assign(cfg_.nodes, false);
    fetch_ewma_.assign(cfg_.gateways, 0.0);
    duration_ = cfg_.derived_duration();
    window_start_ = cfg_.warmup_fraction * duration_;

    // Entries are consumed on satisfaction and refreshed by consumer
    // retransmissions; expiring them mid-run would only turn congested
    // (but live) flows into unsolicited-data discards. Keep breadcrumbs
    // alive for the whole run and let satisfaction clean them up.
    env_.pit_lifetime = 2.0 * duration_ + 100.0;
  }

  double per_hop_estimate() const {
    double tx = static_cast<double>(cfg_.segment_bytes) * 8.0 /
                (cfg_.link_capacity_seg_per_s * cfg_.segment_bytes * 8.0);
    return tx + cfg_.prop_delay_unit + cfg_.data_proc_time;
  }

  static int publisher_label(int p) { return -100 - p; }

  int publisher_of(std::uint64_t content) const {
    return static_cast<int>(content % static_cast<std::uint64_t>(cfg_.publishers));
  }

  std::string name_of(std::uint64_t content) const {
    return "/pub" + std::to_string(publisher_of(content)) + "/obj" + std::to_string(content);
  }

  // ---- requests ---------------------------------------------------------------
  struct RequestState {
    std::uint64_t id = 0;
    int gateway_node = 0;
    std::uint64_t content = 0;
    double arrival = 0.0;
    std::set<int> delivered;
    bool completed = false;
    double completion = 0.0;
    int attempts = 0;
    // Per-request decoding state; symbols seen by earlier requests at this
    // gateway carry no information for a new one, so the basis is private.
    EchelonBasis basis{0};
  };

  void schedule_first_arrivals() {
    for (int g = 0; g < cfg_.gateways; ++g) {
      auto req = workloads_[g].next();
      pending_arrival_.push_back(req);
      if (req.time <= duration_) schedule(req.time, EvArrival{g});
    }
  }

  void handle(const EvArrival& ev) {
    auto req = pending_arrival_[ev.gateway_slot];
    spawn_request(ev.gateway_slot, static_cast<std::uint64_t>(req.content));
    auto next = workloads_[ev.gateway_slot].next();
    pending_arrival_[ev.gateway_slot] = next;
    if (next.time <= duration_) schedule(next.time, EvArrival{ev.gateway_slot});
  }

  void spawn_request(int gateway_slot, std::uint64_t content) {
    std::uint64_t id = static_cast<std::uint64_t>(requests_.size());
    RequestState rs;
    rs.id = id;
    rs.gateway_node = roles_.gateways[gateway_slot];
    rs.content = content;
    rs.arrival = now_;
    rs.basis = EchelonBasis(cfg_.segments_per_object);
    requests_.push_back(std::move(rs));
    active_by_content_[key_of(rs.gateway_node, content)].insert(id);
    trace(rs.gateway_node, "request", "content=" + std::to_string(content) +
                                          " req=" + std::to_string(id));
    if (cfg_.mode == Mode::ip)
      launch_ip_fetch(id, all_segments());
    else
      inject_interest(id, all_segments());
    schedule(now_ + request_timeout(rs), EvTimer{id, 0});
  }

  std::vector<int> all_segments() const {
    std::vector<int> w(cfg_.segments_per_object);
    for (int i = 0; i < cfg_.segments_per_object; ++i) w[i] = i;
    return w;
  }

  // 4 x the estimated fetch time. The estimate starts from the uncontended
  // round trip to the content's publisher plus streaming the K segments and
  // tracks observed completion times per gateway, so congestion does not
  // trigger duplicate-fetch storms.
  double request_timeout(const RequestState& rs) const {
    int pub = publisher_of(rs.content);
    int hops = fib_.distance(rs.gateway_node, pub) + 1;
    double tx = 1.0 / cfg_.link_capacity_seg_per_s;
    double base = 2.0 * hops * per_hop_estimate() + cfg_.segments_per_object * tx;
    double ewma = fetch_ewma_[gateway_slot_of_[rs.gateway_node]];
    return cfg_.rtt_timeout_factor * std::max(base, ewma);
  }

  std::uint64_t key_of(int gateway_node, std::uint64_t content) const {
    return static_cast<std::uint64_t>(gateway_node) * 0x100000000ULL + content;
  }

  void inject_interest(std::uint64_t request, const std::vector<int>& want) {
    RequestState& rs = requests_[request];
    // Retransmissions insist on plain segments; a re-served recoding of the
    // same cached store would carry nothing new for this request.
    InterestPacket pkt = make_interest(name_of(rs.content), rs.content, want,
                                       cfg_.segments_per_object, cfg_.hop_limit,
                                       nonce_rng_.next(), rs.attempts > 0);
    pkt.origin = 0x7000000000000000ULL + request;
    deliver_interest(pkt, rs.gateway_node, consumer_face(request));
  }

  // ---- interest plane ----------------------------------------------------------
  void handle(const EvInterest& ev) {
    deliver_interest(ev.pkt, ev.to_node, ev.in_face);
  }

  void deliver_interest(const InterestPacket& pkt, int node_id, FaceId in_face) {
    Node& node = nodes_[node_id];
    int pub = publisher_of(pkt.content_id);
    InterestActions actions =
        handle_interest(node, env_, fib_, pub, pkt, in_face, now_, node_rng_[node_id]);
    if (actions.dropped) {
      trace(node_id, "interest-drop", actions.drop_reason);
      return;
    }
    if (log_ && is_consumer_face(in_face))
      trace(node_id, "interest-local",
            "req=" + std::to_string(request_of_face(in_face)) +
                " replies=" + std::to_string(actions.replies.size()) +
                " forwards=" + std::to_string(actions.forwards.size()) +
                " aggregated=" + std::to_string(actions.aggregated));
    double reply_at = now_ + cfg_.data_proc_time;
    for (DataPacket& reply : actions.replies) {
      trace(node_id, "reply", "to=" + std::to_string(in_face) + " " + format_packet(reply));
      if (is_consumer_face(in_face)) {
        deliver_reply_to_consumer(reply, node_id, reply_at);
      } else {
        send_data(std::move(reply), node_id, static_cast<int>(in_face), reply_at);
      }
    }
    for (auto& [face, sub] : actions.forwards) {
      if (face == kPublisherFace) {
        send_interest_to_publisher(sub, node_id, pub);
      } else {
        send_interest(sub, node_id, static_cast<int>(face));
      }
    }
  }

  // Cache hits answered at the request's own gateway enter consumer space
  // after local processing.
  void deliver_reply_to_consumer(const DataPacket& reply, int node_id, double at) {
    feed_requests(node_id, reply, at);
  }

  // Feeds an arriving symbol into the private basis of every active request
  // for the object and releases whatever each can newly recover. Returns the
  // union of segments recovered, for PIT bookkeeping and caching.
  std::set<int> feed_requests(int node_id, const DataPacket& pkt, double at) {
    std::set<int> recovered;
    auto& actives = active_by_content_[key_of(node_id, pkt.content_id)];
    std::vector<std::uint64_t> ids(actives.begin(), actives.end());
    for (std::uint64_t id : ids) {
      RequestState& rs = requests_[id];
      if (rs.completed) continue;
      rs.basis.add(*field_, pkt.symbol.coding_vector, pkt.symbol.payload);
      for (int s = 0; s < cfg_.segments_per_object; ++s)
        if (!rs.delivered.count(s) && rs.basis.segment_recoverable(s)) {
          recovered.insert(s);
          deliver_to_request(rs, s, *rs.basis.segment_payload(s), at);
        }
    }
    return recovered;
  }

  void send_interest(const InterestPacket& pkt, int from, int to) {
    auto it = link_index_.find({from, to});
    int link = it->second;
    double tx = 800.0 / link_capacity_[link];  // ~100 B header, no PS share
    if (link_is_core_[link] && in_window(now_)) ++interests_core_;
    trace(from, "interest-tx", "to=" + std::to_string(to) + " " + format_packet(pkt));
    schedule(now_ + tx + link_prop_[link], EvInterest{pkt, to, from});
  }

  void send_interest_to_publisher(const InterestPacket& pkt, int router, int publisher) {
    auto it = link_index_.find({router, publisher_label(publisher)});
    int link = it->second;
    double tx = 800.0 / link_capacity_[link];
    trace(router, "interest-tx", "to=pub" + std::to_string(publisher));
    schedule(now_ + tx + link_prop_[link], EvPublisherServe{pkt, publisher});
  }

  void handle(const EvPublisherServe& ev) {
    int router = roles_.publishers[ev.publisher];
    std::vector<int> want = ev.pkt.wanted(cfg_.segments_per_object);
    double depart = now_;
    for (int seg : want) {
      depart += cfg_.data_proc_time;
      DataPacket dp = make_plain_data(env_, ev.pkt.name, ev.pkt.content_id, seg);
      send_data_from_publisher(std::move(dp), ev.publisher, router, depart);
    }
  }

  // ---- data plane ----------------------------------------------------------------
  void send_data(DataPacket pkt, int from, int to, double at,
                 std::shared_ptr<const std::vector<int>> ip_route = nullptr,
                 int route_pos = 0, std::uint64_t ip_request = 0) {
    int link = link_index_.at({from, to});
    queue_data_on_link(std::move(pkt), link, to, from, at, std::move(ip_route),
                       route_pos, ip_request);
  }

  void send_data_from_publisher(DataPacket pkt, int publisher, int router, double at,
                                std::shared_ptr<const std::vector<int>> ip_route = nullptr,
                                std::uint64_t ip_request = 0) {
    int link = link_index_.at({publisher_label(publisher), router});
    queue_data_on_link(std::move(pkt), link, router, kPublisherFace, at,
                       std::move(ip_route), 0, ip_request);
  }

  // Fair-share transit: the rate is the link capacity divided by the number
  // of data packets in flight when this one starts, sampled once at send.
  void queue_data_on_link(DataPacket pkt, int link, int to_node, FaceId in_face,
                          double at, std::shared_ptr<const std::vector<int>> ip_route,
                          int route_pos, std::uint64_t ip_request) {
    double bits = pkt.accounting_size * 8.0;
    int concurrent = ++link_inflight_[link];
    double rate = link_capacity_[link] / concurrent;
    double transit = bits / rate + link_prop_[link];
    bool lost = loss_rng_.bernoulli(cfg_.loss_rate);
    ++data_sent_;
    if (at >= window_start_ && at <= duration_ && link_is_core_[link])
      link_traffic_bits_[link] += bits;
    EvData ev{std::move(pkt), to_node, in_face, link, lost,
              std::move(ip_route), route_pos, ip_request};
    schedule(at + transit, std::move(ev));
  }

  void handle(EvData& ev) {
    --link_inflight_[ev.link];
    if (ev.lost) {
      ++data_lost_;
      trace(ev.to_node, "data-lost", format_packet(ev.pkt));
      return;
    }
    ++data_arrived_;
    if (cfg_.mode == Mode::ip) {
      relay_ip_data(ev);
      return;
    }
    Node& node = nodes_[ev.to_node];
    if (node.is_gateway) {
      gateway_data_arrival(ev.to_node, ev.pkt, ev.in_face);
      return;
    }
    inbox_[ev.to_node].push_back({std::move(ev.pkt), ev.in_face});
    if (!flush_scheduled_[ev.to_node]) {
      flush_scheduled_[ev.to_node] = true;
      double tick = cfg_.batch_tick;
      double flush_at = (std::floor(now_ / tick) + 1.0) * tick;
      schedule(flush_at, EvFlush{ev.to_node});
    }
  }

  void handle(const EvFlush& ev) {
    flush_scheduled_[ev.node] = false;
    std::vector<ArrivedData> batch;
    batch.swap(inbox_[ev.node]);
    std::map<std::uint64_t, std::vector<ArrivedData>> by_content;
    for (ArrivedData& a : batch) by_content[a.pkt.content_id].push_back(std::move(a));
    Node& node = nodes_[ev.node];
    for (auto& [content, group] : by_content) {
      DataActions actions = coding_decision(node, env_, group, node_rng_[ev.node], now_);
      data_discarded_ += actions.discarded;
      coding_ops_ += actions.coding_ops;
      double proc = cfg_.data_proc_time * (actions.coding_ops > 0 ? cfg_.coding_overhead : 1.0);
      for (auto& [face, pkt] : actions.forwards) {
        trace(ev.node, "data-fwd", "to=" + std::to_string(face) + " " + format_packet(pkt));
        send_data(std::move(pkt), ev.node, static_cast<int>(face), now_ + proc);
      }
    }
  }

  // Algorithm 3 at the decoding gateways: no recombination, immediate
  // processing, plus relay duty for entries of other downstream nodes.
  void gateway_data_arrival(int node_id, DataPacket& pkt, FaceId in_face) {
    Node& node = nodes_[node_id];
    std::vector<FaceId> faces =
        detail::faces_for_packet(*field_, node.pit, pkt, {in_face}, now_);
    bool has_local_interest =
        !active_by_content_[key_of(node_id, pkt.content_id)].empty();
    if (faces.empty() && !has_local_interest) {
      ++data_discarded_;
      ++node.counters.data_discarded;
      trace(node_id, "data-unsolicited", format_packet(pkt));
      return;
    }
    double proc =
        cfg_.data_proc_time * (pkt.d_type == -1 ? cfg_.coding_overhead : 1.0);
    if (pkt.d_type == -1) ++coding_ops_;  // decode work
    for (FaceId f : faces)
      if (!is_consumer_face(f) && f != kPublisherFace)
        send_data(pkt, node_id, static_cast<int>(f), now_ + proc);
    std::set<int> recovered = feed_requests(node_id, pkt, now_ + proc);
    if (log_)
      trace(node_id, "gw-data",
            "recovered=" + std::to_string(recovered.size()) + " " + format_packet(pkt));
    // Algorithm 3 cache step: recovered segments are offered to the store,
    // and arriving combinations are kept too so the local coded rank can
    // answer later consumers outright.
    if (pkt.d_type == 0) {
      recovered.insert(pkt.symbol.plain_segment());
    } else {
      StoredItem coded;
      coded.content_id = pkt.content_id;
      coded.kind = ItemKind::coded;
      coded.symbol = pkt.symbol;
      node.cs.insert(coded, now_);
      if (recovered.empty() && faces.empty()) ++data_discarded_;
    }
    for (int seg : recovered) {
      StoredItem item;
      item.content_id = pkt.content_id;
      item.kind = ItemKind::plain;
      item.segment = seg;
      node.cs.insert(item, now_);
      node.pit.consume(*field_, pkt.content_id, seg, cfg_.segments_per_object);
    }
  }

  void deliver_to_request(RequestState& rs, int segment,
                          const std::vector<FieldElement>& payload, double at) {
    auto expect = payload_of(rs.content, segment, cfg_.symbol_len, field_->mask());
    if (payload != expect)
      throw Error("payload audit failed: content " + std::to_string(rs.content) +
                  " segment " + std::to_string(segment));
    if (!rs.delivered.insert(segment).second) return;
    ++delivered_segments_;
    if (static_cast<int>(rs.delivered.size()) == cfg_.segments_per_object) {
      rs.completed = true;
      rs.completion = at;
      active_by_content_[key_of(rs.gateway_node, rs.content)].erase(rs.id);
      double& ewma = fetch_ewma_[gateway_slot_of_[rs.gateway_node]];
      ewma = 0.875 * ewma + 0.125 * (at - rs.arrival);
      trace(rs.gateway_node, "complete", "req=" + std::to_string(rs.id));
    }
  }

  void deliver_segment_at(int gateway_node, std::uint64_t content, int segment,
                          const std::vector<FieldElement>& payload, double at) {
    auto& actives = active_by_content_[key_of(gateway_node, content)];
    std::vector<std::uint64_t> ids(actives.begin(), actives.end());
    for (std::uint64_t id : ids) {
      RequestState& rs = requests_[id];
      if (!rs.completed) deliver_to_request(rs, segment, payload, at);
    }
  }

  void handle(const EvTimer& ev) {
    RequestState& rs = requests_[ev.request];
    if (rs.completed) return;
    if (rs.attempts >= cfg_.max_reissues) return;  // reported incomplete
    ++rs.attempts;
    ++reissues_;
    std::vector<int> missing;
    for (int s = 0; s < cfg_.segments_per_object; ++s)
      if (!rs.delivered.count(s)) missing.push_back(s);
    if (missing.empty()) return;
    trace(rs.gateway_node, "reissue", "req=" + std::to_string(ev.request));
    if (cfg_.mode == Mode::ip)
      launch_ip_fetch(ev.request, missing);
    else
      inject_interest(ev.request, missing);
    // Exponential backoff keeps retransmissions from feeding the congestion
    // that delayed the first attempt.
    double backoff = static_cast<double>(1 << std::min(ev.attempt + 1, 6));
    schedule(now_ + backoff * request_timeout(rs), EvTimer{ev.request, ev.attempt + 1});
  }

  // ---- IP baseline ----------------------------------------------------------------
  // No caches, no PIT: the request walks the static per-object path to the
  // publisher, which unicasts every segment back along the reverse path.
  void launch_ip_fetch(std::uint64_t request, const std::vector<int>& want) {
    RequestState& rs = requests_[request];
    int pub = publisher_of(rs.content);
    auto path = std::make_shared<std::vector<int>>();
    int v = rs.gateway_node;
    path->push_back(v);
    while (fib_.distance(v, pub) > 0) {
      v = static_cast<int>(fib_.face_for(v, pub, rs.content, 0, Mode::ip));
      path->push_back(v);
    }
    schedule(now_, EvIpRequest{request, path, 0, want});
  }

  void handle(const EvIpRequest& ev) {
    const std::vector<int>& path = *ev.path;
    if (ev.pos + 1 < static_cast<int>(path.size())) {
      int from = path[ev.pos], to = path[ev.pos + 1];
      int link = link_index_.at({from, to});
      double tx = 800.0 / link_capacity_[link];
      if (link_is_core_[link] && in_window(now_)) ++interests_core_;
      schedule(now_ + tx + link_prop_[link],
               EvIpRequest{ev.request, ev.path, ev.pos + 1, ev.want});
      return;
    }
    // Reached the attach router; hand to the publisher and stream back.
    RequestState& rs = requests_[ev.request];
    int pub = publisher_of(rs.content);
    auto route = std::make_shared<std::vector<int>>(path.rbegin(), path.rend());
    double depart = now_ + cfg_.prop_delay_unit;  // attach hop
    for (int seg : ev.want) {
      depart += cfg_.data_proc_time;
      DataPacket dp = make_plain_data(env_, name_of(rs.content), rs.content, seg);
      send_data_from_publisher(std::move(dp), pub, route->front(), depart, route,
                               ev.request);
    }
  }

  void relay_ip_data(EvData& ev) {
    const std::vector<int>& route = *ev.ip_route;
    int here = route[ev.route_pos];
    if (ev.route_pos + 1 < static_cast<int>(route.size())) {
      int next = route[ev.route_pos + 1];
      send_data(std::move(ev.pkt), here, next, now_ + cfg_.data_proc_time,
                ev.ip_route, ev.route_pos + 1, ev.ip_request);
      return;
    }
    RequestState& rs = requests_[ev.ip_request];
    deliver_segment_at(rs.gateway_node, rs.content, ev.pkt.symbol.plain_segment(),
                       ev.pkt.symbol.payload, now_ + cfg_.data_proc_time);
  }

  // ---- metrics ---------------------------------------------------------------------
  bool in_window(double t) const { return t >= window_start_ && t <= duration_; }

  void finalize(MetricsReport& r) {
    double window = duration_ - window_start_;
    if (window <= 0) {
      if (!requests_.empty()) throw ZeroWindow();
      return;  // zero arrivals: all metrics stay zero
    }
    double delay_sum = 0.0;
    for (const RequestState& rs : requests_) {
      if (rs.arrival < window_start_ || rs.arrival > duration_) continue;
      ++r.requests;
      if (rs.completed) {
        ++r.completions;
        delay_sum += rs.completion - rs.arrival;
      } else {
        ++r.incompletes;
      }
    }
    r.avg_download_delay_s = r.completions ? delay_sum / r.completions : 0.0;
    r.literal_ratio_req_per_s = r.completions / window;
    double traffic = 0.0;
    std::set<std::pair<int, int>> involved;
    for (auto& [pair, link] : link_index_) {
      if (!link_is_core_[link] || link_traffic_bits_[link] <= 0) continue;
      traffic += link_traffic_bits_[link];
      involved.insert({std::min(pair.first, pair.second), std::max(pair.first, pair.second)});
    }
    r.links_involved = static_cast<long>(involved.size());
    if (r.links_involved > 0) {
      // Full-duplex capacity of the involved links over the window.
      double capacity = 0.0;
      for (auto& [u, v] : involved)
        capacity += 2.0 * link_capacity_[link_index_.at({u, v})] * window;
      r.avg_link_usage = std::min(1.0, traffic / capacity);
    }
    r.avg_interest_load =
        r.completions ? static_cast<double>(interests_core_) / r.completions : 0.0;
    r.interests_core = interests_core_;
    r.data_transmissions = data_sent_;
    r.data_lost = data_lost_;
    r.data_discarded = data_discarded_;
    r.delivered_segments = delivered_segments_;
    r.coding_ops = coding_ops_;
    r.reissues = reissues_;
    for (const Node& n : nodes_) {
      r.cache_hits_plain += n.counters.cache_hits_plain;
      r.cache_hits_coded += n.counters.cache_hits_coded;
    }
  }

  void trace(int node, const char* kind, const std::string& detail) {
    if (!log_) return;
    char head[64];
    std::snprintf(head, sizeof(head), "%.9f %d ", now_, node);
    (*log_) << head << kind << " " << detail << "\n";
  }

  // ---- state ----------------------------------------------------------------------
  ExperimentConfig cfg_;
  std::ostream* log_;
  std::unique_ptr<Field> field_;
  NodeEnv env_;
  Topology topo_;
  RoleAssignment roles_;
  Fib fib_;
  std::vector<Node> nodes_;
  std::vector<Rng> node_rng_;
  std::vector<int> gateway_slot_of_;
  std::map<std::pair<int, int>, int> link_index_;
  std::vector<double> link_capacity_;
  std::vector<int> link_inflight_;
  std::vector<bool> link_is_core_;
  std::vector<double> link_traffic_bits_;
  std::vector<double> link_prop_;
  std::unique_ptr<ZipfSampler> zipf_;
  std::vector<WorkloadStream> workloads_;
  std::vector<WorkloadStream::Request> pending_arrival_;
  Rng loss_rng_{0}, nonce_rng_{0};
  std::vector<std::vector<ArrivedData>> inbox_;
  std::vector<bool> flush_scheduled_;
  std::priority_queue<Scheduled, std::vector<Scheduled>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  double duration_ = 0.0;
  double window_start_ = 0.0;
  std::vector<RequestState> requests_;
  std::unordered_map<std::uint64_t, std::set<std::uint64_t>> active_by_content_;
  std::vector<double> fetch_ewma_;
  long long interests_core_ = 0;
  long long data_sent_ = 0, data_lost_ = 0, data_arrived_ = 0, data_discarded_ = 0;
  long long delivered_segments_ = 0, coding_ops_ = 0, reissues_ = 0;
};

inline MetricsReport run_experiment(const ExperimentConfig& cfg,
                                    std::ostream* event_log = nullptr) {
  Simulator sim(cfg, event_log);
  return sim.run();
}

}  // namespace cccn
