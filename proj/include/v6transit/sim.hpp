#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "v6transit/forward.hpp"
#include "v6transit/records.hpp"
#include "v6transit/topology.hpp"

namespace v6transit {

struct TraceEntry {
  double time = 0;  // transmission start
  std::string link_id;
  std::string from_node;
  std::string to_node;
  std::uint64_t packet_id = 0;
  FrameKind kind = FrameKind::V6;
  Bytes frame;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct SimOptions {
  bool trace = false;
  std::optional<std::uint64_t> seed;  // enables per-flow send-time jitter
};

struct SimulationResult {
  std::vector<MetricsRecord> records;  // ordered by packet_id
  std::vector<TraceEntry> trace;
};

/// Single-threaded discrete-event engine. Events run in (time, seq) order,
/// seq being the insertion counter.
class Simulator {
 public:
  Simulator(Scenario scenario, SimOptions options = {}) : scenario_(std::move(scenario)), options_(options) {
    validate_scenario(scenario_);
    const auto& topo = scenario_.topology;
    for (std::size_t n = 0; n < topo.nodes.size(); ++n) node_index_[topo.nodes[n].id] = n;
    for (std::size_t l = 0; l < topo.links.size(); ++l) {
      const auto& link = topo.links[l];
      attach_[link.a] = directions_.size();
      directions_.push_back(Direction{l, link.a, link.b, false, {}});
      attach_[link.b] = directions_.size();
      directions_.push_back(Direction{l, link.b, link.a, false, {}});
    }
  }

  SimulationResult run() {
    schedule_traffic();
    while (!queue_.empty()) {
      Event ev = queue_.top();
      if (ev.time > scenario_.horizon) break;
      queue_.pop();
      now_ = ev.time;
      std::visit([this](auto& action) { handle(action); }, ev.action);
    }
    for (auto& r : result_.records) {
      if (!r.receive_time && !r.drop_reason) {
        r.drop_reason = DropReason::HorizonReached;
        r.drop_node.clear();
      }
    }
    return std::move(result_);
  }

 private:
  struct InFlight {
    std::uint64_t packet_id;
    Bytes frame;
  };
  struct TrafficSend {
    std::size_t flow;
    std::uint32_t index;
  };
  struct Arrive {
    std::size_t node;
    std::string in_if;
    InFlight pkt;
  };
  struct ProcessingDone {
    std::size_t node;
    std::string out_if;
    InFlight pkt;
  };
  struct Transmit {  // serialization of the head frame finished
    std::size_t direction;
  };
  using Action = std::variant<TrafficSend, Arrive, ProcessingDone, Transmit>;

  struct Event {
    double time;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  struct Direction {
    std::size_t link;
    LinkEnd from;
    LinkEnd to;
    bool busy = false;
    std::deque<InFlight> backlog;
  };

  struct PacketMeta {
    std::size_t record;
    std::size_t flow;
    bool is_reply;
  };

  void push(double time, Action a) { queue_.push(Event{time, next_seq_++, std::move(a)}); }

  void schedule_traffic() {
    std::optional<std::mt19937_64> rng;
    if (options_.seed) rng.emplace(*options_.seed);
    for (std::size_t f = 0; f < scenario_.traffic.size(); ++f) {
      const auto& t = scenario_.traffic[f];
      for (std::uint32_t i = 0; i < t.count; ++i) {
        double at = t.start + t.gap * i;
        if (rng && t.jitter > 0) {
          // Top 53 bits mapped to [0,1).
          double u = static_cast<double>((*rng)() >> 11) * 0x1.0p-53;
          at += t.jitter * u;
        }
        push(at, TrafficSend{f, i});
      }
    }
  }

  MtuLookup mtu_for(std::size_t node) const {
    return [this, node](std::string_view if_name) -> std::optional<std::uint32_t> {
      auto it = attach_.find(LinkEnd{scenario_.topology.nodes[node].id, std::string(if_name)});
      if (it == attach_.end()) return std::nullopt;
      return scenario_.topology.links[directions_[it->second].link].mtu;
    };
  }

  static Bytes make_payload(std::uint64_t packet_id, std::uint32_t size) {
    Bytes b(size);
    for (std::uint32_t i = 0; i < size; ++i) b[i] = static_cast<std::uint8_t>((packet_id * 131 + i) & 0xFF);
    return b;
  }

  Packet build_packet(const TrafficSpec& t, bool reply, std::uint64_t id) const {
    const auto& topo = scenario_.topology;
    const Node& src = *topo.find_node(reply ? t.dst : t.src);
    const Node& dst = *topo.find_node(reply ? t.src : t.dst);
    auto src_addr = reply ? t.dst_addr : t.src_addr;
    auto dst_addr = reply ? t.src_addr : t.dst_addr;
    Bytes payload = make_payload(id, t.payload_bytes);
    Packet p;
    if (t.family == AddressFamily::V6) {
      auto s = src_addr ? std::get<Ipv6Address>(*src_addr) : *src.first_v6();
      auto d = dst_addr ? std::get<Ipv6Address>(*dst_addr) : *dst.first_v6();
      p = make_v6_packet(s, d, std::move(payload), t.hop_limit);
    } else {
      auto s = src_addr ? std::get<Ipv4Address>(*src_addr) : *src.first_v4();
      auto d = dst_addr ? std::get<Ipv4Address>(*dst_addr) : *dst.first_v4();
      p = make_v4_packet(s, d, std::move(payload), t.hop_limit);
    }
    p.packet_id = id;
    return p;
  }

  void inject(std::size_t flow, bool reply) {
    const auto& t = scenario_.traffic[flow];
    std::uint64_t id = next_packet_id_++;
    MetricsRecord rec;
    rec.packet_id = id;
    rec.flow_id = reply ? t.id + ".reply" : t.id;
    rec.src_node = reply ? t.dst : t.src;
    rec.dst_node = reply ? t.src : t.dst;
    rec.send_time = now_;
    rec.payload_bytes = t.payload_bytes;
    meta_[id] = PacketMeta{result_.records.size(), flow, reply};
    result_.records.push_back(std::move(rec));

    std::size_t node = node_index_.at(reply ? t.dst : t.src);
    auto res = originate(scenario_.topology.nodes[node], build_packet(t, reply, id), mtu_for(node));
    apply(node, id, std::move(res));
  }

  void apply(std::size_t node, std::uint64_t id, ForwardResult res) {
    const Node& n = scenario_.topology.nodes[node];
    auto& rec = result_.records[meta_.at(id).record];
    if (auto* e = std::get_if<Emit>(&res.outcome)) {
      push(now_ + n.processing_delay, ProcessingDone{node, e->out_if, InFlight{id, std::move(e->frame)}});
    } else if (auto* d = std::get_if<Drop>(&res.outcome)) {
      rec.drop_reason = d->reason;
      rec.drop_node = n.id;
    } else {
      rec.receive_time = now_;
      const auto& m = meta_.at(id);
      if (!m.is_reply && scenario_.traffic[m.flow].mode == TrafficMode::Ping) inject(m.flow, true);
    }
  }

  void handle(TrafficSend& a) { inject(a.flow, false); }

  void handle(Arrive& a) {
    const Node& n = scenario_.topology.nodes[a.node];
    auto res = forward(n, a.pkt.frame, a.in_if, now_, mtu_for(a.node));
    apply(a.node, a.pkt.packet_id, std::move(res));
  }

  void handle(ProcessingDone& a) {
    std::size_t dir = attach_.at(LinkEnd{scenario_.topology.nodes[a.node].id, a.out_if});
    auto& d = directions_[dir];
    d.backlog.push_back(std::move(a.pkt));
    if (!d.busy) start_next(dir);
  }

  void handle(Transmit& a) {
    auto& d = directions_[a.direction];
    d.busy = false;
    if (!d.backlog.empty()) start_next(a.direction);
  }

  void start_next(std::size_t dir) {
    auto& d = directions_[dir];
    InFlight pkt = std::move(d.backlog.front());
    d.backlog.pop_front();
    d.busy = true;
    const Link& link = scenario_.topology.links[d.link];
    double serialization = link.serialization_delay(pkt.frame.size());

    auto& rec = result_.records[meta_.at(pkt.packet_id).record];
    rec.wire_bytes_per_hop.push_back(HopBytes{link.id, static_cast<std::uint32_t>(pkt.frame.size())});
    if (options_.trace) {
      FrameKind kind = FrameKind::V6;
      try {
        kind = parse_frame(pkt.frame).frame_kind;
      } catch (const Error&) {
      }
      result_.trace.push_back(TraceEntry{now_, link.id, d.from.node, d.to.node, pkt.packet_id, kind, pkt.frame});
    }

    push(now_ + serialization, Transmit{dir});
    push(now_ + serialization + link.propagation_delay,
         Arrive{node_index_.at(d.to.node), d.to.if_name, std::move(pkt)});
  }

  Scenario scenario_;
  SimOptions options_;
  std::map<std::string, std::size_t> node_index_;
  std::map<LinkEnd, std::size_t> attach_;
  std::vector<Direction> directions_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_packet_id_ = 1;
  double now_ = 0;
  std::map<std::uint64_t, PacketMeta> meta_;
  SimulationResult result_;
};

inline SimulationResult run_simulation(const Scenario& scenario, SimOptions options = {}) {
  return Simulator(scenario, options).run();
}

inline std::vector<MetricsRecord> run_simulation(const Topology& topology, const std::vector<TrafficSpec>& traffic,
                                                 double horizon) {
  return Simulator(Scenario{"", topology, traffic, horizon}).run().records;
}

}  // namespace v6transit
