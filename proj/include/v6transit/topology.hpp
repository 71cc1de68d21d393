#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "v6transit/routing.hpp"
#include "v6transit/transition.hpp"

namespace v6transit {

enum class NodeKind { Ipv4Only, Ipv6Only, DualStack };
enum class NodeRole { Host, Router };

inline const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Ipv4Only: return "ipv4-only";
    case NodeKind::Ipv6Only: return "ipv6-only";
    case NodeKind::DualStack: return "dual-stack";
  }
  return "?";
}

inline const char* node_role_name(NodeRole r) { return r == NodeRole::Host ? "host" : "router"; }

struct Interface {
  std::string name;
  std::optional<Ipv4Address> v4;
  std::vector<Ipv6Address> v6;

  friend bool operator==(const Interface&, const Interface&) = default;
};

struct Node {
  std::string id;
  NodeKind kind = NodeKind::DualStack;
  NodeRole role = NodeRole::Router;
  std::vector<Interface> interfaces;
  std::vector<RouteEntry4> v4_routes;
  std::vector<RouteEntry6> v6_routes;
  std::vector<TunnelConfig> tunnels;
  double processing_delay = 0;  // seconds per forwarded or originated packet

  bool speaks_v4() const { return kind != NodeKind::Ipv6Only; }
  bool speaks_v6() const { return kind != NodeKind::Ipv4Only; }

  const Interface* find_interface(std::string_view name) const {
    for (const auto& i : interfaces)
      if (i.name == name) return &i;
    return nullptr;
  }

  const TunnelConfig* find_tunnel(std::string_view name) const {
    for (const auto& t : tunnels)
      if (t.name == name) return &t;
    return nullptr;
  }

  bool owns(const Ipv4Address& a) const {
    return std::any_of(interfaces.begin(), interfaces.end(), [&](const Interface& i) { return i.v4 == a; });
  }

  bool owns(const Ipv6Address& a) const {
    for (const auto& i : interfaces)
      if (std::find(i.v6.begin(), i.v6.end(), a) != i.v6.end()) return true;
    return std::any_of(tunnels.begin(), tunnels.end(), [&](const TunnelConfig& t) { return t.tunnel_if_addr == a; });
  }

  std::optional<Ipv4Address> first_v4() const {
    for (const auto& i : interfaces)
      if (i.v4) return i.v4;
    return std::nullopt;
  }

  std::optional<Ipv6Address> first_v6() const {
    for (const auto& i : interfaces)
      if (!i.v6.empty()) return i.v6.front();
    return std::nullopt;
  }

  friend bool operator==(const Node&, const Node&) = default;
};

struct LinkEnd {
  std::string node;
  std::string if_name;

  friend bool operator==(const LinkEnd&, const LinkEnd&) = default;
  friend auto operator<=>(const LinkEnd&, const LinkEnd&) = default;
};

/// Full-duplex point-to-point link; each direction is an independent FIFO.
struct Link {
  std::string id;
  LinkEnd a;
  LinkEnd b;
  double propagation_delay = 1e-3;  // seconds
  double bandwidth = 100e6;         // bits per second
  std::uint32_t mtu = 1500;         // bytes

  double serialization_delay(std::size_t bytes) const { return static_cast<double>(bytes) * 8.0 / bandwidth; }

  friend bool operator==(const Link&, const Link&) = default;
};

struct Topology {
  std::vector<Node> nodes;
  std::vector<Link> links;

  const Node* find_node(std::string_view id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }

  Node* find_node(std::string_view id) {
    for (auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }

  friend bool operator==(const Topology&, const Topology&) = default;
};

enum class AddressFamily { V4, V6 };

// Stream sends `count` one-way packets; Ping also has the sink answer each
// delivered request with a reply recorded under "<id>.reply".
enum class TrafficMode { Stream, Ping };

struct TrafficSpec {
  std::string id;
  std::string src;
  std::string dst;
  AddressFamily family = AddressFamily::V6;
  TrafficMode mode = TrafficMode::Stream;
  std::uint32_t payload_bytes = 1000;
  std::uint32_t count = 1;
  double start = 0;
  double gap = 1e-3;
  std::uint8_t hop_limit = 64;
  double jitter = 0;  // max uniform send-time offset, seconds; used only with a seed
  std::optional<IpAddress> src_addr;
  std::optional<IpAddress> dst_addr;

  friend bool operator==(const TrafficSpec&, const TrafficSpec&) = default;
};

struct Scenario {
  std::string name;
  Topology topology;
  std::vector<TrafficSpec> traffic;
  double horizon = 10.0;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws InvalidTopology for structural defects.
inline void validate_topology(const Topology& topo) {
  auto fail = [](const std::string& msg) { return Error(Errc::InvalidTopology, msg); };

  std::set<std::string> ids;
  for (const auto& n : topo.nodes) {
    if (n.id.empty()) throw fail("node with empty id");
    if (!ids.insert(n.id).second) throw fail("duplicate node '" + n.id + "'");
    std::set<std::string> names;
    for (const auto& i : n.interfaces)
      if (!names.insert(i.name).second) throw fail(n.id + ": duplicate interface '" + i.name + "'");
    for (const auto& t : n.tunnels) {
      if (!names.insert(t.name).second) throw fail(n.id + ": tunnel name '" + t.name + "' already in use");
      if (n.kind != NodeKind::DualStack) throw fail(n.id + ": tunnel '" + t.name + "' requires a dual-stack node");
      try {
        t.validate();
      } catch (const Error& e) {
        throw fail(n.id + ": " + e.what());
      }
    }
    if (n.processing_delay < 0) throw fail(n.id + ": negative processing_delay");

    auto check_routes = [&](const auto& routes, const char* family) {
      for (std::size_t i = 0; i < routes.size(); ++i) {
        const auto& r = routes[i];
        if (!n.find_interface(r.out_if) && !n.find_tunnel(r.out_if))
          throw fail(n.id + ": " + family + " route " + r.prefix.to_string() + " uses unknown out_if '" + r.out_if + "'");
        for (std::size_t j = 0; j < i; ++j)
          if (routes[j].prefix == r.prefix && routes[j].out_if == r.out_if)
            throw fail(n.id + ": duplicate route " + r.prefix.to_string() + " via " + r.out_if);
      }
    };
    check_routes(n.v4_routes, "IPv4");
    check_routes(n.v6_routes, "IPv6");
  }

  std::set<std::string> link_ids;
  std::set<LinkEnd> used;
  for (const auto& l : topo.links) {
    if (!link_ids.insert(l.id).second) throw fail("duplicate link id '" + l.id + "'");
    if (!(l.propagation_delay >= 0)) throw fail("link '" + l.id + "': propagation_delay must be >= 0");
    if (!(l.bandwidth > 0)) throw fail("link '" + l.id + "': bandwidth must be > 0");
    if (l.mtu < kIpv6HeaderSize) throw fail("link '" + l.id + "': mtu below 40 bytes");
    for (const auto* end : {&l.a, &l.b}) {
      const Node* n = topo.find_node(end->node);
      if (!n) throw fail("link '" + l.id + "': unknown node '" + end->node + "'");
      if (!n->find_interface(end->if_name))
        throw fail("link '" + l.id + "': node '" + end->node + "' has no interface '" + end->if_name + "'");
      if (!used.insert(*end).second)
        throw fail("link '" + l.id + "': interface " + end->node + ":" + end->if_name + " already linked");
    }
  }
  for (const auto& n : topo.nodes)
    for (const auto& i : n.interfaces)
      if (!used.count(LinkEnd{n.id, i.name})) throw fail("dangling interface " + n.id + ":" + i.name);
}

/// Throws InvalidTraffic for unknown endpoints or impossible parameters.
inline void validate_traffic(const Topology& topo, const std::vector<TrafficSpec>& traffic) {
  auto fail = [](const std::string& msg) { return Error(Errc::InvalidTraffic, msg); };
  std::set<std::string> ids;
  for (const auto& t : traffic) {
    if (!ids.insert(t.id).second) throw fail("duplicate flow id '" + t.id + "'");
    for (const auto* name : {&t.src, &t.dst}) {
      const Node* n = topo.find_node(*name);
      if (!n) throw fail("flow '" + t.id + "': unknown node '" + *name + "'");
      bool has = t.family == AddressFamily::V4 ? n->first_v4().has_value() : n->first_v6().has_value();
      bool explicit_addr = name == &t.src ? t.src_addr.has_value() : t.dst_addr.has_value();
      if (!has && !explicit_addr) throw fail("flow '" + t.id + "': node '" + *name + "' has no address of the flow family");
    }
    for (const auto& a : {t.src_addr, t.dst_addr}) {
      if (a && (a->index() == 0) != (t.family == AddressFamily::V4))
        throw fail("flow '" + t.id + "': address family disagrees with flow family");
    }
    std::size_t headers = t.family == AddressFamily::V4 ? kIpv4BaseHeaderSize : kIpv6HeaderSize;
    if (t.payload_bytes + headers + kIpv4BaseHeaderSize > 0xFFFF) throw fail("flow '" + t.id + "': payload too large");
    if (!(t.gap >= 0) || !(t.start >= 0) || !(t.jitter >= 0)) throw fail("flow '" + t.id + "': negative timing");
  }
}

inline void validate_scenario(const Scenario& s) {
  validate_topology(s.topology);
  validate_traffic(s.topology, s.traffic);
  if (!(s.horizon > 0)) throw Error(Errc::ValidationError, "horizon must be > 0");
}

}  // namespace v6transit
