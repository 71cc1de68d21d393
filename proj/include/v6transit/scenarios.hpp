#pragma once

#include <string>

#include "v6transit/topology.hpp"

namespace v6transit {

/// Knobs shared by the two built-in HQ - ISP - branch scenarios.
struct ScenarioOptions {
  double link_delay = 1e-3;
  double bandwidth = 100e6;
  std::uint32_t mtu = 1500;
  double router_processing_delay = 50e-6;
  double host_processing_delay = 0;
  std::uint32_t payload_bytes = 1000;
  std::uint32_t count = 10;
  double gap = 10e-3;
  double horizon = 10.0;
  TrafficMode mode = TrafficMode::Stream;
  bool reverse_flow = false;

  // Scenario 1 only.
  TunnelKind tunnel_kind = TunnelKind::Configured;
  bool with_tunnel = true;
};

namespace detail {

inline Ipv4Address v4(const char* s) { return Ipv4Address::parse(s); }
inline Ipv6Address v6(const char* s) { return Ipv6Address::parse(s); }

inline Ipv6Address with_host(const Ipv6Prefix& p, std::uint16_t host) {
  Ipv6Address a = p.address;
  a.set_group(7, host);
  return a;
}

struct SiteAddressing {
  Ipv6Address h1, h2, r1_lan, r3_lan;
  std::optional<Ipv6Prefix> h1_net, h2_net;  // 6to4 site prefixes
};

inline SiteAddressing site_addressing(bool sixto4) {
  if (!sixto4) return {v6("2001::3"), v6("2001::4"), v6("2001::1"), v6("2001::2"), std::nullopt, std::nullopt};
  auto hq = derive_6to4_prefix(v4("10.10.12.1"));
  auto br = derive_6to4_prefix(v4("10.10.23.3"));
  return {with_host(hq, 3), with_host(br, 4), with_host(hq, 1), with_host(br, 1), hq, br};
}

inline Ipv6Prefix host_route(const Ipv6Address& a) { return Ipv6Prefix{a, 128}; }

inline Link make_link(const char* id, LinkEnd a, LinkEnd b, const ScenarioOptions& o) {
  return Link{id, std::move(a), std::move(b), o.link_delay, o.bandwidth, o.mtu};
}

inline std::vector<TrafficSpec> default_traffic(const ScenarioOptions& o) {
  std::vector<TrafficSpec> t;
  TrafficSpec f;
  f.id = "h1-h2";
  f.src = "H1";
  f.dst = "H2";
  f.payload_bytes = o.payload_bytes;
  f.count = o.count;
  f.gap = o.gap;
  f.mode = o.mode;
  t.push_back(f);
  if (o.reverse_flow) {
    f.id = "h2-h1";
    std::swap(f.src, f.dst);
    t.push_back(f);
  }
  return t;
}

// H1 - R1 (HQ) - R2 (ISP) - R3 (Br) - H2 with the IPv4 plan shared by both scenarios.
inline Topology base_topology(const ScenarioOptions& o, const SiteAddressing& s) {
  Topology topo;

  Node h1;
  h1.id = "H1";
  h1.kind = NodeKind::Ipv6Only;
  h1.role = NodeRole::Host;
  h1.interfaces = {Interface{"eth0", std::nullopt, {s.h1}}};
  h1.v6_routes = {RouteEntry6{Ipv6Prefix::parse("::/0"), s.r1_lan, "eth0"}};
  h1.processing_delay = o.host_processing_delay;

  Node r1;
  r1.id = "R1";
  r1.kind = NodeKind::DualStack;
  r1.role = NodeRole::Router;
  r1.interfaces = {Interface{"fa0/0", v4("10.10.12.1"), {}}, Interface{"fa0/1", std::nullopt, {s.r1_lan}}};
  r1.v4_routes = {RouteEntry4{Ipv4Prefix::parse("10.10.12.0/24"), std::nullopt, "fa0/0"},
                  RouteEntry4{Ipv4Prefix::parse("10.10.23.0/24"), v4("10.10.12.2"), "fa0/0"}};
  r1.v6_routes = {RouteEntry6{s.h1_net ? *s.h1_net : host_route(s.h1), std::nullopt, "fa0/1"}};
  r1.processing_delay = o.router_processing_delay;

  Node r2;
  r2.id = "R2";
  r2.kind = NodeKind::Ipv4Only;
  r2.role = NodeRole::Router;
  r2.interfaces = {Interface{"fa0/0", v4("10.10.12.2"), {}}, Interface{"fa0/1", v4("10.10.23.2"), {}}};
  r2.v4_routes = {RouteEntry4{Ipv4Prefix::parse("10.10.12.0/24"), std::nullopt, "fa0/0"},
                  RouteEntry4{Ipv4Prefix::parse("10.10.23.0/24"), std::nullopt, "fa0/1"}};
  r2.processing_delay = o.router_processing_delay;

  Node r3;
  r3.id = "R3";
  r3.kind = NodeKind::DualStack;
  r3.role = NodeRole::Router;
  r3.interfaces = {Interface{"fa0/0", v4("10.10.23.3"), {}}, Interface{"fa0/1", std::nullopt, {s.r3_lan}}};
  r3.v4_routes = {RouteEntry4{Ipv4Prefix::parse("10.10.23.0/24"), std::nullopt, "fa0/0"},
                  RouteEntry4{Ipv4Prefix::parse("10.10.12.0/24"), v4("10.10.23.2"), "fa0/0"}};
  r3.v6_routes = {RouteEntry6{s.h2_net ? *s.h2_net : host_route(s.h2), std::nullopt, "fa0/1"}};
  r3.processing_delay = o.router_processing_delay;

  Node h2;
  h2.id = "H2";
  h2.kind = NodeKind::Ipv6Only;
  h2.role = NodeRole::Host;
  h2.interfaces = {Interface{"eth0", std::nullopt, {s.h2}}};
  h2.v6_routes = {RouteEntry6{Ipv6Prefix::parse("::/0"), s.r3_lan, "eth0"}};
  h2.processing_delay = o.host_processing_delay;

  topo.nodes = {h1, r1, r2, r3, h2};
  topo.links = {make_link("h1-r1", {"H1", "eth0"}, {"R1", "fa0/1"}, o),
                make_link("r1-r2", {"R1", "fa0/0"}, {"R2", "fa0/0"}, o),
                make_link("r2-r3", {"R2", "fa0/1"}, {"R3", "fa0/0"}, o),
                make_link("r3-h2", {"R3", "fa0/1"}, {"H2", "eth0"}, o)};
  return topo;
}

}  // namespace detail

/// Scenario 1: IPv6 islands joined by a tunnel between R1 and R3 across an IPv4-only ISP.
/// Without the tunnel, R1 hands IPv6 straight to the ISP, which cannot carry it.
inline Scenario build_scenario_6to4(const ScenarioOptions& o = {}) {
  bool sixto4 = o.tunnel_kind == TunnelKind::Auto6to4;
  auto s = detail::site_addressing(sixto4);
  Scenario sc;
  sc.name = sixto4 ? "6to4-auto" : "6to4";
  sc.topology = detail::base_topology(o, s);
  sc.traffic = detail::default_traffic(o);
  sc.horizon = o.horizon;

  auto& r1 = *sc.topology.find_node("R1");
  auto& r3 = *sc.topology.find_node("R3");
  if (!o.with_tunnel) {
    r1.v6_routes.push_back(RouteEntry6{detail::host_route(s.h2), std::nullopt, "fa0/0"});
    r3.v6_routes.push_back(RouteEntry6{detail::host_route(s.h1), std::nullopt, "fa0/0"});
    sc.name += "-notunnel";
    return sc;
  }

  TunnelConfig t1{"Tunnel0", o.tunnel_kind, detail::v4("10.10.12.1"), std::nullopt, std::nullopt};
  TunnelConfig t3{"Tunnel0", o.tunnel_kind, detail::v4("10.10.23.3"), std::nullopt, std::nullopt};
  switch (o.tunnel_kind) {
    case TunnelKind::Configured:
      t1.remote_v4 = detail::v4("10.10.23.3");
      t3.remote_v4 = detail::v4("10.10.12.1");
      t1.tunnel_if_addr = detail::v6("2001::7");
      t3.tunnel_if_addr = detail::v6("2001::8");
      r1.v6_routes.push_back(RouteEntry6{detail::host_route(s.h2), std::nullopt, "Tunnel0"});
      r3.v6_routes.push_back(RouteEntry6{detail::host_route(s.h1), std::nullopt, "Tunnel0"});
      break;
    case TunnelKind::Auto6to4:
      t1.tunnel_if_addr = detail::with_host(*s.h1_net, 7);
      t3.tunnel_if_addr = detail::with_host(*s.h2_net, 7);
      r1.v6_routes.push_back(RouteEntry6{sixto4_space(), std::nullopt, "Tunnel0"});
      r3.v6_routes.push_back(RouteEntry6{sixto4_space(), std::nullopt, "Tunnel0"});
      break;
    case TunnelKind::AutomaticCompatible:
      throw Error(Errc::ValidationError, "scenario 1 supports configured or 6to4 tunnels");
  }
  r1.tunnels = {t1};
  r3.tunnels = {t3};
  return sc;
}

/// Scenario 2: same shape, every router dual-stack, IPv6 routed natively end to end.
inline Scenario build_scenario_dualstack(const ScenarioOptions& o = {}) {
  auto s = detail::site_addressing(false);
  Scenario sc;
  sc.name = "dualstack";
  sc.topology = detail::base_topology(o, s);
  sc.traffic = detail::default_traffic(o);
  sc.horizon = o.horizon;

  auto& r1 = *sc.topology.find_node("R1");
  auto& r2 = *sc.topology.find_node("R2");
  auto& r3 = *sc.topology.find_node("R3");
  r2.kind = NodeKind::DualStack;

  r1.interfaces[0].v6 = {detail::v6("2001:12::1")};
  r2.interfaces[0].v6 = {detail::v6("2001:12::2")};
  r2.interfaces[1].v6 = {detail::v6("2001:23::2")};
  r3.interfaces[0].v6 = {detail::v6("2001:23::3")};

  r1.v6_routes.push_back(RouteEntry6{detail::host_route(s.h2), detail::v6("2001:12::2"), "fa0/0"});
  r2.v6_routes = {RouteEntry6{detail::host_route(s.h1), detail::v6("2001:12::1"), "fa0/0"},
                  RouteEntry6{detail::host_route(s.h2), detail::v6("2001:23::3"), "fa0/1"}};
  r3.v6_routes.push_back(RouteEntry6{detail::host_route(s.h1), detail::v6("2001:23::2"), "fa0/0"});
  return sc;
}

}  // namespace v6transit
