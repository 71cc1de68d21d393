#pragma once

// Scenario files are YAML documents:
//
//   name: <string>
//   horizon: <seconds>
//   nodes:
//     - id: R1
//       kind: dual-stack | ipv4-only | ipv6-only
//       role: router | host
//       processing_delay: <seconds>
//       interfaces: [{name, v4?, v6?: [addr...]}]
//       tunnels: [{name, kind: configured | automatic-compatible | 6to4, local_v4, remote_v4?, address?}]
//       routes_v4: [{prefix, next_hop?, out}]
//       routes_v6: [{prefix, next_hop?, out}]
//   links:
//     - {id, a: {node, if}, b: {node, if}, delay, bandwidth, mtu}
//   traffic:
//     - {id, src, dst, family: v6 | v4, mode: stream | ping, payload_bytes,
//        count, start, gap, hop_limit, jitter, src_addr?, dst_addr?}
//
// Unknown keys are rejected.

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "v6transit/scenarios.hpp"
#include "v6transit/topology.hpp"

namespace v6transit {

namespace yaml_detail {

inline Error parse_error(const YAML::Node& n, const std::string& path, const std::string& msg) {
  auto mark = n.Mark();
  std::string where = mark.is_null() ? std::string() : "line " + std::to_string(mark.line + 1) + ": ";
  return Error(Errc::ParseError, where + path + ": " + msg);
}

inline void expect_map(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!n.IsMap()) throw parse_error(n, path, "expected a mapping");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : n) {
    auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw parse_error(kv.first, path + "." + key, "unknown key '" + key + "'");
  }
}

inline const YAML::Node require(const YAML::Node& n, const char* key, const std::string& path) {
  auto child = n[key];
  if (!child) throw parse_error(n, path + "." + key, "missing required key '" + std::string(key) + "'");
  return child;
}

template <class T>
T scalar(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) throw parse_error(n, path, "expected a scalar");
  if constexpr (std::is_same_v<T, std::uint8_t>) {
    auto v = scalar<unsigned>(n, path);
    if (v > 255) throw parse_error(n, path, "value exceeds 255");
    return static_cast<std::uint8_t>(v);
  } else if constexpr (std::is_same_v<T, Ipv4Address> || std::is_same_v<T, Ipv6Address> ||
                       std::is_same_v<T, Ipv4Prefix> || std::is_same_v<T, Ipv6Prefix>) {
    try {
      return T::parse(n.Scalar());
    } catch (const Error& e) {
      throw parse_error(n, path, e.what());
    }
  } else {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw parse_error(n, path, "cannot convert '" + n.Scalar() + "'");
    }
  }
}

template <class T>
T scalar_or(const YAML::Node& parent, const char* key, const std::string& path, T fallback) {
  auto n = parent[key];
  if (!n) return fallback;
  return scalar<T>(n, path + "." + key);
}

template <class E>
E enum_value(const YAML::Node& n, const std::string& path, std::initializer_list<std::pair<const char*, E>> table) {
  auto s = scalar<std::string>(n, path);
  std::string options;
  for (const auto& [name, value] : table) {
    if (s == name) return value;
    options += options.empty() ? name : std::string(", ") + name;
  }
  throw parse_error(n, path, "unknown value '" + s + "' (expected one of: " + options + ")");
}

inline std::string num(double v) { return fmt::format("{}", v); }

template <class F>
void each(const YAML::Node& n, const std::string& path, F&& f) {
  if (!n) return;
  if (!n.IsSequence()) throw parse_error(n, path, "expected a sequence");
  for (std::size_t i = 0; i < n.size(); ++i) f(n[i], path + "[" + std::to_string(i) + "]");
}

template <class Route>
std::vector<Route> parse_routes(const YAML::Node& n, const std::string& path) {
  using Prefix = decltype(Route::prefix);
  using Address = typename Route::address_type;
  std::vector<Route> out;
  each(n, path, [&](const YAML::Node& r, const std::string& p) {
    expect_map(r, p, {"prefix", "next_hop", "out"});
    Route route;
    route.prefix = scalar<Prefix>(require(r, "prefix", p), p + ".prefix");
    if (r["next_hop"]) route.next_hop = scalar<Address>(r["next_hop"], p + ".next_hop");
    route.out_if = scalar<std::string>(require(r, "out", p), p + ".out");
    out.push_back(std::move(route));
  });
  return out;
}

inline Node parse_node(const YAML::Node& n, const std::string& path) {
  expect_map(n, path,
             {"id", "kind", "role", "processing_delay", "interfaces", "tunnels", "routes_v4", "routes_v6"});
  Node node;
  node.id = scalar<std::string>(require(n, "id", path), path + ".id");
  node.kind = enum_value<NodeKind>(require(n, "kind", path), path + ".kind",
                                   {{"dual-stack", NodeKind::DualStack},
                                    {"ipv4-only", NodeKind::Ipv4Only},
                                    {"ipv6-only", NodeKind::Ipv6Only}});
  node.role = n["role"] ? enum_value<NodeRole>(n["role"], path + ".role",
                                               {{"router", NodeRole::Router}, {"host", NodeRole::Host}})
                        : NodeRole::Router;
  node.processing_delay = scalar_or<double>(n, "processing_delay", path, 0.0);

  each(n["interfaces"], path + ".interfaces", [&](const YAML::Node& i, const std::string& p) {
    expect_map(i, p, {"name", "v4", "v6"});
    Interface itf;
    itf.name = scalar<std::string>(require(i, "name", p), p + ".name");
    if (i["v4"]) itf.v4 = scalar<Ipv4Address>(i["v4"], p + ".v4");
    if (auto v6 = i["v6"]) {
      if (v6.IsScalar()) {
        itf.v6.push_back(scalar<Ipv6Address>(v6, p + ".v6"));
      } else {
        each(v6, p + ".v6", [&](const YAML::Node& a, const std::string& ap) {
          itf.v6.push_back(scalar<Ipv6Address>(a, ap));
        });
      }
    }
    node.interfaces.push_back(std::move(itf));
  });

  each(n["tunnels"], path + ".tunnels", [&](const YAML::Node& t, const std::string& p) {
    expect_map(t, p, {"name", "kind", "local_v4", "remote_v4", "address"});
    TunnelConfig cfg;
    cfg.name = scalar<std::string>(require(t, "name", p), p + ".name");
    cfg.kind = enum_value<TunnelKind>(require(t, "kind", p), p + ".kind",
                                      {{"configured", TunnelKind::Configured},
                                       {"automatic-compatible", TunnelKind::AutomaticCompatible},
                                       {"6to4", TunnelKind::Auto6to4}});
    cfg.local_v4 = scalar<Ipv4Address>(require(t, "local_v4", p), p + ".local_v4");
    if (t["remote_v4"]) cfg.remote_v4 = scalar<Ipv4Address>(t["remote_v4"], p + ".remote_v4");
    if (t["address"]) cfg.tunnel_if_addr = scalar<Ipv6Address>(t["address"], p + ".address");
    node.tunnels.push_back(std::move(cfg));
  });

  node.v4_routes = parse_routes<RouteEntry4>(n["routes_v4"], path + ".routes_v4");
  node.v6_routes = parse_routes<RouteEntry6>(n["routes_v6"], path + ".routes_v6");
  return node;
}

inline LinkEnd parse_end(const YAML::Node& n, const std::string& path) {
  expect_map(n, path, {"node", "if"});
  return LinkEnd{scalar<std::string>(require(n, "node", path), path + ".node"),
                 scalar<std::string>(require(n, "if", path), path + ".if")};
}

inline Link parse_link(const YAML::Node& n, const std::string& path) {
  expect_map(n, path, {"id", "a", "b", "delay", "bandwidth", "mtu"});
  Link l;
  l.id = scalar<std::string>(require(n, "id", path), path + ".id");
  l.a = parse_end(require(n, "a", path), path + ".a");
  l.b = parse_end(require(n, "b", path), path + ".b");
  l.propagation_delay = scalar_or<double>(n, "delay", path, l.propagation_delay);
  l.bandwidth = scalar_or<double>(n, "bandwidth", path, l.bandwidth);
  l.mtu = scalar_or<std::uint32_t>(n, "mtu", path, l.mtu);
  return l;
}

inline IpAddress parse_ip(const YAML::Node& n, const std::string& path, AddressFamily family) {
  if (family == AddressFamily::V4) return scalar<Ipv4Address>(n, path);
  return scalar<Ipv6Address>(n, path);
}

inline TrafficSpec parse_traffic(const YAML::Node& n, const std::string& path) {
  expect_map(n, path,
             {"id", "src", "dst", "family", "mode", "payload_bytes", "count", "start", "gap", "hop_limit", "jitter",
              "src_addr", "dst_addr"});
  TrafficSpec t;
  t.id = scalar<std::string>(require(n, "id", path), path + ".id");
  t.src = scalar<std::string>(require(n, "src", path), path + ".src");
  t.dst = scalar<std::string>(require(n, "dst", path), path + ".dst");
  if (n["family"])
    t.family = enum_value<AddressFamily>(n["family"], path + ".family",
                                         {{"v6", AddressFamily::V6}, {"v4", AddressFamily::V4}});
  if (n["mode"])
    t.mode = enum_value<TrafficMode>(n["mode"], path + ".mode",
                                     {{"stream", TrafficMode::Stream}, {"ping", TrafficMode::Ping}});
  t.payload_bytes = scalar_or<std::uint32_t>(n, "payload_bytes", path, t.payload_bytes);
  t.count = scalar_or<std::uint32_t>(n, "count", path, t.count);
  t.start = scalar_or<double>(n, "start", path, t.start);
  t.gap = scalar_or<double>(n, "gap", path, t.gap);
  t.hop_limit = scalar_or<std::uint8_t>(n, "hop_limit", path, t.hop_limit);
  t.jitter = scalar_or<double>(n, "jitter", path, t.jitter);
  if (n["src_addr"]) t.src_addr = parse_ip(n["src_addr"], path + ".src_addr", t.family);
  if (n["dst_addr"]) t.dst_addr = parse_ip(n["dst_addr"], path + ".dst_addr", t.family);
  return t;
}

inline std::string ip_text(const IpAddress& a) {
  return std::visit([](const auto& x) { return x.to_string(); }, a);
}

template <class Route>
YAML::Node emit_routes(const std::vector<Route>& routes) {
  YAML::Node seq(YAML::NodeType::Sequence);
  for (const auto& r : routes) {
    YAML::Node y;
    y["prefix"] = r.prefix.to_string();
    if (r.next_hop) y["next_hop"] = r.next_hop->to_string();
    y["out"] = r.out_if;
    seq.push_back(y);
  }
  return seq;
}

}  // namespace yaml_detail

/// Builds and validates a Scenario from a parsed YAML document. Throws ParseError
/// (with line and field path) for malformed input; structural checks throw
/// InvalidTopology / InvalidTraffic.
inline Scenario scenario_from_yaml(const YAML::Node& root) {
  using namespace yaml_detail;
  expect_map(root, "scenario", {"name", "horizon", "nodes", "links", "traffic"});
  Scenario s;
  s.name = scalar_or<std::string>(root, "name", "scenario", "");
  s.horizon = scalar_or<double>(root, "horizon", "scenario", s.horizon);
  each(require(root, "nodes", "scenario"), "nodes",
             [&](const YAML::Node& n, const std::string& p) { s.topology.nodes.push_back(parse_node(n, p)); });
  each(root["links"], "links",
             [&](const YAML::Node& n, const std::string& p) { s.topology.links.push_back(parse_link(n, p)); });
  each(root["traffic"], "traffic",
             [&](const YAML::Node& n, const std::string& p) { s.traffic.push_back(parse_traffic(n, p)); });
  validate_scenario(s);
  return s;
}

inline YAML::Node scenario_to_yaml(const Scenario& s) {
  using yaml_detail::num;
  YAML::Node root;
  root["name"] = s.name;
  root["horizon"] = num(s.horizon);

  YAML::Node nodes(YAML::NodeType::Sequence);
  for (const auto& n : s.topology.nodes) {
    YAML::Node y;
    y["id"] = n.id;
    y["kind"] = node_kind_name(n.kind);
    y["role"] = node_role_name(n.role);
    y["processing_delay"] = num(n.processing_delay);
    YAML::Node ifs(YAML::NodeType::Sequence);
    for (const auto& i : n.interfaces) {
      YAML::Node yi;
      yi["name"] = i.name;
      if (i.v4) yi["v4"] = i.v4->to_string();
      if (!i.v6.empty()) {
        YAML::Node v6(YAML::NodeType::Sequence);
        for (const auto& a : i.v6) v6.push_back(a.to_string());
        v6.SetStyle(YAML::EmitterStyle::Flow);
        yi["v6"] = v6;
      }
      ifs.push_back(yi);
    }
    y["interfaces"] = ifs;
    if (!n.tunnels.empty()) {
      YAML::Node ts(YAML::NodeType::Sequence);
      for (const auto& t : n.tunnels) {
        YAML::Node yt;
        yt["name"] = t.name;
        yt["kind"] = tunnel_kind_name(t.kind);
        yt["local_v4"] = t.local_v4.to_string();
        if (t.remote_v4) yt["remote_v4"] = t.remote_v4->to_string();
        if (t.tunnel_if_addr) yt["address"] = t.tunnel_if_addr->to_string();
        ts.push_back(yt);
      }
      y["tunnels"] = ts;
    }
    if (!n.v4_routes.empty()) y["routes_v4"] = yaml_detail::emit_routes(n.v4_routes);
    if (!n.v6_routes.empty()) y["routes_v6"] = yaml_detail::emit_routes(n.v6_routes);
    nodes.push_back(y);
  }
  root["nodes"] = nodes;

  YAML::Node links(YAML::NodeType::Sequence);
  for (const auto& l : s.topology.links) {
    YAML::Node y;
    y["id"] = l.id;
    for (const auto& [key, end] : {std::pair{"a", &l.a}, std::pair{"b", &l.b}}) {
      YAML::Node e;
      e["node"] = end->node;
      e["if"] = end->if_name;
      e.SetStyle(YAML::EmitterStyle::Flow);
      y[key] = e;
    }
    y["delay"] = num(l.propagation_delay);
    y["bandwidth"] = num(l.bandwidth);
    y["mtu"] = l.mtu;
    links.push_back(y);
  }
  root["links"] = links;

  YAML::Node traffic(YAML::NodeType::Sequence);
  for (const auto& t : s.traffic) {
    YAML::Node y;
    y["id"] = t.id;
    y["src"] = t.src;
    y["dst"] = t.dst;
    y["family"] = t.family == AddressFamily::V4 ? "v4" : "v6";
    y["mode"] = t.mode == TrafficMode::Ping ? "ping" : "stream";
    y["payload_bytes"] = t.payload_bytes;
    y["count"] = t.count;
    y["start"] = num(t.start);
    y["gap"] = num(t.gap);
    y["hop_limit"] = static_cast<unsigned>(t.hop_limit);
    y["jitter"] = num(t.jitter);
    if (t.src_addr) y["src_addr"] = yaml_detail::ip_text(*t.src_addr);
    if (t.dst_addr) y["dst_addr"] = yaml_detail::ip_text(*t.dst_addr);
    traffic.push_back(y);
  }
  root["traffic"] = traffic;
  return root;
}

inline std::string dump_scenario(const Scenario& s) {
  YAML::Emitter out;
  out << scenario_to_yaml(s);
  return std::string(out.c_str()) + "\n";
}

inline YAML::Node load_yaml_text(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw Error(Errc::ParseError, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

inline Scenario parse_scenario(std::string_view text) { return scenario_from_yaml(load_yaml_text(text)); }

/// Applies "path=value" where path segments are separated by '.'. A segment
/// addresses a map key, a sequence index, '*' (every element), or the element
/// whose `id` or `name` equals the segment. Flow-style values ([..], {..}) are parsed.
inline void apply_override(YAML::Node root, std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw Error(Errc::ValidationError, "override '" + std::string(assignment) + "' is not key=value");
  std::string path(assignment.substr(0, eq));
  std::string value(assignment.substr(eq + 1));

  std::vector<std::string> segments;
  std::stringstream ss(path);
  for (std::string seg; std::getline(ss, seg, '.');) segments.push_back(seg);

  YAML::Node parsed_value;
  if (!value.empty() && (value.front() == '[' || value.front() == '{')) {
    parsed_value = load_yaml_text(value);
  } else {
    parsed_value = YAML::Node(value);
  }

  std::size_t hits = 0;
  auto walk = [&](auto&& self, YAML::Node node, std::size_t depth) -> void {
    const auto& seg = segments[depth];
    bool last = depth + 1 == segments.size();
    auto descend = [&](YAML::Node child) {
      if (last) {
        ++hits;
      } else {
        self(self, child, depth + 1);
      }
    };
    if (node.IsSequence()) {
      for (std::size_t i = 0; i < node.size(); ++i) {
        YAML::Node el = node[i];
        bool match = seg == "*" || seg == std::to_string(i) ||
                     (el.IsMap() && ((el["id"] && el["id"].Scalar() == seg) || (el["name"] && el["name"].Scalar() == seg)));
        if (!match) continue;
        if (last) {
          node[i] = parsed_value;
          ++hits;
        } else {
          descend(el);
        }
      }
    } else if (node.IsMap()) {
      if (last) {
        node[seg] = parsed_value;
        ++hits;
      } else if (node[seg]) {
        descend(node[seg]);
      }
    }
  };
  if (!segments.empty()) walk(walk, root, 0);
  if (hits == 0) throw Error(Errc::ValidationError, "override path '" + path + "' matches nothing");
}

inline const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names{"6to4", "6to4-auto", "6to4-notunnel", "dualstack"};
  return names;
}

inline std::optional<Scenario> builtin_scenario(std::string_view name, const ScenarioOptions& o = {}) {
  if (name == "6to4") return build_scenario_6to4(o);
  if (name == "6to4-auto") {
    auto opts = o;
    opts.tunnel_kind = TunnelKind::Auto6to4;
    return build_scenario_6to4(opts);
  }
  if (name == "6to4-notunnel") {
    auto opts = o;
    opts.with_tunnel = false;
    return build_scenario_6to4(opts);
  }
  if (name == "dualstack") return build_scenario_dualstack(o);
  return std::nullopt;
}

/// Resolves a built-in name or a file path to a YAML document (built-ins win).
inline YAML::Node scenario_document(const std::string& name_or_path) {
  if (auto s = builtin_scenario(name_or_path)) return scenario_to_yaml(*s);
  std::ifstream in(name_or_path);
  if (!in) throw Error(Errc::FileNotFound, "no built-in scenario or readable file named '" + name_or_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_yaml_text(buf.str());
}

inline Scenario load_scenario(const std::string& name_or_path, const std::vector<std::string>& overrides = {}) {
  auto doc = scenario_document(name_or_path);
  for (const auto& o : overrides) apply_override(doc, o);
  return scenario_from_yaml(doc);
}

}  // namespace v6transit
