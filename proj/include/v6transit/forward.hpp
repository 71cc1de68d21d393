#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "v6transit/records.hpp"
#include "v6transit/topology.hpp"

namespace v6transit {

struct Emit {
  std::string out_if;
  Bytes frame;
};

struct Deliver {
  Packet packet;  // innermost packet as seen by the receiving stack
};

struct Drop {
  DropReason reason;
  std::string detail;
};

struct ForwardResult {
  std::variant<Emit, Deliver, Drop> outcome;
  bool encapsulated = false;
  bool decapsulated = false;

  const Emit* emitted() const { return std::get_if<Emit>(&outcome); }
  const Deliver* delivered() const { return std::get_if<Deliver>(&outcome); }
  const Drop* dropped() const { return std::get_if<Drop>(&outcome); }
};

/// Maps an interface name to the MTU of its attached link; nullopt means unlimited.
using MtuLookup = std::function<std::optional<std::uint32_t>(std::string_view)>;

namespace detail {

class Forwarder {
 public:
  Forwarder(const Node& node, const MtuLookup& mtu) : node_(node), mtu_(mtu) {}

  // `transit` is false for packets the node originates itself: no hop
  // decrement and no host-forwarding restriction.
  ForwardResult process(Packet p, bool transit) {
    if (p.outer_v4) return process_v4(std::move(p), transit);
    return process_v6(std::move(p), transit);
  }

 private:
  ForwardResult drop(DropReason r, std::string detail) {
    result_.outcome = Drop{r, std::move(detail)};
    return std::move(result_);
  }

  ForwardResult process_v4(Packet p, bool transit) {
    auto& h = *p.outer_v4;
    if (!node_.speaks_v4()) return drop(DropReason::DroppedWrongFamily, node_.id + " does not speak IPv4");
    if (transit && !verify_ipv4_checksum(serialize_ipv4_header(h, false)))
      return drop(DropReason::BadChecksum, "IPv4 header checksum mismatch at " + node_.id);

    if (node_.owns(h.dst)) {
      if (p.frame_kind != FrameKind::V6inV4) return deliver(std::move(p));
      if (!node_.speaks_v6())
        return drop(DropReason::DroppedWrongFamily, node_.id + " cannot decapsulate IPv6 without an IPv6 stack");
      Packet inner;
      try {
        inner = decapsulate_6in4(p);
      } catch (const Error& e) {
        return drop(e.code() == Errc::BadChecksum ? DropReason::BadChecksum : DropReason::Malformed, e.what());
      }
      result_.decapsulated = true;
      return process_v6(std::move(inner), true);
    }
    if (transit && node_.role == NodeRole::Host)
      return drop(DropReason::NotAddressedToHost, h.dst.to_string() + " is not an address of host " + node_.id);

    if (transit) {
      if (h.ttl <= 1) return drop(DropReason::TtlExpired, "IPv4 ttl expired at " + node_.id);
      --h.ttl;
      h.checksum = compute_ipv4_checksum(h);
    }
    return route_v4(std::move(p));
  }

  ForwardResult route_v4(Packet p) {
    const RouteEntry4* route = nullptr;
    try {
      route = &route_lookup(node_.v4_routes, p.outer_v4->dst);
    } catch (const Error& e) {
      return drop(DropReason::NoRoute, node_.id + ": " + e.what());
    }
    if (!node_.find_interface(route->out_if))
      return drop(DropReason::NoRoute, node_.id + ": IPv4 route points into tunnel " + route->out_if);
    return emit(route->out_if, p);
  }

  ForwardResult process_v6(Packet p, bool transit) {
    auto& h = *p.v6;
    if (!node_.speaks_v6()) return drop(DropReason::DroppedWrongFamily, node_.id + " does not speak IPv6");
    if (node_.owns(h.dst)) return deliver(std::move(p));
    if (transit && node_.role == NodeRole::Host)
      return drop(DropReason::NotAddressedToHost, h.dst.to_string() + " is not an address of host " + node_.id);

    if (transit) {
      if (h.hop_limit <= 1) return drop(DropReason::TtlExpired, "IPv6 hop_limit expired at " + node_.id);
      --h.hop_limit;
    }

    const RouteEntry6* route = nullptr;
    try {
      route = &route_lookup(node_.v6_routes, h.dst);
    } catch (const Error& e) {
      return drop(DropReason::NoRoute, node_.id + ": " + e.what());
    }

    const TunnelConfig* tunnel = node_.find_tunnel(route->out_if);
    if (!tunnel) return emit(route->out_if, p);

    Ipv4Address endpoint;
    try {
      endpoint = resolve_tunnel_endpoint(*tunnel, h.dst);
    } catch (const Error& e) {
      return drop(DropReason::NoEndpoint, node_.id + ": " + e.what());
    }
    Packet outer = encapsulate_6in4(p, tunnel->local_v4, endpoint, h.hop_limit);
    result_.encapsulated = true;
    return route_v4(std::move(outer));
  }

  ForwardResult deliver(Packet p) {
    result_.outcome = Deliver{std::move(p)};
    return std::move(result_);
  }

  ForwardResult emit(const std::string& out_if, const Packet& p) {
    Bytes frame = frame_packet(p);
    if (mtu_) {
      if (auto limit = mtu_(out_if); limit && frame.size() > *limit)
        return drop(DropReason::MtuExceeded, std::to_string(frame.size()) + " bytes exceed mtu " +
                                                 std::to_string(*limit) + " on " + node_.id + ":" + out_if);
    }
    result_.outcome = Emit{out_if, std::move(frame)};
    return std::move(result_);
  }

  const Node& node_;
  const MtuLookup& mtu_;
  ForwardResult result_{Drop{DropReason::Malformed, "unprocessed"}};
};

}  // namespace detail

/// One forwarding decision for a frame arriving on `in_if`: version dispatch,
/// family filter, local delivery (decapsulating 6in4 addressed to this node),
/// hop decrement, longest-prefix route lookup, and tunnel encapsulation.
/// Problems come back as Drop outcomes, never as exceptions.
inline ForwardResult forward(const Node& node, ByteView frame, std::string_view in_if, double now,
                             const MtuLookup& mtu = {}) {
  (void)in_if;
  (void)now;
  try {
    dual_stack_dispatch(frame);
  } catch (const Error& e) {
    return ForwardResult{Drop{DropReason::Malformed, e.what()}};
  }
  Packet p;
  try {
    p = parse_frame(frame);
  } catch (const Error& e) {
    return ForwardResult{Drop{DropReason::Malformed, e.what()}};
  }
  return detail::Forwarder(node, mtu).process(std::move(p), true);
}

/// Sends a locally generated packet: same pipeline as forward() minus hop
/// decrement and the host check.
inline ForwardResult originate(const Node& node, Packet p, const MtuLookup& mtu = {}) {
  return detail::Forwarder(node, mtu).process(std::move(p), false);
}

}  // namespace v6transit
