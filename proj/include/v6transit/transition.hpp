#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "v6transit/addressing.hpp"
#include "v6transit/codec.hpp"

namespace v6transit {

enum class TunnelKind { Configured, AutomaticCompatible, Auto6to4 };

inline const char* tunnel_kind_name(TunnelKind k) {
  switch (k) {
    case TunnelKind::Configured: return "configured";
    case TunnelKind::AutomaticCompatible: return "automatic-compatible";
    case TunnelKind::Auto6to4: return "6to4";
  }
  return "?";
}

struct TunnelConfig {
  std::string name;
  TunnelKind kind = TunnelKind::Configured;
  Ipv4Address local_v4;
  std::optional<Ipv4Address> remote_v4;       // Configured only
  std::optional<Ipv6Address> tunnel_if_addr;  // the tunnel interface's own IPv6 address

  /// Configured tunnels are point-to-point and need a remote; automatic kinds derive it per packet.
  void validate() const {
    if (kind == TunnelKind::Configured && !remote_v4)
      throw Error(Errc::InvalidTunnel, "configured tunnel '" + name + "' needs remote_v4");
    if (kind != TunnelKind::Configured && remote_v4)
      throw Error(Errc::InvalidTunnel, "automatic tunnel '" + name + "' must not set remote_v4");
  }

  friend bool operator==(const TunnelConfig&, const TunnelConfig&) = default;
};

/// Bijective IPv4 <-> IPv6 address pairs for stateless translation. With
/// `embed_compatible`, addresses outside the map fall back to the ::/96 embedding.
class TranslationMap {
 public:
  TranslationMap() = default;

  explicit TranslationMap(std::vector<std::pair<Ipv4Address, Ipv6Address>> pairs, bool embed_compatible = true)
      : pairs_(std::move(pairs)), embed_compatible_(embed_compatible) {
    for (std::size_t i = 0; i < pairs_.size(); ++i)
      for (std::size_t j = i + 1; j < pairs_.size(); ++j)
        if (pairs_[i].first == pairs_[j].first || pairs_[i].second == pairs_[j].second)
          throw Error(Errc::InvalidMap, "translation map is not bijective at " + pairs_[j].first.to_string());
  }

  std::optional<Ipv6Address> lookup_v6(const Ipv4Address& a) const {
    for (const auto& [v4, v6] : pairs_)
      if (v4 == a) return v6;
    return std::nullopt;
  }

  std::optional<Ipv4Address> lookup_v4(const Ipv6Address& a) const {
    for (const auto& [v4, v6] : pairs_)
      if (v6 == a) return v4;
    return std::nullopt;
  }

  bool embed_compatible() const { return embed_compatible_; }
  const auto& pairs() const { return pairs_; }

 private:
  std::vector<std::pair<Ipv4Address, Ipv6Address>> pairs_;
  bool embed_compatible_ = true;
};

/// Wraps a V6 packet in a 20-byte IPv4 header with protocol 41 and a fresh checksum.
inline Packet encapsulate_6in4(const Packet& inner, const Ipv4Address& src_v4, const Ipv4Address& dst_v4,
                               std::uint8_t ttl) {
  if (inner.frame_kind != FrameKind::V6 || !inner.v6 || inner.outer_v4)
    throw Error(Errc::InvalidInner, "only native IPv6 packets can be encapsulated");
  validate(inner);
  Packet out = inner;
  out.frame_kind = FrameKind::V6inV4;
  Ipv4Header h;
  h.protocol = kProtoIpv6InIpv4;
  h.ttl = ttl;
  h.src = src_v4;
  h.dst = dst_v4;
  h.total_length = static_cast<std::uint16_t>(kIpv4BaseHeaderSize + kIpv6HeaderSize + inner.payload.size());
  h.checksum = compute_ipv4_checksum(h);
  out.outer_v4 = h;
  return out;
}

inline Packet decapsulate_6in4(const Packet& outer) {
  if (!outer.outer_v4 || outer.outer_v4->protocol != kProtoIpv6InIpv4 || !outer.v6)
    throw Error(Errc::NotTunneled, "outer protocol is not 41");
  if (!verify_ipv4_checksum(serialize_ipv4_header(*outer.outer_v4, false)))
    throw Error(Errc::BadChecksum, "outer IPv4 header checksum mismatch");
  if (outer.outer_v4->total_length != outer.outer_v4->header_size() + kIpv6HeaderSize + outer.payload.size() ||
      outer.v6->payload_length != outer.payload.size())
    throw Error(Errc::LengthMismatch, "encapsulated lengths disagree");
  Packet inner = outer;
  inner.frame_kind = FrameKind::V6;
  inner.outer_v4.reset();
  return inner;
}

enum class StackPath { V4Path, V6Path };

/// Chooses the protocol stack from the version nibble of the first byte.
inline StackPath dual_stack_dispatch(ByteView bytes) {
  if (bytes.empty()) throw Error(Errc::TooShort, "empty frame");
  switch (bytes[0] >> 4) {
    case 4: return StackPath::V4Path;
    case 6: return StackPath::V6Path;
    default: throw Error(Errc::UnknownVersion, "version nibble " + std::to_string(bytes[0] >> 4));
  }
}

inline Ipv4Address resolve_tunnel_endpoint(const TunnelConfig& cfg, const Ipv6Address& dst) {
  switch (cfg.kind) {
    case TunnelKind::Configured:
      if (!cfg.remote_v4) throw Error(Errc::NoEndpoint, "configured tunnel without remote");
      return *cfg.remote_v4;
    case TunnelKind::Auto6to4:
      if (!sixto4_space().contains(dst)) throw Error(Errc::NoEndpoint, dst.to_string() + " carries no 6to4 endpoint");
      return extract_6to4_ipv4(dst);
    case TunnelKind::AutomaticCompatible:
      if (!is_tunnelable_compatible(dst))
        throw Error(Errc::NoEndpoint, dst.to_string() + " is not a tunnelable IPv4-compatible address");
      return extract_compatible_ipv4(dst);
  }
  throw Error(Errc::NoEndpoint, "unknown tunnel kind");
}

namespace detail {

inline Ipv4Address translate_address(const Ipv6Address& a, const TranslationMap& map) {
  if (auto v4 = map.lookup_v4(a)) return *v4;
  if (map.embed_compatible() && is_tunnelable_compatible(a)) return extract_compatible_ipv4(a);
  throw Error(Errc::UnmappableAddress, "no IPv4 mapping for " + a.to_string());
}

inline Ipv6Address translate_address(const Ipv4Address& a, const TranslationMap& map) {
  if (auto v6 = map.lookup_v6(a)) return *v6;
  if (map.embed_compatible() && a.to_uint() > 1) return make_ipv4_compatible(a);
  throw Error(Errc::UnmappableAddress, "no IPv6 mapping for " + a.to_string());
}

}  // namespace detail

/// Stateless header rewrite: hop_limit->ttl, traffic_class->dscp_ecn,
/// next_header->protocol; DF set, identification 0, payload verbatim.
inline Packet translate_v6_to_v4(const Packet& p, const TranslationMap& map) {
  if (p.frame_kind != FrameKind::V6 || !p.v6) throw Error(Errc::InvalidInner, "expected a native IPv6 packet");
  Packet out;
  out.frame_kind = FrameKind::V4;
  out.packet_id = p.packet_id;
  out.payload = p.payload;
  Ipv4Header h;
  h.src = detail::translate_address(p.v6->src, map);
  h.dst = detail::translate_address(p.v6->dst, map);
  h.ttl = p.v6->hop_limit;
  h.dscp_ecn = p.v6->traffic_class;
  h.protocol = p.v6->next_header;
  h.identification = 0;
  h.flags = kIpv4FlagDontFragment;
  h.total_length = static_cast<std::uint16_t>(kIpv4BaseHeaderSize + p.payload.size());
  h.checksum = compute_ipv4_checksum(h);
  out.outer_v4 = h;
  return out;
}

/// Inverse rewrite; the flow label is always 0 since IPv4 has no equivalent field.
inline Packet translate_v4_to_v6(const Packet& p, const TranslationMap& map) {
  if (p.frame_kind != FrameKind::V4 || !p.outer_v4) throw Error(Errc::InvalidInner, "expected a plain IPv4 packet");
  Packet out;
  out.frame_kind = FrameKind::V6;
  out.packet_id = p.packet_id;
  out.payload = p.payload;
  Ipv6Header h;
  h.src = detail::translate_address(p.outer_v4->src, map);
  h.dst = detail::translate_address(p.outer_v4->dst, map);
  h.hop_limit = p.outer_v4->ttl;
  h.traffic_class = p.outer_v4->dscp_ecn;
  h.next_header = p.outer_v4->protocol;
  h.flow_label = 0;
  h.payload_length = static_cast<std::uint16_t>(p.payload.size());
  out.v6 = h;
  return out;
}

}  // namespace v6transit
