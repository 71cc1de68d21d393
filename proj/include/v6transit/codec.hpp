#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "v6transit/address.hpp"
#include "v6transit/error.hpp"

namespace v6transit {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kIpv4BaseHeaderSize = 20;
inline constexpr std::size_t kIpv6HeaderSize = 40;
inline constexpr std::uint8_t kProtoIpv6InIpv4 = 41;
inline constexpr std::uint8_t kIpv4FlagDontFragment = 0b010;

struct Ipv4Header {
  std::uint8_t version = 4;
  std::uint8_t ihl = 5;
  std::uint8_t dscp_ecn = 0;
  std::uint16_t total_length = kIpv4BaseHeaderSize;
  std::uint16_t identification = 0;
  std::uint8_t flags = 0;             // 3 bits
  std::uint16_t fragment_offset = 0;  // 13 bits
  std::uint8_t ttl = 64;
  std::uint8_t protocol = 0;
  std::uint16_t checksum = 0;
  Ipv4Address src;
  Ipv4Address dst;
  Bytes options;

  std::size_t header_size() const { return std::size_t{ihl} * 4; }

  friend bool operator==(const Ipv4Header&, const Ipv4Header&) = default;
};

struct Ipv6Header {
  std::uint8_t version = 6;
  std::uint8_t traffic_class = 0;
  std::uint32_t flow_label = 0;  // 20 bits
  std::uint16_t payload_length = 0;
  std::uint8_t next_header = 59;  // no next header
  std::uint8_t hop_limit = 64;
  Ipv6Address src;
  Ipv6Address dst;

  friend bool operator==(const Ipv6Header&, const Ipv6Header&) = default;
};

enum class FrameKind { V4, V6, V6inV4 };

inline const char* frame_kind_name(FrameKind k) {
  switch (k) {
    case FrameKind::V4: return "V4";
    case FrameKind::V6: return "V6";
    case FrameKind::V6inV4: return "V6inV4";
  }
  return "?";
}

struct Packet {
  FrameKind frame_kind = FrameKind::V6;
  std::optional<Ipv4Header> outer_v4;
  std::optional<Ipv6Header> v6;
  Bytes payload;
  std::uint64_t packet_id = 0;  // bookkeeping only, never on the wire

  std::size_t wire_size() const {
    std::size_t n = payload.size();
    if (outer_v4) n += outer_v4->header_size();
    if (v6) n += kIpv6HeaderSize;
    return n;
  }

  friend bool operator==(const Packet&, const Packet&) = default;
};

namespace detail {

inline std::uint16_t load_be16(ByteView b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

inline void store_be16(Bytes& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<std::uint8_t>(v >> 8);
  b[at + 1] = static_cast<std::uint8_t>(v);
}

inline std::uint8_t version_nibble(ByteView b) { return static_cast<std::uint8_t>(b[0] >> 4); }

}  // namespace detail

/// 16-bit one's-complement sum of `bytes` (odd trailing byte padded with zero), folded, not complemented.
inline std::uint16_t ones_complement_sum(ByteView bytes) {
  std::uint32_t sum = 0;
  std::size_t i = 0;
  for (; i + 1 < bytes.size(); i += 2) sum += static_cast<std::uint32_t>((bytes[i] << 8) | bytes[i + 1]);
  if (i < bytes.size()) sum += static_cast<std::uint32_t>(bytes[i] << 8);
  while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
  return static_cast<std::uint16_t>(sum);
}

inline std::uint16_t internet_checksum(ByteView bytes) {
  return static_cast<std::uint16_t>(~ones_complement_sum(bytes));
}

inline void validate(const Ipv4Header& h) {
  if (h.version != 4) throw Error(Errc::InvalidHeader, "IPv4 version must be 4");
  if (h.ihl < 5 || h.ihl > 15) throw Error(Errc::InvalidHeader, "IPv4 ihl out of range");
  if (h.options.size() != (std::size_t{h.ihl} - 5) * 4)
    throw Error(Errc::InvalidHeader, "IPv4 options length disagrees with ihl");
  if (h.total_length < h.header_size()) throw Error(Errc::InvalidHeader, "IPv4 total_length below header size");
  if (h.flags > 0x7) throw Error(Errc::InvalidHeader, "IPv4 flags exceed 3 bits");
  if (h.fragment_offset > 0x1FFF) throw Error(Errc::InvalidHeader, "IPv4 fragment_offset exceeds 13 bits");
}

inline void validate(const Ipv6Header& h) {
  if (h.version != 6) throw Error(Errc::InvalidHeader, "IPv6 version must be 6");
  if (h.flow_label > 0xFFFFF) throw Error(Errc::InvalidHeader, "IPv6 flow_label exceeds 20 bits");
}

/// Header checksum is not checked here; see verify_ipv4_checksum.
inline Ipv4Header parse_ipv4_header(ByteView bytes) {
  if (bytes.empty()) throw Error(Errc::TooShort, "empty IPv4 header");
  if (detail::version_nibble(bytes) != 4) throw Error(Errc::BadVersion, "expected version 4");
  if (bytes.size() < kIpv4BaseHeaderSize) throw Error(Errc::TooShort, "IPv4 header needs 20 bytes");
  Ipv4Header h;
  h.version = 4;
  h.ihl = bytes[0] & 0x0F;
  if (h.ihl < 5) throw Error(Errc::BadIhl, "ihl " + std::to_string(h.ihl) + " < 5");
  if (bytes.size() < h.header_size()) throw Error(Errc::TooShort, "IPv4 header shorter than ihl*4");
  h.dscp_ecn = bytes[1];
  h.total_length = detail::load_be16(bytes, 2);
  h.identification = detail::load_be16(bytes, 4);
  auto frag = detail::load_be16(bytes, 6);
  h.flags = static_cast<std::uint8_t>(frag >> 13);
  h.fragment_offset = frag & 0x1FFF;
  h.ttl = bytes[8];
  h.protocol = bytes[9];
  h.checksum = detail::load_be16(bytes, 10);
  std::copy_n(bytes.begin() + 12, 4, h.src.octets.begin());
  std::copy_n(bytes.begin() + 16, 4, h.dst.octets.begin());
  h.options.assign(bytes.begin() + kIpv4BaseHeaderSize, bytes.begin() + static_cast<std::ptrdiff_t>(h.header_size()));
  return h;
}

inline Bytes serialize_ipv4_header(const Ipv4Header& h, bool recompute_checksum) {
  validate(h);
  Bytes out(h.header_size());
  out[0] = static_cast<std::uint8_t>((4 << 4) | h.ihl);
  out[1] = h.dscp_ecn;
  detail::store_be16(out, 2, h.total_length);
  detail::store_be16(out, 4, h.identification);
  detail::store_be16(out, 6, static_cast<std::uint16_t>((h.flags << 13) | h.fragment_offset));
  out[8] = h.ttl;
  out[9] = h.protocol;
  std::copy(h.src.octets.begin(), h.src.octets.end(), out.begin() + 12);
  std::copy(h.dst.octets.begin(), h.dst.octets.end(), out.begin() + 16);
  std::copy(h.options.begin(), h.options.end(), out.begin() + kIpv4BaseHeaderSize);
  detail::store_be16(out, 10, recompute_checksum ? internet_checksum(out) : h.checksum);
  return out;
}

/// The checksum the header would carry if serialized now.
inline std::uint16_t compute_ipv4_checksum(const Ipv4Header& h) {
  auto copy = h;
  copy.checksum = 0;
  return internet_checksum(serialize_ipv4_header(copy, false));
}

/// Sums the first max(ihl, 5) * 4 bytes, checksum included; valid iff that sum folds to 0xFFFF.
inline bool verify_ipv4_checksum(ByteView bytes) {
  if (bytes.size() < kIpv4BaseHeaderSize) throw Error(Errc::TooShort, "IPv4 header needs 20 bytes");
  std::size_t len = std::max<std::size_t>(5, bytes[0] & 0x0F) * 4;
  if (bytes.size() < len) throw Error(Errc::TooShort, "IPv4 header shorter than ihl*4");
  return ones_complement_sum(bytes.first(len)) == 0xFFFF;
}

inline Ipv6Header parse_ipv6_header(ByteView bytes) {
  if (bytes.empty()) throw Error(Errc::TooShort, "empty IPv6 header");
  if (detail::version_nibble(bytes) != 6) throw Error(Errc::BadVersion, "expected version 6");
  if (bytes.size() < kIpv6HeaderSize) throw Error(Errc::TooShort, "IPv6 header needs 40 bytes");
  Ipv6Header h;
  std::uint32_t word = (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
                       (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
  h.version = 6;
  h.traffic_class = static_cast<std::uint8_t>(word >> 20);
  h.flow_label = word & 0xFFFFF;
  h.payload_length = detail::load_be16(bytes, 4);
  h.next_header = bytes[6];
  h.hop_limit = bytes[7];
  std::copy_n(bytes.begin() + 8, 16, h.src.octets.begin());
  std::copy_n(bytes.begin() + 24, 16, h.dst.octets.begin());
  return h;
}

inline Bytes serialize_ipv6_header(const Ipv6Header& h) {
  validate(h);
  Bytes out(kIpv6HeaderSize);
  std::uint32_t word = (6u << 28) | (std::uint32_t{h.traffic_class} << 20) | h.flow_label;
  out[0] = static_cast<std::uint8_t>(word >> 24);
  out[1] = static_cast<std::uint8_t>(word >> 16);
  out[2] = static_cast<std::uint8_t>(word >> 8);
  out[3] = static_cast<std::uint8_t>(word);
  detail::store_be16(out, 4, h.payload_length);
  out[6] = h.next_header;
  out[7] = h.hop_limit;
  std::copy(h.src.octets.begin(), h.src.octets.end(), out.begin() + 8);
  std::copy(h.dst.octets.begin(), h.dst.octets.end(), out.begin() + 24);
  return out;
}

/// Checks the per-kind invariants of a Packet; throws InvalidHeader or LengthMismatch.
inline void validate(const Packet& p) {
  switch (p.frame_kind) {
    case FrameKind::V4:
      if (!p.outer_v4 || p.v6) throw Error(Errc::InvalidHeader, "V4 packet needs exactly an IPv4 header");
      break;
    case FrameKind::V6:
      if (p.outer_v4 || !p.v6) throw Error(Errc::InvalidHeader, "V6 packet needs exactly an IPv6 header");
      break;
    case FrameKind::V6inV4:
      if (!p.outer_v4 || !p.v6) throw Error(Errc::InvalidHeader, "V6inV4 packet needs both headers");
      if (p.outer_v4->protocol != kProtoIpv6InIpv4) throw Error(Errc::InvalidHeader, "V6inV4 outer protocol must be 41");
      break;
  }
  if (p.v6 && p.v6->payload_length != p.payload.size())
    throw Error(Errc::LengthMismatch, "IPv6 payload_length disagrees with payload size");
  if (p.outer_v4 && p.outer_v4->total_length != p.wire_size())
    throw Error(Errc::LengthMismatch, "IPv4 total_length disagrees with frame size");
}

/// Serializes headers as stored (checksum included) followed by the payload.
inline Bytes frame_packet(const Packet& p) {
  validate(p);
  Bytes out;
  out.reserve(p.wire_size());
  if (p.outer_v4) {
    auto h = serialize_ipv4_header(*p.outer_v4, false);
    out.insert(out.end(), h.begin(), h.end());
  }
  if (p.v6) {
    auto h = serialize_ipv6_header(*p.v6);
    out.insert(out.end(), h.begin(), h.end());
  }
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

inline Packet parse_frame(ByteView bytes, std::uint64_t packet_id = 0) {
  if (bytes.empty()) throw Error(Errc::TooShort, "empty frame");
  Packet p;
  p.packet_id = packet_id;
  ByteView rest = bytes;
  switch (detail::version_nibble(bytes)) {
    case 4: {
      auto h = parse_ipv4_header(bytes);
      if (h.total_length != bytes.size())
        throw Error(Errc::LengthMismatch, "IPv4 total_length " + std::to_string(h.total_length) + " but frame has " +
                                              std::to_string(bytes.size()) + " bytes");
      rest = bytes.subspan(h.header_size());
      p.frame_kind = h.protocol == kProtoIpv6InIpv4 ? FrameKind::V6inV4 : FrameKind::V4;
      p.outer_v4 = std::move(h);
      if (p.frame_kind == FrameKind::V4) break;
      [[fallthrough]];
    }
    case 6: {
      auto h = parse_ipv6_header(rest);
      if (h.payload_length != rest.size() - kIpv6HeaderSize)
        throw Error(Errc::LengthMismatch, "IPv6 payload_length " + std::to_string(h.payload_length) + " but " +
                                              std::to_string(rest.size() - kIpv6HeaderSize) + " bytes follow");
      rest = rest.subspan(kIpv6HeaderSize);
      p.v6 = h;
      if (!p.outer_v4) p.frame_kind = FrameKind::V6;
      break;
    }
    default:
      throw Error(Errc::BadVersion, "unknown version nibble " + std::to_string(detail::version_nibble(bytes)));
  }
  p.payload.assign(rest.begin(), rest.end());
  return p;
}

/// Builds a native IPv6 packet with consistent lengths.
inline Packet make_v6_packet(const Ipv6Address& src, const Ipv6Address& dst, Bytes payload,
                             std::uint8_t hop_limit = 64, std::uint8_t next_header = 59) {
  Packet p;
  p.frame_kind = FrameKind::V6;
  Ipv6Header h;
  h.src = src;
  h.dst = dst;
  h.hop_limit = hop_limit;
  h.next_header = next_header;
  h.payload_length = static_cast<std::uint16_t>(payload.size());
  p.v6 = h;
  p.payload = std::move(payload);
  return p;
}

/// Builds a plain IPv4 packet with consistent lengths and a fresh checksum.
inline Packet make_v4_packet(const Ipv4Address& src, const Ipv4Address& dst, Bytes payload,
                             std::uint8_t ttl = 64, std::uint8_t protocol = 1) {
  Packet p;
  p.frame_kind = FrameKind::V4;
  Ipv4Header h;
  h.src = src;
  h.dst = dst;
  h.ttl = ttl;
  h.protocol = protocol;
  h.total_length = static_cast<std::uint16_t>(kIpv4BaseHeaderSize + payload.size());
  h.checksum = compute_ipv4_checksum(h);
  p.outer_v4 = h;
  p.payload = std::move(payload);
  return p;
}

}  // namespace v6transit
