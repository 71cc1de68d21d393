#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "v6transit/address.hpp"
#include "v6transit/error.hpp"

namespace v6transit {

namespace detail {

// True iff the first `bits` bits of a and b agree.
template <std::size_t N>
constexpr bool leading_bits_equal(const std::array<std::uint8_t, N>& a, const std::array<std::uint8_t, N>& b,
                                  unsigned bits) {
  std::size_t full = bits / 8;
  for (std::size_t i = 0; i < full; ++i)
    if (a[i] != b[i]) return false;
  unsigned rem = bits % 8;
  if (rem == 0) return true;
  auto mask = static_cast<std::uint8_t>(0xFF << (8 - rem));
  return (a[full] & mask) == (b[full] & mask);
}

template <std::size_t N>
constexpr std::array<std::uint8_t, N> mask_to(std::array<std::uint8_t, N> octets, unsigned bits) {
  for (std::size_t i = 0; i < N; ++i) {
    if (bits >= 8 * (i + 1)) continue;
    unsigned keep = bits > 8 * i ? bits - 8 * static_cast<unsigned>(i) : 0;
    octets[i] &= static_cast<std::uint8_t>(keep ? 0xFF << (8 - keep) : 0);
  }
  return octets;
}

}  // namespace detail

/// Address plus prefix length with all host bits zero.
template <class Address>
struct BasicPrefix {
  static constexpr unsigned kMaxLength = sizeof(Address{}.octets) * 8;

  Address address;
  unsigned length = 0;

  /// Masks host bits; throws ParseError if length exceeds the family width.
  static BasicPrefix of(const Address& a, unsigned len) {
    if (len > kMaxLength) throw Error(Errc::ParseError, "prefix length " + std::to_string(len) + " too long");
    return BasicPrefix{Address{detail::mask_to(a.octets, len)}, len};
  }

  /// "addr/len"; host bits must be zero. A bare address is a full-length prefix.
  static BasicPrefix parse(std::string_view text) {
    auto slash = text.find('/');
    auto addr = Address::parse(text.substr(0, slash));
    unsigned len = kMaxLength;
    if (slash != std::string_view::npos) {
      auto digits = text.substr(slash + 1);
      len = 0;
      if (digits.empty() || digits.size() > 3) throw Error(Errc::ParseError, "bad prefix '" + std::string(text) + "'");
      for (char c : digits) {
        if (c < '0' || c > '9') throw Error(Errc::ParseError, "bad prefix '" + std::string(text) + "'");
        len = len * 10 + static_cast<unsigned>(c - '0');
      }
    }
    auto p = of(addr, len);
    if (p.address != addr) throw Error(Errc::ParseError, "prefix '" + std::string(text) + "' has host bits set");
    return p;
  }

  bool contains(const Address& a) const { return detail::leading_bits_equal(address.octets, a.octets, length); }

  std::string to_string() const { return address.to_string() + "/" + std::to_string(length); }

  friend bool operator==(const BasicPrefix&, const BasicPrefix&) = default;
};

using Ipv4Prefix = BasicPrefix<Ipv4Address>;
using Ipv6Prefix = BasicPrefix<Ipv6Address>;

using IpAddress = std::variant<Ipv4Address, Ipv6Address>;
using IpPrefix = std::variant<Ipv4Prefix, Ipv6Prefix>;

inline bool prefix_matches(const Ipv6Prefix& prefix, const Ipv6Address& addr) { return prefix.contains(addr); }
inline bool prefix_matches(const Ipv4Prefix& prefix, const Ipv4Address& addr) { return prefix.contains(addr); }

/// Family-erased form; throws FamilyMismatch when prefix and address families differ.
inline bool prefix_matches(const IpPrefix& prefix, const IpAddress& addr) {
  if (prefix.index() != addr.index()) throw Error(Errc::FamilyMismatch, "prefix and address families differ");
  if (auto* p4 = std::get_if<Ipv4Prefix>(&prefix)) return p4->contains(std::get<Ipv4Address>(addr));
  return std::get<Ipv6Prefix>(prefix).contains(std::get<Ipv6Address>(addr));
}

inline constexpr std::uint16_t k6to4Group = 0x2002;

inline const Ipv6Prefix& sixto4_space() {
  static const Ipv6Prefix p = Ipv6Prefix::parse("2002::/16");
  return p;
}

inline const Ipv6Prefix& isatap_space() {
  static const Ipv6Prefix p = Ipv6Prefix::parse("fe80::5efe:0:0/96");
  return p;
}

inline const Ipv6Prefix& compatible_space() {
  static const Ipv6Prefix p = Ipv6Prefix::parse("::/96");
  return p;
}

// 6to4: 2002 in bits 0-15, IPv4 address in bits 16-47.
inline Ipv6Prefix derive_6to4_prefix(const Ipv4Address& v4) {
  Ipv6Address a;
  a.set_group(0, k6to4Group);
  std::copy(v4.octets.begin(), v4.octets.end(), a.octets.begin() + 2);
  return Ipv6Prefix{a, 48};
}

inline Ipv4Address extract_6to4_ipv4(const Ipv6Address& addr) {
  if (!sixto4_space().contains(addr)) throw Error(Errc::Not6to4, addr.to_string() + " is outside 2002::/16");
  Ipv4Address v4;
  std::copy_n(addr.octets.begin() + 2, 4, v4.octets.begin());
  return v4;
}

// ISATAP: fe80::5efe/96 followed by the 32-bit IPv4 address.
inline Ipv6Address derive_isatap_address(const Ipv4Address& v4) {
  Ipv6Address a = isatap_space().address;
  std::copy(v4.octets.begin(), v4.octets.end(), a.octets.begin() + 12);
  return a;
}

inline Ipv6Address make_ipv4_compatible(const Ipv4Address& v4) {
  Ipv6Address a;
  std::copy(v4.octets.begin(), v4.octets.end(), a.octets.begin() + 12);
  return a;
}

inline Ipv4Address extract_compatible_ipv4(const Ipv6Address& addr) {
  if (!compatible_space().contains(addr)) throw Error(Errc::NotCompatible, addr.to_string() + " is outside ::/96");
  Ipv4Address v4;
  std::copy_n(addr.octets.begin() + 12, 4, v4.octets.begin());
  return v4;
}

/// ::/96 minus the unspecified (::) and loopback (::1) addresses, which are never tunneled or translated.
inline bool is_tunnelable_compatible(const Ipv6Address& addr) {
  if (!compatible_space().contains(addr)) return false;
  auto low = extract_compatible_ipv4(addr).to_uint();
  return low > 1;
}

}  // namespace v6transit
