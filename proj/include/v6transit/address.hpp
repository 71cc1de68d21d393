#pragma once

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "v6transit/error.hpp"

namespace v6transit {

struct Ipv4Address {
  std::array<std::uint8_t, 4> octets{};

  static constexpr Ipv4Address from_uint(std::uint32_t v) {
    return Ipv4Address{{static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                        static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)}};
  }

  constexpr std::uint32_t to_uint() const {
    return (std::uint32_t{octets[0]} << 24) | (std::uint32_t{octets[1]} << 16) |
           (std::uint32_t{octets[2]} << 8) | std::uint32_t{octets[3]};
  }

  // Strict dotted-decimal: four decimal fields 0-255, no leading '+', no empty fields.
  static Ipv4Address parse(std::string_view text) {
    Ipv4Address out;
    std::size_t field = 0;
    std::size_t pos = 0;
    while (true) {
      if (field == 4) throw Error(Errc::ParseError, "bad IPv4 address '" + std::string(text) + "'");
      auto dot = text.find('.', pos);
      auto part = text.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
      unsigned value = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
      if (part.empty() || part.size() > 3 || ec != std::errc{} || ptr != part.data() + part.size() ||
          value > 255) {
        throw Error(Errc::ParseError, "bad IPv4 address '" + std::string(text) + "'");
      }
      out.octets[field++] = static_cast<std::uint8_t>(value);
      if (dot == std::string_view::npos) break;
      pos = dot + 1;
    }
    if (field != 4) throw Error(Errc::ParseError, "bad IPv4 address '" + std::string(text) + "'");
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < 4; ++i) {
      if (i) s += '.';
      s += std::to_string(octets[i]);
    }
    return s;
  }

  friend constexpr auto operator<=>(const Ipv4Address&, const Ipv4Address&) = default;
};

struct Ipv6Address {
  std::array<std::uint8_t, 16> octets{};

  constexpr std::uint16_t group(std::size_t i) const {
    return static_cast<std::uint16_t>((octets[2 * i] << 8) | octets[2 * i + 1]);
  }

  constexpr void set_group(std::size_t i, std::uint16_t v) {
    octets[2 * i] = static_cast<std::uint8_t>(v >> 8);
    octets[2 * i + 1] = static_cast<std::uint8_t>(v);
  }

  /// Accepts full, "::"-compressed, and trailing dotted-quad forms.
  static Ipv6Address parse(std::string_view text) {
    auto fail = [&]() -> Error {
      return Error(Errc::ParseError, "bad IPv6 address '" + std::string(text) + "'");
    };
    if (text.empty()) throw fail();

    std::vector<std::uint16_t> head, tail;
    bool compressed = false;
    std::string_view rest = text;
    if (auto dc = text.find("::"); dc != std::string_view::npos) {
      if (text.find("::", dc + 1) != std::string_view::npos) throw fail();
      compressed = true;
    }

    auto parse_groups = [&](std::string_view part, std::vector<std::uint16_t>& groups, bool allow_v4_tail) {
      if (part.empty()) return;
      std::size_t pos = 0;
      while (true) {
        auto colon = part.find(':', pos);
        auto g = part.substr(pos, colon == std::string_view::npos ? std::string_view::npos : colon - pos);
        if (colon == std::string_view::npos && allow_v4_tail && g.find('.') != std::string_view::npos) {
          auto v4 = Ipv4Address::parse(g).to_uint();
          groups.push_back(static_cast<std::uint16_t>(v4 >> 16));
          groups.push_back(static_cast<std::uint16_t>(v4));
          return;
        }
        unsigned value = 0;
        auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), value, 16);
        if (g.empty() || g.size() > 4 || ec != std::errc{} || ptr != g.data() + g.size()) throw fail();
        groups.push_back(static_cast<std::uint16_t>(value));
        if (colon == std::string_view::npos) return;
        pos = colon + 1;
      }
    };

    if (compressed) {
      auto dc = rest.find("::");
      parse_groups(rest.substr(0, dc), head, false);
      parse_groups(rest.substr(dc + 2), tail, true);
      if (head.size() + tail.size() > 7) throw fail();
    } else {
      parse_groups(rest, head, true);
      if (head.size() != 8) throw fail();
    }

    Ipv6Address out;
    for (std::size_t i = 0; i < head.size(); ++i) out.set_group(i, head[i]);
    for (std::size_t i = 0; i < tail.size(); ++i) out.set_group(8 - tail.size() + i, tail[i]);
    return out;
  }

  /// Lowercase compressed form: the longest run of two or more zero groups
  /// becomes "::", leftmost run wins ties.
  std::string to_string() const {
    int best_start = -1, best_len = 0;
    for (int i = 0; i < 8;) {
      if (group(i) != 0) {
        ++i;
        continue;
      }
      int j = i;
      while (j < 8 && group(j) == 0) ++j;
      if (j - i > best_len) {
        best_start = i;
        best_len = j - i;
      }
      i = j;
    }
    if (best_len < 2) best_start = -1;

    static constexpr char kHex[] = "0123456789abcdef";
    auto hex = [](std::uint16_t v) {
      std::string s;
      bool started = false;
      for (int shift = 12; shift >= 0; shift -= 4) {
        unsigned nib = (v >> shift) & 0xF;
        if (nib || started || shift == 0) {
          s += kHex[nib];
          started = true;
        }
      }
      return s;
    };

    std::string s;
    for (int i = 0; i < 8; ++i) {
      if (i == best_start) {
        s += "::";
        i += best_len - 1;
        continue;
      }
      if (!s.empty() && s.back() != ':') s += ':';
      s += hex(group(i));
    }
    return s;
  }

  friend constexpr auto operator<=>(const Ipv6Address&, const Ipv6Address&) = default;
};

}  // namespace v6transit
