#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "v6transit/addressing.hpp"

namespace v6transit {

/// Static route. `out_if` names either a physical interface or a tunnel on the owning node.
template <class Prefix>
struct RouteEntry {
  using address_type = decltype(Prefix::address);

  Prefix prefix;
  std::optional<address_type> next_hop;
  std::string out_if;

  friend bool operator==(const RouteEntry&, const RouteEntry&) = default;
};

using RouteEntry4 = RouteEntry<Ipv4Prefix>;
using RouteEntry6 = RouteEntry<Ipv6Prefix>;

/// Longest-prefix match; among equal lengths the earliest entry wins. Throws NoRoute.
template <class Prefix>
const RouteEntry<Prefix>& route_lookup(std::span<const RouteEntry<Prefix>> routes,
                                       const typename RouteEntry<Prefix>::address_type& dst) {
  const RouteEntry<Prefix>* best = nullptr;
  for (const auto& r : routes) {
    if (!r.prefix.contains(dst)) continue;
    if (!best || r.prefix.length > best->prefix.length) best = &r;
  }
  if (!best) throw Error(Errc::NoRoute, "no route to " + dst.to_string());
  return *best;
}

template <class Prefix>
const RouteEntry<Prefix>& route_lookup(const std::vector<RouteEntry<Prefix>>& routes,
                                       const typename RouteEntry<Prefix>::address_type& dst) {
  return route_lookup(std::span<const RouteEntry<Prefix>>(routes), dst);
}

}  // namespace v6transit
