#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace v6transit {

enum class DropReason {
  DroppedWrongFamily,
  TtlExpired,
  NoRoute,
  MtuExceeded,
  NoEndpoint,
  NotAddressedToHost,
  Malformed,
  BadChecksum,
  HorizonReached,
};

inline const char* drop_reason_name(DropReason r) {
  switch (r) {
    case DropReason::DroppedWrongFamily: return "DroppedWrongFamily";
    case DropReason::TtlExpired: return "TtlExpired";
    case DropReason::NoRoute: return "NoRoute";
    case DropReason::MtuExceeded: return "MtuExceeded";
    case DropReason::NoEndpoint: return "NoEndpoint";
    case DropReason::NotAddressedToHost: return "NotAddressedToHost";
    case DropReason::Malformed: return "Malformed";
    case DropReason::BadChecksum: return "BadChecksum";
    case DropReason::HorizonReached: return "HorizonReached";
  }
  return "?";
}

struct HopBytes {
  std::string link_id;
  std::uint32_t bytes = 0;

  friend bool operator==(const HopBytes&, const HopBytes&) = default;
};

/// One injected packet. Exactly one of receive_time / drop_reason is set once the run completes.
struct MetricsRecord {
  std::uint64_t packet_id = 0;
  std::string flow_id;
  std::string src_node;
  std::string dst_node;
  double send_time = 0;
  std::optional<double> receive_time;
  std::optional<DropReason> drop_reason;
  std::string drop_node;
  std::uint32_t payload_bytes = 0;
  std::vector<HopBytes> wire_bytes_per_hop;

  bool delivered() const { return receive_time.has_value(); }
  std::optional<double> delay() const {
    if (!receive_time) return std::nullopt;
    return *receive_time - send_time;
  }

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

}  // namespace v6transit
