#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "v6transit/error.hpp"
#include "v6transit/records.hpp"

namespace v6transit {

struct FlowSummary {
  std::string flow_id;
  std::uint64_t injected = 0;
  std::uint64_t delivered_count = 0;
  std::uint64_t dropped_count = 0;
  std::optional<double> mean_delay;
  std::optional<double> min_delay;
  std::optional<double> max_delay;
  std::optional<double> jitter;  // mean |d[i] - d[i-1]| over delivered packets in send order
  double interval = 0;           // seconds the rates are measured over
  double goodput = 0;            // delivered payload bits / interval
  double wire_throughput = 0;    // wire bits on the flow's busiest link / interval
  std::optional<double> overhead_ratio;  // total wire bytes / total payload bytes carried, over all hops
  std::map<std::string, std::uint64_t> drops_by_reason;

  friend bool operator==(const FlowSummary&, const FlowSummary&) = default;
};

/// Per-(flow, link) byte accounting. goodput_at_capacity is the payload rate
/// the link would sustain if saturated with this flow's frames.
struct LinkUsage {
  std::string flow_id;
  std::string link_id;
  std::uint64_t frames = 0;
  std::uint64_t wire_bytes = 0;
  std::uint64_t payload_bytes = 0;
  std::optional<double> overhead_ratio;
  std::optional<double> goodput_at_capacity;

  friend bool operator==(const LinkUsage&, const LinkUsage&) = default;
};

namespace detail {

inline std::map<std::string, std::vector<const MetricsRecord*>> group_by_flow(const std::vector<MetricsRecord>& records) {
  std::map<std::string, std::vector<const MetricsRecord*>> flows;
  for (const auto& r : records) flows[r.flow_id].push_back(&r);
  for (auto& [id, rs] : flows) {
    std::sort(rs.begin(), rs.end(), [](const MetricsRecord* a, const MetricsRecord* b) {
      if (a->send_time != b->send_time) return a->send_time < b->send_time;
      return a->packet_id < b->packet_id;
    });
  }
  return flows;
}

}  // namespace detail

/// Aggregates records per flow (flows in flow_id order). Without an explicit
/// interval, each flow is measured from its first send to its last receive.
inline std::vector<FlowSummary> summarize(const std::vector<MetricsRecord>& records,
                                          std::optional<double> interval = std::nullopt) {
  std::vector<FlowSummary> out;
  for (const auto& [id, rs] : detail::group_by_flow(records)) {
    FlowSummary s;
    s.flow_id = id;
    s.injected = rs.size();

    double first_send = rs.front()->send_time;
    std::optional<double> last_receive;
    std::vector<double> delays;
    double delay_sum = 0;
    std::uint64_t payload_delivered = 0, payload_carried = 0, wire_total = 0;
    std::map<std::string, std::uint64_t> link_wire;

    for (const auto* r : rs) {
      if (auto d = r->delay()) {
        ++s.delivered_count;
        delays.push_back(*d);
        delay_sum += *d;
        payload_delivered += r->payload_bytes;
        last_receive = std::max(last_receive.value_or(*r->receive_time), *r->receive_time);
      } else {
        ++s.dropped_count;
        if (r->drop_reason) ++s.drops_by_reason[drop_reason_name(*r->drop_reason)];
      }
      for (const auto& hop : r->wire_bytes_per_hop) {
        wire_total += hop.bytes;
        payload_carried += r->payload_bytes;
        link_wire[hop.link_id] += hop.bytes;
      }
    }

    if (!delays.empty()) {
      s.mean_delay = delay_sum / static_cast<double>(delays.size());
      s.min_delay = *std::min_element(delays.begin(), delays.end());
      s.max_delay = *std::max_element(delays.begin(), delays.end());
    }
    if (delays.size() >= 2) {
      double acc = 0;
      for (std::size_t i = 1; i < delays.size(); ++i) acc += std::abs(delays[i] - delays[i - 1]);
      s.jitter = acc / static_cast<double>(delays.size() - 1);
    }

    if (interval) {
      s.interval = *interval;
    } else if (last_receive) {
      s.interval = *last_receive - first_send;
    }
    if (s.interval > 0) {
      std::uint64_t busiest = 0;
      for (const auto& [link, bytes] : link_wire) busiest = std::max(busiest, bytes);
      s.goodput = static_cast<double>(payload_delivered) * 8.0 / s.interval;
      s.wire_throughput = static_cast<double>(busiest) * 8.0 / s.interval;
    }
    if (payload_carried > 0) s.overhead_ratio = static_cast<double>(wire_total) / static_cast<double>(payload_carried);
    out.push_back(std::move(s));
  }
  return out;
}

/// Per-flow, per-link byte totals; `bandwidth` maps link id to bits/second.
inline std::vector<LinkUsage> summarize_links(const std::vector<MetricsRecord>& records,
                                              const std::map<std::string, double>& bandwidth = {}) {
  std::map<std::pair<std::string, std::string>, LinkUsage> acc;
  for (const auto& r : records) {
    for (const auto& hop : r.wire_bytes_per_hop) {
      auto& u = acc[{r.flow_id, hop.link_id}];
      u.flow_id = r.flow_id;
      u.link_id = hop.link_id;
      ++u.frames;
      u.wire_bytes += hop.bytes;
      u.payload_bytes += r.payload_bytes;
    }
  }
  std::vector<LinkUsage> out;
  for (auto& [key, u] : acc) {
    if (u.payload_bytes > 0) {
      u.overhead_ratio = static_cast<double>(u.wire_bytes) / static_cast<double>(u.payload_bytes);
      if (auto it = bandwidth.find(u.link_id); it != bandwidth.end())
        u.goodput_at_capacity = it->second * static_cast<double>(u.payload_bytes) / static_cast<double>(u.wire_bytes);
    }
    out.push_back(std::move(u));
  }
  return out;
}

struct ComparisonRow {
  std::string flow_id;
  std::uint64_t delivered_a = 0;
  std::uint64_t delivered_b = 0;
  std::optional<double> mean_delay_a;
  std::optional<double> mean_delay_b;
  std::optional<double> delay_delta;  // a - b
  double goodput_a = 0;
  double goodput_b = 0;
  std::optional<double> goodput_ratio;  // a / b
  std::optional<double> overhead_a;
  std::optional<double> overhead_b;
  std::optional<double> overhead_ratio;  // a / b

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

/// Pairs flows by id; throws FlowMismatch unless both sides have the same flow set.
inline ComparisonReport compare_scenarios(const std::vector<FlowSummary>& a, const std::vector<FlowSummary>& b) {
  std::map<std::string, const FlowSummary*> by_id;
  for (const auto& s : b) by_id[s.flow_id] = &s;
  std::set<std::string> ids_a;
  for (const auto& s : a) ids_a.insert(s.flow_id);
  for (const auto& s : b)
    if (!ids_a.count(s.flow_id)) throw Error(Errc::FlowMismatch, "flow '" + s.flow_id + "' only in second scenario");

  auto ratio = [](std::optional<double> x, std::optional<double> y) -> std::optional<double> {
    if (!x || !y || *y == 0) return std::nullopt;
    return *x / *y;
  };

  ComparisonReport report;
  for (const auto& sa : a) {
    auto it = by_id.find(sa.flow_id);
    if (it == by_id.end()) throw Error(Errc::FlowMismatch, "flow '" + sa.flow_id + "' only in first scenario");
    const auto& sb = *it->second;
    ComparisonRow row;
    row.flow_id = sa.flow_id;
    row.delivered_a = sa.delivered_count;
    row.delivered_b = sb.delivered_count;
    row.mean_delay_a = sa.mean_delay;
    row.mean_delay_b = sb.mean_delay;
    if (sa.mean_delay && sb.mean_delay) row.delay_delta = *sa.mean_delay - *sb.mean_delay;
    row.goodput_a = sa.goodput;
    row.goodput_b = sb.goodput;
    row.goodput_ratio = ratio(sa.goodput, sb.goodput);
    row.overhead_a = sa.overhead_ratio;
    row.overhead_b = sb.overhead_ratio;
    row.overhead_ratio = ratio(sa.overhead_ratio, sb.overhead_ratio);
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ComparisonRow& x, const ComparisonRow& y) { return x.flow_id < y.flow_id; });
  return report;
}

}  // namespace v6transit
