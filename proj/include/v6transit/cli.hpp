#pragma once

// Command implementations behind the v6transit executable. Each returns a
// process exit code: 0 success, 1 usage, 2 validation, 3 runtime.

#include <cctype>
#include <fstream>
#include <future>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "v6transit/metrics.hpp"
#include "v6transit/report.hpp"
#include "v6transit/scenario_file.hpp"
#include "v6transit/sim.hpp"

namespace v6transit::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

inline int exit_code_for(Errc e) {
  switch (e) {
    case Errc::FileNotFound: return kUsage;
    case Errc::ParseError:
    case Errc::ValidationError:
    case Errc::InvalidTopology:
    case Errc::InvalidTraffic:
    case Errc::InvalidTunnel:
    case Errc::InvalidMap:
    case Errc::FlowMismatch:
    case Errc::BadHex:
    case Errc::TooShort:
    case Errc::BadVersion:
    case Errc::BadIhl:
    case Errc::InvalidHeader:
    case Errc::LengthMismatch:
      return kValidation;
    default: return kRuntime;
  }
}

struct RunOptions {
  OutputFormat format = OutputFormat::Table;
  std::optional<std::string> trace_path;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

namespace detail {

inline std::string to_hex(ByteView bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s += kHex[b >> 4];
    s += kHex[b & 0xF];
  }
  return s;
}

inline void write_trace(std::ostream& os, const std::string& scenario, const std::vector<TraceEntry>& trace) {
  for (const auto& t : trace)
    os << fmt::format("{} {} {} {}->{} {} {} {}\n", scenario, t.time, t.link_id, t.from_node, t.to_node,
                      t.packet_id, frame_kind_name(t.kind), to_hex(t.frame));
}

struct RunOutput {
  std::string name;
  SimulationResult result;
};

inline RunOutput run_one(const std::string& name_or_path, const RunOptions& opt) {
  Scenario s = load_scenario(name_or_path, opt.overrides);
  if (opt.horizon) {
    s.horizon = *opt.horizon;
    validate_scenario(s);
  }
  SimOptions sim;
  sim.trace = opt.trace_path.has_value();
  sim.seed = opt.seed;
  std::string name = s.name.empty() ? name_or_path : s.name;
  return RunOutput{name, run_simulation(s, sim)};
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

inline void open_trace(const RunOptions& opt, std::ofstream& file) {
  if (!opt.trace_path) return;
  file.open(*opt.trace_path);
  if (!file) throw Error(Errc::FileNotFound, "cannot write trace file '" + *opt.trace_path + "'");
}

}  // namespace detail

inline int cmd_run(const std::string& scenario, const RunOptions& opt, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    std::ofstream trace;
    detail::open_trace(opt, trace);
    auto run = detail::run_one(scenario, opt);
    render(out, flow_rows(run.name, summarize(run.result.records)), opt.format);
    if (trace.is_open()) detail::write_trace(trace, run.name, run.result.trace);
    return kOk;
  });
}

/// Runs both scenarios concurrently, then reports per-flow deltas (a - b) and ratios (a / b).
inline int cmd_compare(const std::string& a, const std::string& b, const RunOptions& opt, std::ostream& out,
                       std::ostream& err) {
  return detail::guarded(err, [&] {
    std::ofstream trace;
    detail::open_trace(opt, trace);
    auto fa = std::async(std::launch::async, [&] { return detail::run_one(a, opt); });
    auto fb = std::async(std::launch::async, [&] { return detail::run_one(b, opt); });
    auto ra = fa.get();
    auto rb = fb.get();
    auto report = compare_scenarios(summarize(ra.result.records), summarize(rb.result.records));
    render(out, comparison_rows(ra.name, rb.name, report), opt.format);
    if (trace.is_open()) {
      detail::write_trace(trace, ra.name, ra.result.trace);
      detail::write_trace(trace, rb.name, rb.result.trace);
    }
    return kOk;
  });
}

inline int cmd_derive(const std::string& kind, const std::string& v4_text, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    auto v4 = Ipv4Address::parse(v4_text);
    if (kind == "6to4") {
      out << derive_6to4_prefix(v4).to_string() << '\n';
    } else if (kind == "isatap") {
      out << derive_isatap_address(v4).to_string() << '\n';
    } else if (kind == "compatible") {
      out << make_ipv4_compatible(v4).to_string() << '\n';
    } else {
      err << "error: unknown derivation '" << kind << "' (expected 6to4, isatap, compatible)\n";
      return static_cast<int>(kUsage);
    }
    return static_cast<int>(kOk);
  });
}

inline Bytes parse_hex(std::string_view text) {
  std::string digits;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) digits += c;
  if (digits.size() >= 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) digits.erase(0, 2);
  if (digits.size() % 2) throw Error(Errc::BadHex, "odd number of hex digits");
  Bytes out;
  out.reserve(digits.size() / 2);
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < digits.size(); i += 2) {
    int hi = nibble(digits[i]), lo = nibble(digits[i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::BadHex, "invalid hex digit near offset " + std::to_string(i));
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

/// Field-by-field dump of a frame.
inline void dump_frame(std::ostream& out, const Packet& p) {
  out << fmt::format("frame: {} ({} bytes)\n", frame_kind_name(p.frame_kind), p.wire_size());
  if (p.outer_v4) {
    const auto& h = *p.outer_v4;
    bool ok = verify_ipv4_checksum(serialize_ipv4_header(h, false));
    std::string prefix = p.frame_kind == FrameKind::V6inV4 ? "outer." : "ipv4.";
    out << fmt::format("{}version: {}\n", prefix, h.version);
    out << fmt::format("{}ihl: {} ({} bytes)\n", prefix, h.ihl, h.header_size());
    out << fmt::format("{}dscp_ecn: 0x{:02x}\n", prefix, h.dscp_ecn);
    out << fmt::format("{}total_length: {}\n", prefix, h.total_length);
    out << fmt::format("{}identification: {}\n", prefix, h.identification);
    out << fmt::format("{}flags: 0b{:03b}\n", prefix, h.flags);
    out << fmt::format("{}fragment_offset: {}\n", prefix, h.fragment_offset);
    out << fmt::format("{}ttl: {}\n", prefix, h.ttl);
    out << fmt::format("{}protocol: {}{}\n", prefix, h.protocol,
                       h.protocol == kProtoIpv6InIpv4 ? " (IPv6 encapsulation)" : "");
    out << fmt::format("{}checksum: 0x{:04x} ({})\n", prefix, h.checksum, ok ? "valid" : "INVALID");
    out << fmt::format("{}src: {}\n", prefix, h.src.to_string());
    out << fmt::format("{}dst: {}\n", prefix, h.dst.to_string());
    if (!h.options.empty()) out << fmt::format("{}options: {}\n", prefix, detail::to_hex(h.options));
  }
  if (p.v6) {
    const auto& h = *p.v6;
    std::string prefix = p.frame_kind == FrameKind::V6inV4 ? "inner." : "ipv6.";
    out << fmt::format("{}version: {}\n", prefix, h.version);
    out << fmt::format("{}traffic_class: 0x{:02x}\n", prefix, h.traffic_class);
    out << fmt::format("{}flow_label: 0x{:05x}\n", prefix, h.flow_label);
    out << fmt::format("{}payload_length: {}\n", prefix, h.payload_length);
    out << fmt::format("{}next_header: {}\n", prefix, h.next_header);
    out << fmt::format("{}hop_limit: {}\n", prefix, h.hop_limit);
    out << fmt::format("{}src: {}\n", prefix, h.src.to_string());
    out << fmt::format("{}dst: {}\n", prefix, h.dst.to_string());
  }
  out << fmt::format("payload: {} bytes\n", p.payload.size());
}

inline int cmd_decode(const std::string& hex_text, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    dump_frame(out, parse_frame(parse_hex(hex_text)));
    return static_cast<int>(kOk);
  });
}

}  // namespace v6transit::cli
