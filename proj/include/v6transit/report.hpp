#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "v6transit/metrics.hpp"

namespace v6transit {

using ReportValue = std::variant<std::monostate, std::uint64_t, double, std::string>;

/// Flat key/value row; every row of one report shares the same column order.
struct ReportRow {
  std::vector<std::pair<std::string, ReportValue>> cells;

  void add(std::string key, std::string v) { cells.emplace_back(std::move(key), std::move(v)); }
  void add(std::string key, std::uint64_t v) { cells.emplace_back(std::move(key), v); }
  void add(std::string key, double v) { cells.emplace_back(std::move(key), v); }
  void add(std::string key, const std::optional<double>& v) {
    cells.emplace_back(std::move(key), v ? ReportValue{*v} : ReportValue{});
  }
};

enum class OutputFormat { JsonLines, Csv, Table };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "json-lines") return OutputFormat::JsonLines;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "table") return OutputFormat::Table;
  return std::nullopt;
}

inline std::vector<ReportRow> flow_rows(const std::string& scenario, const std::vector<FlowSummary>& flows) {
  std::vector<ReportRow> rows;
  for (const auto& f : flows) {
    ReportRow r;
    r.add("scenario", scenario);
    r.add("flow_id", f.flow_id);
    r.add("injected", f.injected);
    r.add("delivered", f.delivered_count);
    r.add("dropped", f.dropped_count);
    r.add("mean_delay_s", f.mean_delay);
    r.add("min_delay_s", f.min_delay);
    r.add("max_delay_s", f.max_delay);
    r.add("jitter_s", f.jitter);
    r.add("interval_s", f.interval);
    r.add("goodput_bps", f.goodput);
    r.add("wire_throughput_bps", f.wire_throughput);
    r.add("overhead_ratio", f.overhead_ratio);
    std::string drops;
    for (const auto& [reason, n] : f.drops_by_reason) {
      if (!drops.empty()) drops += ';';
      drops += reason + ":" + std::to_string(n);
    }
    r.add("drops", drops);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<ReportRow> comparison_rows(const std::string& a, const std::string& b, const ComparisonReport& rep) {
  std::vector<ReportRow> rows;
  for (const auto& c : rep.rows) {
    ReportRow r;
    r.add("flow_id", c.flow_id);
    r.add("scenario_a", a);
    r.add("scenario_b", b);
    r.add("delivered_a", c.delivered_a);
    r.add("delivered_b", c.delivered_b);
    r.add("mean_delay_a_s", c.mean_delay_a);
    r.add("mean_delay_b_s", c.mean_delay_b);
    r.add("delay_delta_s", c.delay_delta);
    r.add("goodput_a_bps", c.goodput_a);
    r.add("goodput_b_bps", c.goodput_b);
    r.add("goodput_ratio", c.goodput_ratio);
    r.add("overhead_a", c.overhead_a);
    r.add("overhead_b", c.overhead_b);
    r.add("overhead_ratio", c.overhead_ratio);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

inline std::string cell_text(const ReportValue& v) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::uint64_t x) const { return std::to_string(x); }
    std::string operator()(double x) const { return fmt::format("{}", x); }
    std::string operator()(const std::string& s) const { return s; }
  } visitor;
  return std::visit(visitor, v);
}

// Doubles rounded to 6 significant digits.
inline std::string table_text(const ReportValue& v) {
  if (const double* x = std::get_if<double>(&v)) return fmt::format("{:.6g}", *x);
  return cell_text(v);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void render(std::ostream& os, const std::vector<ReportRow>& rows, OutputFormat format) {
  switch (format) {
    case OutputFormat::JsonLines:
      for (const auto& row : rows) {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& [key, v] : row.cells) {
          std::visit(
              [&, &key = key](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, std::monostate>) {
                  j[key] = nullptr;
                } else {
                  j[key] = x;
                }
              },
              v);
        }
        os << j.dump() << '\n';
      }
      break;

    case OutputFormat::Csv:
      if (rows.empty()) break;
      for (std::size_t i = 0; i < rows.front().cells.size(); ++i)
        os << (i ? "," : "") << detail::csv_escape(rows.front().cells[i].first);
      os << '\n';
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.cells.size(); ++i)
          os << (i ? "," : "") << detail::csv_escape(detail::cell_text(row.cells[i].second));
        os << '\n';
      }
      break;

    case OutputFormat::Table: {
      if (rows.empty()) break;
      std::size_t cols = rows.front().cells.size();
      std::vector<std::size_t> width(cols);
      for (std::size_t i = 0; i < cols; ++i) width[i] = rows.front().cells[i].first.size();
      for (const auto& row : rows)
        for (std::size_t i = 0; i < cols; ++i)
          width[i] = std::max(width[i], detail::table_text(row.cells[i].second).size());
      for (std::size_t i = 0; i < cols; ++i)
        os << (i ? "  " : "") << fmt::format("{:<{}}", rows.front().cells[i].first, width[i]);
      os << '\n';
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < cols; ++i) {
          const auto& v = row.cells[i].second;
          auto text = detail::table_text(v);
          bool numeric = std::holds_alternative<double>(v) || std::holds_alternative<std::uint64_t>(v);
          os << (i ? "  " : "") << (numeric ? fmt::format("{:>{}}", text, width[i]) : fmt::format("{:<{}}", text, width[i]));
        }
        os << '\n';
      }
      break;
    }
  }
}

}  // namespace v6transit
