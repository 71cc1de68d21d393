#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "v6transit/cli.hpp"

namespace {

void add_run_flags(CLI::App* cmd, std::string& format, v6transit::cli::RunOptions& opt) {
  cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json-lines", "csv", "table"}))
      ->capture_default_str();
  cmd->add_option("--trace", opt.trace_path, "Write a per-frame hex trace to this file");
  cmd->add_option("--horizon", opt.horizon, "Simulation horizon in seconds");
  cmd->add_option("--seed", opt.seed, "Seed for send-time jitter (flows with jitter > 0)");
  cmd->add_option("--override", opt.overrides, "Scenario override path=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = v6transit::cli;

  CLI::App app{"IPv4/IPv6 transition mechanism simulator"};
  app.require_subcommand(1);

  cli::RunOptions run_opt;
  std::string format = "table";
  std::string scenario, scenario_b;
  std::string kind, v4_text, hex_text;

  auto* run = app.add_subcommand("run", "Simulate a scenario (built-in name or YAML file) and report per-flow metrics");
  run->add_option("scenario", scenario, "6to4, 6to4-auto, 6to4-notunnel, dualstack, or a file path")->required();
  add_run_flags(run, format, run_opt);

  auto* compare = app.add_subcommand("compare", "Simulate two scenarios and report per-flow deltas");
  compare->add_option("scenario_a", scenario, "First scenario")->required();
  compare->add_option("scenario_b", scenario_b, "Second scenario")->required();
  add_run_flags(compare, format, run_opt);

  auto* derive = app.add_subcommand("derive", "Derive a transition address from an IPv4 address");
  derive->add_option("kind", kind, "6to4, isatap, or compatible")
      ->required()
      ->check(CLI::IsMember({"6to4", "isatap", "compatible"}));
  derive->add_option("ipv4", v4_text, "Dotted-decimal IPv4 address")->required();

  auto* decode = app.add_subcommand("decode", "Decode a hex-encoded IPv4, IPv6, or 6in4 frame");
  decode->add_option("hex", hex_text, "Frame bytes as hex")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kUsage;
  }

  run_opt.format = *v6transit::parse_output_format(format);
  if (*run) return cli::cmd_run(scenario, run_opt, std::cout, std::cerr);
  if (*compare) return cli::cmd_compare(scenario, scenario_b, run_opt, std::cout, std::cerr);
  if (*derive) return cli::cmd_derive(kind, v4_text, std::cout, std::cerr);
  if (*decode) return cli::cmd_decode(hex_text, std::cout, std::cerr);
  return cli::kUsage;
}
