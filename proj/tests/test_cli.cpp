#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "v6transit/cli.hpp"

using namespace v6transit;

namespace {

struct Captured {
  int rc;
  std::string out;
  std::string err;
};

template <class F>
Captured capture(F&& f) {
  std::ostringstream out, err;
  int rc = f(out, err);
  return {rc, out.str(), err.str()};
}

Captured derive(const char* kind, const char* v4) {
  return capture([&](auto& o, auto& e) { return cli::cmd_derive(kind, v4, o, e); });
}

Captured decode(const std::string& hex) {
  return capture([&](auto& o, auto& e) { return cli::cmd_decode(hex, o, e); });
}

Captured run(const std::string& scenario, cli::RunOptions opt = {}) {
  return capture([&](auto& o, auto& e) { return cli::cmd_run(scenario, opt, o, e); });
}

Captured compare(const std::string& a, const std::string& b, cli::RunOptions opt = {}) {
  return capture([&](auto& o, auto& e) { return cli::cmd_compare(a, b, opt, o, e); });
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Runs the installed binary; returns its exit status and stdout.
std::pair<int, std::string> exec(const std::string& args) {
  std::string cmd = std::string(V6TRANSIT_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), pipe)) > 0;) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / ("v6transit_test_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(CliDeriveTest, Outputs) {
  auto r = derive("6to4", "192.168.99.1");
  EXPECT_EQ(r.rc, 0);
  EXPECT_EQ(r.out, "2002:c0a8:6301::/48\n");
  EXPECT_EQ(derive("6to4", "10.10.12.1").out, "2002:a0a:c01::/48\n");
  EXPECT_EQ(derive("isatap", "192.168.99.1").out, "fe80::5efe:c0a8:6301\n");
  EXPECT_EQ(derive("compatible", "192.168.99.1").out, "::c0a8:6301\n");
  EXPECT_EQ(derive("compatible", "0.0.0.0").out, "::\n");
  EXPECT_EQ(derive("isatap", "10.10.12.1").out, "fe80::5efe:a0a:c01\n");
}

TEST(CliDeriveTest, Errors) {
  auto r = derive("6to4", "192.168.99");
  EXPECT_EQ(r.rc, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("ParseError"), std::string::npos) << r.err;
  EXPECT_EQ(derive("6to4", "256.1.1.1").rc, 2);
  EXPECT_EQ(derive("teredo", "1.2.3.4").rc, 1);
}

TEST(CliDecodeTest, MinimalIpv6Header) {
  auto r = decode("60000000 0000 3b40" + std::string(64, '0'));
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("frame: V6 (40 bytes)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("ipv6.version: 6"), std::string::npos);
  EXPECT_NE(r.out.find("ipv6.next_header: 59"), std::string::npos);
  EXPECT_NE(r.out.find("ipv6.hop_limit: 64"), std::string::npos);
  EXPECT_NE(r.out.find("ipv6.src: ::"), std::string::npos);
  EXPECT_NE(r.out.find("payload: 0 bytes"), std::string::npos);
}

TEST(CliDecodeTest, EncapsulatedFrame) {
  auto inner = make_v6_packet(Ipv6Address::parse("2001::3"), Ipv6Address::parse("2001::4"), Bytes(12, 1));
  auto outer = encapsulate_6in4(inner, Ipv4Address::parse("10.10.12.1"), Ipv4Address::parse("10.10.23.3"), 63);
  auto hex = cli::detail::to_hex(frame_packet(outer));
  auto r = decode("0x" + hex);
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("frame: V6inV4 (72 bytes)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("outer.protocol: 41 (IPv6 encapsulation)"), std::string::npos);
  EXPECT_NE(r.out.find("outer.src: 10.10.12.1"), std::string::npos);
  EXPECT_NE(r.out.find("(valid)"), std::string::npos);
  EXPECT_NE(r.out.find("inner.src: 2001::3"), std::string::npos);
  EXPECT_NE(r.out.find("inner.dst: 2001::4"), std::string::npos);
  EXPECT_NE(r.out.find("payload: 12 bytes"), std::string::npos);

  hex[20] = hex[20] == '0' ? '1' : '0';  // corrupt the checksum field
  r = decode(hex);
  ASSERT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("(INVALID)"), std::string::npos) << r.out;
}

TEST(CliDecodeTest, Errors) {
  EXPECT_EQ(decode("600").rc, 2);
  EXPECT_EQ(decode("zz").rc, 2);
  EXPECT_EQ(decode("").rc, 2);
  EXPECT_EQ(decode("6000").rc, 2);
  EXPECT_EQ(decode("55").rc, 2);
  EXPECT_EQ(cli::parse_hex("0a 0B\n"), (Bytes{0x0a, 0x0b}));
}

TEST(CliRunTest, CsvContract) {
  cli::RunOptions opt;
  opt.format = OutputFormat::Csv;
  auto r = run("6to4", opt);
  ASSERT_EQ(r.rc, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0],
            "scenario,flow_id,injected,delivered,dropped,mean_delay_s,min_delay_s,max_delay_s,jitter_s,interval_s,"
            "goodput_bps,wire_throughput_bps,overhead_ratio,drops");
  EXPECT_EQ(ls[1].rfind("6to4,h1-h2,10,10,0,", 0), 0u) << ls[1];
}

TEST(CliRunTest, JsonLinesContract) {
  cli::RunOptions opt;
  opt.format = OutputFormat::JsonLines;
  auto r = run("6to4-notunnel", opt);
  ASSERT_EQ(r.rc, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 1u);
  auto j = nlohmann::ordered_json::parse(ls[0]);
  EXPECT_EQ(j.begin().key(), "scenario");
  EXPECT_EQ(j["scenario"], "6to4-notunnel");
  EXPECT_EQ(j["delivered"], 0);
  EXPECT_EQ(j["dropped"], 10);
  EXPECT_TRUE(j["mean_delay_s"].is_null());
  EXPECT_EQ(j["drops"], "DroppedWrongFamily:10");
}

TEST(CliRunTest, TableAndTrace) {
  auto trace = std::filesystem::temp_directory_path() / "v6transit_test_trace.txt";
  cli::RunOptions opt;
  opt.trace_path = trace.string();
  auto r = run("6to4", opt);
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 2u);
  EXPECT_EQ(r.out.rfind("scenario", 0), 0u);
  std::ifstream in(trace);
  std::stringstream buf;
  buf << in.rdbuf();
  auto tl = lines(buf.str());
  ASSERT_EQ(tl.size(), 40u);
  EXPECT_EQ(tl[0].rfind("6to4 0 h1-r1 H1->R1 1 V6 60", 0), 0u) << tl[0];
  std::size_t encapsulated = 0;
  for (const auto& l : tl) encapsulated += l.find(" V6inV4 45") != std::string::npos;
  EXPECT_EQ(encapsulated, 20u);
}

TEST(CliRunTest, HorizonAndOverrides) {
  cli::RunOptions opt;
  opt.format = OutputFormat::JsonLines;
  opt.horizon = 0.0035;
  auto j = nlohmann::json::parse(lines(run("dualstack", opt).out).at(0));
  EXPECT_EQ(j["injected"], 1);
  EXPECT_EQ(j["drops"], "HorizonReached:1");

  opt.horizon.reset();
  opt.overrides = {"traffic.h1-h2.count=2"};
  j = nlohmann::json::parse(lines(run("dualstack", opt).out).at(0));
  EXPECT_EQ(j["injected"], 2);

  opt.horizon = -1;
  EXPECT_EQ(run("dualstack", opt).rc, 2);
}

TEST(CliRunTest, ScenarioErrors) {
  EXPECT_EQ(run("no-such-scenario").rc, 1);
  auto bad = temp_file("bad.yaml", "nodes: [\n");
  EXPECT_EQ(run(bad.string()).rc, 2);
  auto invalid = temp_file("invalid.yaml", "nodes:\n  - {id: A, kind: ipv6-only, colour: red}\n");
  auto r = run(invalid.string());
  EXPECT_EQ(r.rc, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST(CliCompareTest, SelfComparisonHasZeroDeltas) {
  cli::RunOptions opt;
  opt.format = OutputFormat::JsonLines;
  auto r = compare("dualstack", "dualstack", opt);
  ASSERT_EQ(r.rc, 0) << r.err;
  auto j = nlohmann::json::parse(lines(r.out).at(0));
  EXPECT_EQ(j["delay_delta_s"], 0.0);
  EXPECT_EQ(j["goodput_ratio"], 1.0);
  EXPECT_EQ(j["overhead_ratio"], 1.0);
}

TEST(CliCompareTest, TunnelVersusDualStack) {
  cli::RunOptions opt;
  opt.format = OutputFormat::Csv;
  auto r = compare("6to4", "dualstack", opt);
  ASSERT_EQ(r.rc, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0],
            "flow_id,scenario_a,scenario_b,delivered_a,delivered_b,mean_delay_a_s,mean_delay_b_s,delay_delta_s,"
            "goodput_a_bps,goodput_b_bps,goodput_ratio,overhead_a,overhead_b,overhead_ratio");
  EXPECT_EQ(ls[1].rfind("h1-h2,6to4,dualstack,10,10,", 0), 0u) << ls[1];
}

TEST(CliCompareTest, TableShowsDeltaColumns) {
  auto r = compare("6to4", "dualstack");
  ASSERT_EQ(r.rc, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_NE(ls[0].find("delay_delta_s"), std::string::npos);
  EXPECT_NE(ls[0].find("overhead_ratio"), std::string::npos);
  EXPECT_NE(ls[1].find("1.00962"), std::string::npos) << ls[1];  // 1.05 / 1.04
}

TEST(CliRunTest, CsvColumnCountIsConstant) {
  auto path = temp_file("three_flows.yaml", [] {
    auto s = *builtin_scenario("dualstack");
    auto f = s.traffic[0];
    f.id = "b,quoted \"flow\"";
    s.traffic.push_back(f);
    f.id = "c";
    std::swap(f.src, f.dst);
    f.count = 0;
    s.traffic.push_back(f);
    return dump_scenario(s);
  }());
  cli::RunOptions opt;
  opt.format = OutputFormat::Csv;
  auto r = run(path.string(), opt);
  ASSERT_EQ(r.rc, 0) << r.err;
  auto ls = lines(r.out);
  auto fields = [](const std::string& line) {
    std::size_t n = 1;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') quoted = !quoted;
      if (ch == ',' && !quoted) ++n;
    }
    return n;
  };
  ASSERT_EQ(ls.size(), 3u);  // the zero-count flow has no records
  for (const auto& l : ls) EXPECT_EQ(fields(l), 14u) << l;
  EXPECT_NE(r.out.find("\"b,quoted \"\"flow\"\"\""), std::string::npos) << r.out;
}

TEST(CliCompareTest, FlowMismatch) {
  auto other = dump_scenario(*builtin_scenario("dualstack"));
  auto pos = other.find("id: h1-h2");
  ASSERT_NE(pos, std::string::npos);
  other.replace(pos, 9, "id: other");
  auto path = temp_file("other.yaml", other);
  auto r = compare("6to4", path.string());
  EXPECT_EQ(r.rc, 2);
  EXPECT_NE(r.err.find("FlowMismatch"), std::string::npos) << r.err;
}

TEST(CliBinaryTest, ExitCodes) {
  EXPECT_EQ(exec("derive 6to4 192.168.99.1"), (std::pair<int, std::string>{0, "2002:c0a8:6301::/48\n"}));
  EXPECT_EQ(exec("--help").first, 0);
  EXPECT_EQ(exec("").first, 1);
  EXPECT_EQ(exec("frobnicate").first, 1);
  EXPECT_EQ(exec("derive teredo 1.2.3.4").first, 1);
  EXPECT_EQ(exec("run 6to4 --format xml").first, 1);
  EXPECT_EQ(exec("run /nonexistent.yaml").first, 1);
  EXPECT_EQ(exec("derive 6to4 1.2.3").first, 2);
  EXPECT_EQ(exec("decode 6").first, 2);
  EXPECT_EQ(exec("run dualstack --horizon 0").first, 2);
  EXPECT_EQ(exec("run dualstack --override links.x.delay=1").first, 2);
}

TEST(CliBinaryTest, CompareIsByteStable) {
  auto a = exec("compare 6to4 dualstack --format json-lines");
  auto b = exec("compare 6to4 dualstack --format json-lines");
  EXPECT_EQ(a.first, 0);
  EXPECT_EQ(a, b);
}
