#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "v6transit/scenarios.hpp"
#include "v6transit/sim.hpp"

using namespace v6transit;

namespace {

constexpr double kRelTol = 1e-9;

void expect_rel_near(double actual, double expected) {
  EXPECT_LE(std::abs(actual - expected), kRelTol * std::abs(expected)) << actual << " vs " << expected;
}

Scenario two_hosts(std::uint32_t payload, std::uint32_t count, double gap) {
  Scenario s;
  s.name = "pair";
  Node a, b;
  a.id = "A";
  b.id = "B";
  for (Node* n : {&a, &b}) {
    n->kind = NodeKind::Ipv6Only;
    n->role = NodeRole::Host;
  }
  a.interfaces = {Interface{"eth0", std::nullopt, {Ipv6Address::parse("2001::a")}}};
  b.interfaces = {Interface{"eth0", std::nullopt, {Ipv6Address::parse("2001::b")}}};
  a.v6_routes = {RouteEntry6{Ipv6Prefix::parse("::/0"), std::nullopt, "eth0"}};
  b.v6_routes = {RouteEntry6{Ipv6Prefix::parse("::/0"), std::nullopt, "eth0"}};
  s.topology.nodes = {a, b};
  s.topology.links = {Link{"ab", {"A", "eth0"}, {"B", "eth0"}, 2e-3, 10e6, 1500}};
  TrafficSpec t;
  t.id = "f";
  t.src = "A";
  t.dst = "B";
  t.payload_bytes = payload;
  t.count = count;
  t.gap = gap;
  s.traffic = {t};
  return s;
}

std::vector<std::uint32_t> link_bytes(bool tunnel, std::uint32_t m) {
  return tunnel ? std::vector<std::uint32_t>{m + 40, m + 60, m + 60, m + 40}
                : std::vector<std::uint32_t>{m + 40, m + 40, m + 40, m + 40};
}

}  // namespace

TEST(SimTest, SingleHopClosedForm) {
  auto res = run_simulation(two_hosts(500, 1, 0));
  ASSERT_EQ(res.records.size(), 1u);
  ASSERT_TRUE(res.records[0].delivered());
  expect_rel_near(*res.records[0].delay(), 540 * 8 / 10e6 + 2e-3);
}

TEST(SimTest, BackToBackFramesQueueFifo) {
  auto res = run_simulation(two_hosts(1000, 5, 0));
  double ser = 1040 * 8 / 10e6;
  ASSERT_EQ(res.records.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    ASSERT_TRUE(res.records[k].delivered());
    expect_rel_near(*res.records[k].delay(), (k + 1) * ser + 2e-3);
  }
  for (std::size_t k = 1; k < 5; ++k) EXPECT_LT(*res.records[k - 1].receive_time, *res.records[k].receive_time);
}

TEST(SimTest, ScenarioDelaysMatchClosedForm) {
  for (std::uint32_t m : {64u, 512u, 1000u}) {
    ScenarioOptions o;
    o.payload_bytes = m;
    for (bool tunnel : {true, false}) {
      auto sc = tunnel ? build_scenario_6to4(o) : build_scenario_dualstack(o);
      auto res = run_simulation(sc);
      double want = oracle::chain_delay(link_bytes(tunnel, m), 100e6, 1e-3, {50e-6, 50e-6, 50e-6});
      ASSERT_EQ(res.records.size(), 10u);
      for (const auto& r : res.records) {
        ASSERT_TRUE(r.delivered()) << sc.name << " m=" << m;
        expect_rel_near(*r.delay(), want);
      }
    }
  }
}

TEST(SimTest, FrozenDelays) {
  // 1000-byte payload at 100 Mb/s, 1 ms links, 50 us per router.
  auto s1 = run_simulation(build_scenario_6to4());
  auto s2 = run_simulation(build_scenario_dualstack());
  expect_rel_near(*s1.records[0].delay(), 4.486e-3);
  expect_rel_near(*s2.records[0].delay(), 4.4828e-3);
}

TEST(SimTest, DeterministicAcrossRuns) {
  ScenarioOptions o;
  o.reverse_flow = true;
  o.mode = TrafficMode::Ping;
  SimOptions opt;
  opt.trace = true;
  auto a = run_simulation(build_scenario_6to4(o), opt);
  auto b = run_simulation(build_scenario_6to4(o), opt);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.trace, b.trace);
}

TEST(SimTest, ConservationOfPackets) {
  ScenarioOptions o;
  o.reverse_flow = true;
  o.count = 50;
  o.gap = 0;
  for (const auto& sc : {build_scenario_6to4(o), build_scenario_dualstack(o),
                         build_scenario_6to4([] {
                           ScenarioOptions x;
                           x.with_tunnel = false;
                           return x;
                         }())}) {
    auto res = run_simulation(sc);
    std::uint64_t expected = 0;
    for (const auto& t : sc.traffic) expected += t.count;
    ASSERT_EQ(res.records.size(), expected);
    for (std::size_t i = 0; i < res.records.size(); ++i) {
      const auto& r = res.records[i];
      EXPECT_EQ(r.packet_id, i + 1);
      EXPECT_NE(r.receive_time.has_value(), r.drop_reason.has_value()) << sc.name << " packet " << r.packet_id;
      if (r.receive_time) {
        EXPECT_GE(*r.receive_time, r.send_time);
      }
      bool stayed_at_source = r.drop_reason && r.drop_node == r.src_node;
      EXPECT_EQ(r.wire_bytes_per_hop.empty(), stayed_at_source) << sc.name << " packet " << r.packet_id;
    }
  }
}

TEST(SimTest, SourceDropsNeverReachTheWire) {
  auto sc = build_scenario_dualstack();
  sc.topology.links[0].mtu = 1000;  // H1's own link
  auto res = run_simulation(sc);
  for (const auto& r : res.records) {
    EXPECT_EQ(r.drop_reason, DropReason::MtuExceeded);
    EXPECT_EQ(r.drop_node, "H1");
    EXPECT_TRUE(r.wire_bytes_per_hop.empty());
  }
}

TEST(SimTest, HopLimitOneExpiresAtFirstRouter) {
  auto sc = build_scenario_dualstack();
  sc.traffic[0].hop_limit = 1;
  auto res = run_simulation(sc);
  for (const auto& r : res.records) {
    ASSERT_EQ(r.drop_reason, DropReason::TtlExpired);
    EXPECT_EQ(r.drop_node, "R1");
  }
  sc.traffic[0].hop_limit = 3;  // H1 -> R1 -> R2 -> R3 needs 4
  res = run_simulation(sc);
  EXPECT_EQ(res.records[0].drop_node, "R3");
  sc.traffic[0].hop_limit = 4;
  res = run_simulation(sc);
  EXPECT_TRUE(res.records[0].delivered());
}

TEST(SimTest, ReverseDirectionIsSymmetric) {
  ScenarioOptions o;
  o.reverse_flow = true;
  o.count = 1;
  for (const auto& sc : {build_scenario_6to4(o), build_scenario_dualstack(o)}) {
    auto res = run_simulation(sc);
    ASSERT_EQ(res.records.size(), 2u);
    ASSERT_TRUE(res.records[0].delivered());
    ASSERT_TRUE(res.records[1].delivered());
    EXPECT_EQ(res.records[0].flow_id, "h1-h2");
    EXPECT_EQ(res.records[1].flow_id, "h2-h1");
    expect_rel_near(*res.records[1].delay(), *res.records[0].delay());
  }
}

TEST(SimTest, TraceFrameKindsPerScenario) {
  SimOptions opt;
  opt.trace = true;
  auto ds = run_simulation(build_scenario_dualstack(), opt);
  ASSERT_EQ(ds.trace.size(), 40u);
  for (const auto& t : ds.trace) {
    EXPECT_NE(t.kind, FrameKind::V6inV4);
    EXPECT_EQ(t.frame.size(), 1040u);
  }
  auto tun = run_simulation(build_scenario_6to4(), opt);
  ASSERT_EQ(tun.trace.size(), 40u);
  for (const auto& t : tun.trace) {
    bool isp = t.link_id == "r1-r2" || t.link_id == "r2-r3";
    EXPECT_EQ(t.kind, isp ? FrameKind::V6inV4 : FrameKind::V6) << t.link_id;
    EXPECT_EQ(t.frame.size(), isp ? 1060u : 1040u);
    EXPECT_EQ(parse_frame(t.frame).payload.size(), 1000u);
  }
}

TEST(SimTest, WireBytesPerHopFollowSizeLaw) {
  oracle::Gen g(91);
  for (int i = 0; i < 20; ++i) {
    ScenarioOptions o;
    o.payload_bytes = g.below(1400);
    o.count = 3;
    for (bool tunnel : {true, false}) {
      auto res = run_simulation(tunnel ? build_scenario_6to4(o) : build_scenario_dualstack(o));
      for (const auto& r : res.records) {
        ASSERT_EQ(r.wire_bytes_per_hop.size(), 4u);
        auto want = link_bytes(tunnel, o.payload_bytes);
        for (std::size_t h = 0; h < 4; ++h) EXPECT_EQ(r.wire_bytes_per_hop[h].bytes, want[h]);
      }
    }
  }
}

TEST(SimTest, NoTunnelDropsAtIsp) {
  ScenarioOptions o;
  o.with_tunnel = false;
  auto res = run_simulation(build_scenario_6to4(o));
  ASSERT_EQ(res.records.size(), 10u);
  for (const auto& r : res.records) {
    EXPECT_FALSE(r.delivered());
    EXPECT_EQ(r.drop_reason, DropReason::DroppedWrongFamily);
    EXPECT_EQ(r.drop_node, "R2");
  }
}

TEST(SimTest, SixToFourAutoDeliversWithSameDelay) {
  ScenarioOptions o;
  o.tunnel_kind = TunnelKind::Auto6to4;
  auto res = run_simulation(build_scenario_6to4(o));
  for (const auto& r : res.records) {
    ASSERT_TRUE(r.delivered());
    expect_rel_near(*r.delay(), 4.486e-3);
  }
}

TEST(SimTest, MtuOnlyHurtsTheTunnel) {
  ScenarioOptions o;
  o.mtu = 1050;
  auto tun = run_simulation(build_scenario_6to4(o));
  for (const auto& r : tun.records) {
    EXPECT_EQ(r.drop_reason, DropReason::MtuExceeded);
    EXPECT_EQ(r.drop_node, "R1");
  }
  auto ds = run_simulation(build_scenario_dualstack(o));
  for (const auto& r : ds.records) EXPECT_TRUE(r.delivered());
}

TEST(SimTest, PingRepliesFollowRequests) {
  ScenarioOptions o;
  o.mode = TrafficMode::Ping;
  o.count = 3;
  auto res = run_simulation(build_scenario_dualstack(o));
  ASSERT_EQ(res.records.size(), 6u);
  std::size_t replies = 0;
  for (const auto& r : res.records) {
    ASSERT_TRUE(r.delivered());
    expect_rel_near(*r.delay(), 4.4828e-3);
    if (r.flow_id == "h1-h2.reply") {
      ++replies;
      EXPECT_EQ(r.src_node, "H2");
      EXPECT_EQ(r.dst_node, "H1");
    }
  }
  EXPECT_EQ(replies, 3u);
}

TEST(SimTest, HorizonCutsOffInFlightPackets) {
  ScenarioOptions o;
  o.horizon = 2e-3;
  auto res = run_simulation(build_scenario_dualstack(o));
  ASSERT_EQ(res.records.size(), 1u);  // later sends are beyond the horizon
  EXPECT_EQ(res.records[0].drop_reason, DropReason::HorizonReached);
}

TEST(SimTest, JitterIsSeededAndBounded) {
  auto sc = build_scenario_dualstack();
  sc.traffic[0].jitter = 5e-3;
  auto sends = [&](std::optional<std::uint64_t> seed) {
    SimOptions opt;
    opt.seed = seed;
    std::vector<double> out;
    for (const auto& r : run_simulation(sc, opt).records) out.push_back(r.send_time);
    std::sort(out.begin(), out.end());
    return out;
  };
  auto a = sends(7), b = sends(7), c = sends(8), none = sends(std::nullopt);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (std::size_t i = 0; i < none.size(); ++i) EXPECT_DOUBLE_EQ(none[i], 10e-3 * i);
  std::vector<double> base = none;
  for (double t : a) {
    bool inside = false;
    for (double s : base) inside |= t >= s && t < s + 5e-3;
    EXPECT_TRUE(inside) << t;
  }
}

TEST(SimTest, RejectsInvalidInput) {
  auto sc = build_scenario_dualstack();
  sc.topology.nodes.push_back(sc.topology.nodes.front());
  try {
    Simulator s(sc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidTopology);
  }
  sc = build_scenario_dualstack();
  sc.traffic[0].dst = "nowhere";
  try {
    Simulator s(sc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidTraffic);
  }
  sc = build_scenario_dualstack();
  sc.topology.links[1].bandwidth = 0;
  EXPECT_THROW(Simulator{sc}, Error);
  sc = build_scenario_dualstack();
  sc.traffic[0].family = AddressFamily::V4;  // hosts have no IPv4 address
  EXPECT_THROW(Simulator{sc}, Error);
}
