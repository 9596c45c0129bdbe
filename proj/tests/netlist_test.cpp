#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rtadder/adder_gen.hpp"
#include "rtadder/netlist.hpp"

using namespace rtadder;

namespace {

NetlistDesc tiny() {
  NetlistDesc d;
  d.input_ports = {{"X", "X1", "X0"}, {"Y", "Y1", "Y0"}};
  d.gates = {{"g1", GateType::AND2, {"X1", "Y1"}, "Z1", std::nullopt},
             {"g0", GateType::OR2, {"X0", "Y0"}, "Z0", std::nullopt}};
  d.output_ports = {{"Z", "Z1", "Z0"}};
  return d;
}

bool has(const ValidationReport& r, ViolationKind k) {
  return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.kind == k; });
}

}  // namespace

TEST(Assemble, BuildsNetsPortsAndFanout) {
  const Netlist nl = assemble(tiny());
  EXPECT_EQ(nl.gates().size(), 2U);
  EXPECT_EQ(nl.nets().size(), 6U);
  EXPECT_EQ(nl.net(nl.net_id("Z1")).kind, NetKind::PrimaryOutput);
  EXPECT_EQ(nl.net(nl.net_id("X1")).kind, NetKind::PrimaryInput);
  EXPECT_EQ(nl.net(nl.net_id("X1")).fanout.size(), 1U);
  EXPECT_EQ(nl.find_gate("g0"), GateId{1});
  EXPECT_TRUE(validate(nl).ok());
  EXPECT_THROW(nl.net_id("nope"), StructuralError);
}

TEST(Assemble, RejectsDanglingInputs) {
  auto d = tiny();
  d.gates[0].inputs[1] = "W";
  EXPECT_THROW(assemble(d), StructuralError);
}

TEST(Assemble, RejectsTwoDrivers) {
  auto d = tiny();
  d.gates[1].output = "Z1";
  EXPECT_THROW(assemble(d), StructuralError);
}

TEST(Assemble, RejectsDrivingAnInput) {
  auto d = tiny();
  d.gates[1].output = "X0";
  EXPECT_THROW(assemble(d), StructuralError);
}

TEST(Assemble, RejectsUndrivenOutputRail) {
  auto d = tiny();
  d.output_ports[0].rail0 = "Y0";
  EXPECT_THROW(assemble(d), StructuralError);
}

TEST(Validate, ReportsCycles) {
  auto d = tiny();
  d.gates.push_back({"a", GateType::AND2, {"X1", "q"}, "p", std::nullopt});
  d.gates.push_back({"b", GateType::AND2, {"Y1", "p"}, "q", std::nullopt});
  d.output_ports.push_back({"P", "p", "q"});
  const auto r = validate(assemble(d));
  EXPECT_TRUE(has(r, ViolationKind::Cycle));
  EXPECT_FALSE(topological_order(assemble(d)).has_value());
}

TEST(Validate, ReportsArityAndDeadEnds) {
  auto d = tiny();
  d.gates.push_back({"bad", GateType::AO22, {"X1", "Y1"}, "spare", std::nullopt});
  const auto r = validate(assemble(d));
  EXPECT_TRUE(has(r, ViolationKind::Arity));
  EXPECT_TRUE(has(r, ViolationKind::DeadEnd));
  EXPECT_FALSE(has(r, ViolationKind::Cycle));
}

TEST(Validate, ReportsPortPairing) {
  auto d = tiny();
  d.output_ports[0].rail0 = "Z1";
  EXPECT_TRUE(has(validate(assemble(d)), ViolationKind::PortPairing));
}

TEST(Validate, GeneratedAddersAreClean) {
  for (auto kind : {AdderKind::EarlyOutput, AdderKind::DimsStrong}) {
    for (unsigned n : {1U, 2U, 8U}) {
      const auto r = validate(build_rca(kind, n));
      EXPECT_TRUE(r.ok()) << to_string(kind) << " n=" << n << ": "
                          << (r.violations.empty() ? "" : r.violations.front().message);
    }
  }
}

TEST(TopologicalOrder, RespectsDependencies) {
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 4);
  const auto order = topological_order(nl);
  ASSERT_TRUE(order.has_value());
  std::vector<std::size_t> pos(nl.gates().size());
  for (std::size_t i = 0; i < order->size(); ++i) pos[(*order)[i]] = i;
  for (GateId g = 0; g < nl.gates().size(); ++g) {
    for (NetId in : nl.gate(g).inputs) {
      if (auto d = nl.net(in).driver) {
        EXPECT_LT(pos[*d], pos[g]);
      }
    }
  }
}

TEST(DualRailWords, EncodeDecodeRoundTripsExhaustively) {
  for (unsigned width = 1; width <= 8; ++width) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << width); ++v) {
      const auto rails = encode_word(v, width);
      ASSERT_EQ(rails.size(), width);
      for (const auto& r : rails) ASSERT_NE(r.rail1, r.rail0);
      const auto d = decode_outputs(rails);
      ASSERT_TRUE(std::holds_alternative<decoded::Valid>(d));
      ASSERT_EQ(std::get<decoded::Valid>(d).value, v);
    }
  }
}

TEST(DualRailWords, EncodeLsbFirst) {
  const auto r = encode_word(0b10, 2);
  EXPECT_EQ(r[0], (RailPair{false, true}));
  EXPECT_EQ(r[1], (RailPair{true, false}));
  EXPECT_THROW(encode_word(4, 2), Error);
  EXPECT_THROW(encode_word(0, 0), Error);
}

TEST(DualRailWords, DecodeSpacerPartialIllegal) {
  std::vector<RailPair> spacer(3);
  EXPECT_TRUE(std::holds_alternative<decoded::Spacer>(decode_outputs(spacer)));
  std::vector<RailPair> partial{{true, false}, {false, false}};
  EXPECT_TRUE(std::holds_alternative<decoded::Partial>(decode_outputs(partial)));
  std::vector<RailPair> illegal{{true, false}, {true, true}};
  EXPECT_EQ(std::get<decoded::Illegal>(decode_outputs(illegal)).position, 1U);
}

TEST(NetlistJson, RoundTripsGeneratedAdders) {
  for (auto kind : {AdderKind::EarlyOutput, AdderKind::DimsStrong}) {
    const Netlist nl = attach_completion_detector(build_rca(kind, 3));
    const Netlist back = netlist_from_json(to_json(nl));
    EXPECT_EQ(to_json(back), to_json(nl));
    EXPECT_EQ(back.census(), nl.census());
  }
}

TEST(NetlistJson, KeepsPerGateDelays) {
  auto d = tiny();
  d.gates[0].delay = Picoseconds{123};
  const Netlist back = netlist_from_json(to_json(assemble(d)));
  EXPECT_EQ(back.gate(0).delay, Picoseconds{123});
  EXPECT_EQ(back.delay_of(0, DelayConfig{}), Picoseconds{123});
  EXPECT_EQ(back.delay_of(1, DelayConfig{}), Picoseconds{50});
}

TEST(NetlistJson, RejectsMalformedInput) {
  EXPECT_THROW(netlist_from_json(nlohmann::json::parse(R"({"gates": 3})")), ParseError);
  auto j = to_json(assemble(tiny()));
  j["gates"][0]["type"] = "XOR9";
  EXPECT_THROW(netlist_from_json(j), ParseError);
  j = to_json(assemble(tiny()));
  j["gates"][0]["delay"] = 0.0001;
  EXPECT_THROW(netlist_from_json(j), ParseError);
}

TEST(NetlistJson, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "rtadder_netlist_test.json";
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 2);
  write_netlist(nl, path.string());
  EXPECT_EQ(to_json(read_netlist(path.string())), to_json(nl));
  std::filesystem::remove(path);
  EXPECT_THROW(read_netlist(path.string()), Error);
}
