#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracle.hpp"
#include "rtadder/verify.hpp"

using namespace rtadder;

TEST(StaticSlack, DefaultDelays) {
  const auto s = static_rt_slack(build_rca(AdderKind::EarlyOutput, 2), DelayConfig{});
  EXPECT_EQ(s.direct, Picoseconds{250});
  EXPECT_EQ(s.indirect, Picoseconds{313});
  EXPECT_EQ(s.slack, Picoseconds{-63});
  EXPECT_EQ(s.direct_path.size(), 3U);
  EXPECT_EQ(s.indirect_path.back().substr(0, 3), "s1.");
  EXPECT_NE(std::find(s.indirect_path.begin(), s.indirect_path.end(), "s0.CG5"), s.indirect_path.end());
}

TEST(StaticSlack, OverridesShiftPathSums) {
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 2);
  EXPECT_EQ(static_rt_slack(nl, DelayConfig{}.with(GateType::AO21, 0_ps)).slack, Picoseconds{0});
  const auto s = static_rt_slack(nl, DelayConfig{}.with(GateType::AO22, 100_ps));
  EXPECT_EQ(s.direct, Picoseconds{300});
  EXPECT_EQ(s.indirect, Picoseconds{363});
  EXPECT_EQ(s.slack, Picoseconds{-63});
}

// With AND2 and OR2 no slower than AO22 the longest direct and indirect paths
// share every gate except the carry gate.
TEST(StaticSlack, SlackIsMinusCarryGateDelay) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> ps(20, 200);
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 4);
  for (int i = 0; i < 10; ++i) {
    DelayConfig d;
    for (GateType t : kAllGateTypes) d.set(t, Picoseconds{ps(rng)});
    d.set(GateType::AND2, std::min(d.delay(GateType::AND2), d.delay(GateType::AO22)));
    d.set(GateType::OR2, std::min(d.delay(GateType::OR2), d.delay(GateType::AO22)));
    const auto s = static_rt_slack(nl, d);
    EXPECT_EQ(s.slack, s.direct - s.indirect);
    EXPECT_EQ(s.slack, -d.delay(GateType::AO21));
  }
}

TEST(StaticSlack, NeedsTwoEarlyOutputStages) {
  EXPECT_THROW(static_rt_slack(build_rca(AdderKind::EarlyOutput, 1), DelayConfig{}), StructuralError);
  EXPECT_THROW(static_rt_slack(build_rca(AdderKind::DimsStrong, 2), DelayConfig{}), StructuralError);
}

TEST(LongestPath, EmptyWhenUnconnected) {
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 2);
  const auto p = longest_path(nl, DelayConfig{}, {nl.net_id("A11")}, {nl.net_id("SUM01")});
  EXPECT_FALSE(p.has_value());
}

TEST(RelativeTiming, UniformResetHasNoViolations) {
  for (auto kind : {AdderKind::EarlyOutput, AdderKind::DimsStrong}) {
    const Netlist nl = build_rca(kind, 4);
    for (const auto& v : exhaustive_vectors(2)) {
      const auto [r, t] = run_handshake_cycle(nl, DelayConfig{}, v.a * 5, v.b * 5, v.cin);
      EXPECT_TRUE(check_relative_timing(t, describe_rca(nl)).empty());
    }
  }
}

TEST(RelativeTiming, SkewedStageZeroResetViolates) {
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 2);
  const auto [r, t] = run_skewed_reset(nl, DelayConfig{}, {3, 3, false}, Picoseconds{200});
  const auto v = check_relative_timing(t, describe_rca(nl));
  ASSERT_EQ(v.size(), 1U);
  EXPECT_EQ(v[0].stage, 1U);
  EXPECT_EQ(v[0].carry_fall, Picoseconds{338});
  EXPECT_EQ(v[0].sum_fall, Picoseconds{250});
  EXPECT_EQ(v[0].margin, Picoseconds{88});
}

TEST(RelativeTiming, ThresholdByBisection) {
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 2);
  const auto th = skew_threshold(nl, DelayConfig{}, {3, 3, false}, Picoseconds{1000});
  ASSERT_TRUE(th.has_value());
  EXPECT_EQ(*th, Picoseconds{112});
  EXPECT_TRUE(check_relative_timing(run_skewed_reset(nl, DelayConfig{}, {3, 3, false}, Picoseconds{112}).second,
                                    describe_rca(nl))
                  .empty());
  EXPECT_FALSE(check_relative_timing(run_skewed_reset(nl, DelayConfig{}, {3, 3, false}, Picoseconds{113}).second,
                                     describe_rca(nl))
                   .empty());
  EXPECT_FALSE(skew_threshold(nl, DelayConfig{}, {3, 3, false}, Picoseconds{100}).has_value());
}

TEST(RelativeTiming, NeedsCompleteRtzPhase) {
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 2);
  const std::vector<Stimulus> s{{Picoseconds{0}, nl.net_id("A01"), true}};
  EXPECT_THROW(check_relative_timing(simulate(nl, DelayConfig{}, s), describe_rca(nl)), Error);
}

TEST(Orphans, UniformEarlyOutputHasNoPostCompletionTransitions) {
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 4);
  for (const auto& v : random_vectors(4, 40, 2)) {
    const auto [r, t] = run_handshake_cycle(nl, DelayConfig{}, v.a, v.b, v.cin);
    for (const auto& o : detect_orphans(t)) {
      EXPECT_EQ(o.classification, OrphanClass::NoOutputDescendant);
      EXPECT_LT(o.event, t.events.size());
      EXPECT_EQ(t.events[o.event].net, o.net);
    }
  }
}

TEST(Orphans, UniformResetFlagsUnacknowledgedCarryFall) {
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 2);
  const auto [r, t] = run_handshake_cycle(nl, DelayConfig{}, 3, 3, false);
  bool carry = false;
  for (const auto& o : detect_orphans(t)) {
    EXPECT_EQ(o.classification, OrphanClass::NoOutputDescendant);
    if (t.net_names[o.net] == "COUT01" && o.phase == Phase::Rtz) carry = true;
  }
  EXPECT_TRUE(carry);
}

TEST(Orphans, SkewedResetCarryFallIsUnacknowledged) {
  const Netlist nl = build_rca(AdderKind::EarlyOutput, 2);
  const auto [r, t] = run_skewed_reset(nl, DelayConfig{}, {3, 3, false}, Picoseconds{200});
  // Stage 0's own sum resets last, so the late carry still precedes completion.
  EXPECT_EQ(*t.phases.rtz_complete - *t.phases.rtz_start, Picoseconds{425});
  std::vector<OrphanFinding> carry;
  for (const auto& o : detect_orphans(t)) {
    if (t.net_names[o.net] == "COUT01") carry.push_back(o);
  }
  ASSERT_EQ(carry.size(), 1U);
  EXPECT_EQ(carry[0].classification, OrphanClass::NoOutputDescendant);
  EXPECT_EQ(carry[0].time - *t.phases.rtz_start, Picoseconds{338});
}

TEST(Orphans, SlowInterStageCarryIsLateAndUnacknowledged) {
  NetlistDesc desc = describe_rca(AdderKind::EarlyOutput, 2);
  for (auto& g : desc.gates) {
    if (g.name == "s0.CG5") g.delay = Picoseconds{500};
  }
  const Netlist nl = assemble(desc);
  const auto [r, t] = run_handshake_cycle(nl, DelayConfig{}, 3, 3, false);
  EXPECT_EQ(r.reverse, Picoseconds{250});
  std::set<OrphanClass> classes;
  for (const auto& o : detect_orphans(t)) {
    if (t.net_names[o.net] != "COUT01" || o.phase != Phase::Rtz) continue;
    classes.insert(o.classification);
    EXPECT_EQ(o.time - *t.phases.rtz_start, Picoseconds{575});
  }
  EXPECT_EQ(classes, (std::set<OrphanClass>{OrphanClass::PostCompletion, OrphanClass::NoOutputDescendant}));
}

TEST(Orphans, DimsOnlySiblingMintermHalvesAreUnacknowledged) {
  const Netlist nl = build_rca(AdderKind::DimsStrong, 2);
  for (const auto& v : exhaustive_vectors(2)) {
    const auto [r, t] = run_handshake_cycle(nl, DelayConfig{}, v.a, v.b, v.cin);
    for (const auto& o : detect_orphans(t)) {
      EXPECT_EQ(o.classification, OrphanClass::NoOutputDescendant);
      const auto& name = t.net_names[o.net];
      EXPECT_TRUE(name.ends_with(".ab")) << name;
    }
  }
}

TEST(Indication, DimsIsStrong) {
  const auto v = classify_indication(build_dims_fa(), DelayConfig{});
  EXPECT_EQ(v.cls, IndicationClass::Strong);
  EXPECT_TRUE(v.witnesses.empty());
  EXPECT_FALSE(v.early_set);
  EXPECT_FALSE(v.early_reset);
}

TEST(Indication, DimsStaysStrongUnderRandomDelays) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> ps(1, 300);
  for (int i = 0; i < 5; ++i) {
    DelayConfig d;
    for (GateType t : kAllGateTypes) d.set(t, Picoseconds{ps(rng)});
    EXPECT_EQ(classify_indication(build_dims_fa(), d).cls, IndicationClass::Strong);
  }
}

TEST(Indication, EarlyOutputResetsEarlyOnOperandAWithdrawal) {
  const auto v = classify_indication(build_early_output_fa(), DelayConfig{});
  EXPECT_EQ(v.cls, IndicationClass::Early);
  EXPECT_TRUE(v.early_reset);
  EXPECT_TRUE(v.early_set);
  bool a_only = false, carry_set = false;
  for (const auto& w : v.witnesses) {
    if (w.phase == Phase::Rtz && w.inputs == std::vector<std::string>{"A0"} && w.all_outputs) a_only = true;
    if (w.phase == Phase::Valid && w.outputs_done == std::vector<std::string>{"COUT"} &&
        std::find(w.inputs.begin(), w.inputs.end(), "CIN") == w.inputs.end()) {
      carry_set = true;
    }
    // Sum never completes without the carry-in in the valid phase.
    if (w.phase == Phase::Valid) {
      EXPECT_EQ(std::find(w.outputs_done.begin(), w.outputs_done.end(), "SUM0"), w.outputs_done.end());
    }
  }
  EXPECT_TRUE(a_only);
  EXPECT_TRUE(carry_set);
}

TEST(Indication, RejectsWrongPortCount) {
  EXPECT_THROW(classify_indication(build_rca(AdderKind::EarlyOutput, 2), DelayConfig{}), StructuralError);
}

TEST(DisjointCover, EquationCoversAreOrthogonal) {
  for (const char* rail : {"SUM1", "SUM0", "COUT1", "COUT0"}) {
    EXPECT_TRUE(check_disjoint_cover(minterm_cover(rail)).disjoint) << rail;
    EXPECT_TRUE(check_disjoint_cover(factored_cover(rail)).disjoint) << rail;
  }
}

TEST(DisjointCover, FactoredCoversComputeTheSameFunctions) {
  for (const char* rail : {"SUM1", "SUM0", "COUT1", "COUT0"}) {
    for (unsigned code = 0; code < 8; ++code) {
      const bool a = code & 4, b = code & 2, c = code & 1;
      auto eval = [&](const std::vector<Product>& cover) {
        for (const auto& p : cover) {
          bool all = true;
          for (const auto& lit : p) {
            const bool v = lit[0] == 'A' ? a : lit[0] == 'B' ? b : c;
            all = all && (v == (lit.back() == '1'));
          }
          if (all) return true;
        }
        return false;
      };
      const int total = a + b + c;
      const bool want = std::string(rail) == "SUM1"    ? total % 2 == 1
                        : std::string(rail) == "SUM0"  ? total % 2 == 0
                        : std::string(rail) == "COUT1" ? total >= 2
                                                       : total < 2;
      EXPECT_EQ(eval(factored_cover(rail)), want) << rail << ' ' << code;
      EXPECT_EQ(eval(minterm_cover(rail)), want) << rail << ' ' << code;
    }
  }
}

TEST(DisjointCover, OverlapHasWitness) {
  const auto r = check_disjoint_cover({parse_product("A1B1CIN1"), parse_product("A1CIN1")});
  EXPECT_FALSE(r.disjoint);
  ASSERT_TRUE(r.offending && r.witness);
  EXPECT_EQ(*r.offending, (std::pair<std::size_t, std::size_t>{0, 1}));
  EXPECT_EQ(*r.witness, (Operands{1, 1, true}));
}

TEST(DisjointCover, SingleProductAndUnknownLiteral) {
  EXPECT_TRUE(check_disjoint_cover({parse_product("A0B0")}).disjoint);
  EXPECT_TRUE(check_disjoint_cover({}).disjoint);
  EXPECT_THROW(check_disjoint_cover({{"A1", "C2"}}), Error);
  EXPECT_THROW(parse_product("A1Q0"), Error);
  EXPECT_EQ(parse_product("A0 B1*CIN0"), (Product{"A0", "B1", "CIN0"}));
}

TEST(CriticalPath, EarlyOutputRecurringElementIsCarryGate) {
  const auto rep = critical_path_report(build_rca(AdderKind::EarlyOutput, 32), DelayConfig{});
  EXPECT_EQ(rep.path.delay, Picoseconds{2203});
  EXPECT_EQ(rep.recurring, (std::map<GateType, int>{{GateType::AO21, 1}}));
  EXPECT_EQ(rep.path.steps.back().arrival, rep.path.delay);
}

TEST(CriticalPath, DimsRecurringElements) {
  const auto rep = critical_path_report(build_rca(AdderKind::DimsStrong, 32), DelayConfig{});
  EXPECT_EQ(rep.path.delay, Picoseconds{270 + 170 * 31});
  EXPECT_EQ(rep.recurring, (std::map<GateType, int>{{GateType::CELEMENT2, 1}, {GateType::OR4, 1}}));
}

TEST(CriticalPath, EqualsWorstMeasuredForwardLatency) {
  for (auto kind : {AdderKind::EarlyOutput, AdderKind::DimsStrong}) {
    for (unsigned n = 1; n <= 4; ++n) {
      const Netlist nl = build_rca(kind, n);
      std::int64_t worst = 0;
      for (const auto& v : exhaustive_vectors(n)) {
        const auto pt = oracle::cycle_times(nl, oracle::default_delays(), oracle::operand_rails(nl, v.a, v.b, v.cin));
        worst = std::max(worst, pt.forward);
      }
      EXPECT_EQ(critical_path_report(nl, DelayConfig{}).path.delay.count(), worst) << to_string(kind) << " n=" << n;
    }
  }
}

TEST(Report, CsvRoundTripWithQuoting) {
  const std::vector<CheckResult> checks = {{"a", "pass", "", true},
                                           {"b, with comma", "fail", "said \"no\"", false}};
  std::stringstream buf;
  write_report_csv(checks, buf);
  const auto back = read_report_csv(buf);
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[1].name, "b, with comma");
  EXPECT_EQ(back[1].witness, "said \"no\"");
  std::ostringstream text;
  write_report_text(checks, text);
  EXPECT_NE(text.str().find("[FAIL] b, with comma"), std::string::npos);
  std::istringstream bad("x,y\n");
  EXPECT_THROW(read_report_csv(bad), ParseError);
}

TEST(CriticalPath, NoRecurringCensusWithoutInteriorStages) {
  EXPECT_TRUE(critical_path_report(build_rca(AdderKind::EarlyOutput, 2), DelayConfig{}).recurring.empty());
  EXPECT_FALSE(critical_path_report(build_rca(AdderKind::EarlyOutput, 3), DelayConfig{}).recurring.empty());
}
