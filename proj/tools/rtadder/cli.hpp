#pragma once

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtadder/rtadder.hpp"

namespace rtadder::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kDelayEnv = "RTADDER_DELAY_CONFIG";

namespace detail {

inline DelayConfig load_delays(const std::string& path) {
  std::string chosen = path;
  if (chosen.empty()) {
    if (const char* env = std::getenv(kDelayEnv); env && *env) chosen = env;
  }
  if (chosen.empty()) return DelayConfig{};
  std::ifstream in(chosen);
  if (!in) throw ParseError("cannot read delay config '" + chosen + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return load_delay_config(buf.str());
  } catch (const Error& e) {
    throw ParseError("'" + chosen + "': " + e.what());
  }
}

inline AdderKind parse_kind(const std::string& s) {
  const auto k = adder_kind_from_string(s);
  if (!k) throw ParseError("unknown adder kind '" + s + "' (expected early-output or dims)");
  return *k;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  return out;
}

inline void print_census(const Netlist& nl, std::ostream& out) {
  out << "gates: " << nl.gates().size() << '\n';
  for (const auto& [type, count] : nl.census()) out << "  " << to_string(type) << ' ' << count << '\n';
}

struct BuildArgs {
  std::string kind = "early-output";
  unsigned n = 0;
  std::string out;
};

struct SimArgs {
  std::string kind = "early-output";
  unsigned n = 4;
  std::string delays;
  std::string netlist;
  std::size_t random = 0;
  std::uint64_t seed = 1;
  bool exhaustive = false;
  std::string vectors;
  std::string report;
  std::string vcd;
  unsigned threads = 1;
};

struct VerifyArgs {
  std::string kind = "early-output";
  unsigned n = 2;
  std::string delays;
  std::string skew;
  std::string csv;
};

struct Table4Args {
  std::string out;
  std::string latencies;
};

inline int cmd_build(const BuildArgs& a, std::ostream& out) {
  if (a.n == 0) throw ParseError("--n must be at least 1");
  const Netlist nl = build_rca(parse_kind(a.kind), a.n);
  if (!a.out.empty()) {
    auto file = open_out(a.out);
    file << to_json(nl).dump(2) << '\n';
    out << "wrote " << a.out << '\n';
  }
  out << a.kind << " ripple-carry adder, " << a.n << " bit" << (a.n == 1 ? "" : "s") << '\n';
  print_census(nl, out);
  return kExitOk;
}

inline int cmd_sim(const SimArgs& a, std::ostream& out) {
  const DelayConfig delays = load_delays(a.delays);
  if (a.n == 0) throw ParseError("--n must be at least 1");
  const Netlist nl = a.netlist.empty() ? build_rca(parse_kind(a.kind), a.n) : read_netlist(a.netlist);
  const unsigned width = describe_rca(nl).width;

  VectorSource source;
  if (a.exhaustive) {
    source = ExhaustiveVectors{width};
  } else if (!a.vectors.empty()) {
    std::ifstream in(a.vectors);
    if (!in) throw ParseError("cannot read vectors '" + a.vectors + "'");
    try {
      source = parse_vectors(in);
    } catch (const ParseError& e) {
      throw ParseError("'" + a.vectors + "': " + e.what());
    }
  } else {
    source = RandomVectors{a.random, a.seed};
  }

  BatchOptions opts;
  opts.threads = std::max(1U, a.threads);
  const BatchReport report = run_vectors(nl, delays, source, opts);

  out << report.source << '\n';
  out << report.passed() << '/' << report.rows.size() << " pass\n";
  if (!report.rows.empty()) {
    std::ostringstream mean;
    mean << std::fixed << std::setprecision(3) << report.mean_forward_ns();
    out << "forward latency ns: min " << format_ns(report.min_forward()) << " mean " << mean.str() << " max "
        << format_ns(report.max_forward()) << '\n';
  }
  out << (report.all_hazard_free() ? "no" : "some") << " nets switched more than once per phase\n";

  if (!a.report.empty()) {
    auto file = open_out(a.report);
    write_batch_csv(report, file);
  }
  if (!a.vcd.empty() && !report.rows.empty()) {
    const auto& first = report.rows.front().operands;
    const auto [cycle, trace] = run_handshake_cycle(nl, delays, first.a, first.b, first.cin, opts.handshake);
    auto file = open_out(a.vcd);
    write_vcd(trace, file);
  }
  return report.all_correct() && report.all_hazard_free() ? kExitOk : kExitCheckFailed;
}

inline std::string join(const std::vector<std::string>& v, std::string_view sep) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += sep;
    s += x;
  }
  return s;
}

inline std::vector<CheckResult> verify_checks(const VerifyArgs& a) {
  const DelayConfig delays = load_delays(a.delays);
  if (a.n == 0) throw ParseError("--n must be at least 1");
  const AdderKind kind = parse_kind(a.kind);
  const Netlist nl = build_rca(kind, a.n);
  const RcaDescriptor desc = describe_rca(nl);
  std::vector<CheckResult> checks;

  if (kind == AdderKind::EarlyOutput && a.n >= 2) {
    const auto s = static_rt_slack(nl, delays);
    checks.push_back({"static-slack", "direct " + format_ns(s.direct) + " indirect " + format_ns(s.indirect) +
                                          " slack " + format_ns(s.slack),
                      join(s.indirect_path, " > "), true});
  }

  // All-ones operands generate a carry in every stage.
  const std::uint64_t ones = width_mask(a.n);
  const auto [cycle, trace] = run_handshake_cycle(nl, delays, ones, ones, false, {});
  const auto uniform = check_relative_timing(trace, desc);
  checks.push_back({"rt-uniform", uniform.empty() ? "pass" : "fail",
                    uniform.empty() ? "" : "stage " + std::to_string(uniform.front().stage) + " margin " +
                                               format_ns(uniform.front().margin),
                    uniform.empty()});
  std::size_t late = 0, unacked = 0;
  for (const auto& o : detect_orphans(trace)) {
    (o.classification == OrphanClass::PostCompletion ? late : unacked) += 1;
  }
  checks.push_back({"orphans-post-completion", late == 0 ? "pass" : "fail", std::to_string(late) + " found", late == 0});
  checks.push_back({"orphans-no-output-descendant", "info", std::to_string(unacked) + " found", true});

  if (!a.skew.empty()) {
    const auto skew = parse_ns(a.skew);
    if (!skew || *skew < Picoseconds::zero()) throw ParseError("bad --skew '" + a.skew + "'");
    if (a.n < 2) throw ParseError("--skew needs --n of at least 2");
    const Operands op{ones, ones, false};
    const auto viol = check_relative_timing(run_skewed_reset(nl, delays, op, *skew).second, desc);
    const auto threshold = skew_threshold(nl, delays, op, std::max(*skew, Picoseconds{5000}));
    const bool expected = threshold && *skew > *threshold;
    std::string witness = threshold ? "threshold " + format_ns(*threshold) : "no threshold found";
    if (!viol.empty()) {
      witness = "stage " + std::to_string(viol.front().stage) + " carry " + format_ns(viol.front().carry_fall) +
                " sum " + format_ns(viol.front().sum_fall) + " margin " + format_ns(viol.front().margin) + "; " +
                witness;
    }
    checks.push_back({"rt-skew " + format_ns(*skew), viol.empty() ? "no violation" : "violation", witness,
                      viol.empty() != expected});
  }

  const auto verdict = classify_indication(build_rca(kind, 1), delays);
  std::string witness;
  for (const auto& w : verdict.witnesses) {
    if (w.all_outputs) {
      witness = std::string(w.phase == Phase::Valid ? "apply " : "withdraw ") + join(w.inputs, "+") +
                " only, all outputs " + (w.phase == Phase::Valid ? "valid" : "reset");
      break;
    }
  }
  const auto expected_class = kind == AdderKind::DimsStrong ? IndicationClass::Strong : IndicationClass::Early;
  checks.push_back({"indication", std::string(to_string(verdict.cls)), witness, verdict.cls == expected_class});

  for (std::string_view rail : {"SUM1", "SUM0", "COUT1", "COUT0"}) {
    for (bool factored : {false, true}) {
      const auto r = check_disjoint_cover(factored ? factored_cover(rail) : minterm_cover(rail));
      std::string w;
      if (r.witness) {
        w = "products " + std::to_string(r.offending->first) + "," + std::to_string(r.offending->second) + " at A=" +
            std::to_string(r.witness->a) + " B=" + std::to_string(r.witness->b) + " CIN=" + (r.witness->cin ? "1" : "0");
      }
      checks.push_back({"disjoint " + std::string(rail) + (factored ? " factored" : " minterms"),
                        r.disjoint ? "pass" : "fail", w, r.disjoint});
    }
  }

  const auto cp = critical_path_report(nl, delays);
  std::string recurring;
  for (const auto& [type, count] : cp.recurring) {
    if (!recurring.empty()) recurring += ' ';
    recurring += std::string(to_string(type)) + "x" + std::to_string(count);
  }
  if (recurring.empty()) recurring = "n/a below 3 stages";
  checks.push_back({"critical-path", format_ns(cp.path.delay), "recurring " + recurring, true});
  return checks;
}

inline int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto checks = verify_checks(a);
  write_report_text(checks, out);
  if (!a.csv.empty()) {
    auto file = open_out(a.csv);
    write_report_csv(checks, file);
  }
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.ok; });
  return ok ? kExitOk : kExitCheckFailed;
}

inline int cmd_table4(const Table4Args& a, std::ostream& out) {
  std::vector<AdderRow> rows = builtin_rows();
  if (!a.latencies.empty()) {
    std::ifstream in(a.latencies);
    if (!in) throw ParseError("cannot read latency dataset '" + a.latencies + "'");
    rows = read_latency_dataset(in);
  }
  const Table4 t = generate_table4(rows);
  write_table4_csv(t, out);
  if (!a.out.empty()) {
    auto file = open_out(a.out);
    write_table4_csv(t, file);
  }
  if (a.latencies.empty()) {
    out << "max deviation from published table: " << format_tenths(max_golden_deviation(t)) << " ns\n";
    for (const auto& r : t.rows) {
      if (r.row.cls == TimingClass::RelativeTimed) out << "relative-timed mean: " << format_tenths(r.mean) << " ns\n";
    }
    for (const char* other : {"[38] strong", "[42] weak", "[19] early output"}) {
      std::ostringstream pct;
      pct << std::fixed << std::setprecision(1) << mean_reduction_percent(t, other, "relative-timed");
      out << "mean reduction vs " << other << ": " << pct.str() << "%\n";
    }
  }
  return kExitOk;
}

}  // namespace detail

/// Runs one command line (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual-rail ripple-carry adder generator, simulator and checker", "rtadder"};
  app.require_subcommand(1);

  detail::BuildArgs build;
  auto* b = app.add_subcommand("build", "generate an adder netlist and print its gate census");
  b->add_option("--kind", build.kind, "early-output or dims");
  b->add_option("--n", build.n, "width in bits")->required();
  b->add_option("--out", build.out, "netlist JSON output");

  detail::SimArgs sim;
  auto* s = app.add_subcommand("sim", "run handshake cycles against the addition oracle");
  s->add_option("--kind", sim.kind, "early-output or dims");
  s->add_option("--n", sim.n, "width in bits");
  s->add_option("--netlist", sim.netlist, "netlist JSON instead of --kind/--n");
  s->add_option("--delays", sim.delays, std::string("delay config (default: $") + kDelayEnv + ")");
  auto* random = s->add_option("--random", sim.random, "number of random vectors");
  s->add_option("--seed", sim.seed, "random seed")->needs(random);
  auto* exhaustive = s->add_flag("--exhaustive", sim.exhaustive, "all operand combinations");
  auto* vectors = s->add_option("--vectors", sim.vectors, "file of 'a b cin' hex triples");
  random->excludes(exhaustive, vectors);
  exhaustive->excludes(vectors);
  s->add_option("--report", sim.report, "per-vector CSV report");
  s->add_option("--vcd", sim.vcd, "VCD trace of the first vector");
  s->add_option("--threads", sim.threads, "worker threads");

  detail::VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "timing, orphan, indication and cover checks");
  v->add_option("--kind", verify.kind, "early-output or dims");
  v->add_option("--n", verify.n, "width in bits");
  v->add_option("--delays", verify.delays, std::string("delay config (default: $") + kDelayEnv + ")");
  v->add_option("--skew", verify.skew, "stage-0 reset skew in ns");
  v->add_option("--csv", verify.csv, "CSV report");

  detail::Table4Args table;
  auto* t = app.add_subcommand("table4", "cycle-time estimates for 32-bit adders");
  t->add_option("--out", table.out, "CSV output");
  t->add_option("--latencies", table.latencies, "latency dataset CSV (label,class,latency_ns)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (b->parsed()) return detail::cmd_build(build, out);
    if (s->parsed()) {
      if (*random && sim.random == 0) throw ParseError("--random needs a positive count");
      if (!*random && !*exhaustive && !*vectors) throw ParseError("choose one of --random, --exhaustive, --vectors");
      return detail::cmd_sim(sim, out);
    }
    if (v->parsed()) return detail::cmd_verify(verify, out);
    if (t->parsed()) return detail::cmd_table4(table, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace rtadder::cli
