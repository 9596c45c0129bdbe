#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "rtadder/adder_gen.hpp"
#include "rtadder/sim_engine.hpp"

namespace rtadder {

// ---------------------------------------------------------------------------
// Structural paths
// ---------------------------------------------------------------------------

struct PathStep {
  std::string gate;
  GateType type = GateType::AND2;
  Picoseconds delay{0};
  Picoseconds arrival{0};  // at the gate output
};

struct TimedPath {
  Picoseconds delay{0};
  std::vector<PathStep> steps;

  std::vector<std::string> gate_names() const {
    std::vector<std::string> names;
    for (const auto& s : steps) names.push_back(s.gate);
    return names;
  }
};

/// Longest gate-delay path from any net in `sources` to any net in `sinks`.
inline std::optional<TimedPath> longest_path(const Netlist& nl, const DelayConfig& delays,
                                             const std::set<NetId>& sources, const std::set<NetId>& sinks) {
  const auto order = topological_order(nl);
  if (!order) throw StructuralError("longest path requires an acyclic netlist");
  constexpr auto kUnreached = std::numeric_limits<std::int64_t>::min();
  std::vector<std::int64_t> arrival(nl.nets().size(), kUnreached);
  std::vector<std::optional<GateId>> via(nl.nets().size());
  for (NetId s : sources) arrival[s] = 0;
  for (GateId g : *order) {
    const auto& gate = nl.gate(g);
    std::int64_t best = kUnreached;
    for (NetId in : gate.inputs) best = std::max(best, arrival[in]);
    if (best == kUnreached) continue;
    const std::int64_t t = best + nl.delay_of(g, delays).count();
    if (t > arrival[gate.output]) {
      arrival[gate.output] = t;
      via[gate.output] = g;
    }
  }
  std::optional<NetId> end;
  for (NetId s : sinks) {
    if (arrival[s] != kUnreached && (!end || arrival[s] > arrival[*end])) end = s;
  }
  if (!end) return std::nullopt;

  TimedPath path;
  path.delay = Picoseconds{arrival[*end]};
  NetId cursor = *end;
  while (via[cursor] && !sources.contains(cursor)) {
    const GateId g = *via[cursor];
    const auto& gate = nl.gate(g);
    path.steps.push_back({gate.name, gate.type, nl.delay_of(g, delays), Picoseconds{arrival[cursor]}});
    // Step back through the input that set this gate's arrival.
    NetId prev = gate.inputs.front();
    for (NetId in : gate.inputs) {
      if (arrival[in] > arrival[prev]) prev = in;
    }
    cursor = prev;
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

// ---------------------------------------------------------------------------
// Static relative-timing slack
// ---------------------------------------------------------------------------

struct SlackReport {
  Picoseconds direct{0};    // longest stage-local input -> sum reset path
  Picoseconds indirect{0};  // longest stage k input -> carry -> stage k+1 sum path
  Picoseconds slack{0};     // direct - indirect
  std::vector<std::string> direct_path;
  std::vector<std::string> indirect_path;
};

namespace detail {

inline std::set<NetId> operand_rails(const Netlist& nl, unsigned k) {
  using D = RcaDescriptor;
  return {nl.net_id(D::a_rail(k, 1)), nl.net_id(D::a_rail(k, 0)), nl.net_id(D::b_rail(k, 1)), nl.net_id(D::b_rail(k, 0))};
}

inline std::set<NetId> sum_rails(const Netlist& nl, unsigned k) {
  return {nl.net_id(RcaDescriptor::sum_rail(k, 1)), nl.net_id(RcaDescriptor::sum_rail(k, 0))};
}

}  // namespace detail

inline SlackReport static_rt_slack(const Netlist& nl, const DelayConfig& delays) {
  const RcaDescriptor desc = describe_rca(nl);
  if (desc.kind != AdderKind::EarlyOutput || desc.width < 2) {
    throw StructuralError("static_rt_slack needs an early-output ripple carry adder with at least 2 stages");
  }
  SlackReport r;
  std::optional<TimedPath> direct, indirect;
  for (unsigned k = 0; k < desc.width; ++k) {
    auto p = longest_path(nl, delays, detail::operand_rails(nl, k), detail::sum_rails(nl, k));
    if (!p) throw StructuralError("stage " + std::to_string(k) + " has no operand-to-sum path");
    if (!direct || p->delay > direct->delay) direct = std::move(p);
  }
  for (unsigned k = 0; k + 1 < desc.width; ++k) {
    auto p = longest_path(nl, delays, detail::operand_rails(nl, k), detail::sum_rails(nl, k + 1));
    if (!p) throw StructuralError("no carry path from stage " + std::to_string(k) + " to stage " + std::to_string(k + 1));
    if (!indirect || p->delay > indirect->delay) indirect = std::move(p);
  }
  r.direct = direct->delay;
  r.indirect = indirect->delay;
  r.slack = r.direct - r.indirect;
  r.direct_path = direct->gate_names();
  r.indirect_path = indirect->gate_names();
  return r;
}

// ---------------------------------------------------------------------------
// Dynamic relative-timing check
// ---------------------------------------------------------------------------

struct RtViolation {
  unsigned stage = 0;       // the stage whose carry-in resets late (k+1)
  Picoseconds carry_fall{0};  // relative to the RTZ phase start
  Picoseconds sum_fall{0};
  Picoseconds margin{0};  // carry_fall - sum_fall, always > 0
};

/// Checks that every internal carry-in falls no later than the final fall of
/// the sum it feeds, over the RTZ phase of `trace`.
inline std::vector<RtViolation> check_relative_timing(const Trace& trace, const RcaDescriptor& desc) {
  if (!trace.phases.rtz_start || !trace.phases.rtz_complete) {
    throw Error("relative-timing check needs a trace with a complete RTZ phase");
  }
  const Picoseconds base = *trace.phases.rtz_start;
  auto last_fall = [&](std::initializer_list<std::string> names) -> std::optional<Picoseconds> {
    std::set<NetId> nets;
    for (const auto& n : names) {
      auto id = trace.find_net(n);
      if (!id) throw StructuralError("trace lacks net '" + n + "'");
      nets.insert(*id);
    }
    std::optional<Picoseconds> t;
    for (const auto& e : trace.events) {
      if (e.phase == Phase::Rtz && !e.value && nets.contains(e.net)) t = e.time - base;
    }
    return t;
  };
  std::vector<RtViolation> out;
  for (unsigned k = 1; k < desc.width; ++k) {
    const auto carry = last_fall({RcaDescriptor::cin_rail(k, 1), RcaDescriptor::cin_rail(k, 0)});
    const auto sum = last_fall({RcaDescriptor::sum_rail(k, 1), RcaDescriptor::sum_rail(k, 0)});
    if (carry && sum && *carry > *sum) out.push_back({k, *carry, *sum, *carry - *sum});
  }
  return out;
}

/// Handshake cycle where stage 0's inputs (A0, B0, CIN) return to spacer
/// `skew` after every other input.
inline std::pair<CycleReport, Trace> run_skewed_reset(const Netlist& nl, const DelayConfig& delays, const Operands& op,
                                                      Picoseconds skew) {
  HandshakeOptions opts;
  for (const auto& port : {RcaDescriptor::a_port(0), RcaDescriptor::b_port(0), RcaDescriptor::cin_port()}) {
    opts.withdraw_offset[port] = skew;
  }
  return run_handshake_cycle(nl, delays, op.a, op.b, op.cin, opts);
}

/// Largest stage-0 reset skew in [0, limit] that produces no relative-timing
/// violation, found by bisection. Empty when even `limit` is safe.
inline std::optional<Picoseconds> skew_threshold(const Netlist& nl, const DelayConfig& delays, const Operands& op,
                                                 Picoseconds limit) {
  const RcaDescriptor desc = describe_rca(nl);
  auto violates = [&](Picoseconds skew) {
    return !check_relative_timing(run_skewed_reset(nl, delays, op, skew).second, desc).empty();
  };
  if (!violates(limit)) return std::nullopt;
  if (violates(Picoseconds::zero())) return Picoseconds{-1};
  std::int64_t safe = 0, bad = limit.count();
  while (bad - safe > 1) {
    const std::int64_t mid = safe + (bad - safe) / 2;
    (violates(Picoseconds{mid}) ? bad : safe) = mid;
  }
  return Picoseconds{safe};
}

// ---------------------------------------------------------------------------
// Orphans
// ---------------------------------------------------------------------------

enum class OrphanClass { PostCompletion, NoOutputDescendant };

inline std::string_view to_string(OrphanClass c) {
  return c == OrphanClass::PostCompletion ? "post-completion" : "no-output-descendant";
}

struct OrphanFinding {
  EventId event = 0;
  NetId net = 0;
  Picoseconds time{0};
  Phase phase = Phase::Valid;
  OrphanClass classification = OrphanClass::NoOutputDescendant;
};

/// Flags internal transitions that occur after their phase completed, or
/// that no primary-output transition of the same phase depends on.
inline std::vector<OrphanFinding> detect_orphans(const Trace& trace) {
  const auto& ev = trace.events;
  auto is_output = [&](NetId n) {
    return trace.net_kinds[n] == NetKind::PrimaryOutput || (n < trace.net_observed.size() && trace.net_observed[n]);
  };
  // Support ids always precede the event they support, so one reverse sweep
  // settles reachability.
  std::vector<bool> reaches_output(ev.size(), false);
  for (std::size_t i = ev.size(); i-- > 0;) {
    if (is_output(ev[i].net)) reaches_output[i] = true;
    if (!reaches_output[i]) continue;
    for (EventId s : ev[i].support) {
      if (ev[s].phase == ev[i].phase) reaches_output[s] = true;
    }
  }
  std::vector<OrphanFinding> out;
  for (const auto& e : ev) {
    if (trace.net_kinds[e.net] != NetKind::Internal || is_output(e.net)) continue;
    const auto done = trace.phases.completion(e.phase);
    if (done && e.time > *done) out.push_back({e.id, e.net, e.time, e.phase, OrphanClass::PostCompletion});
    if (!reaches_output[e.id]) out.push_back({e.id, e.net, e.time, e.phase, OrphanClass::NoOutputDescendant});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Indication
// ---------------------------------------------------------------------------

enum class IndicationClass { Strong, Weak, Early };

inline std::string_view to_string(IndicationClass c) {
  switch (c) {
    case IndicationClass::Strong: return "strong";
    case IndicationClass::Weak: return "weak";
    case IndicationClass::Early: return "early";
  }
  return "?";
}

struct IndicationWitness {
  Phase phase = Phase::Valid;
  unsigned vector = 0;                    // bit i = value of input port i
  std::vector<std::string> inputs;        // ports applied (valid) or withdrawn (rtz)
  std::vector<std::string> outputs_done;  // ports that completed anyway
  bool all_outputs = false;
};

struct IndicationVerdict {
  IndicationClass cls = IndicationClass::Strong;
  bool early_set = false;    // some output completes before the last input arrives
  bool early_reset = false;  // some output resets before the last input leaves
  std::vector<IndicationWitness> witnesses;
};

/// Applies (valid phase) or withdraws (RTZ phase) every proper subset of a
/// full adder's three inputs, for all eight codewords, and records which
/// outputs complete before the remaining inputs arrive or leave.
inline IndicationVerdict classify_indication(const Netlist& fa, const DelayConfig& delays) {
  if (fa.input_ports().size() != 3 || fa.output_ports().size() != 2) {
    throw StructuralError("classify_indication needs a full adder with 3 input and 2 output ports");
  }
  const auto& ins = fa.input_ports();
  auto rail = [&](std::size_t port, unsigned vec) {
    return ((vec >> port) & 1U) ? ins[port].rail1 : ins[port].rail0;
  };
  IndicationVerdict verdict;
  bool partial = false, early = false;
  for (unsigned vec = 0; vec < 8; ++vec) {
    for (unsigned subset = 1; subset < 7; ++subset) {
      std::vector<std::string> names;
      for (std::size_t p = 0; p < 3; ++p) {
        if ((subset >> p) & 1U) names.push_back(ins[p].name);
      }
      for (Phase phase : {Phase::Valid, Phase::Rtz}) {
        Simulator sim(fa, delays);
        std::vector<Stimulus> stim;
        for (std::size_t p = 0; p < 3; ++p) {
          if (phase == Phase::Rtz || ((subset >> p) & 1U)) stim.push_back({Picoseconds::zero(), rail(p, vec), true});
        }
        sim.schedule(stim);
        sim.run();
        if (phase == Phase::Rtz) {
          stim.clear();
          for (std::size_t p = 0; p < 3; ++p) {
            if ((subset >> p) & 1U) stim.push_back({sim.now(), rail(p, vec), false});
          }
          sim.set_phase(Phase::Rtz);
          sim.schedule(stim);
          sim.run();
        }
        IndicationWitness w{phase, vec, names, {}, false};
        for (const auto& out : fa.output_ports()) {
          const bool r1 = sim.value(out.rail1), r0 = sim.value(out.rail0);
          const bool done = phase == Phase::Valid ? (r1 != r0) : (!r1 && !r0);
          if (done) w.outputs_done.push_back(out.name);
        }
        if (w.outputs_done.empty()) continue;
        w.all_outputs = w.outputs_done.size() == fa.output_ports().size();
        partial = true;
        if (w.all_outputs) early = true;
        (phase == Phase::Valid ? verdict.early_set : verdict.early_reset) = true;
        verdict.witnesses.push_back(std::move(w));
      }
    }
  }
  if (early) verdict.cls = IndicationClass::Early;
  else if (partial) verdict.cls = IndicationClass::Weak;
  else verdict.cls = IndicationClass::Strong;
  return verdict;
}

// ---------------------------------------------------------------------------
// Disjoint covers
// ---------------------------------------------------------------------------

using Product = std::vector<std::string>;  // literals over A1 A0 B1 B0 CIN1 CIN0

struct DisjointResult {
  bool disjoint = true;
  std::optional<std::pair<std::size_t, std::size_t>> offending;
  std::optional<Operands> witness;  // a valid codeword satisfying both products
};

/// Splits a juxtaposed product such as "A0B1CIN0" into rail literals.
inline Product parse_product(std::string_view text) {
  Product p;
  while (!text.empty()) {
    if (text.front() == ' ' || text.front() == '*') {
      text.remove_prefix(1);
      continue;
    }
    std::size_t len = 0;
    if (text.starts_with("CIN")) len = 4;
    else if (text.front() == 'A' || text.front() == 'B') len = 2;
    if (len == 0 || text.size() < len || (text[len - 1] != '0' && text[len - 1] != '1')) {
      throw Error("cannot parse product term near '" + std::string(text) + "'");
    }
    p.emplace_back(text.substr(0, len));
    text.remove_prefix(len);
  }
  return p;
}

/// Two products are disjoint when no valid codeword (one rail high per
/// variable) satisfies both. Checked over all 8 codewords.
inline DisjointResult check_disjoint_cover(const std::vector<Product>& products) {
  static const std::map<std::string, std::pair<int, bool>> kLiterals = {
      {"A1", {0, true}}, {"A0", {0, false}}, {"B1", {1, true}}, {"B0", {1, false}}, {"CIN1", {2, true}}, {"CIN0", {2, false}}};
  for (const auto& p : products) {
    for (const auto& lit : p) {
      if (!kLiterals.contains(lit)) throw Error("unknown literal '" + lit + "'");
    }
  }
  auto satisfied = [&](const Product& p, unsigned code) {
    return std::all_of(p.begin(), p.end(), [&](const std::string& lit) {
      const auto [var, rail] = kLiterals.at(lit);
      const bool bit = (code >> (2 - var)) & 1U;  // code = a b cin, msb first
      return bit == rail;
    });
  };
  for (std::size_t i = 0; i < products.size(); ++i) {
    for (std::size_t j = i + 1; j < products.size(); ++j) {
      for (unsigned code = 0; code < 8; ++code) {
        if (satisfied(products[i], code) && satisfied(products[j], code)) {
          return {false, std::pair{i, j}, Operands{(code >> 2) & 1U, (code >> 1) & 1U, (code & 1U) != 0}};
        }
      }
    }
  }
  return {};
}

/// The canonical sum-of-minterms cover of one output rail.
inline std::vector<Product> minterm_cover(std::string_view rail) {
  for (const auto& eq : kFullAdderEquations) {
    if (eq.rail != rail) continue;
    std::vector<Product> out;
    for (const auto& m : eq.products) {
      out.push_back({m.a ? "A1" : "A0", m.b ? "B1" : "B0", m.cin ? "CIN1" : "CIN0"});
    }
    return out;
  }
  throw Error("no equation for rail '" + std::string(rail) + "'");
}

/// Products of the factorized early-output equations, multiplied out.
inline std::vector<Product> factored_cover(std::string_view rail) {
  if (rail == "SUM1") return {{"A0", "B0", "CIN1"}, {"A1", "B1", "CIN1"}, {"A0", "B1", "CIN0"}, {"A1", "B0", "CIN0"}};
  if (rail == "SUM0") return {{"A0", "B0", "CIN0"}, {"A1", "B1", "CIN0"}, {"A0", "B1", "CIN1"}, {"A1", "B0", "CIN1"}};
  if (rail == "COUT1") return {{"A0", "B1", "CIN1"}, {"A1", "B0", "CIN1"}, {"A1", "B1"}};
  if (rail == "COUT0") return {{"A0", "B1", "CIN0"}, {"A1", "B0", "CIN0"}, {"A0", "B0"}};
  throw Error("no equation for rail '" + std::string(rail) + "'");
}

// ---------------------------------------------------------------------------
// Critical path
// ---------------------------------------------------------------------------

struct CriticalPathReport {
  TimedPath path;
  std::map<GateType, int> recurring;  // per interior stage; empty below 3 stages
};

inline CriticalPathReport critical_path_report(const Netlist& nl, const DelayConfig& delays) {
  std::set<NetId> sources, sinks;
  for (NetId n = 0; n < nl.nets().size(); ++n) {
    if (nl.net(n).kind == NetKind::PrimaryInput) sources.insert(n);
    if (nl.net(n).kind == NetKind::PrimaryOutput) sinks.insert(n);
  }
  CriticalPathReport report;
  auto path = longest_path(nl, delays, sources, sinks);
  if (!path) return report;
  report.path = std::move(*path);

  std::vector<std::pair<unsigned, std::map<GateType, int>>> per_stage;
  for (const auto& step : report.path.steps) {
    const auto k = stage_of(step.gate);
    if (!k) continue;
    if (per_stage.empty() || per_stage.back().first != *k) per_stage.push_back({*k, {}});
    ++per_stage.back().second[step.type];
  }
  // The first and last stages on the path enter and leave the carry chain;
  // only interior stages show what repeats.
  if (per_stage.size() < 3) return report;
  const std::size_t first = 1, last = per_stage.size() - 1;
  report.recurring = per_stage[first].second;
  for (std::size_t i = first + 1; i < last; ++i) {
    for (auto it = report.recurring.begin(); it != report.recurring.end();) {
      const auto found = per_stage[i].second.find(it->first);
      if (found == per_stage[i].second.end()) {
        it = report.recurring.erase(it);
      } else {
        it->second = std::min(it->second, found->second);
        ++it;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report output
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  std::string status;  // "pass", "fail", or an informational verdict
  std::string witness;
  bool ok = true;      // false when the outcome is unexpected
};

inline void write_report_text(const std::vector<CheckResult>& checks, std::ostream& out) {
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    out << (c.ok ? "[ ok ] " : "[FAIL] ") << c.name << std::string(width - c.name.size() + 2, ' ') << c.status;
    if (!c.witness.empty()) out << "  (" << c.witness << ")";
    out << '\n';
  }
}

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

inline void write_report_csv(const std::vector<CheckResult>& checks, std::ostream& out) {
  out << "check,status,witness\n";
  for (const auto& c : checks) out << csv_cell(c.name) << ',' << csv_cell(c.status) << ',' << csv_cell(c.witness) << '\n';
}

/// Splits one CSV record, honouring double-quoted cells.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV cell");
  return cells;
}

inline std::vector<CheckResult> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "check,status,witness") throw ParseError("unexpected report CSV header");
  std::vector<CheckResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ParseError("report CSV row needs 3 cells: '" + line + "'");
    out.push_back({cells[0], cells[1], cells[2], true});
  }
  return out;
}

}  // namespace rtadder
