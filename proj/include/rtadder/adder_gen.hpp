#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rtadder/netlist.hpp"

namespace rtadder {

enum class AdderKind { EarlyOutput, DimsStrong };

inline std::string_view to_string(AdderKind kind) {
  return kind == AdderKind::EarlyOutput ? "early-output" : "dims";
}

inline std::optional<AdderKind> adder_kind_from_string(std::string_view s) {
  if (s == "early-output" || s == "eo") return AdderKind::EarlyOutput;
  if (s == "dims" || s == "strong") return AdderKind::DimsStrong;
  return std::nullopt;
}

/// A three-literal product over (A, B, CIN), one rail per variable.
struct Minterm {
  bool a;
  bool b;
  bool cin;
  friend bool operator==(const Minterm&, const Minterm&) = default;
};

/// Canonical dual-rail full adder sum-of-products. Every product of every
/// equation is a full minterm, so together they use the 8 minterms once each
/// per output pair (sum rails and carry rails).
struct RailEquation {
  std::string_view rail;  // "SUM1", "SUM0", "COUT1", "COUT0"
  std::array<Minterm, 4> products;
};

inline constexpr std::array<RailEquation, 4> kFullAdderEquations = {{
    {"SUM1", {{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}}}},
    {"SUM0", {{{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}}},
    {"COUT1", {{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}}}},
    {"COUT0", {{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}}}},
}};

/// Port and net naming shared by all generated ripple-carry adders. Stage k
/// operands are ports A<k>/B<k> with rails A<k>1/A<k>0; the carry from stage
/// k to k+1 is the net pair COUT<k>1/COUT<k>0; the last one is port COUT.
struct RcaDescriptor {
  AdderKind kind = AdderKind::EarlyOutput;
  unsigned width = 1;

  static std::string a_port(unsigned k) { return "A" + std::to_string(k); }
  static std::string b_port(unsigned k) { return "B" + std::to_string(k); }
  static std::string sum_port(unsigned k) { return "SUM" + std::to_string(k); }
  static std::string cin_port() { return "CIN"; }
  static std::string cout_port() { return "COUT"; }

  static std::string a_rail(unsigned k, int r) { return a_port(k) + std::to_string(r); }
  static std::string b_rail(unsigned k, int r) { return b_port(k) + std::to_string(r); }
  static std::string sum_rail(unsigned k, int r) { return sum_port(k) + std::to_string(r); }
  static std::string cout_rail(unsigned k, int r) { return "COUT" + std::to_string(k) + std::to_string(r); }
  static std::string cin_rail(unsigned k, int r) {
    return k == 0 ? "CIN" + std::to_string(r) : cout_rail(k - 1, r);
  }
  static std::string stage_prefix(unsigned k) { return "s" + std::to_string(k) + "."; }
};

/// Stage index encoded in a generated gate or net name ("s3.CG5" -> 3).
inline std::optional<unsigned> stage_of(std::string_view name) {
  if (name.size() < 3 || name[0] != 's') return std::nullopt;
  const auto dot = name.find('.');
  if (dot == std::string_view::npos || dot == 1) return std::nullopt;
  unsigned k = 0;
  for (std::size_t i = 1; i < dot; ++i) {
    if (name[i] < '0' || name[i] > '9') return std::nullopt;
    k = k * 10 + static_cast<unsigned>(name[i] - '0');
  }
  return k;
}

namespace detail {

struct StageRails {
  std::string a1, a0, b1, b0, cin1, cin0, sum1, sum0, cout1, cout0;
};

inline StageRails stage_rails(unsigned k) {
  using D = RcaDescriptor;
  return {D::a_rail(k, 1),   D::a_rail(k, 0),   D::b_rail(k, 1),   D::b_rail(k, 0),
          D::cin_rail(k, 1), D::cin_rail(k, 0), D::sum_rail(k, 1), D::sum_rail(k, 0),
          D::cout_rail(k, 1), D::cout_rail(k, 0)};
}

// Early output full adder: 4 AO22, 2 AO21, 2 C-elements, 2 AND2 and 1 OR2.
inline void emit_early_output_stage(NetlistDesc& d, unsigned k) {
  const auto r = stage_rails(k);
  const std::string p = RcaDescriptor::stage_prefix(k);
  const std::string net1 = p + "net1", net2 = p + "net2", net3 = p + "net3", net4 = p + "net4",
                    net5 = p + "net5", asum1 = p + "asum1", asum0 = p + "asum0";
  auto g = [&](std::string name, GateType t, std::vector<std::string> in, std::string out) {
    d.gates.push_back({p + name, t, std::move(in), std::move(out), std::nullopt});
  };
  g("CG1", GateType::AO22, {r.a0, r.b0, r.a1, r.b1}, net1);
  g("CG2", GateType::AO22, {r.a0, r.b1, r.a1, r.b0}, net2);
  g("OR", GateType::OR2, {net1, net2}, net3);
  g("CG3", GateType::AO22, {net1, r.cin1, net2, r.cin0}, asum1);
  g("CG4", GateType::AO22, {net1, r.cin0, net2, r.cin1}, asum0);
  g("CE1", GateType::CELEMENT2, {asum1, net3}, r.sum1);
  g("CE2", GateType::CELEMENT2, {asum0, net3}, r.sum0);
  g("AND1", GateType::AND2, {r.a1, r.b1}, net4);
  g("AND2", GateType::AND2, {r.a0, r.b0}, net5);
  g("CG5", GateType::AO21, {net2, r.cin1, net4}, r.cout1);
  g("CG6", GateType::AO21, {net2, r.cin0, net5}, r.cout0);
}

inline std::string minterm_tag(const Minterm& m) {
  return std::string("m") + (m.a ? '1' : '0') + (m.b ? '1' : '0') + (m.cin ? '1' : '0');
}

// DIMS full adder: each minterm is C(C(A,B),CIN) from two 2-input C-elements,
// instantiated once and shared by the sum and carry OR4 gates that use it.
inline void emit_dims_stage(NetlistDesc& d, unsigned k) {
  const auto r = stage_rails(k);
  const std::string p = RcaDescriptor::stage_prefix(k);
  for (int code = 0; code < 8; ++code) {
    const Minterm m{(code & 4) != 0, (code & 2) != 0, (code & 1) != 0};
    const std::string tag = minterm_tag(m);
    const std::string inner = p + tag + ".ab";
    d.gates.push_back({p + tag + ".C1", GateType::CELEMENT2, {m.a ? r.a1 : r.a0, m.b ? r.b1 : r.b0}, inner, std::nullopt});
    d.gates.push_back({p + tag + ".C2", GateType::CELEMENT2, {inner, m.cin ? r.cin1 : r.cin0}, p + tag, std::nullopt});
  }
  for (const auto& eq : kFullAdderEquations) {
    std::vector<std::string> ins;
    for (const auto& m : eq.products) ins.push_back(p + minterm_tag(m));
    std::string out;
    if (eq.rail == "SUM1") out = r.sum1;
    else if (eq.rail == "SUM0") out = r.sum0;
    else if (eq.rail == "COUT1") out = r.cout1;
    else out = r.cout0;
    d.gates.push_back({p + "OR_" + std::string(eq.rail), GateType::OR4, std::move(ins), out, std::nullopt});
  }
}

}  // namespace detail

inline NetlistDesc describe_rca(AdderKind kind, unsigned n) {
  if (n == 0) throw Error("ripple carry adder width must be at least 1");
  using D = RcaDescriptor;
  NetlistDesc d;
  for (unsigned k = 0; k < n; ++k) {
    if (kind == AdderKind::EarlyOutput) detail::emit_early_output_stage(d, k);
    else detail::emit_dims_stage(d, k);
  }
  for (unsigned k = 0; k < n; ++k) d.input_ports.push_back({D::a_port(k), D::a_rail(k, 1), D::a_rail(k, 0)});
  for (unsigned k = 0; k < n; ++k) d.input_ports.push_back({D::b_port(k), D::b_rail(k, 1), D::b_rail(k, 0)});
  d.input_ports.push_back({D::cin_port(), D::cin_rail(0, 1), D::cin_rail(0, 0)});
  for (unsigned k = 0; k < n; ++k) d.output_ports.push_back({D::sum_port(k), D::sum_rail(k, 1), D::sum_rail(k, 0)});
  d.output_ports.push_back({D::cout_port(), D::cout_rail(n - 1, 1), D::cout_rail(n - 1, 0)});
  return d;
}

inline Netlist build_rca(AdderKind kind, unsigned n) { return assemble(describe_rca(kind, n)); }

inline Netlist build_early_output_fa() { return build_rca(AdderKind::EarlyOutput, 1); }

inline Netlist build_dims_fa() { return build_rca(AdderKind::DimsStrong, 1); }

/// Recovers the adder descriptor from a generated netlist's ports and gates.
inline RcaDescriptor describe_rca(const Netlist& nl) {
  RcaDescriptor desc;
  unsigned n = 0;
  while (nl.find_input_port(RcaDescriptor::a_port(n))) ++n;
  if (n == 0) throw StructuralError("netlist has no ripple-carry operand ports (A0...)");
  for (unsigned k = 0; k < n; ++k) {
    if (!nl.find_input_port(RcaDescriptor::b_port(k)) || !nl.find_output_port(RcaDescriptor::sum_port(k))) {
      throw StructuralError("netlist lacks ports for stage " + std::to_string(k));
    }
  }
  if (!nl.find_input_port(RcaDescriptor::cin_port()) || !nl.find_output_port(RcaDescriptor::cout_port())) {
    throw StructuralError("netlist lacks CIN/COUT ports");
  }
  desc.width = n;
  desc.kind = nl.find_gate("s0.CG5") ? AdderKind::EarlyOutput : AdderKind::DimsStrong;
  return desc;
}

namespace detail {

// OR per rail pair, then a balanced tree of 2-input C-elements.
inline void emit_completion_tree(NetlistDesc& d, const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<std::string> level;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string out = pairs.size() == 1 ? "done" : "cd.v" + std::to_string(i);
    d.gates.push_back({"cd.OR" + std::to_string(i), GateType::OR2, {pairs[i].first, pairs[i].second}, out, std::nullopt});
    level.push_back(out);
  }
  int node = 0;
  while (level.size() > 1) {
    std::vector<std::string> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      const bool root = level.size() == 2;
      const std::string out = root ? "done" : "cd.t" + std::to_string(node);
      d.gates.push_back({"cd.C" + std::to_string(node), GateType::CELEMENT2, {level[i], level[i + 1]}, out, std::nullopt});
      ++node;
      next.push_back(out);
    }
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  d.observe.push_back("done");
}

}  // namespace detail

/// Stand-alone detector over `pair_count` dual-rail inputs D<i>; the single
/// observe-only net `done` rises when every pair is valid and falls when
/// every pair is spacer.
inline Netlist build_completion_detector(unsigned pair_count) {
  if (pair_count == 0) throw Error("completion detector needs at least one rail pair");
  NetlistDesc d;
  std::vector<std::pair<std::string, std::string>> pairs;
  for (unsigned i = 0; i < pair_count; ++i) {
    const std::string name = "D" + std::to_string(i);
    d.input_ports.push_back({name, name + "1", name + "0"});
    pairs.emplace_back(name + "1", name + "0");
  }
  detail::emit_completion_tree(d, pairs);
  return assemble(d);
}

/// Returns a copy of `nl` with a completion detector watching every output port.
inline Netlist attach_completion_detector(const Netlist& nl) {
  NetlistDesc d = nl.describe();
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : d.output_ports) pairs.emplace_back(p.rail1, p.rail0);
  detail::emit_completion_tree(d, pairs);
  return assemble(d);
}

}  // namespace rtadder
