#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rtadder/gate_model.hpp"

namespace rtadder {

using NetId = std::uint32_t;
using GateId = std::uint32_t;

enum class NetKind : std::uint8_t { PrimaryInput, PrimaryOutput, Internal };

struct Net {
  std::string name;
  NetKind kind = NetKind::Internal;
  std::optional<GateId> driver;
  std::vector<GateId> fanout;  // isochronic: every consumer sees a change at the same instant
  bool observe_only = false;
};

struct GateInstance {
  std::string name;
  GateType type = GateType::AND2;
  std::vector<NetId> inputs;
  NetId output = 0;
  std::optional<Picoseconds> delay;  // overrides the DelayConfig entry when set
};

struct DualRailPort {
  std::string name;
  NetId rail1 = 0;
  NetId rail0 = 0;
};

// Name-based descriptions, the form generators and netlist files use.
struct GateDesc {
  std::string name;
  GateType type = GateType::AND2;
  std::vector<std::string> inputs;
  std::string output;
  std::optional<Picoseconds> delay;
};

struct PortDesc {
  std::string name;
  std::string rail1;
  std::string rail0;
};

struct NetlistDesc {
  std::vector<GateDesc> gates;
  std::vector<PortDesc> input_ports;
  std::vector<PortDesc> output_ports;
  std::vector<std::string> observe;  // single-rail nets watched directly (e.g. a detector's done)
};

class Netlist;
Netlist assemble(const NetlistDesc& desc);

/// Immutable gate-level circuit. Built only through assemble().
class Netlist {
 public:
  const std::vector<GateInstance>& gates() const { return gates_; }
  const std::vector<Net>& nets() const { return nets_; }
  const std::vector<DualRailPort>& input_ports() const { return inputs_; }
  const std::vector<DualRailPort>& output_ports() const { return outputs_; }

  const GateInstance& gate(GateId id) const { return gates_.at(id); }
  const Net& net(NetId id) const { return nets_.at(id); }

  std::optional<NetId> find_net(std::string_view name) const {
    auto it = net_index_.find(std::string(name));
    if (it == net_index_.end()) return std::nullopt;
    return it->second;
  }

  NetId net_id(std::string_view name) const {
    if (auto id = find_net(name)) return *id;
    throw StructuralError("no net named '" + std::string(name) + "'");
  }

  std::optional<std::size_t> find_input_port(std::string_view name) const {
    return find_port(inputs_, name);
  }
  std::optional<std::size_t> find_output_port(std::string_view name) const {
    return find_port(outputs_, name);
  }

  std::optional<GateId> find_gate(std::string_view name) const {
    for (GateId g = 0; g < gates_.size(); ++g) {
      if (gates_[g].name == name) return g;
    }
    return std::nullopt;
  }

  Picoseconds delay_of(GateId id, const DelayConfig& delays) const {
    const auto& g = gates_.at(id);
    return g.delay ? *g.delay : delays.delay(g.type);
  }

  NetlistDesc describe() const {
    NetlistDesc d;
    for (const auto& g : gates_) {
      GateDesc gd{g.name, g.type, {}, nets_[g.output].name, g.delay};
      for (NetId in : g.inputs) gd.inputs.push_back(nets_[in].name);
      d.gates.push_back(std::move(gd));
    }
    for (const auto& p : inputs_) d.input_ports.push_back({p.name, nets_[p.rail1].name, nets_[p.rail0].name});
    for (const auto& p : outputs_) d.output_ports.push_back({p.name, nets_[p.rail1].name, nets_[p.rail0].name});
    for (const auto& n : nets_) {
      if (n.observe_only) d.observe.push_back(n.name);
    }
    return d;
  }

  std::map<GateType, int> census() const {
    std::map<GateType, int> counts;
    for (const auto& g : gates_) ++counts[g.type];
    return counts;
  }

 private:
  friend Netlist assemble(const NetlistDesc& desc);

  static std::optional<std::size_t> find_port(const std::vector<DualRailPort>& ports,
                                              std::string_view name) {
    for (std::size_t i = 0; i < ports.size(); ++i) {
      if (ports[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::vector<GateInstance> gates_;
  std::vector<Net> nets_;
  std::vector<DualRailPort> inputs_;
  std::vector<DualRailPort> outputs_;
  std::unordered_map<std::string, NetId> net_index_;
};

/// Builds a netlist from named descriptions. Throws StructuralError on a
/// dangling net reference or on two drivers for one net; every other
/// structural problem is left for validate() to report.
inline Netlist assemble(const NetlistDesc& desc) {
  Netlist nl;
  auto intern = [&nl](const std::string& name, NetKind kind) -> NetId {
    auto [it, inserted] = nl.net_index_.try_emplace(name, static_cast<NetId>(nl.nets_.size()));
    if (inserted) nl.nets_.push_back(Net{name, kind, std::nullopt, {}, false});
    return it->second;
  };

  for (const auto& p : desc.input_ports) {
    for (const auto* rail : {&p.rail1, &p.rail0}) intern(*rail, NetKind::PrimaryInput);
  }
  for (GateId g = 0; g < desc.gates.size(); ++g) {
    const auto& gd = desc.gates[g];
    if (auto existing = nl.find_net(gd.output)) {
      const Net& n = nl.nets_[*existing];
      if (n.kind == NetKind::PrimaryInput) {
        throw StructuralError("gate '" + gd.name + "' drives primary input net '" + gd.output + "'");
      }
      if (n.driver) {
        throw StructuralError("net '" + gd.output + "' is driven by both '" +
                              desc.gates[*n.driver].name + "' and '" + gd.name + "'");
      }
    }
    const NetId out = intern(gd.output, NetKind::Internal);
    nl.nets_[out].driver = g;
  }
  for (const auto& gd : desc.gates) {
    GateInstance gi{gd.name, gd.type, {}, nl.net_id(gd.output), gd.delay};
    for (const auto& in : gd.inputs) {
      auto id = nl.find_net(in);
      if (!id) throw StructuralError("gate '" + gd.name + "' reads undeclared net '" + in + "'");
      gi.inputs.push_back(*id);
    }
    nl.gates_.push_back(std::move(gi));
  }
  for (GateId g = 0; g < nl.gates_.size(); ++g) {
    for (NetId in : nl.gates_[g].inputs) {
      auto& fo = nl.nets_[in].fanout;
      if (std::find(fo.begin(), fo.end(), g) == fo.end()) fo.push_back(g);
    }
  }
  for (const auto& p : desc.input_ports) {
    nl.inputs_.push_back({p.name, nl.net_id(p.rail1), nl.net_id(p.rail0)});
  }
  for (const auto& p : desc.output_ports) {
    DualRailPort port{p.name, 0, 0};
    for (auto [rail, slot] : {std::pair{&p.rail1, &port.rail1}, std::pair{&p.rail0, &port.rail0}}) {
      auto id = nl.find_net(*rail);
      if (!id) throw StructuralError("output port '" + p.name + "' names undeclared net '" + *rail + "'");
      if (!nl.nets_[*id].driver) {
        throw StructuralError("output port '" + p.name + "' rail '" + *rail + "' has no gate driver");
      }
      nl.nets_[*id].kind = NetKind::PrimaryOutput;
      *slot = *id;
    }
    nl.outputs_.push_back(port);
  }
  for (const auto& name : desc.observe) {
    auto id = nl.find_net(name);
    if (!id) throw StructuralError("observe-only net '" + name + "' is undeclared");
    nl.nets_[*id].observe_only = true;
  }
  return nl;
}

/// Gates in dependency order, or nullopt when the gate graph has a cycle.
inline std::optional<std::vector<GateId>> topological_order(const Netlist& nl) {
  const auto& gates = nl.gates();
  std::vector<int> pending(gates.size(), 0);
  for (GateId g = 0; g < gates.size(); ++g) {
    for (NetId in : gates[g].inputs) {
      if (nl.net(in).driver) ++pending[g];
    }
  }
  std::queue<GateId> ready;
  for (GateId g = 0; g < gates.size(); ++g) {
    if (pending[g] == 0) ready.push(g);
  }
  std::vector<GateId> order;
  order.reserve(gates.size());
  while (!ready.empty()) {
    const GateId g = ready.front();
    ready.pop();
    order.push_back(g);
    for (GateId consumer : nl.net(gates[g].output).fanout) {
      for (NetId in : gates[consumer].inputs) {
        if (in == gates[g].output && --pending[consumer] == 0) ready.push(consumer);
      }
    }
  }
  if (order.size() != gates.size()) return std::nullopt;
  return order;
}

enum class ViolationKind { Cycle, Driver, Arity, PortPairing, Unreachable, DeadEnd };

struct Violation {
  ViolationKind kind;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
  }
};

inline ValidationReport validate(const Netlist& nl) {
  ValidationReport report;
  auto add = [&report](ViolationKind k, std::string msg) {
    report.violations.push_back({k, std::move(msg)});
  };

  for (const auto& g : nl.gates()) {
    if (g.inputs.size() != arity(g.type)) {
      add(ViolationKind::Arity, "gate '" + g.name + "' (" + std::string(to_string(g.type)) +
                                    ") has " + std::to_string(g.inputs.size()) + " inputs");
    }
  }
  for (const auto& n : nl.nets()) {
    if (n.kind != NetKind::PrimaryInput && !n.driver) {
      add(ViolationKind::Driver, "net '" + n.name + "' has no driver");
    }
  }

  auto check_ports = [&](const std::vector<DualRailPort>& ports, bool inputs) {
    for (const auto& p : ports) {
      if (p.rail1 == p.rail0) {
        add(ViolationKind::PortPairing, "port '" + p.name + "' uses net '" +
                                            nl.net(p.rail1).name + "' for both rails");
      }
      for (NetId r : {p.rail1, p.rail0}) {
        const bool is_input = nl.net(r).kind == NetKind::PrimaryInput;
        if (is_input != inputs) {
          add(ViolationKind::PortPairing,
              "port '" + p.name + "' rail '" + nl.net(r).name + "' has the wrong direction");
        }
      }
    }
  };
  check_ports(nl.input_ports(), true);
  check_ports(nl.output_ports(), false);
  std::map<NetId, std::string> claimed;
  for (const auto* ports : {&nl.input_ports(), &nl.output_ports()}) {
    for (const auto& p : *ports) {
      for (NetId r : {p.rail1, p.rail0}) {
        auto [it, fresh] = claimed.try_emplace(r, p.name);
        if (!fresh && it->second != p.name) {
          add(ViolationKind::PortPairing, "net '" + nl.net(r).name + "' belongs to ports '" +
                                              it->second + "' and '" + p.name + "'");
        }
      }
    }
  }

  const auto order = topological_order(nl);
  if (!order) {
    std::vector<bool> placed(nl.gates().size(), false);
    // Report every gate left over by Kahn's algorithm as part of a cycle.
    std::vector<int> pending(nl.gates().size(), 0);
    for (GateId g = 0; g < nl.gates().size(); ++g) {
      for (NetId in : nl.gate(g).inputs) {
        if (nl.net(in).driver) ++pending[g];
      }
    }
    std::queue<GateId> ready;
    for (GateId g = 0; g < nl.gates().size(); ++g) {
      if (pending[g] == 0) ready.push(g);
    }
    while (!ready.empty()) {
      const GateId g = ready.front();
      ready.pop();
      placed[g] = true;
      for (GateId c : nl.net(nl.gate(g).output).fanout) {
        for (NetId in : nl.gate(c).inputs) {
          if (in == nl.gate(g).output && --pending[c] == 0) ready.push(c);
        }
      }
    }
    for (GateId g = 0; g < nl.gates().size(); ++g) {
      if (!placed[g]) add(ViolationKind::Cycle, "gate '" + nl.gate(g).name + "' is on a combinational cycle");
    }
  }

  // Forward reachability from primary inputs.
  std::vector<bool> reached(nl.nets().size(), false);
  std::queue<NetId> work;
  for (NetId n = 0; n < nl.nets().size(); ++n) {
    if (nl.net(n).kind == NetKind::PrimaryInput) {
      reached[n] = true;
      work.push(n);
    }
  }
  while (!work.empty()) {
    const NetId n = work.front();
    work.pop();
    for (GateId g : nl.net(n).fanout) {
      const NetId out = nl.gate(g).output;
      if (!reached[out]) {
        reached[out] = true;
        work.push(out);
      }
    }
  }
  // Backward reachability from outputs and observe-only nets.
  std::vector<bool> useful(nl.nets().size(), false);
  for (NetId n = 0; n < nl.nets().size(); ++n) {
    const auto& net = nl.net(n);
    if (net.kind == NetKind::PrimaryOutput || net.observe_only) {
      useful[n] = true;
      work.push(n);
    }
  }
  while (!work.empty()) {
    const NetId n = work.front();
    work.pop();
    if (auto d = nl.net(n).driver) {
      for (NetId in : nl.gate(*d).inputs) {
        if (!useful[in]) {
          useful[in] = true;
          work.push(in);
        }
      }
    }
  }
  for (NetId n = 0; n < nl.nets().size(); ++n) {
    if (!reached[n]) add(ViolationKind::Unreachable, "net '" + nl.net(n).name + "' is not reachable from any input");
    if (!useful[n]) add(ViolationKind::DeadEnd, "net '" + nl.net(n).name + "' reaches no output");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Dual-rail words
// ---------------------------------------------------------------------------

struct RailPair {
  bool rail1 = false;
  bool rail0 = false;
  friend bool operator==(const RailPair&, const RailPair&) = default;
};

/// Encodes `value` lsb-first: a 1 bit is (1,0), a 0 bit is (0,1).
inline std::vector<RailPair> encode_word(std::uint64_t value, unsigned width) {
  if (width == 0 || width > 64) throw Error("encode_word: width must be in 1..64");
  if (width < 64 && (value >> width) != 0) {
    throw Error("encode_word: value " + std::to_string(value) + " does not fit in " +
                std::to_string(width) + " bits");
  }
  std::vector<RailPair> rails(width);
  for (unsigned i = 0; i < width; ++i) {
    const bool bit = (value >> i) & 1U;
    rails[i] = {bit, !bit};
  }
  return rails;
}

namespace decoded {
struct Valid {
  std::uint64_t value = 0;
  friend bool operator==(const Valid&, const Valid&) = default;
};
struct Spacer {
  friend bool operator==(const Spacer&, const Spacer&) = default;
};
struct Partial {
  friend bool operator==(const Partial&, const Partial&) = default;
};
struct Illegal {
  std::size_t position = 0;
  friend bool operator==(const Illegal&, const Illegal&) = default;
};
}  // namespace decoded

using DecodedWord = std::variant<decoded::Valid, decoded::Spacer, decoded::Partial, decoded::Illegal>;

inline DecodedWord decode_outputs(std::span<const RailPair> rails) {
  std::size_t valid = 0;
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < rails.size(); ++i) {
    const auto [r1, r0] = rails[i];
    if (r1 && r0) return decoded::Illegal{i};
    if (r1 != r0) {
      ++valid;
      if (r1 && i < 64) value |= std::uint64_t{1} << i;
    }
  }
  if (valid == rails.size()) return decoded::Valid{value};
  if (valid == 0) return decoded::Spacer{};
  return decoded::Partial{};
}

// ---------------------------------------------------------------------------
// Netlist file format (JSON)
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Netlist& nl) {
  using nlohmann::json;
  const NetlistDesc d = nl.describe();
  json j;
  j["gates"] = json::array();
  for (const auto& g : d.gates) {
    json jg{{"name", g.name}, {"type", std::string(to_string(g.type))}, {"inputs", g.inputs}, {"output", g.output}};
    if (g.delay) jg["delay"] = to_ns(*g.delay);
    j["gates"].push_back(std::move(jg));
  }
  auto ports = [](const std::vector<PortDesc>& ps) {
    json arr = json::array();
    for (const auto& p : ps) arr.push_back({{"name", p.name}, {"rail1", p.rail1}, {"rail0", p.rail0}});
    return arr;
  };
  j["input_ports"] = ports(d.input_ports);
  j["output_ports"] = ports(d.output_ports);
  if (!d.observe.empty()) j["observe"] = d.observe;
  return j;
}

inline Netlist netlist_from_json(const nlohmann::json& j) {
  NetlistDesc d;
  try {
    for (const auto& jg : j.at("gates")) {
      GateDesc g;
      g.name = jg.at("name").get<std::string>();
      const auto type_name = jg.at("type").get<std::string>();
      const auto type = gate_type_from_string(type_name);
      if (!type) throw ParseError("gate '" + g.name + "' has unknown type '" + type_name + "'");
      g.type = *type;
      g.inputs = jg.at("inputs").get<std::vector<std::string>>();
      g.output = jg.at("output").get<std::string>();
      if (jg.contains("delay")) {
        const double scaled = jg.at("delay").get<double>() * 1000.0;
        const double ps = std::round(scaled);
        if (ps < 0.0 || std::abs(scaled - ps) > 1e-6) {
          throw ParseError("gate '" + g.name + "' has an invalid delay");
        }
        g.delay = Picoseconds{static_cast<std::int64_t>(ps)};
      }
      d.gates.push_back(std::move(g));
    }
    auto ports = [](const nlohmann::json& arr) {
      std::vector<PortDesc> out;
      for (const auto& p : arr) {
        out.push_back({p.at("name").get<std::string>(), p.at("rail1").get<std::string>(),
                       p.at("rail0").get<std::string>()});
      }
      return out;
    };
    d.input_ports = ports(j.at("input_ports"));
    d.output_ports = ports(j.at("output_ports"));
    if (j.contains("observe")) d.observe = j.at("observe").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed netlist: ") + e.what());
  }
  return assemble(d);
}

inline void write_netlist(const Netlist& nl, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << to_json(nl).dump(2) << '\n';
  if (!out) throw Error("failed writing '" + path + "'");
}

inline Netlist read_netlist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  try {
    return netlist_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

}  // namespace rtadder
