#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "rtadder/adder_gen.hpp"
#include "rtadder/netlist.hpp"

namespace rtadder {

class SimulationError : public Error {
 public:
  using Error::Error;
};

/// Raised when a run does not settle, or its outputs never complete.
class SimulationTimeout : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

using EventId = std::uint32_t;

enum class Phase : std::uint8_t { Valid, Rtz };

inline std::string_view to_string(Phase p) { return p == Phase::Valid ? "valid" : "rtz"; }

struct Event {
  EventId id = 0;
  Picoseconds time{0};
  NetId net = 0;
  bool value = false;
  Phase phase = Phase::Valid;
  std::optional<EventId> cause;  // triggering event; empty for stimulus
  // Input events the transition could not have happened without: flipping
  // any one of them at the scheduling evaluation changes the gate's result.
  std::vector<EventId> support;
};

struct Stimulus {
  Picoseconds time{0};
  NetId net = 0;
  bool value = false;
};

struct PhaseMarkers {
  std::optional<Picoseconds> valid_start;
  std::optional<Picoseconds> valid_complete;  // ackout rises
  std::optional<Picoseconds> rtz_start;
  std::optional<Picoseconds> rtz_complete;  // ackout falls

  std::optional<Picoseconds> completion(Phase p) const {
    return p == Phase::Valid ? valid_complete : rtz_complete;
  }
};

struct Trace {
  std::vector<std::string> net_names;
  std::vector<NetKind> net_kinds;
  std::vector<bool> net_observed;  // observe-only nets such as a detector's `done`
  std::vector<Event> events;
  PhaseMarkers phases;

  const Event& event(EventId id) const { return events.at(id); }

  std::optional<NetId> find_net(std::string_view name) const {
    for (NetId n = 0; n < net_names.size(); ++n) {
      if (net_names[n] == name) return n;
    }
    return std::nullopt;
  }

  std::vector<const Event*> events_on(NetId net) const {
    std::vector<const Event*> out;
    for (const auto& e : events) {
      if (e.net == net) out.push_back(&e);
    }
    return out;
  }

  friend bool operator==(const Trace& a, const Trace& b) {
    if (a.net_names != b.net_names || a.net_kinds != b.net_kinds || a.net_observed != b.net_observed ||
        a.events.size() != b.events.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      const auto &x = a.events[i], &y = b.events[i];
      if (x.id != y.id || x.time != y.time || x.net != y.net || x.value != y.value || x.phase != y.phase ||
          x.cause != y.cause || x.support != y.support) {
        return false;
      }
    }
    return a.phases.valid_start == b.phases.valid_start && a.phases.valid_complete == b.phases.valid_complete &&
           a.phases.rtz_start == b.phases.rtz_start && a.phases.rtz_complete == b.phases.rtz_complete;
  }
};

struct SimOptions {
  std::size_t max_events = 5'000'000;
};

/// Discrete-event simulator with inertial gate delays. All nets start at 0
/// and every C-element holds 0. Not copyable; holds a reference to the
/// netlist, which must outlive it.
class Simulator {
 public:
  Simulator(const Netlist& nl, const DelayConfig& delays, SimOptions opts = {})
      : nl_(nl), opts_(opts), values_(nl.nets().size(), false), last_event_(nl.nets().size()),
        pending_(nl.gates().size()) {
    const auto report = validate(nl);
    if (!report.ok()) throw StructuralError("cannot simulate invalid netlist: " + report.violations.front().message);
    gate_delay_.reserve(nl.gates().size());
    for (GateId g = 0; g < nl.gates().size(); ++g) {
      const auto d = nl.delay_of(g, delays);
      if (d < Picoseconds::zero()) throw ConfigError("negative delay on gate '" + nl.gate(g).name + "'");
      gate_delay_.push_back(d);
    }
    trace_.net_names.reserve(nl.nets().size());
    for (const auto& n : nl.nets()) {
      trace_.net_names.push_back(n.name);
      trace_.net_kinds.push_back(n.kind);
      trace_.net_observed.push_back(n.observe_only);
    }
  }

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void set_phase(Phase p) { phase_ = p; }

  void schedule(std::span<const Stimulus> stimulus) {
    std::map<std::pair<std::int64_t, NetId>, bool> seen;
    for (const auto& s : stimulus) {
      if (s.net >= nl_.nets().size() || nl_.net(s.net).kind != NetKind::PrimaryInput) {
        throw SimulationError("stimulus targets a net that is not a primary input");
      }
      if (s.time < now_) throw SimulationError("stimulus at " + format_ns(s.time) + " ns lies in the past");
      auto [it, fresh] = seen.try_emplace({s.time.count(), s.net}, s.value);
      if (!fresh && it->second != s.value) {
        throw SimulationError("conflicting stimulus for net '" + nl_.net(s.net).name + "' at " +
                              format_ns(s.time) + " ns");
      }
    }
    for (const auto& s : stimulus) queue_.push({s.time, seq_++, true, s.net, s.value, 0, 0});
  }

  void schedule(const Stimulus& s) { schedule(std::span<const Stimulus>(&s, 1)); }

  /// Runs to quiescence and returns the time of the last processed event.
  Picoseconds run() {
    while (!queue_.empty()) {
      const Picoseconds t = queue_.top().time;
      now_ = t;
      // Delta cycles: zero-delay gates may schedule more work at `t`.
      while (!queue_.empty() && queue_.top().time == t) {
        std::vector<NetId> changed;
        while (!queue_.empty() && queue_.top().time == t) {
          const Entry e = queue_.top();
          queue_.pop();
          if (!e.stimulus) {
            Pending& p = pending_[e.gate];
            if (!p.active || p.token != e.token) continue;
            p.active = false;
            commit(t, e.net, e.value, p.cause, std::move(p.support));
            changed.push_back(e.net);
          } else if (values_[e.net] != e.value) {
            commit(t, e.net, e.value, std::nullopt, {});
            changed.push_back(e.net);
          }
        }
        std::vector<GateId> affected;
        for (NetId n : changed) {
          const auto& fo = nl_.net(n).fanout;
          affected.insert(affected.end(), fo.begin(), fo.end());
        }
        std::sort(affected.begin(), affected.end());
        affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
        for (GateId g : affected) evaluate(g, t);
      }
      if (trace_.events.size() > opts_.max_events) {
        throw SimulationTimeout("simulation exceeded " + std::to_string(opts_.max_events) + " events");
      }
    }
    return trace_.events.empty() ? now_ : trace_.events.back().time;
  }

  bool value(NetId n) const { return values_.at(n); }
  Picoseconds now() const { return now_; }
  const Trace& trace() const { return trace_; }
  Trace& trace() { return trace_; }
  Trace take_trace() { return std::move(trace_); }

 private:
  struct Entry {
    Picoseconds time;
    std::uint64_t seq;
    bool stimulus;
    NetId net;
    bool value;
    GateId gate;
    std::uint64_t token;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  struct Pending {
    bool active = false;
    bool value = false;
    std::uint64_t token = 0;
    std::optional<EventId> cause;
    std::vector<EventId> support;
  };

  void commit(Picoseconds t, NetId net, bool v, std::optional<EventId> cause, std::vector<EventId> support) {
    const auto id = static_cast<EventId>(trace_.events.size());
    values_[net] = v;
    last_event_[net] = id;
    trace_.events.push_back({id, t, net, v, phase_, cause, std::move(support)});
  }

  void evaluate(GateId g, Picoseconds t) {
    const GateInstance& gate = nl_.gate(g);
    Pending& p = pending_[g];
    const bool current = values_[gate.output];
    const bool projected = p.active ? p.value : current;
    const GateState state{projected};

    std::array<bool, 8> in{};
    for (std::size_t i = 0; i < gate.inputs.size(); ++i) in[i] = values_[gate.inputs[i]];
    const std::span<const bool> inputs(in.data(), gate.inputs.size());
    const bool next = eval_gate(gate.type, inputs, state).output;
    if (next == projected) return;
    if (p.active) {
      // The newer evaluation restores the current value: inertial cancel.
      p.active = false;
      ++p.token;
      return;
    }

    std::optional<EventId> trigger;
    std::vector<EventId> support;
    for (std::size_t i = 0; i < gate.inputs.size(); ++i) {
      const auto& last = last_event_[gate.inputs[i]];
      if (!last) continue;
      if (trace_.events[*last].time == t && (!trigger || *last > *trigger)) trigger = *last;
      in[i] = !in[i];
      const bool flipped = eval_gate(gate.type, inputs, state).output;
      in[i] = !in[i];
      if (flipped != next && std::find(support.begin(), support.end(), *last) == support.end()) {
        support.push_back(*last);
      }
    }
    // Several inputs leaving together can make every single flip irrelevant;
    // the latest of them is then the one that released the output.
    if (support.empty() && trigger) support.push_back(*trigger);
    std::sort(support.begin(), support.end());
    p.active = true;
    p.value = next;
    p.token = ++token_counter_;
    p.cause = trigger;
    p.support = std::move(support);
    queue_.push({t + gate_delay_[g], seq_++, false, gate.output, next, g, p.token});
  }

  const Netlist& nl_;
  SimOptions opts_;
  std::vector<Picoseconds> gate_delay_;
  std::vector<bool> values_;
  std::vector<std::optional<EventId>> last_event_;
  std::vector<Pending> pending_;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t token_counter_ = 0;
  Picoseconds now_{0};
  Phase phase_ = Phase::Valid;
  Trace trace_;
};

inline Trace simulate(const Netlist& nl, const DelayConfig& delays, std::span<const Stimulus> stimulus,
                      SimOptions opts = {}) {
  Simulator sim(nl, delays, opts);
  sim.schedule(stimulus);
  sim.run();
  return sim.take_trace();
}

// ---------------------------------------------------------------------------
// 4-phase handshake environment
// ---------------------------------------------------------------------------

struct Operands {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  bool cin = false;
  friend bool operator==(const Operands&, const Operands&) = default;
};

enum class CompletionMode { Ideal, Detector };

struct HandshakeOptions {
  // Per input port delay of the rail transition, relative to the phase start.
  std::map<std::string, Picoseconds> apply_offset;
  std::map<std::string, Picoseconds> withdraw_offset;
  // Ideal watches the output ports directly; Detector waits on the `done`
  // net of an attached completion detector.
  CompletionMode completion = CompletionMode::Ideal;
  SimOptions sim;
};

struct StageTiming {
  std::optional<Picoseconds> sum_valid, carry_valid, sum_reset, carry_reset;
};

struct CycleReport {
  Operands operands;
  std::uint64_t sum = 0;  // n low bits of the result
  bool cout = false;
  bool correct = false;
  Picoseconds forward{0};
  Picoseconds reverse{0};
  std::vector<StageTiming> stages;  // times relative to each phase start

  Picoseconds cycle() const { return forward + reverse; }
};

namespace detail {

inline std::vector<RailPair> output_rails(const Netlist& nl, const std::vector<bool>& values) {
  std::vector<RailPair> rails;
  for (const auto& p : nl.output_ports()) rails.push_back({values[p.rail1], values[p.rail0]});
  return rails;
}

// First instant, at or after `from`, where every output port decodes as
// valid (or spacer), replaying `trace` over `values`.
template <typename Done>
std::optional<Picoseconds> completion_instant(const Trace& trace, std::vector<bool> values,
                                              std::size_t first_event, Done&& done) {
  if (done(values)) return std::nullopt;
  const auto& ev = trace.events;
  for (std::size_t i = first_event; i < ev.size();) {
    const Picoseconds t = ev[i].time;
    while (i < ev.size() && ev[i].time == t) {
      values[ev[i].net] = ev[i].value;
      ++i;
    }
    if (done(values)) return t;
  }
  return std::nullopt;
}

}  // namespace detail

inline std::uint64_t width_mask(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

/// Applies one valid word at t=0, waits for completion, returns the inputs
/// to spacer once the circuit is quiescent and waits for the outputs to
/// reset. The netlist must follow the generated ripple-carry port naming.
inline std::pair<CycleReport, Trace> run_handshake_cycle(const Netlist& nl, const DelayConfig& delays, std::uint64_t a,
                                                         std::uint64_t b, bool cin,
                                                         const HandshakeOptions& opts = {}) {
  const RcaDescriptor desc = describe_rca(nl);
  const unsigned n = desc.width;
  if (n >= 64) throw Error("adder width must be below 64 for simulation");
  if ((a & ~width_mask(n)) != 0 || (b & ~width_mask(n)) != 0) {
    throw Error("operands do not fit in " + std::to_string(n) + " bits");
  }
  std::optional<NetId> done_net;
  if (opts.completion == CompletionMode::Detector) {
    done_net = nl.find_net("done");
    if (!done_net || !nl.net(*done_net).observe_only) throw StructuralError("no completion detector attached");
  }

  // Rail that carries the value of each input port during the valid phase.
  std::vector<std::pair<std::string, NetId>> active;
  const auto a_bits = encode_word(a, n);
  const auto b_bits = encode_word(b, n);
  for (unsigned k = 0; k < n; ++k) {
    const auto& pa = nl.input_ports()[*nl.find_input_port(RcaDescriptor::a_port(k))];
    const auto& pb = nl.input_ports()[*nl.find_input_port(RcaDescriptor::b_port(k))];
    active.emplace_back(pa.name, a_bits[k].rail1 ? pa.rail1 : pa.rail0);
    active.emplace_back(pb.name, b_bits[k].rail1 ? pb.rail1 : pb.rail0);
  }
  const auto& pc = nl.input_ports()[*nl.find_input_port(RcaDescriptor::cin_port())];
  active.emplace_back(pc.name, cin ? pc.rail1 : pc.rail0);

  auto offset = [](const std::map<std::string, Picoseconds>& m, const std::string& port) {
    auto it = m.find(port);
    return it == m.end() ? Picoseconds::zero() : it->second;
  };

  Simulator sim(nl, delays, opts.sim);
  Trace& trace = sim.trace();
  std::vector<bool> values(nl.nets().size(), false);

  auto all_valid = [&](const std::vector<bool>& v) {
    if (done_net) return static_cast<bool>(v[*done_net]);
    const auto rails = detail::output_rails(nl, v);
    return std::holds_alternative<decoded::Valid>(decode_outputs(rails));
  };
  auto all_spacer = [&](const std::vector<bool>& v) {
    if (done_net) return !v[*done_net];
    const auto rails = detail::output_rails(nl, v);
    return std::holds_alternative<decoded::Spacer>(decode_outputs(rails));
  };

  // Valid phase.
  std::vector<Stimulus> valid;
  for (const auto& [port, rail] : active) valid.push_back({offset(opts.apply_offset, port), rail, true});
  sim.set_phase(Phase::Valid);
  sim.schedule(valid);
  const Picoseconds settled = sim.run();
  trace.phases.valid_start = Picoseconds::zero();
  const auto fwd_done = detail::completion_instant(trace, values, 0, all_valid);
  for (NetId net = 0; net < values.size(); ++net) values[net] = sim.value(net);
  if (!fwd_done || !all_valid(values)) {
    throw SimulationTimeout("outputs never became valid for a=" + std::to_string(a) + " b=" + std::to_string(b) +
                            " cin=" + std::to_string(cin));
  }
  trace.phases.valid_complete = *fwd_done;

  CycleReport report;
  report.operands = {a, b, cin};
  const auto word = std::get<decoded::Valid>(decode_outputs(detail::output_rails(nl, values))).value;
  report.sum = word & width_mask(n);
  report.cout = ((word >> n) & 1U) != 0;
  report.correct = word == a + b + (cin ? 1U : 0U);
  report.forward = *fwd_done - *trace.phases.valid_start;

  // Return-to-zero phase, started once the valid phase is quiescent.
  const Picoseconds rtz_start = std::max(settled, *fwd_done);
  const std::size_t first_rtz = trace.events.size();
  std::vector<Stimulus> withdraw;
  for (const auto& [port, rail] : active) withdraw.push_back({rtz_start + offset(opts.withdraw_offset, port), rail, false});
  sim.set_phase(Phase::Rtz);
  sim.schedule(withdraw);
  sim.run();
  trace.phases.rtz_start = rtz_start;
  const auto rev_done = detail::completion_instant(trace, values, first_rtz, all_spacer);
  for (NetId net = 0; net < values.size(); ++net) values[net] = sim.value(net);
  if (!rev_done || !all_spacer(values)) {
    throw SimulationTimeout("outputs never returned to spacer for a=" + std::to_string(a) +
                            " b=" + std::to_string(b) + " cin=" + std::to_string(cin));
  }
  trace.phases.rtz_complete = *rev_done;
  report.reverse = *rev_done - rtz_start;

  report.stages.resize(n);
  for (unsigned k = 0; k < n; ++k) {
    auto& st = report.stages[k];
    const NetId s1 = nl.net_id(RcaDescriptor::sum_rail(k, 1)), s0 = nl.net_id(RcaDescriptor::sum_rail(k, 0));
    const NetId c1 = nl.net_id(RcaDescriptor::cout_rail(k, 1)), c0 = nl.net_id(RcaDescriptor::cout_rail(k, 0));
    for (const auto& e : trace.events) {
      const Picoseconds base = e.phase == Phase::Valid ? Picoseconds::zero() : rtz_start;
      const Picoseconds rel = e.time - base;
      if (e.net == s1 || e.net == s0) (e.value ? st.sum_valid : st.sum_reset) = rel;
      if (e.net == c1 || e.net == c0) (e.value ? st.carry_valid : st.carry_reset) = rel;
    }
  }
  return {std::move(report), sim.take_trace()};
}

struct HazardFinding {
  NetId net = 0;
  Phase phase = Phase::Valid;
  int transitions = 0;
};

/// Nets that switch more than once within a phase.
inline std::vector<HazardFinding> phase_hazards(const Trace& trace) {
  std::map<std::pair<NetId, Phase>, int> counts;
  for (const auto& e : trace.events) ++counts[{e.net, e.phase}];
  std::vector<HazardFinding> out;
  for (const auto& [key, c] : counts) {
    if (c > 1) out.push_back({key.first, key.second, c});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vector batches
// ---------------------------------------------------------------------------

struct RandomVectors {
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

struct ExhaustiveVectors {
  unsigned width = 0;
};

using VectorSource = std::variant<std::vector<Operands>, RandomVectors, ExhaustiveVectors>;

inline constexpr std::string_view kRandomGeneratorName = "mt19937_64";

/// Draws operands from a seeded std::mt19937_64, masking raw outputs to the
/// width so the sequence is identical on every standard library.
inline std::vector<Operands> random_vectors(unsigned width, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Operands> out;
  out.reserve(count);
  const auto mask = width_mask(width);
  for (std::size_t i = 0; i < count; ++i) {
    Operands op;
    op.a = rng() & mask;
    op.b = rng() & mask;
    op.cin = (rng() & 1U) != 0;
    out.push_back(op);
  }
  return out;
}

inline std::vector<Operands> exhaustive_vectors(unsigned width) {
  if (width > 12) throw Error("exhaustive vectors are limited to width 12");
  std::vector<Operands> out;
  const std::uint64_t limit = std::uint64_t{1} << width;
  for (std::uint64_t a = 0; a < limit; ++a) {
    for (std::uint64_t b = 0; b < limit; ++b) {
      for (int c = 0; c < 2; ++c) out.push_back({a, b, c == 1});
    }
  }
  return out;
}

class VectorError : public Error {
 public:
  VectorError(const std::string& what, std::size_t index, Operands op) : Error(what), index_(index), op_(op) {}
  std::size_t index() const { return index_; }
  const Operands& operands() const { return op_; }

 private:
  std::size_t index_;
  Operands op_;
};

struct BatchRow {
  std::size_t index = 0;
  Operands operands;
  bool correct = false;
  bool hazard_free = true;
  Picoseconds forward{0};
  Picoseconds reverse{0};
  Picoseconds cycle() const { return forward + reverse; }
};

struct BatchReport {
  std::string source;  // e.g. "random count=1000 seed=7 generator=mt19937_64"
  unsigned width = 0;
  std::vector<BatchRow> rows;

  std::size_t passed() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const BatchRow& r) { return r.correct; }));
  }
  bool all_correct() const { return passed() == rows.size(); }
  bool all_hazard_free() const {
    return std::all_of(rows.begin(), rows.end(), [](const BatchRow& r) { return r.hazard_free; });
  }
  Picoseconds min_forward() const {
    Picoseconds m = Picoseconds::max();
    for (const auto& r : rows) m = std::min(m, r.forward);
    return rows.empty() ? Picoseconds::zero() : m;
  }
  Picoseconds max_forward() const {
    Picoseconds m = Picoseconds::zero();
    for (const auto& r : rows) m = std::max(m, r.forward);
    return m;
  }
  double mean_forward_ns() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += to_ns(r.forward);
    return s / static_cast<double>(rows.size());
  }
};

struct BatchOptions {
  unsigned threads = 1;
  HandshakeOptions handshake;
};

inline BatchReport run_vectors(const Netlist& nl, const DelayConfig& delays, const VectorSource& source,
                               const BatchOptions& opts = {}) {
  const unsigned width = describe_rca(nl).width;
  BatchReport report;
  report.width = width;
  std::vector<Operands> vectors;
  if (const auto* list = std::get_if<std::vector<Operands>>(&source)) {
    vectors = *list;
    report.source = "list count=" + std::to_string(vectors.size());
  } else if (const auto* rnd = std::get_if<RandomVectors>(&source)) {
    vectors = random_vectors(width, rnd->count, rnd->seed);
    report.source = "random count=" + std::to_string(rnd->count) + " seed=" + std::to_string(rnd->seed) +
                    " generator=" + std::string(kRandomGeneratorName);
  } else {
    const auto& ex = std::get<ExhaustiveVectors>(source);
    if (ex.width != width) {
      throw Error("exhaustive width " + std::to_string(ex.width) + " does not match adder width " + std::to_string(width));
    }
    vectors = exhaustive_vectors(width);
    report.source = "exhaustive width=" + std::to_string(width);
  }

  report.rows.resize(vectors.size());
  std::mutex failure_mutex;
  std::optional<std::pair<std::size_t, std::string>> failure;
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < vectors.size(); i += stride) {
      const auto& v = vectors[i];
      try {
        if ((v.a & ~width_mask(width)) != 0 || (v.b & ~width_mask(width)) != 0) {
          throw Error("operands do not fit in " + std::to_string(width) + " bits");
        }
        auto [cycle, trace] = run_handshake_cycle(nl, delays, v.a, v.b, v.cin, opts.handshake);
        report.rows[i] = {i, v, cycle.correct, phase_hazards(trace).empty(), cycle.forward, cycle.reverse};
      } catch (const Error& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure || failure->first > i) failure.emplace(i, e.what());
        return;
      }
    }
  };
  const unsigned threads = std::max(1U, opts.threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  if (failure) {
    const auto& v = vectors[failure->first];
    throw VectorError("vector " + std::to_string(failure->first) + " failed: " + failure->second, failure->first, v);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Vector files and batch CSV
// ---------------------------------------------------------------------------

/// One `a b cin` triple per line, hexadecimal, with optional 0x prefixes.
inline std::vector<Operands> parse_vectors(std::istream& in) {
  std::vector<Operands> out;
  std::string line;
  int line_no = 0;
  auto parse_hex = [&](const std::string& tok, std::uint64_t& value) {
    std::string_view s = tok;
    if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, 16);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    Operands op;
    std::uint64_t c = 0;
    if (tok.size() != 3 || !parse_hex(tok[0], op.a) || !parse_hex(tok[1], op.b) || !parse_hex(tok[2], c) || c > 1) {
      throw ParseError("vector file line " + std::to_string(line_no) + ": expected 'a b cin' in hex, got '" + line + "'");
    }
    op.cin = c == 1;
    out.push_back(op);
  }
  return out;
}

inline std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

inline void write_batch_csv(const BatchReport& report, std::ostream& out) {
  out << "# source: " << report.source << "\n";
  out << "# width: " << report.width << "\n";
  out << "vector,correct,forward_ns,reverse_ns,cycle_ns\n";
  for (const auto& r : report.rows) {
    out << hex(r.operands.a) << ' ' << hex(r.operands.b) << ' ' << (r.operands.cin ? 1 : 0) << ','
        << (r.correct ? "true" : "false") << ',' << format_ns(r.forward) << ',' << format_ns(r.reverse) << ','
        << format_ns(r.cycle()) << "\n";
  }
}

/// Reads back the CSV written by write_batch_csv.
inline BatchReport read_batch_csv(std::istream& in) {
  BatchReport report;
  std::string line;
  bool header = false;
  std::size_t index = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.starts_with("# source: ")) {
      report.source = line.substr(10);
      continue;
    }
    if (line.starts_with("# width: ")) {
      report.width = static_cast<unsigned>(std::stoul(line.substr(9)));
      continue;
    }
    if (line.empty() || line.starts_with("#")) continue;
    if (!header) {
      if (line != "vector,correct,forward_ns,reverse_ns,cycle_ns") throw ParseError("unexpected batch CSV header");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    const std::string where = "batch CSV line " + std::to_string(line_no);
    if (cells.size() != 5) throw ParseError(where + ": expected 5 columns");
    std::istringstream vec(cells[0]);
    auto ops = parse_vectors(vec);
    if (ops.size() != 1) throw ParseError(where + ": bad vector cell");
    BatchRow row;
    row.index = index++;
    row.operands = ops.front();
    row.correct = cells[1] == "true";
    const auto f = parse_ns(cells[2]), r = parse_ns(cells[3]), c = parse_ns(cells[4]);
    if (!f || !r || !c) throw ParseError(where + ": bad latency");
    row.forward = *f;
    row.reverse = *r;
    if (row.cycle() != *c) throw ParseError(where + ": cycle time is not forward + reverse");
    report.rows.push_back(row);
  }
  if (!header) throw ParseError("batch CSV has no header");
  return report;
}

}  // namespace rtadder
