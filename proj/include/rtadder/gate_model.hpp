#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace rtadder {

/// All simulation time is held as integer picoseconds so that path sums such
/// as 0.250 ns and 0.313 ns compare exactly.
using Picoseconds = std::chrono::duration<std::int64_t, std::pico>;

inline Picoseconds operator""_ps(unsigned long long v) {
  return Picoseconds{static_cast<std::int64_t>(v)};
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StructuralError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Formats a time as nanoseconds with three decimals, e.g. 250ps -> "0.250".
inline std::string format_ns(Picoseconds t) {
  std::int64_t ps = t.count();
  const bool neg = ps < 0;
  if (neg) ps = -ps;
  std::string frac = std::to_string(ps % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return (neg ? "-" : "") + std::to_string(ps / 1000) + "." + frac;
}

inline double to_ns(Picoseconds t) { return static_cast<double>(t.count()) / 1000.0; }

// Parses a decimal nanosecond value into picoseconds. Sub-picosecond
// precision is rejected rather than silently rounded.
inline std::optional<Picoseconds> parse_ns(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  const double scaled = value * 1000.0;
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-6) return std::nullopt;
  return Picoseconds{static_cast<std::int64_t>(rounded)};
}

enum class GateType : std::uint8_t { AND2, OR2, OR3, OR4, AO21, AO22, AO222, CELEMENT2 };

inline constexpr std::array<GateType, 8> kAllGateTypes = {
    GateType::AND2, GateType::OR2,  GateType::OR3,   GateType::OR4,
    GateType::AO21, GateType::AO22, GateType::AO222, GateType::CELEMENT2};

constexpr std::size_t arity(GateType type) {
  switch (type) {
    case GateType::AND2:
    case GateType::OR2:
    case GateType::CELEMENT2:
      return 2;
    case GateType::OR3:
    case GateType::AO21:
      return 3;
    case GateType::OR4:
    case GateType::AO22:
      return 4;
    case GateType::AO222:
      return 6;
  }
  return 0;
}

constexpr std::string_view to_string(GateType type) {
  switch (type) {
    case GateType::AND2: return "AND2";
    case GateType::OR2: return "OR2";
    case GateType::OR3: return "OR3";
    case GateType::OR4: return "OR4";
    case GateType::AO21: return "AO21";
    case GateType::AO22: return "AO22";
    case GateType::AO222: return "AO222";
    case GateType::CELEMENT2: return "CELEMENT2";
  }
  return "?";
}

inline std::optional<GateType> gate_type_from_string(std::string_view name) {
  for (GateType t : kAllGateTypes) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

constexpr bool is_stateful(GateType type) { return type == GateType::CELEMENT2; }

/// Held output of a state-holding gate. Only meaningful for CELEMENT2; the
/// circuit starts in the spacer state, so the held value starts at 0.
struct GateState {
  bool held = false;
  friend bool operator==(const GateState&, const GateState&) = default;
};

struct EvalResult {
  bool output = false;
  GateState state;
};

/// Evaluates one gate. Combinational gates leave `state` untouched; the
/// C-element switches only on (0,0) or (1,1) and otherwise holds.
inline EvalResult eval_gate(GateType type, std::span<const bool> in, GateState state) {
  if (in.size() != arity(type)) {
    throw StructuralError(std::string(to_string(type)) + " expects " +
                          std::to_string(arity(type)) + " inputs, got " +
                          std::to_string(in.size()));
  }
  switch (type) {
    case GateType::AND2:
      return {in[0] && in[1], state};
    case GateType::OR2:
      return {in[0] || in[1], state};
    case GateType::OR3:
      return {in[0] || in[1] || in[2], state};
    case GateType::OR4:
      return {in[0] || in[1] || in[2] || in[3], state};
    case GateType::AO21:
      return {(in[0] && in[1]) || in[2], state};
    case GateType::AO22:
      return {(in[0] && in[1]) || (in[2] && in[3]), state};
    case GateType::AO222:
      return {(in[0] && in[1]) || (in[2] && in[3]) || (in[4] && in[5]), state};
    case GateType::CELEMENT2: {
      bool out = state.held;
      if (in[0] == in[1]) out = in[0];
      return {out, GateState{out}};
    }
  }
  throw StructuralError("unknown gate type");
}

inline EvalResult eval_gate(GateType type, std::initializer_list<bool> in, GateState state = {}) {
  return eval_gate(type, std::span<const bool>(in.begin(), in.size()), state);
}

// The C-element as built from an AO222 cell with its output fed back:
// Y = AB + AY + BY. Iterates the feedback loop to its fixpoint.
inline bool celement_via_ao222(bool a, bool b, bool held) {
  bool y = held;
  for (int i = 0; i < 4; ++i) {
    const std::array<bool, 6> in{a, b, a, y, b, y};
    const bool next = eval_gate(GateType::AO222, std::span<const bool>(in), {}).output;
    if (next == y) break;
    y = next;
  }
  return y;
}

/// Per-gate-type propagation delay. One value covers both output edges.
class DelayConfig {
 public:
  DelayConfig() {
    delays_ = {{GateType::AND2, 75_ps},  {GateType::OR2, 50_ps},  {GateType::OR3, 60_ps},
               {GateType::OR4, 70_ps},   {GateType::AO21, 63_ps}, {GateType::AO22, 75_ps},
               {GateType::AO222, 90_ps}, {GateType::CELEMENT2, 100_ps}};
  }

  Picoseconds delay(GateType type) const { return delays_.at(type); }

  // Zero is accepted here so static analyses can explore degenerate cases;
  // the simulator treats a zero delay as a delta cycle.
  DelayConfig& set(GateType type, Picoseconds d) {
    if (d < Picoseconds::zero()) {
      throw ConfigError("negative delay for " + std::string(to_string(type)));
    }
    delays_[type] = d;
    return *this;
  }

  DelayConfig with(GateType type, Picoseconds d) const {
    DelayConfig copy = *this;
    copy.set(type, d);
    return copy;
  }

  bool all_positive() const {
    for (const auto& [t, d] : delays_) {
      if (d <= Picoseconds::zero()) return false;
    }
    return true;
  }

  const std::map<GateType, Picoseconds>& entries() const { return delays_; }

  friend bool operator==(const DelayConfig&, const DelayConfig&) = default;

 private:
  std::map<GateType, Picoseconds> delays_;
};

/// Parses `KEY=value` lines (value in ns) over the default configuration.
/// Blank lines and `#` comments are ignored.
inline DelayConfig load_delay_config(std::string_view source) {
  DelayConfig config;
  std::istringstream in{std::string(source)};
  std::string line;
  int line_no = 0;
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    const std::string where = "delay config line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected KEY=value");
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    const auto type = gate_type_from_string(key);
    if (!type) throw ConfigError(where + ": unknown gate type '" + std::string(key) + "'");
    const auto d = parse_ns(value);
    if (!d) throw ConfigError(where + ": invalid delay '" + std::string(value) + "'");
    if (*d <= Picoseconds::zero()) {
      throw ConfigError(where + ": delay for " + std::string(key) + " must be positive");
    }
    config.set(*type, *d);
  }
  return config;
}

}  // namespace rtadder
