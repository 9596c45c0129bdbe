#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rtadder/gate_model.hpp"
#include "rtadder/verify.hpp"

namespace rtadder {

enum class TimingClass { Strong, WeakBasic, WeakDistributed, EarlyOutput, RelativeTimed };

inline constexpr std::array<TimingClass, 5> kAllTimingClasses = {
    TimingClass::Strong, TimingClass::WeakBasic, TimingClass::WeakDistributed, TimingClass::EarlyOutput,
    TimingClass::RelativeTimed};

inline std::string_view to_string(TimingClass c) {
  switch (c) {
    case TimingClass::Strong: return "strong";
    case TimingClass::WeakBasic: return "weak-basic";
    case TimingClass::WeakDistributed: return "weak-distributed";
    case TimingClass::EarlyOutput: return "early-output";
    case TimingClass::RelativeTimed: return "relative-timed";
  }
  return "?";
}

inline std::optional<TimingClass> timing_class_from_string(std::string_view s) {
  for (auto c : kAllTimingClasses) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

/// Forward / reverse latency in stage delays for width n, carry length m.
inline unsigned forward_factor(TimingClass c, unsigned n, unsigned m) { return c == TimingClass::Strong ? n : m; }

inline unsigned reverse_factor(TimingClass c, unsigned n, unsigned m) {
  switch (c) {
    case TimingClass::Strong: return n;
    case TimingClass::WeakBasic: return m;
    case TimingClass::WeakDistributed:
    case TimingClass::EarlyOutput: return 2;
    case TimingClass::RelativeTimed: return 1;
  }
  return 0;
}

inline unsigned cycle_factor(TimingClass c, unsigned n, unsigned m) {
  return forward_factor(c, n, m) + reverse_factor(c, n, m);
}

struct AdderRow {
  std::string label;
  TimingClass cls = TimingClass::Strong;
  std::int64_t latency_cns = 0;  // 32-bit forward latency, hundredths of a ns

  friend bool operator==(const AdderRow&, const AdderRow&) = default;
};

inline const std::vector<AdderRow>& builtin_rows() {
  static const std::vector<AdderRow> rows = {
      {"[36] strong", TimingClass::Strong, 1461},
      {"[37] strong", TimingClass::Strong, 926},
      {"[38] strong", TimingClass::Strong, 904},
      {"[37] weak", TimingClass::WeakBasic, 824},
      {"[39] weak", TimingClass::WeakBasic, 966},
      {"[40] weak", TimingClass::WeakBasic, 700},
      {"[41] weak", TimingClass::WeakDistributed, 443},
      {"[42] weak", TimingClass::WeakDistributed, 332},
      {"[19] early output", TimingClass::EarlyOutput, 310},
      {"relative-timed", TimingClass::RelativeTimed, 299},
  };
  return rows;
}

inline constexpr std::array<unsigned, 5> kCarryLengths = {4, 8, 16, 24, 28};
inline constexpr unsigned kTableWidth = 32;

/// Published estimates in tenths of a ns, one row per builtin_rows() entry:
/// five carry lengths followed by the mean.
inline constexpr std::array<std::array<int, 6>, 10> kGoldenTable4 = {{
    {292, 292, 292, 292, 292, 292},
    {185, 185, 185, 185, 185, 185},
    {181, 181, 181, 181, 181, 181},
    {21, 41, 82, 124, 144, 82},
    {24, 48, 97, 145, 169, 97},
    {18, 35, 70, 105, 123, 70},
    {8, 14, 25, 36, 42, 25},
    {6, 10, 19, 27, 31, 19},
    {6, 10, 17, 25, 29, 17},
    {5, 8, 16, 23, 27, 16},
}};

namespace detail {

// round-half-up(num / den) expressed in tenths, for num, den > 0
inline std::int64_t tenths_half_up(std::int64_t num, std::int64_t den) { return (20 * num + den) / (2 * den); }

}  // namespace detail

/// Unrounded estimate in ns.
inline double cycle_time_exact(const AdderRow& row, unsigned m, unsigned n = kTableWidth) {
  if (n == 0 || m == 0 || m > n) throw Error("carry length must satisfy 1 <= m <= n");
  return static_cast<double>(cycle_factor(row.cls, n, m)) * static_cast<double>(row.latency_cns) / (100.0 * n);
}

/// Estimate in tenths of a ns, rounded half-up.
inline std::int64_t cycle_time_estimate(const AdderRow& row, unsigned m, unsigned n = kTableWidth) {
  if (n == 0 || m == 0 || m > n) throw Error("carry length must satisfy 1 <= m <= n");
  return detail::tenths_half_up(static_cast<std::int64_t>(cycle_factor(row.cls, n, m)) * row.latency_cns,
                                100 * static_cast<std::int64_t>(n));
}

struct Table4Row {
  AdderRow row;
  std::vector<std::int64_t> cells;  // tenths of a ns, one per carry length
  std::int64_t mean = 0;            // mean of the unrounded cells, rounded
};

struct Table4 {
  std::vector<unsigned> carry_lengths;
  std::vector<Table4Row> rows;
};

inline Table4 generate_table4(const std::vector<AdderRow>& rows = builtin_rows(),
                              const std::vector<unsigned>& carry_lengths = {kCarryLengths.begin(), kCarryLengths.end()},
                              unsigned n = kTableWidth) {
  if (carry_lengths.empty()) throw Error("at least one carry length is required");
  Table4 t{carry_lengths, {}};
  for (const auto& r : rows) {
    if (r.latency_cns <= 0) throw Error("latency of '" + r.label + "' must be positive");
    Table4Row out{r, {}, 0};
    std::int64_t factor_sum = 0;
    for (unsigned m : carry_lengths) {
      out.cells.push_back(cycle_time_estimate(r, m, n));
      factor_sum += cycle_factor(r.cls, n, m);
    }
    out.mean = detail::tenths_half_up(factor_sum * r.latency_cns,
                                      100 * static_cast<std::int64_t>(n) * static_cast<std::int64_t>(carry_lengths.size()));
    t.rows.push_back(std::move(out));
  }
  return t;
}

/// Largest absolute difference from the published table, in tenths of a ns.
/// Only meaningful for the builtin dataset and carry lengths.
inline std::int64_t max_golden_deviation(const Table4& t) {
  if (t.rows.size() != kGoldenTable4.size() || t.carry_lengths.size() != kCarryLengths.size()) {
    throw Error("table shape differs from the published one");
  }
  std::int64_t worst = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      const std::int64_t got = j < 5 ? t.rows[i].cells[j] : t.rows[i].mean;
      worst = std::max<std::int64_t>(worst, std::abs(got - kGoldenTable4[i][j]));
    }
  }
  return worst;
}

inline std::string format_tenths(std::int64_t tenths) {
  const char* sign = tenths < 0 ? "-" : "";
  const std::int64_t a = tenths < 0 ? -tenths : tenths;
  return sign + std::to_string(a / 10) + "." + std::to_string(a % 10);
}

/// Relative reduction of `ours` against `theirs` mean cycle time, percent.
inline double mean_reduction_percent(const Table4& t, std::string_view theirs, std::string_view ours) {
  const Table4Row* a = nullptr;
  const Table4Row* b = nullptr;
  for (const auto& r : t.rows) {
    if (r.row.label == theirs) a = &r;
    if (r.row.label == ours) b = &r;
  }
  if (!a || !b) throw Error("unknown row label");
  return 100.0 * static_cast<double>(a->mean - b->mean) / static_cast<double>(a->mean);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline void write_table4_csv(const Table4& t, std::ostream& out) {
  out << "label,class";
  for (unsigned m : t.carry_lengths) out << ",m" << m;
  out << ",mean\n";
  for (const auto& r : t.rows) {
    out << csv_cell(r.row.label) << ',' << to_string(r.row.cls);
    for (auto c : r.cells) out << ',' << format_tenths(c);
    out << ',' << format_tenths(r.mean) << '\n';
  }
}

namespace detail {

inline std::int64_t parse_fixed(const std::string& text, int decimals, const std::string& what) {
  std::size_t i = 0;
  std::int64_t whole = 0, frac = 0;
  int digits = 0;
  if (text.empty()) throw ParseError(what + ": empty number");
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) whole = whole * 10 + (text[i++] - '0');
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      if (++digits > decimals) throw ParseError(what + ": too many decimals in '" + text + "'");
      frac = frac * 10 + (text[i++] - '0');
    }
  }
  if (i != text.size() || i == 0) throw ParseError(what + ": bad number '" + text + "'");
  for (; digits < decimals; ++digits) frac *= 10;
  std::int64_t scale = 1;
  for (int d = 0; d < decimals; ++d) scale *= 10;
  return whole * scale + frac;
}

}  // namespace detail

inline Table4 read_table4_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty table CSV");
  auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "label" || header[1] != "class" || header.back() != "mean") {
    throw ParseError("unexpected table CSV header");
  }
  Table4 t;
  for (std::size_t i = 2; i + 1 < header.size(); ++i) {
    if (header[i].size() < 2 || header[i][0] != 'm') throw ParseError("bad column '" + header[i] + "'");
    t.carry_lengths.push_back(static_cast<unsigned>(detail::parse_fixed(header[i].substr(1), 0, "column")));
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw ParseError(where + ": wrong cell count");
    const auto cls = timing_class_from_string(cells[1]);
    if (!cls) throw ParseError(where + ": unknown class '" + cells[1] + "'");
    Table4Row r{{cells[0], *cls, 0}, {}, 0};
    for (std::size_t i = 2; i + 1 < cells.size(); ++i) r.cells.push_back(detail::parse_fixed(cells[i], 1, where));
    r.mean = detail::parse_fixed(cells.back(), 1, where);
    t.rows.push_back(std::move(r));
  }
  return t;
}

/// Latency dataset: header "label,class,latency_ns", then one row per adder.
inline std::vector<AdderRow> read_latency_dataset(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<AdderRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line == "label,class,latency_ns") continue;
    const std::string where = "line " + std::to_string(lineno);
    auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ParseError(where + ": expected label,class,latency_ns");
    const auto cls = timing_class_from_string(cells[1]);
    if (!cls) throw ParseError(where + ": unknown class '" + cells[1] + "'");
    const auto lat = detail::parse_fixed(cells[2], 2, where);
    if (lat <= 0) throw ParseError(where + ": latency must be positive");
    rows.push_back({cells[0], *cls, lat});
  }
  if (rows.empty()) throw ParseError("latency dataset has no rows");
  return rows;
}

inline void write_latency_dataset(const std::vector<AdderRow>& rows, std::ostream& out) {
  out << "label,class,latency_ns\n";
  for (const auto& r : rows) {
    out << csv_cell(r.label) << ',' << to_string(r.cls) << ',' << r.latency_cns / 100 << '.'
        << (r.latency_cns % 100 < 10 ? "0" : "") << r.latency_cns % 100 << '\n';
  }
}

}  // namespace rtadder
