#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rtadder/sim_engine.hpp"

namespace rtadder {

// VCD identifier codes use the printable range '!'..'~' as base-94 digits.
inline std::string vcd_identifier(std::size_t index) {
  std::string id;
  do {
    id.push_back(static_cast<char>('!' + index % 94));
    index /= 94;
  } while (index != 0);
  return id;
}

/// Writes one scalar wire per net. Generated names "s<k>.<net>" are placed in
/// a scope per stage; everything else sits in the top scope.
inline void write_vcd(const Trace& trace, std::ostream& out, std::string_view top = "rca") {
  out << "$date\n  rtadder trace\n$end\n";
  out << "$version\n  rtadder\n$end\n";
  out << "$timescale 1ps $end\n";
  std::map<std::string, std::vector<NetId>> scoped;
  std::vector<NetId> top_level;
  for (NetId n = 0; n < trace.net_names.size(); ++n) {
    const auto& name = trace.net_names[n];
    const auto dot = name.find('.');
    if (dot == std::string::npos) top_level.push_back(n);
    else scoped[name.substr(0, dot)].push_back(n);
  }
  out << "$scope module " << top << " $end\n";
  for (NetId n : top_level) out << "$var wire 1 " << vcd_identifier(n) << ' ' << trace.net_names[n] << " $end\n";
  for (const auto& [scope, nets] : scoped) {
    out << "$scope module " << scope << " $end\n";
    for (NetId n : nets) {
      out << "$var wire 1 " << vcd_identifier(n) << ' ' << trace.net_names[n].substr(scope.size() + 1) << " $end\n";
    }
    out << "$upscope $end\n";
  }
  out << "$upscope $end\n$enddefinitions $end\n";
  out << "#0\n$dumpvars\n";
  for (NetId n = 0; n < trace.net_names.size(); ++n) out << '0' << vcd_identifier(n) << '\n';
  out << "$end\n";
  std::optional<Picoseconds> stamp;
  for (const auto& e : trace.events) {
    if (!stamp || *stamp != e.time) {
      out << '#' << e.time.count() << '\n';
      stamp = e.time;
    }
    out << (e.value ? '1' : '0') << vcd_identifier(e.net) << '\n';
  }
}

struct VcdChange {
  std::int64_t time = 0;
  std::string signal;
  bool value = false;
  friend bool operator==(const VcdChange&, const VcdChange&) = default;
};

struct VcdData {
  std::string timescale;
  std::vector<std::string> signals;  // full dotted names below the top scope
  std::vector<VcdChange> changes;    // excludes the $dumpvars initial values
};

/// Minimal reader for the scalar-only files write_vcd produces.
inline VcdData read_vcd(std::istream& in) {
  VcdData data;
  std::map<std::string, std::string> by_id;
  std::vector<std::string> scopes;
  std::string tok;
  std::int64_t now = 0;
  bool in_dumpvars = false;
  bool defs_done = false;
  while (in >> tok) {
    if (!defs_done) {
      if (tok == "$timescale") {
        std::string t;
        while (in >> t && t != "$end") data.timescale += t;
      } else if (tok == "$scope") {
        std::string kind, name, end;
        in >> kind >> name >> end;
        scopes.push_back(name);
      } else if (tok == "$upscope") {
        std::string end;
        in >> end;
        if (scopes.empty()) throw ParseError("VCD: unbalanced $upscope");
        scopes.pop_back();
      } else if (tok == "$var") {
        std::string type, width, id, ref, end;
        in >> type >> width >> id >> ref >> end;
        if (width != "1" || end != "$end") throw ParseError("VCD: only scalar wires are supported");
        std::string full;
        for (std::size_t i = 1; i < scopes.size(); ++i) full += scopes[i] + ".";
        full += ref;
        by_id[id] = full;
        data.signals.push_back(full);
      } else if (tok == "$enddefinitions") {
        std::string end;
        in >> end;
        defs_done = true;
      } else if (tok == "$date" || tok == "$version" || tok == "$comment") {
        std::string t;
        while (in >> t && t != "$end") {
        }
      }
      continue;
    }
    if (tok == "$dumpvars") {
      in_dumpvars = true;
    } else if (tok == "$end") {
      in_dumpvars = false;
    } else if (tok[0] == '#') {
      now = std::stoll(tok.substr(1));
    } else if (tok[0] == '0' || tok[0] == '1') {
      auto it = by_id.find(tok.substr(1));
      if (it == by_id.end()) throw ParseError("VCD: unknown identifier '" + tok.substr(1) + "'");
      if (!in_dumpvars) data.changes.push_back({now, it->second, tok[0] == '1'});
    } else {
      throw ParseError("VCD: unexpected token '" + tok + "'");
    }
  }
  if (!defs_done) throw ParseError("VCD: missing $enddefinitions");
  return data;
}

}  // namespace rtadder
