#pragma once

// Direct access-labeled CFG input:
//
//   loc <name>
//   entry <name>
//   edge <src> <dst> [access <block>]
//
// `#` starts a comment. Access sites are numbered in file order.

#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "cwb/ir/cfg.hpp"
#include "cwb/ir/parser.hpp"

namespace cwb::ir {

inline Cfg parse_access_graph(std::string_view text) {
  Cfg g;
  std::map<std::string, LocId> by_name;
  std::string entry_name;
  SourcePos entry_pos;
  struct PendingEdge {
    std::string src, dst, block;
    SourcePos pos;
  };
  std::vector<PendingEdge> pending;

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> words;
    for (std::string w; ls >> w;) words.push_back(w);
    if (words.empty()) continue;
    const SourcePos pos{lineno, 1};
    const std::string& kw = words[0];
    if (kw == "loc") {
      if (words.size() != 2) throw ParseError(pos, "expected 'loc <name>'");
      if (by_name.count(words[1])) throw ParseError(pos, "duplicate location '" + words[1] + "'");
      by_name[words[1]] = g.add_location(words[1], lineno);
    } else if (kw == "entry") {
      if (words.size() != 2) throw ParseError(pos, "expected 'entry <name>'");
      if (!entry_name.empty()) throw ParseError(pos, "entry declared twice");
      entry_name = words[1];
      entry_pos = pos;
    } else if (kw == "edge") {
      if (words.size() == 3) {
        pending.push_back({words[1], words[2], {}, pos});
      } else if (words.size() == 5 && words[3] == "access") {
        pending.push_back({words[1], words[2], words[4], pos});
      } else {
        throw ParseError(pos, "expected 'edge <src> <dst> [access <block>]'");
      }
    } else {
      throw ParseError(pos, "unknown directive '" + kw + "'");
    }
  }

  if (g.num_locations == 0) throw ParseError(SourcePos{lineno, 1}, "graph declares no locations");
  if (entry_name.empty()) {
    g.entry = 0;
  } else {
    const auto it = by_name.find(entry_name);
    if (it == by_name.end()) throw ParseError(entry_pos, "entry '" + entry_name + "' is not a declared location");
    g.entry = it->second;
  }

  SiteId site = 0;
  for (const auto& e : pending) {
    const auto s = by_name.find(e.src);
    if (s == by_name.end()) throw ParseError(e.pos, "dangling edge source '" + e.src + "'");
    const auto d = by_name.find(e.dst);
    if (d == by_name.end()) throw ParseError(e.pos, "dangling edge target '" + e.dst + "'");
    Label label = NopLabel{};
    if (!e.block.empty()) label = AccessLabel{g.intern_block(e.block), site++};
    g.edges.push_back(Edge{s->second, std::move(label), d->second, e.pos});
  }

  // The entry of a Cfg has no incoming edges; give a re-entered entry a fresh
  // predecessor.
  const bool entry_targeted =
      std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge& e) { return e.dst == g.entry; });
  if (entry_targeted) {
    const LocId old = g.entry;
    g.entry = g.add_location("start", 0);
    g.edges.push_back(Edge{g.entry, NopLabel{}, old, SourcePos{}});
  }
  return g;
}

}  // namespace cwb::ir
