#pragma once

// Labeled control-flow graph shared by every analysis, and the structured
// translation from toy-language programs.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cwb/ir/ast.hpp"

namespace cwb::ir {

using LocId = uint32_t;
using BlockId = uint32_t;
using SiteId = uint32_t;
using AssertId = uint32_t;

struct NopLabel {
  friend bool operator==(const NopLabel&, const NopLabel&) { return true; }
};
struct AssignLabel {
  std::string var;
  Expr expr;
};
struct AssumeLabel {
  Cond cond;
};
struct AccessLabel {
  BlockId block;
  SiteId site;
};
/// Checks `cond` at the source; execution continues only when it holds.
struct AssertLabel {
  Cond cond;
  AssertId id;
};

using Label = std::variant<NopLabel, AssignLabel, AssumeLabel, AccessLabel, AssertLabel>;

struct Edge {
  LocId src;
  Label label;
  LocId dst;
  SourcePos pos;
};

inline bool is_nop(const Label& l) { return std::holds_alternative<NopLabel>(l); }

struct AccessSite {
  SiteId id;
  size_t edge;
  BlockId block;
  LocId source;
};

struct AssertSite {
  AssertId id;
  size_t edge;
  LocId source;
  SourcePos pos;
};

struct Cfg {
  size_t num_locations = 0;
  LocId entry = 0;
  std::vector<Edge> edges;
  std::vector<std::string> variables;  // declaration order
  std::vector<std::string> blocks;     // interned block names, BlockId indexes
  std::vector<std::string> location_names;
  std::vector<int> location_lines;     // 0 when not tied to a source line

  LocId add_location(std::string name = {}, int line = 0) {
    const auto id = static_cast<LocId>(num_locations++);
    location_names.push_back(name.empty() ? "L" + std::to_string(id) : std::move(name));
    location_lines.push_back(line);
    return id;
  }

  BlockId intern_block(const std::string& name) {
    const auto it = std::find(blocks.begin(), blocks.end(), name);
    if (it != blocks.end()) return static_cast<BlockId>(it - blocks.begin());
    blocks.push_back(name);
    return static_cast<BlockId>(blocks.size() - 1);
  }

  std::vector<AccessSite> access_sites() const {
    std::vector<AccessSite> out;
    for (size_t i = 0; i < edges.size(); ++i)
      if (const auto* a = std::get_if<AccessLabel>(&edges[i].label))
        out.push_back({a->site, i, a->block, edges[i].src});
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
    return out;
  }

  std::vector<AssertSite> assert_sites() const {
    std::vector<AssertSite> out;
    for (size_t i = 0; i < edges.size(); ++i)
      if (const auto* a = std::get_if<AssertLabel>(&edges[i].label))
        out.push_back({a->id, i, edges[i].src, edges[i].pos});
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
    return out;
  }

  /// Outgoing edge indices per location, in edge order.
  std::vector<std::vector<size_t>> successors() const {
    std::vector<std::vector<size_t>> out(num_locations);
    for (size_t i = 0; i < edges.size(); ++i) out[edges[i].src].push_back(i);
    return out;
  }

  std::vector<std::vector<size_t>> predecessors() const {
    std::vector<std::vector<size_t>> out(num_locations);
    for (size_t i = 0; i < edges.size(); ++i) out[edges[i].dst].push_back(i);
    return out;
  }

  size_t count_non_nop() const {
    return static_cast<size_t>(std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return !is_nop(e.label); }));
  }
};

/// Depth-first structure from the entry: reverse-postorder numbering and the
/// targets of back edges (the widening points). Unreachable locations get
/// order == num_locations.
struct DfsInfo {
  std::vector<size_t> rpo_index;
  std::vector<bool> is_loop_head;
  std::vector<bool> reachable;
};

inline DfsInfo depth_first(const Cfg& g) {
  const auto succ = g.successors();
  DfsInfo info;
  info.rpo_index.assign(g.num_locations, g.num_locations);
  info.is_loop_head.assign(g.num_locations, false);
  info.reachable.assign(g.num_locations, false);
  if (g.num_locations == 0) return info;

  enum Color : uint8_t { White, Grey, Black };
  std::vector<Color> color(g.num_locations, White);
  std::vector<LocId> postorder;
  // explicit stack of (location, next successor slot)
  std::vector<std::pair<LocId, size_t>> stack{{g.entry, 0}};
  color[g.entry] = Grey;
  while (!stack.empty()) {
    auto& [loc, slot] = stack.back();
    if (slot < succ[loc].size()) {
      const LocId dst = g.edges[succ[loc][slot++]].dst;
      if (color[dst] == White) {
        color[dst] = Grey;
        stack.emplace_back(dst, 0);
      } else if (color[dst] == Grey) {
        info.is_loop_head[dst] = true;
      }
    } else {
      color[loc] = Black;
      postorder.push_back(loc);
      stack.pop_back();
    }
  }
  for (size_t i = 0; i < postorder.size(); ++i) {
    const LocId loc = postorder[postorder.size() - 1 - i];
    info.rpo_index[loc] = i;
    info.reachable[loc] = true;
  }
  return info;
}

/// Replaces Assign/Assume/Assert labels by Nop: the control-flow-only model
/// used by the cache analyses.
inline Cfg erase_guards(Cfg g) {
  for (auto& e : g.edges)
    if (!std::holds_alternative<AccessLabel>(e.label)) e.label = NopLabel{};
  return g;
}

namespace detail {

class CfgBuilder {
 public:
  explicit CfgBuilder(Cfg& g) : g_(g) {}

  LocId block(const Block& b, LocId cur) {
    for (const auto& s : b) cur = stmt(s, cur);
    return cur;
  }

  LocId stmt(const Stmt& s, LocId cur) {
    const int line = s.pos.line;
    return std::visit(
        [&](const auto& x) -> LocId {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, AssignStmt>) {
            const LocId dst = g_.add_location({}, line);
            edge(cur, AssignLabel{x.var, x.expr}, dst, s.pos);
            return dst;
          } else if constexpr (std::is_same_v<T, AccessStmt>) {
            const LocId dst = g_.add_location({}, line);
            edge(cur, AccessLabel{g_.intern_block(x.block), next_site_++}, dst, s.pos);
            return dst;
          } else if constexpr (std::is_same_v<T, AssertStmt>) {
            const LocId dst = g_.add_location({}, line);
            edge(cur, AssertLabel{x.cond, next_assert_++}, dst, s.pos);
            return dst;
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            const LocId then_entry = g_.add_location({}, line);
            const LocId else_entry = g_.add_location({}, line);
            branch(cur, x.cond, then_entry, else_entry, s.pos);
            const LocId then_exit = block(x.then_body, then_entry);
            const LocId else_exit = block(x.else_body, else_entry);
            const LocId join = g_.add_location({}, line);
            edge(then_exit, NopLabel{}, join, s.pos);
            edge(else_exit, NopLabel{}, join, s.pos);
            return join;
          } else {
            const LocId head = g_.add_location({}, line);
            edge(cur, NopLabel{}, head, s.pos);
            const LocId body_entry = g_.add_location({}, line);
            const LocId exit = g_.add_location({}, line);
            branch(head, x.cond, body_entry, exit, s.pos);
            const LocId body_exit = block(x.body, body_entry);
            edge(body_exit, NopLabel{}, head, s.pos);
            return exit;
          }
        },
        s.node);
  }

 private:
  void edge(LocId src, Label label, LocId dst, SourcePos pos) { g_.edges.push_back(Edge{src, std::move(label), dst, pos}); }

  void branch(LocId src, const Cond& c, LocId on_true, LocId on_false, SourcePos pos) {
    if (c.nondet) {
      edge(src, NopLabel{}, on_true, pos);
      edge(src, NopLabel{}, on_false, pos);
    } else {
      edge(src, AssumeLabel{c}, on_true, pos);
      edge(src, AssumeLabel{c.negated()}, on_false, pos);
    }
  }

  Cfg& g_;
  SiteId next_site_ = 0;
  AssertId next_assert_ = 0;
};

}  // namespace detail

/// Structured translation: one location per program point. Declarations with
/// an initializer become leading assignments; `if`/`while` on a comparison
/// give an Assume edge pair, on `*` a Nop pair; branch joins and loop back
/// edges are Nop.
inline Cfg build_cfg(const Program& p) {
  Cfg g;
  for (const auto& d : p.decls) g.variables.push_back(d.name);
  g.entry = g.add_location("entry", 0);
  detail::CfgBuilder b(g);
  LocId cur = g.entry;
  for (const auto& d : p.decls) {
    if (!d.init) continue;
    const LocId dst = g.add_location({}, d.pos.line);
    g.edges.push_back(Edge{cur, AssignLabel{d.name, *d.init}, dst, d.pos});
    cur = dst;
  }
  cur = b.block(p.body, cur);
  if (cur != g.entry) g.location_names[cur] = "exit";
  return g;
}

inline std::string label_to_string(const Cfg& g, const Label& l) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NopLabel>) {
          return "nop";
        } else if constexpr (std::is_same_v<T, AssignLabel>) {
          return x.var + " = " + to_string(x.expr);
        } else if constexpr (std::is_same_v<T, AssumeLabel>) {
          return "assume(" + to_string(x.cond) + ")";
        } else if constexpr (std::is_same_v<T, AccessLabel>) {
          return "access(" + g.blocks.at(x.block) + ")";
        } else {
          return "assert(" + to_string(x.cond) + ")";
        }
      },
      l);
}

}  // namespace cwb::ir
