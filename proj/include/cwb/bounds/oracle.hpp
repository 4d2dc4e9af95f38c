#pragma once

// Explicit-state enumeration of concrete integer stores over a Cfg, used as
// ground truth for the interval methods.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cwb/intervals/interval.hpp"
#include "cwb/ir/cfg.hpp"

namespace cwb::bounds {

class OracleRangeExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Store = std::vector<int64_t>;  // indexed like Cfg::variables

struct ValueRange {
  int64_t lo;
  int64_t hi;
};

struct OracleOptions {
  ValueRange range{-128, 1100};  // every reachable value must stay inside
  size_t budget = 1'000'000;     // total (location, store) pairs
};

namespace detail {

inline int64_t eval_concrete(const ir::Expr& e, const ir::Cfg& g, const Store& s) {
  switch (e.kind()) {
    case ir::Expr::Kind::Const: return e.value();
    case ir::Expr::Kind::Var: {
      const auto it = std::find(g.variables.begin(), g.variables.end(), e.name());
      if (it == g.variables.end()) throw std::invalid_argument("unknown variable '" + e.name() + "'");
      return s[static_cast<size_t>(it - g.variables.begin())];
    }
    case ir::Expr::Kind::Nondet: throw std::invalid_argument("the store oracle does not support `*` in expressions");
    case ir::Expr::Kind::Binary: {
      const int64_t a = eval_concrete(e.lhs(), g, s);
      const int64_t b = eval_concrete(e.rhs(), g, s);
      int64_t r = 0;
      const bool ovf = e.op() == ir::BinOp::Add ? __builtin_add_overflow(a, b, &r) : __builtin_sub_overflow(a, b, &r);
      if (ovf) throw OracleRangeExceeded("integer overflow during enumeration");
      return r;
    }
  }
  return 0;
}

inline bool holds_concrete(const ir::Cond& c, const ir::Cfg& g, const Store& s) {
  if (c.nondet) return true;
  return ir::holds(c.op, eval_concrete(c.lhs, g, s), eval_concrete(c.rhs, g, s));
}

}  // namespace detail

/// Reachable stores per location. `entry` gives the initial range of every
/// variable. An assert lets through only the stores satisfying it.
inline std::vector<std::set<Store>> explore_stores(const ir::Cfg& g, const std::map<std::string, ValueRange>& entry,
                                                   OracleOptions opts = {}) {
  std::vector<std::set<Store>> out(g.num_locations);
  if (g.num_locations == 0) return out;
  const size_t nv = g.variables.size();
  std::vector<ValueRange> init(nv);
  for (size_t i = 0; i < nv; ++i) {
    const auto it = entry.find(g.variables[i]);
    if (it == entry.end()) throw std::invalid_argument("no entry range for variable '" + g.variables[i] + "'");
    if (it->second.hi < it->second.lo) throw std::invalid_argument("empty entry range for '" + g.variables[i] + "'");
    init[i] = it->second;
  }
  for (const auto& [name, r] : entry)
    if (std::find(g.variables.begin(), g.variables.end(), name) == g.variables.end())
      throw std::invalid_argument("entry range for undeclared variable '" + name + "'");

  const auto succ = g.successors();
  size_t total = 0;
  std::vector<std::pair<ir::LocId, Store>> work;
  auto add = [&](ir::LocId loc, Store s) {
    for (size_t i = 0; i < nv; ++i)
      if (s[i] < opts.range.lo || s[i] > opts.range.hi)
        throw OracleRangeExceeded("variable '" + g.variables[i] + "' reaches " + std::to_string(s[i]) +
                                  ", outside [" + std::to_string(opts.range.lo) + ", " + std::to_string(opts.range.hi) + "]");
    if (!out[loc].insert(s).second) return;
    if (++total > opts.budget)
      throw OracleBudgetExceeded("store oracle exceeded its budget of " + std::to_string(opts.budget) + " states");
    work.emplace_back(loc, std::move(s));
  };

  // all combinations of the entry ranges
  Store cur(nv);
  auto seed = [&](auto&& self, size_t i) -> void {
    if (i == nv) {
      add(g.entry, cur);
      return;
    }
    for (int64_t v = init[i].lo;; ++v) {
      cur[i] = v;
      self(self, i + 1);
      if (v == init[i].hi) break;
    }
  };
  seed(seed, 0);

  while (!work.empty()) {
    auto [loc, s] = std::move(work.back());
    work.pop_back();
    for (size_t ei : succ[loc]) {
      const auto& e = g.edges[ei];
      if (const auto* a = std::get_if<ir::AssignLabel>(&e.label)) {
        const auto it = std::find(g.variables.begin(), g.variables.end(), a->var);
        Store next = s;
        next[static_cast<size_t>(it - g.variables.begin())] = detail::eval_concrete(a->expr, g, s);
        add(e.dst, std::move(next));
      } else if (const auto* a = std::get_if<ir::AssumeLabel>(&e.label)) {
        if (detail::holds_concrete(a->cond, g, s)) add(e.dst, s);
      } else if (const auto* a = std::get_if<ir::AssertLabel>(&e.label)) {
        if (detail::holds_concrete(a->cond, g, s)) add(e.dst, s);
      } else {
        add(e.dst, s);
      }
    }
  }
  return out;
}

/// Reachable values of `v` per location.
inline std::vector<std::set<int64_t>> reachable_values(const ir::Cfg& g, const std::string& v,
                                                       const std::map<std::string, ValueRange>& entry,
                                                       OracleOptions opts = {}) {
  const auto it = std::find(g.variables.begin(), g.variables.end(), v);
  if (it == g.variables.end()) throw std::invalid_argument("unknown variable '" + v + "'");
  const auto idx = static_cast<size_t>(it - g.variables.begin());
  std::vector<std::set<int64_t>> out;
  for (const auto& stores : explore_stores(g, entry, opts)) {
    std::set<int64_t> vals;
    for (const auto& s : stores) vals.insert(s[idx]);
    out.push_back(std::move(vals));
  }
  return out;
}

inline Interval hull(const std::set<int64_t>& values) {
  if (values.empty()) return Interval::bottom();
  return Interval(*values.begin(), *values.rbegin());
}

/// No gaps between the smallest and largest value.
inline bool is_convex(const std::set<int64_t>& values) {
  return values.empty() || static_cast<uint64_t>(*values.rbegin() - *values.begin()) + 1 == values.size();
}

/// Per-location hull of the reachable values of `v` (empty when unreachable).
inline std::vector<Interval> bounded_concrete_oracle(const ir::Cfg& g, const std::string& v, ValueRange range,
                                                     const std::map<std::string, ValueRange>& entry) {
  OracleOptions opts;
  opts.range = range;
  std::vector<Interval> out;
  for (const auto& vals : reachable_values(g, v, entry, opts)) out.push_back(hull(vals));
  return out;
}

}  // namespace cwb::bounds
