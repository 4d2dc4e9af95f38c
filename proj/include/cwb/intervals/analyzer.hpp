#pragma once

// Interval analysis over a Cfg with widening at loop heads followed by
// decreasing iterations.

#include <string>
#include <vector>

#include "cwb/fixpoint.hpp"
#include "cwb/intervals/env.hpp"
#include "cwb/ir/cfg.hpp"

namespace cwb {

struct IntervalOptions {
  unsigned widen_delay = 0;
  unsigned narrow_passes = 0;
};

struct AssertVerdict {
  ir::AssertId id;
  ir::LocId source;
  ir::SourcePos pos;
  ir::Cond cond;
  bool proved;
};

struct IntervalResult {
  std::vector<AbstractEnv> envs;
  std::vector<AssertVerdict> asserts;  // by assert id
  std::vector<bool> loop_heads;
  size_t updates = 0;
  size_t narrowing_updates = 0;

  bool all_proved() const {
    for (const auto& a : asserts)
      if (!a.proved) return false;
    return true;
  }
};

/// Post-condition of one edge. An assert behaves like an assume of its
/// condition: only the executions that pass it continue.
inline AbstractEnv interval_post(const ir::Edge& e, const AbstractEnv& in) {
  if (in.is_unreachable()) return in;
  if (const auto* a = std::get_if<ir::AssignLabel>(&e.label)) {
    AbstractEnv out = in;
    out.set(a->var, eval(a->expr, in));
    return out;
  }
  if (const auto* a = std::get_if<ir::AssumeLabel>(&e.label)) return filter(a->cond, in);
  if (const auto* a = std::get_if<ir::AssertLabel>(&e.label)) return filter(a->cond, in);
  return in;
}

/// Proved iff no state at the source violates the condition.
inline bool assert_proved(const ir::Cond& c, const AbstractEnv& at_source) {
  if (at_source.is_unreachable()) return true;
  if (c.nondet) return false;
  return filter(c.negated(), at_source).is_unreachable();
}

inline std::vector<AssertVerdict> check_asserts(const ir::Cfg& g, const std::vector<AbstractEnv>& envs) {
  std::vector<AssertVerdict> out;
  for (const auto& site : g.assert_sites()) {
    const auto& label = std::get<ir::AssertLabel>(g.edges[site.edge].label);
    out.push_back({site.id, site.source, site.pos, label.cond, assert_proved(label.cond, envs[site.source])});
  }
  return out;
}

/// Declared variables absent from `entry_env` start unconstrained.
inline AbstractEnv complete_entry(const ir::Cfg& g, const AbstractEnv& entry_env) {
  if (entry_env.is_unreachable()) return entry_env;
  AbstractEnv out = AbstractEnv::top(g.variables);
  for (const auto& [v, i] : entry_env.vars()) out.set(v, i);
  return out;
}

namespace detail {

struct IntervalDomain {
  using value_type = AbstractEnv;
  AbstractEnv entry;

  AbstractEnv bottom() const { return AbstractEnv::unreachable(); }
  AbstractEnv initial() const { return entry; }
  AbstractEnv transfer(const ir::Edge& e, const AbstractEnv& v) const { return interval_post(e, v); }
  AbstractEnv join(const AbstractEnv& a, const AbstractEnv& b) const { return a.join(b); }
  AbstractEnv widen(const AbstractEnv& a, const AbstractEnv& b) const { return a.widen(b); }
  bool equal(const AbstractEnv& a, const AbstractEnv& b) const { return a == b; }
};

}  // namespace detail

inline IntervalResult analyze_intervals(const ir::Cfg& g, const AbstractEnv& entry_env, IntervalOptions opts = {}) {
  const auto fix = solve_forward(g, detail::IntervalDomain{complete_entry(g, entry_env)},
                                 FixpointOptions{opts.widen_delay, opts.narrow_passes});
  IntervalResult res;
  res.envs = fix.values;
  res.updates = fix.updates;
  res.narrowing_updates = fix.narrowing_updates;
  res.loop_heads = ir::depth_first(g).is_loop_head;
  res.asserts = check_asserts(g, res.envs);
  return res;
}

}  // namespace cwb
