#pragma once

// Interval analysis run alongside a rewriting system: every assignment is
// evaluated both as written and after rewriting, and the two intervals are
// intersected.

#include <string>
#include <vector>

#include "cwb/fixpoint.hpp"
#include "cwb/intervals/analyzer.hpp"
#include "cwb/symrewrite/rewrite.hpp"

namespace cwb::symrewrite {

/// Full: rules are stored fully rewritten and evaluation rewrites to the end.
/// Truncated(d): rules are stored after d-1 rewriting rounds and evaluation
/// applies d rounds, so depth 1 keeps rules as written.
struct RewriteMode {
  bool truncated = false;
  size_t depth = 0;

  static RewriteMode full() { return {}; }
  static RewriteMode truncated_to(size_t d) {
    if (d == 0) throw std::invalid_argument("truncation depth must be at least 1");
    return {true, d};
  }

  size_t store_rounds() const { return truncated ? depth - 1 : kUnboundedRounds; }
  size_t eval_rounds() const { return truncated ? depth : kUnboundedRounds; }

  std::string str() const { return truncated ? "truncated:" + std::to_string(depth) : "full"; }
};

struct CombinedOptions {
  IntervalOptions iteration;
  RewriteMode mode;
  // Intersect the final result with the plain interval analysis. Widening
  // makes the combined iteration non-monotone, so without this it can end
  // above the plain result.
  bool meet_with_plain = true;
};

struct CombinedState {
  AbstractEnv env = AbstractEnv::unreachable();
  RewriteMap rules;

  friend bool operator==(const CombinedState&, const CombinedState&) = default;
};

struct CombinedResult {
  std::vector<AbstractEnv> envs;
  std::vector<RewriteMap> rules;
  std::vector<AssertVerdict> asserts;
  std::vector<bool> loop_heads;
  size_t updates = 0;
  size_t narrowing_updates = 0;
};

inline CombinedState combined_post(const ir::Edge& e, const CombinedState& in, const RewriteMode& mode) {
  if (in.env.is_unreachable()) return in;
  if (const auto* a = std::get_if<ir::AssignLabel>(&e.label)) {
    CombinedState out;
    Interval value = cwb::eval(a->expr, in.env);
    if (const auto f = rewrite_and_simplify(in.rules, a->expr, mode.eval_rounds())) value = value.meet(eval(*f, in.env));
    out.env = in.env;
    out.env.set(a->var, value);
    out.rules = record(in.rules, a->var, a->expr, mode.store_rounds());
    return out;
  }
  const ir::Cond* cond = nullptr;
  if (const auto* a = std::get_if<ir::AssumeLabel>(&e.label)) cond = &a->cond;
  if (const auto* a = std::get_if<ir::AssertLabel>(&e.label)) cond = &a->cond;
  if (!cond || cond->nondet) return in;
  CombinedState out{filter(*cond, in.env), in.rules};
  // the rewritten condition only serves to detect infeasibility
  if (const auto f = rewrite_and_simplify(in.rules, cond->lhs - cond->rhs, mode.eval_rounds())) {
    if (!may_hold(cond->op, eval(*f, in.env))) out.env.make_unreachable();
  }
  if (out.env.is_unreachable()) out.rules = RewriteMap{};
  return out;
}

namespace detail {

struct CombinedDomain {
  using value_type = CombinedState;
  AbstractEnv entry;
  RewriteMode mode;

  CombinedState bottom() const { return {}; }
  CombinedState initial() const { return {entry, {}}; }
  CombinedState transfer(const ir::Edge& e, const CombinedState& v) const { return combined_post(e, v, mode); }
  CombinedState join(const CombinedState& a, const CombinedState& b) const {
    if (a.env.is_unreachable()) return b;
    if (b.env.is_unreachable()) return a;
    return {a.env.join(b.env), a.rules.join(b.rules)};
  }
  CombinedState widen(const CombinedState& a, const CombinedState& b) const {
    if (a.env.is_unreachable()) return b;
    if (b.env.is_unreachable()) return a;
    return {a.env.widen(b.env), a.rules.join(b.rules)};
  }
  bool equal(const CombinedState& a, const CombinedState& b) const { return a == b; }
};

}  // namespace detail

inline CombinedResult analyze_combined(const ir::Cfg& g, const AbstractEnv& entry_env, CombinedOptions opts = {}) {
  const AbstractEnv entry = complete_entry(g, entry_env);
  const auto fix = solve_forward(g, detail::CombinedDomain{entry, opts.mode},
                                 FixpointOptions{opts.iteration.widen_delay, opts.iteration.narrow_passes});
  CombinedResult res;
  res.updates = fix.updates;
  res.narrowing_updates = fix.narrowing_updates;
  for (const auto& s : fix.values) {
    res.envs.push_back(s.env);
    res.rules.push_back(s.rules);
  }
  if (opts.meet_with_plain) {
    const auto plain = analyze_intervals(g, entry, opts.iteration);
    for (size_t l = 0; l < res.envs.size(); ++l) res.envs[l] = res.envs[l].meet(plain.envs[l]);
  }
  res.loop_heads = ir::depth_first(g).is_loop_head;
  res.asserts = check_asserts(g, res.envs);
  return res;
}

}  // namespace cwb::symrewrite
