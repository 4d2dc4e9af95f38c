#pragma once

// Non-relational interval environments: evaluation of expressions and
// refinement by conditions.

#include <map>
#include <string>
#include <vector>

#include "cwb/intervals/interval.hpp"
#include "cwb/ir/ast.hpp"

namespace cwb {

/// Variable -> interval, or the unreachable environment. Variables not in the
/// map are unconstrained.
class AbstractEnv {
 public:
  AbstractEnv() = default;

  static AbstractEnv unreachable() {
    AbstractEnv e;
    e.unreachable_ = true;
    return e;
  }

  /// Every listed variable unconstrained.
  static AbstractEnv top(const std::vector<std::string>& vars) {
    AbstractEnv e;
    for (const auto& v : vars) e.vars_[v] = Interval::top();
    return e;
  }

  bool is_unreachable() const { return unreachable_; }
  const std::map<std::string, Interval>& vars() const { return vars_; }

  Interval get(const std::string& v) const {
    if (unreachable_) return Interval::bottom();
    const auto it = vars_.find(v);
    return it == vars_.end() ? Interval::top() : it->second;
  }

  /// Binding an empty interval collapses the environment.
  void set(const std::string& v, const Interval& i) {
    if (unreachable_) return;
    if (i.is_bottom()) {
      *this = unreachable();
      return;
    }
    vars_[v] = i;
  }

  void make_unreachable() { *this = unreachable(); }

  bool leq(const AbstractEnv& o) const {
    if (unreachable_) return true;
    if (o.unreachable_) return false;
    for (const auto& [v, i] : o.vars_)
      if (!get(v).leq(i)) return false;
    return true;
  }

  AbstractEnv join(const AbstractEnv& o) const { return combine(o, [](const Interval& a, const Interval& b) { return a.join(b); }); }
  AbstractEnv widen(const AbstractEnv& next) const {
    return combine(next, [](const Interval& a, const Interval& b) { return a.widen(b); });
  }

  AbstractEnv meet(const AbstractEnv& o) const {
    if (unreachable_ || o.unreachable_) return unreachable();
    AbstractEnv out = *this;
    for (const auto& [v, i] : o.vars_) out.set(v, out.get(v).meet(i));
    return out;
  }

  friend bool operator==(const AbstractEnv& a, const AbstractEnv& b) {
    if (a.unreachable_ || b.unreachable_) return a.unreachable_ == b.unreachable_;
    return a.leq(b) && b.leq(a);
  }

  std::string str() const {
    if (unreachable_) return "unreachable";
    std::string out = "{";
    bool first = true;
    for (const auto& [v, i] : vars_) {
      if (!first) out += ", ";
      first = false;
      out += v + ": " + i.str();
    }
    return out + "}";
  }

 private:
  template <typename F>
  AbstractEnv combine(const AbstractEnv& o, F f) const {
    if (unreachable_) return o;
    if (o.unreachable_) return *this;
    AbstractEnv out;
    for (const auto& [v, i] : vars_) out.vars_[v] = f(i, o.get(v));
    for (const auto& [v, i] : o.vars_)
      if (!vars_.count(v)) out.vars_[v] = f(Interval::top(), i);
    return out;
  }

  std::map<std::string, Interval> vars_;
  bool unreachable_ = false;
};

/// Interval arithmetic; `*` is the whole line.
inline Interval eval(const ir::Expr& e, const AbstractEnv& env) {
  if (env.is_unreachable()) return Interval::bottom();
  switch (e.kind()) {
    case ir::Expr::Kind::Const: return Interval::point(e.value());
    case ir::Expr::Kind::Var: return env.get(e.name());
    case ir::Expr::Kind::Nondet: return Interval::top();
    case ir::Expr::Kind::Binary: {
      const Interval a = eval(e.lhs(), env);
      const Interval b = eval(e.rhs(), env);
      return e.op() == ir::BinOp::Add ? a + b : a - b;
    }
  }
  return Interval::top();
}

namespace detail {

// Backward step: restrict `env` so that `e` can take a value in `target`.
inline void refine(const ir::Expr& e, Interval target, AbstractEnv& env) {
  if (env.is_unreachable()) return;
  target = target.meet(eval(e, env));
  if (target.is_bottom()) {
    env.make_unreachable();
    return;
  }
  switch (e.kind()) {
    case ir::Expr::Kind::Const:
    case ir::Expr::Kind::Nondet: return;
    case ir::Expr::Kind::Var: env.set(e.name(), target); return;
    case ir::Expr::Kind::Binary:
      if (e.op() == ir::BinOp::Add) {
        refine(e.lhs(), target - eval(e.rhs(), env), env);
        refine(e.rhs(), target - eval(e.lhs(), env), env);
      } else {
        refine(e.lhs(), target + eval(e.rhs(), env), env);
        refine(e.rhs(), eval(e.lhs(), env) - target, env);
      }
      return;
  }
}

// Repeated occurrences of a variable can keep shrinking a bound one unit at a
// time (x < x), so the number of backward sweeps is fixed.
inline constexpr int kFilterSweeps = 2;

}  // namespace detail

/// Whether some value of `d` satisfies `d op 0`.
inline bool may_hold(ir::RelOp op, const Interval& d) {
  if (d.is_bottom()) return false;
  switch (op) {
    case ir::RelOp::Lt: return d.lo() < Bound(0);
    case ir::RelOp::Le: return d.lo() <= Bound(0);
    case ir::RelOp::Eq: return d.contains(0);
    case ir::RelOp::Ne: return d.singleton() != 0;
    case ir::RelOp::Ge: return d.hi() >= Bound(0);
    case ir::RelOp::Gt: return d.hi() > Bound(0);
  }
  return true;
}

/// Sound refinement of `env` by `c`, exact for a single variable compared
/// with a constant. Strict comparisons are tightened by one over the integers.
inline AbstractEnv filter(const ir::Cond& c, AbstractEnv env) {
  if (c.nondet || env.is_unreachable()) return env;
  const ir::Expr diff = c.lhs - c.rhs;
  for (int sweep = 0; sweep < detail::kFilterSweeps; ++sweep) {
    const Interval d = eval(diff, env);
    Interval allowed;
    switch (c.op) {
      case ir::RelOp::Lt: allowed = Interval::at_most(-1); break;
      case ir::RelOp::Le: allowed = Interval::at_most(0); break;
      case ir::RelOp::Eq: allowed = Interval::point(0); break;
      case ir::RelOp::Ge: allowed = Interval::at_least(0); break;
      case ir::RelOp::Gt: allowed = Interval::at_least(1); break;
      case ir::RelOp::Ne:
        if (d.singleton() == 0) {
          allowed = Interval::bottom();
        } else if (d.lo() == Bound(0)) {
          allowed = Interval::at_least(1);
        } else if (d.hi() == Bound(0)) {
          allowed = Interval::at_most(-1);
        } else {
          return env;
        }
        break;
    }
    const AbstractEnv before = env;
    detail::refine(diff, allowed, env);
    if (env == before) break;
  }
  return env;
}

}  // namespace cwb
