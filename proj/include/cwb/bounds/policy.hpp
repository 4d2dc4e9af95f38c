#pragma once

// Least solution by ascending policy iteration.
//
// A policy fixes one argument of every Max node and opens or closes every
// guard. The remaining system only has Min, +c and constants; its least
// solution above the current valuation is reached by Kleene iteration, where
// any value past a bound derived from the system's constants can only come
// from a positive cycle and is set to +oo. The policy is then improved at
// every Max node whose other argument is now strictly larger and at every
// closed guard whose test now passes. Values only increase, and the loop ends
// on a solution of the original system.

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cwb/bounds/system.hpp"

namespace cwb::bounds {

struct PolicyRound {
  std::vector<bool> max_right;     // per Max node, in pre-order
  std::vector<bool> guard_open;    // per Guard node, in pre-order
  Valuation values;                // least solution under this policy
};

struct PolicyResult {
  Valuation values;
  std::vector<PolicyRound> trace;
  size_t kleene_steps = 0;
};

namespace detail {

inline int64_t magnitude(int64_t v) {
  return v == std::numeric_limits<int64_t>::min() ? std::numeric_limits<int64_t>::max() : (v < 0 ? -v : v);
}

class PolicySolver {
 public:
  explicit PolicySolver(const BoundSystem& sys) : sys_(sys) {
    std::vector<BoundExpr> nodes;
    for (const auto& e : sys.rhs) collect_choices(e, nodes);
    for (const auto& n : nodes) {
      if (index_.count(n.id())) continue;
      if (n.kind() == BoundExpr::Kind::Max) {
        index_.emplace(n.id(), maxes_.size());
        maxes_.push_back(n);
      } else if (n.kind() == BoundExpr::Kind::Guard) {
        index_.emplace(n.id(), guards_.size());
        guards_.push_back(n);
      }
    }
    for (const auto& e : sys.rhs) scan_constants(e);
  }

  PolicyResult run() {
    PolicyResult res;
    Valuation x(sys_.size(), Bound::neg_inf());
    right_.assign(maxes_.size(), false);
    open_.assign(guards_.size(), false);
    improve(x);  // initial policy: what attains the max at the bottom valuation
    for (;;) {
      x = least_above(x, res.kleene_steps);
      res.trace.push_back({right_, open_, x});
      if (!improve(x)) break;
    }
    if (!sys_.is_solution(x)) throw std::logic_error("policy iteration ended on a non-solution");
    res.values = std::move(x);
    return res;
  }

 private:
  Bound eval_policy(const BoundExpr& e, const Valuation& x) const {
    switch (e.kind()) {
      case BoundExpr::Kind::Const: return e.value();
      case BoundExpr::Kind::Var: return x[e.var_index()];
      case BoundExpr::Kind::Add: return eval_policy(e.lhs(), x) + e.offset();
      case BoundExpr::Kind::Min: return min(eval_policy(e.lhs(), x), eval_policy(e.rhs(), x));
      case BoundExpr::Kind::Max: return eval_policy(right_[index_.at(e.id())] ? e.rhs() : e.lhs(), x);
      case BoundExpr::Kind::Guard:
        return open_[index_.at(e.id())] ? eval_policy(e.guarded(), x) : Bound::neg_inf();
    }
    return Bound::neg_inf();
  }

  // Switches every Max node whose other argument is strictly larger and opens
  // every guard whose test passes. Returns whether anything changed.
  bool improve(const Valuation& x) {
    bool changed = false;
    for (size_t i = 0; i < maxes_.size(); ++i) {
      const BoundExpr& m = maxes_[i];
      const Bound chosen = eval_policy(right_[i] ? m.rhs() : m.lhs(), x);
      const Bound other = eval_policy(right_[i] ? m.lhs() : m.rhs(), x);
      if (chosen < other) {
        right_[i] = !right_[i];
        changed = true;
      }
    }
    for (size_t i = 0; i < guards_.size(); ++i) {
      const BoundExpr& gd = guards_[i];
      if (!open_[i] && eval_policy(gd.test(), x) > gd.threshold()) {
        open_[i] = true;
        changed = true;
      }
    }
    return changed;
  }

  Valuation least_above(Valuation x, size_t& steps) const {
    int64_t bound = saturation_base_;
    for (const Bound& b : x)
      if (b.is_finite()) bound = std::max(bound, saturation_base_ + magnitude(b.value()));
    const Bound limit(bound);
    std::vector<bool> saturated(x.size(), false);
    for (;;) {
      ++steps;
      Valuation next(x.size());
      for (size_t i = 0; i < x.size(); ++i) {
        if (saturated[i]) {
          next[i] = Bound::pos_inf();
          continue;
        }
        Bound v = eval_policy(sys_.rhs[i], x);
        if (v < x[i]) throw std::logic_error("policy iteration descended");
        if (v.is_finite() && limit < v) {
          v = Bound::pos_inf();
          saturated[i] = true;
        }
        next[i] = v;
      }
      if (next == x) return x;
      x = std::move(next);
    }
  }

  void scan_constants(const BoundExpr& e) {
    switch (e.kind()) {
      case BoundExpr::Kind::Const:
        if (e.value().is_finite()) max_const_ = std::max(max_const_, magnitude(e.value().value()));
        break;
      case BoundExpr::Kind::Var: break;
      case BoundExpr::Kind::Add:
        max_offset_ = std::max(max_offset_, magnitude(e.offset()));
        scan_constants(e.lhs());
        break;
      default:
        if (e.kind() == BoundExpr::Kind::Guard && e.threshold().is_finite())
          max_const_ = std::max(max_const_, magnitude(e.threshold().value()));
        scan_constants(e.lhs());
        scan_constants(e.rhs());
    }
    // finite least values are reached along acyclic chains: a base value plus
    // at most one offset per variable
    saturation_base_ = max_const_ + static_cast<int64_t>(sys_.size() + 1) * max_offset_ + 1;
  }

  const BoundSystem& sys_;
  std::unordered_map<const void*, size_t> index_;
  std::vector<BoundExpr> maxes_;
  std::vector<BoundExpr> guards_;
  std::vector<bool> right_;
  std::vector<bool> open_;
  int64_t max_const_ = 0;
  int64_t max_offset_ = 0;
  int64_t saturation_base_ = 1;
};

}  // namespace detail

inline PolicyResult solve_policy_iteration_traced(const BoundSystem& sys) { return detail::PolicySolver(sys).run(); }

inline Valuation solve_policy_iteration(const BoundSystem& sys) { return solve_policy_iteration_traced(sys).values; }

}  // namespace cwb::bounds
