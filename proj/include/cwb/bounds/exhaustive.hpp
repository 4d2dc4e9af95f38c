#pragma once

// Least solution by exhaustive case analysis.
//
// The system is split into strongly connected components, solved in
// dependency order. Inside a component every Min/Max node picks one argument
// and every guard is either open or closed; each variable then equals a
// constant or another variable plus a constant. Following these links from a
// variable ends in a constant or in a cycle. A cycle of nonzero weight only
// admits -oo or +oo; a cycle of weight zero also admits one free finite
// parameter, fixed to the least value the selection allows (longest paths
// over the difference constraints the selection imposes). Each candidate is
// checked against the original equations and the pointwise least survivor is
// returned.

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cwb/bounds/system.hpp"

namespace cwb::bounds {

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExhaustiveOptions {
  size_t cap = 20;  // total Min/Max/Guard nodes accepted
};

struct ExhaustiveStats {
  size_t components = 0;
  size_t selections = 0;
  size_t candidates = 0;  // candidates passing the full check
};

/// Min/Max/Guard nodes counted once even when shared.
inline size_t count_distinct_choices(const BoundSystem& sys) {
  std::vector<BoundExpr> nodes;
  for (const auto& e : sys.rhs) collect_choices(e, nodes);
  std::vector<const void*> ids;
  for (const auto& n : nodes) ids.push_back(n.id());
  std::sort(ids.begin(), ids.end());
  return static_cast<size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

/// Components in dependency order: each one only refers to itself and to
/// components listed before it.
inline std::vector<std::vector<size_t>> dependency_components(const BoundSystem& sys) {
  const size_t n = sys.size();
  std::vector<std::vector<size_t>> deps(n);
  for (size_t i = 0; i < n; ++i) {
    collect_vars(sys.rhs[i], deps[i]);
    std::sort(deps[i].begin(), deps[i].end());
    deps[i].erase(std::unique(deps[i].begin(), deps[i].end()), deps[i].end());
  }
  // iterative Tarjan; components come out dependencies first
  std::vector<size_t> index(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<size_t> stack;
  std::vector<std::vector<size_t>> out;
  size_t counter = 0;
  for (size_t root = 0; root < n; ++root) {
    if (index[root] != SIZE_MAX) continue;
    std::vector<std::pair<size_t, size_t>> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, slot] = frames.back();
      if (slot < deps[v].size()) {
        const size_t w = deps[v][slot++];
        if (index[w] == SIZE_MAX) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<size_t> comp;
        size_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
      const size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
    }
  }
  return out;
}

namespace detail {

// A value that is a constant or (free parameter p) + offset.
struct SymVal {
  bool is_param = false;
  Bound c;
  size_t p = 0;
  int64_t off = 0;

  static SymVal constant(Bound b) { return {false, b, 0, 0}; }
  static SymVal param(size_t p, int64_t off) { return {true, Bound(0), p, off}; }
  SymVal shifted(int64_t d) const {
    if (!is_param) return constant(c + d);
    int64_t r = 0;
    if (__builtin_add_overflow(off, d, &r)) throw std::overflow_error("bound arithmetic overflow");
    return param(p, r);
  }
};

// Difference constraints over the parameters of one candidate family.
class Constraints {
 public:
  explicit Constraints(size_t params) : lb_(params, Bound::neg_inf()), ub_(params, Bound::pos_inf()) {}

  bool feasible() const { return feasible_; }

  // a <= b
  void le(const SymVal& a, const SymVal& b) {
    if (!feasible_) return;
    if (!a.is_param && !b.is_param) {
      if (b.c < a.c) feasible_ = false;
    } else if (a.is_param && !b.is_param) {
      if (b.c.is_pos_inf()) return;
      if (b.c.is_neg_inf()) {
        feasible_ = false;
        return;
      }
      ub_[a.p] = min(ub_[a.p], b.c - a.off);
    } else if (!a.is_param) {
      if (a.c.is_neg_inf()) return;
      if (a.c.is_pos_inf()) {
        feasible_ = false;
        return;
      }
      lb_[b.p] = max(lb_[b.p], a.c - b.off);
    } else if (a.p == b.p) {
      if (b.off < a.off) feasible_ = false;
    } else {
      // t_b >= t_a + (a.off - b.off)
      edges_.push_back({a.p, b.p, (Bound(a.off) - b.off).value()});
    }
  }

  // a > k with k finite or -oo
  void gt(const SymVal& a, const Bound& k) {
    if (k.is_neg_inf()) {
      if (!a.is_param && a.c.is_neg_inf()) feasible_ = false;
      return;
    }
    le(SymVal::constant(k + 1), a);
  }

  /// Least parameter values, or nullopt when infeasible or unbounded below.
  std::optional<std::vector<int64_t>> least() const {
    if (!feasible_) return std::nullopt;
    const size_t n = lb_.size();
    std::vector<Bound> t = lb_;
    for (size_t round = 0;; ++round) {
      bool changed = false;
      for (const auto& e : edges_) {
        if (!t[e.from].is_finite()) continue;
        const Bound cand = t[e.from] + e.weight;
        if (t[e.to] < cand) {
          t[e.to] = cand;
          changed = true;
        }
      }
      if (!changed) break;
      if (round > n) return std::nullopt;  // positive cycle: no solution
    }
    std::vector<int64_t> out;
    for (size_t p = 0; p < n; ++p) {
      if (!t[p].is_finite()) return std::nullopt;
      if (ub_[p] < t[p]) return std::nullopt;
      out.push_back(t[p].value());
    }
    return out;
  }

 private:
  struct Edge {
    size_t from;
    size_t to;
    int64_t weight;
  };
  std::vector<Bound> lb_;
  std::vector<Bound> ub_;
  std::vector<Edge> edges_;
  bool feasible_ = true;
};

class ComponentSolver {
 public:
  ComponentSolver(std::vector<BoundExpr> rhs, ExhaustiveStats& stats) : rhs_(std::move(rhs)), stats_(stats) {
    std::vector<BoundExpr> nodes;
    for (const auto& e : rhs_) collect_choices(e, nodes);
    for (const auto& n : nodes)
      if (!choice_index_.count(n.id())) choice_index_.emplace(n.id(), choice_index_.size());
  }

  Valuation solve() {
    const size_t k = choice_index_.size();
    if (k >= 31) throw CapExceeded("a single component has " + std::to_string(k) + " choice nodes");
    for (uint64_t mask = 0; mask < (uint64_t{1} << k); ++mask) {
      ++stats_.selections;
      mask_ = mask;
      try_selection();
    }
    if (!best_) throw std::logic_error("exhaustive solver found no solution");
    return *best_;
  }

 private:
  struct Link {
    bool to_var = false;
    Bound c;         // when !to_var
    size_t var = 0;  // when to_var
    int64_t w = 0;
  };

  bool picks_right(const BoundExpr& e) const { return (mask_ >> choice_index_.at(e.id())) & 1U; }

  // Under the current selection `e` is a constant or a variable plus a constant.
  Link reduce(const BoundExpr& e) const {
    switch (e.kind()) {
      case BoundExpr::Kind::Const: return {false, e.value(), 0, 0};
      case BoundExpr::Kind::Var: return {true, Bound(0), e.var_index(), 0};
      case BoundExpr::Kind::Add: {
        Link l = reduce(e.lhs());
        if (!l.to_var) {
          l.c = l.c + e.offset();
        } else {
          l.w = (Bound(l.w) + e.offset()).value();
        }
        return l;
      }
      case BoundExpr::Kind::Min:
      case BoundExpr::Kind::Max: return reduce(picks_right(e) ? e.rhs() : e.lhs());
      case BoundExpr::Kind::Guard:
        // bit set = closed guard
        if (picks_right(e)) return {false, Bound::neg_inf(), 0, 0};
        return reduce(e.guarded());
    }
    return {};
  }

  void try_selection() {
    const size_t n = rhs_.size();
    links_.clear();
    for (const auto& e : rhs_) links_.push_back(reduce(e));

    // cycles of the functional graph
    cycle_of_.assign(n, SIZE_MAX);
    cycles_.clear();
    std::vector<uint8_t> state(n, 0);  // 0 new, 1 on current walk, 2 done
    for (size_t s = 0; s < n; ++s) {
      std::vector<size_t> walk;
      size_t v = s;
      while (state[v] == 0) {
        state[v] = 1;
        walk.push_back(v);
        if (!links_[v].to_var) break;
        v = links_[v].var;
      }
      if (state[v] == 1 && links_[v].to_var) {
        // v starts a new cycle
        Cycle cyc;
        size_t u = v;
        int64_t offset = 0;
        Bound weight(0);
        do {
          cyc.members.push_back(u);
          cyc.offset.push_back(offset);
          cycle_of_[u] = cycles_.size();
          offset = (Bound(offset) - links_[u].w).value();
          weight = weight + links_[u].w;
          u = links_[u].var;
        } while (u != v);
        cyc.zero_weight = weight == Bound(0);
        cycles_.push_back(std::move(cyc));
      }
      for (size_t w : walk) state[w] = 2;
    }

    // every cycle is -oo, +oo or (zero weight only) finite
    std::vector<int> cls(cycles_.size(), 0);
    for (;;) {
      try_classes(cls);
      size_t i = 0;
      for (; i < cls.size(); ++i) {
        const int limit = cycles_[i].zero_weight ? 3 : 2;
        if (++cls[i] < limit) break;
        cls[i] = 0;
      }
      if (i == cls.size()) break;
    }
  }

  void try_classes(const std::vector<int>& cls) {
    const size_t n = rhs_.size();
    // parameters: one per finite cycle
    std::vector<size_t> param_of_cycle(cycles_.size(), SIZE_MAX);
    size_t params = 0;
    for (size_t c = 0; c < cycles_.size(); ++c)
      if (cls[c] == 2) param_of_cycle[c] = params++;

    sym_.assign(n, std::nullopt);
    for (size_t c = 0; c < cycles_.size(); ++c) {
      const Cycle& cyc = cycles_[c];
      for (size_t m = 0; m < cyc.members.size(); ++m) {
        const size_t v = cyc.members[m];
        if (cls[c] == 0) {
          sym_[v] = SymVal::constant(Bound::neg_inf());
        } else if (cls[c] == 1) {
          sym_[v] = SymVal::constant(Bound::pos_inf());
        } else {
          sym_[v] = SymVal::param(param_of_cycle[c], cyc.offset[m]);
        }
      }
    }
    for (size_t v = 0; v < n; ++v) symbolic(v);

    Constraints cons(params);
    for (size_t v = 0; v < n; ++v) constrain(rhs_[v], cons);
    const auto t = cons.least();
    if (!t) return;

    Valuation val(n);
    for (size_t v = 0; v < n; ++v) {
      const SymVal& s = *sym_[v];
      val[v] = s.is_param ? Bound((*t)[s.p]) + s.off : s.c;
    }
    for (size_t v = 0; v < n; ++v)
      if (!(eval(rhs_[v], val) == val[v])) return;
    ++stats_.candidates;
    if (!best_) {
      best_ = val;
    } else {
      for (size_t v = 0; v < n; ++v) (*best_)[v] = min((*best_)[v], val[v]);
    }
  }

  const SymVal& symbolic(size_t v) {
    if (sym_[v]) return *sym_[v];
    // chains are acyclic outside the cycles, so this recursion terminates
    const Link& l = links_[v];
    sym_[v] = l.to_var ? symbolic(l.var).shifted(l.w) : SymVal::constant(l.c);
    return *sym_[v];
  }

  // Symbolic value of `e` under the selection; records the conditions for
  // every choice node to agree with its selection.
  SymVal constrain(const BoundExpr& e, Constraints& cons) {
    switch (e.kind()) {
      case BoundExpr::Kind::Const: return SymVal::constant(e.value());
      case BoundExpr::Kind::Var: return *sym_[e.var_index()];
      case BoundExpr::Kind::Add: return constrain(e.lhs(), cons).shifted(e.offset());
      case BoundExpr::Kind::Min:
      case BoundExpr::Kind::Max: {
        const SymVal a = constrain(e.lhs(), cons);
        const SymVal b = constrain(e.rhs(), cons);
        const bool right = picks_right(e);
        const SymVal& chosen = right ? b : a;
        const SymVal& other = right ? a : b;
        if (e.kind() == BoundExpr::Kind::Min) {
          cons.le(chosen, other);
        } else {
          cons.le(other, chosen);
        }
        return chosen;
      }
      case BoundExpr::Kind::Guard: {
        const SymVal t = constrain(e.test(), cons);
        const SymVal v = constrain(e.guarded(), cons);
        if (picks_right(e)) {
          cons.le(t, SymVal::constant(e.threshold()));
          return SymVal::constant(Bound::neg_inf());
        }
        cons.gt(t, e.threshold());
        return v;
      }
    }
    return SymVal::constant(Bound::neg_inf());
  }

  struct Cycle {
    std::vector<size_t> members;
    std::vector<int64_t> offset;  // value of member = parameter + offset
    bool zero_weight = false;
  };

  std::vector<BoundExpr> rhs_;
  ExhaustiveStats& stats_;
  std::unordered_map<const void*, size_t> choice_index_;
  uint64_t mask_ = 0;
  std::vector<Link> links_;
  std::vector<size_t> cycle_of_;
  std::vector<Cycle> cycles_;
  std::vector<std::optional<SymVal>> sym_;
  std::optional<Valuation> best_;
};

}  // namespace detail

/// Least solution of `sys`. Throws CapExceeded when the system has more
/// choice nodes than `opts.cap`.
inline Valuation solve_exhaustive(const BoundSystem& sys, ExhaustiveOptions opts = {}, ExhaustiveStats* stats = nullptr) {
  const size_t choices = count_distinct_choices(sys);
  if (choices > opts.cap)
    throw CapExceeded("system has " + std::to_string(choices) + " min/max/guard nodes, above the cap of " +
                      std::to_string(opts.cap));
  ExhaustiveStats local;
  ExhaustiveStats& st = stats ? *stats : local;
  Valuation sol(sys.size(), Bound::neg_inf());
  for (const auto& comp : dependency_components(sys)) {
    ++st.components;
    std::vector<size_t> local_index(sys.size(), SIZE_MAX);
    for (size_t i = 0; i < comp.size(); ++i) local_index[comp[i]] = i;
    // outside variables are already solved and become constants
    std::function<BoundExpr(const BoundExpr&)> localize = [&](const BoundExpr& e) -> BoundExpr {
      switch (e.kind()) {
        case BoundExpr::Kind::Const: return e;
        case BoundExpr::Kind::Var: {
          const size_t j = e.var_index();
          return local_index[j] == SIZE_MAX ? BoundExpr::constant(sol[j]) : BoundExpr::var(local_index[j]);
        }
        case BoundExpr::Kind::Add: return BoundExpr::add(localize(e.lhs()), e.offset());
        case BoundExpr::Kind::Min: return BoundExpr::min(localize(e.lhs()), localize(e.rhs()));
        case BoundExpr::Kind::Max: return BoundExpr::max(localize(e.lhs()), localize(e.rhs()));
        case BoundExpr::Kind::Guard: return BoundExpr::guard(localize(e.test()), e.threshold(), localize(e.guarded()));
      }
      return e;
    };
    std::vector<BoundExpr> rhs;
    for (size_t v : comp) rhs.push_back(simplify(localize(sys.rhs[v])));
    const Valuation part = detail::ComponentSolver(std::move(rhs), st).solve();
    for (size_t i = 0; i < comp.size(); ++i) sol[comp[i]] = part[i];
  }
  if (!sys.is_solution(sol)) throw std::logic_error("exhaustive solver produced a non-solution");
  return sol;
}

}  // namespace cwb::bounds
