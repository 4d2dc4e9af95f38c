#pragma once

// Bound equations of one variable over a Cfg.
//
// Each location gets two unknowns: hi_<loc>, an upper bound of v, and
// nlo_<loc>, an upper bound of -v. Keeping both in one system lets a guard
// test feasibility on the opposite bound (v <= c is feasible only when the
// lower bound is <= c), which a one-sided system cannot express. An
// unreachable location has both unknowns at -oo.
//
// Supported statements: v = c, v = v + c (and the forms that normalize to
// them), comparisons of v with a constant other than !=, comparisons between
// constants, and anything not touching data (nop, access, `*` branches).

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwb/bounds/system.hpp"
#include "cwb/intervals/interval.hpp"
#include "cwb/ir/cfg.hpp"

namespace cwb::bounds {

class UnsupportedConstruct : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExtractedSystem {
  BoundSystem system;
  std::string variable;
  std::vector<size_t> hi;   // per location
  std::vector<size_t> nlo;  // per location

  /// Interval of v at `loc` under a valuation of the system.
  Interval interval_at(const Valuation& val, ir::LocId loc) const {
    return Interval(-val.at(nlo.at(loc)), val.at(hi.at(loc)));
  }
};

namespace detail {

struct Affine {
  int64_t coef = 0;
  int64_t constant = 0;
};

inline int64_t checked(int64_t a, int64_t b, bool subtract) {
  int64_t r = 0;
  if (subtract ? __builtin_sub_overflow(a, b, &r) : __builtin_add_overflow(a, b, &r))
    throw std::overflow_error("constant arithmetic overflow");
  return r;
}

// coef * v + constant, or nullopt when `e` involves `*` or another variable.
inline std::optional<Affine> affine_in(const ir::Expr& e, const std::string& v) {
  switch (e.kind()) {
    case ir::Expr::Kind::Const: return Affine{0, e.value()};
    case ir::Expr::Kind::Var:
      if (e.name() != v) return std::nullopt;
      return Affine{1, 0};
    case ir::Expr::Kind::Nondet: return std::nullopt;
    case ir::Expr::Kind::Binary: {
      const auto a = affine_in(e.lhs(), v);
      const auto b = affine_in(e.rhs(), v);
      if (!a || !b) return std::nullopt;
      const bool sub = e.op() == ir::BinOp::Sub;
      return Affine{checked(a->coef, b->coef, sub), checked(a->constant, b->constant, sub)};
    }
  }
  return std::nullopt;
}

inline std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

struct Pair {
  BoundExpr hi;
  BoundExpr nlo;
};

inline const BoundExpr& neg_inf_expr() {
  static const BoundExpr e = BoundExpr::constant(Bound::neg_inf());
  return e;
}

// v <= c
inline Pair assume_le(const Pair& in, int64_t c) {
  const Bound k = -Bound(c) - 1;  // -lo <= ... feasible iff nlo > -c - 1
  return {BoundExpr::guard(in.nlo, k, BoundExpr::min(BoundExpr::constant(c), in.hi)), BoundExpr::guard(in.nlo, k, in.nlo)};
}

// v >= c
inline Pair assume_ge(const Pair& in, int64_t c) {
  const Bound k = Bound(c) - 1;
  return {BoundExpr::guard(in.hi, k, in.hi), BoundExpr::guard(in.hi, k, BoundExpr::min(BoundExpr::constant(-Bound(c)), in.nlo))};
}

}  // namespace detail

/// Equation system whose least solution is the least interval invariant of
/// `v`, starting from `entry` at the entry location.
inline ExtractedSystem extract_upper_bounds(const ir::Cfg& g, const std::string& v, const Interval& entry = Interval::top()) {
  using detail::Pair;
  if (std::find(g.variables.begin(), g.variables.end(), v) == g.variables.end())
    throw std::invalid_argument("unknown variable '" + v + "'");

  ExtractedSystem out;
  out.variable = v;
  BoundSystem& sys = out.system;
  std::set<std::string> used;
  for (ir::LocId loc = 0; loc < g.num_locations; ++loc) {
    std::string base = detail::sanitize(g.location_names[loc]);
    if (used.count(base)) base += "_" + std::to_string(loc);
    used.insert(base);
    out.hi.push_back(sys.add_variable("hi_" + base));
    out.nlo.push_back(sys.add_variable("nlo_" + base));
  }

  auto unsupported = [&](const ir::Edge& e, const std::string& why) {
    return UnsupportedConstruct("line " + std::to_string(e.pos.line) + ": '" + ir::label_to_string(g, e.label) +
                               "' is outside the bound-equation fragment (" + why + ")");
  };

  auto post = [&](const ir::Edge& e, const Pair& in) -> Pair {
    if (const auto* a = std::get_if<ir::AssignLabel>(&e.label)) {
      if (a->var != v) throw unsupported(e, "assigns a variable other than " + v);
      const auto f = detail::affine_in(a->expr, v);
      if (!f) throw unsupported(e, "right-hand side must be a constant or " + v + " plus a constant");
      if (f->coef == 0) {
        // v = c, reached only when the source is
        return {BoundExpr::guard(in.hi, Bound::neg_inf(), BoundExpr::constant(f->constant)),
                BoundExpr::guard(in.hi, Bound::neg_inf(), BoundExpr::constant(-Bound(f->constant)))};
      }
      if (f->coef != 1) throw unsupported(e, "coefficient of " + v + " must be 1");
      return {BoundExpr::add(in.hi, f->constant), BoundExpr::add(in.nlo, (-Bound(f->constant)).value())};
    }
    const ir::Cond* cond = nullptr;
    if (const auto* a = std::get_if<ir::AssumeLabel>(&e.label)) cond = &a->cond;
    if (const auto* a = std::get_if<ir::AssertLabel>(&e.label)) cond = &a->cond;
    if (!cond || cond->nondet) return in;
    const auto f = detail::affine_in(cond->lhs - cond->rhs, v);
    if (!f) throw unsupported(e, "conditions must compare " + v + " with a constant");
    // coef * v + constant  op  0
    if (f->coef == 0) {
      if (ir::holds(cond->op, f->constant, 0)) return in;
      return {detail::neg_inf_expr(), detail::neg_inf_expr()};
    }
    if (f->coef != 1 && f->coef != -1) throw unsupported(e, "coefficient of " + v + " must be 1 or -1");
    ir::RelOp op = cond->op;
    int64_t c = (-Bound(f->constant)).value();
    if (f->coef == -1) {
      op = ir::mirror(op);  // -v + d op 0  <=>  v mirror(op) d
      c = f->constant;
    }
    switch (op) {
      case ir::RelOp::Le: return detail::assume_le(in, c);
      case ir::RelOp::Lt: return detail::assume_le(in, (Bound(c) - 1).value());
      case ir::RelOp::Ge: return detail::assume_ge(in, c);
      case ir::RelOp::Gt: return detail::assume_ge(in, (Bound(c) + 1).value());
      case ir::RelOp::Eq: return detail::assume_ge(detail::assume_le(in, c), c);
      case ir::RelOp::Ne: throw unsupported(e, "!= is not expressible");
    }
    return in;
  };

  std::vector<std::optional<BoundExpr>> hi(g.num_locations), nlo(g.num_locations);
  auto contribute = [&](ir::LocId loc, const Pair& p) {
    hi[loc] = hi[loc] ? BoundExpr::max(*hi[loc], p.hi) : p.hi;
    nlo[loc] = nlo[loc] ? BoundExpr::max(*nlo[loc], p.nlo) : p.nlo;
  };
  if (entry.is_bottom()) {
    contribute(g.entry, {detail::neg_inf_expr(), detail::neg_inf_expr()});
  } else {
    contribute(g.entry, {BoundExpr::constant(entry.hi()), BoundExpr::constant(-entry.lo())});
  }
  for (const auto& e : g.edges)
    contribute(e.dst, post(e, {BoundExpr::var(out.hi[e.src]), BoundExpr::var(out.nlo[e.src])}));
  for (ir::LocId loc = 0; loc < g.num_locations; ++loc) {
    sys.rhs[out.hi[loc]] = hi[loc] ? simplify(*hi[loc]) : detail::neg_inf_expr();
    sys.rhs[out.nlo[loc]] = nlo[loc] ? simplify(*nlo[loc]) : detail::neg_inf_expr();
  }
  return out;
}

/// Substitutes away every variable not in `keep`. The kept variables must cut
/// every dependency cycle (loop heads do for structured programs). The result
/// has the kept variables only, in their original order.
inline BoundSystem inline_into(const BoundSystem& sys, const std::vector<size_t>& keep) {
  std::vector<bool> kept(sys.size(), false);
  for (size_t k : keep) kept.at(k) = true;
  std::vector<size_t> new_index(sys.size(), 0);
  BoundSystem out;
  for (size_t i = 0; i < sys.size(); ++i)
    if (kept[i]) new_index[i] = out.add_variable(sys.names[i]);

  std::vector<std::optional<BoundExpr>> memo(sys.size());
  std::vector<bool> active(sys.size(), false);
  auto subst = [&](auto&& self, const BoundExpr& e) -> BoundExpr {
    switch (e.kind()) {
      case BoundExpr::Kind::Const: return e;
      case BoundExpr::Kind::Var: {
        const size_t j = e.var_index();
        if (kept[j]) return BoundExpr::var(new_index[j]);
        if (memo[j]) return *memo[j];
        if (active[j]) throw std::invalid_argument("kept variables do not cut the cycle through '" + sys.names[j] + "'");
        active[j] = true;
        memo[j] = self(self, sys.rhs[j]);
        active[j] = false;
        return *memo[j];
      }
      case BoundExpr::Kind::Add: return BoundExpr::add(self(self, e.lhs()), e.offset());
      case BoundExpr::Kind::Min: return BoundExpr::min(self(self, e.lhs()), self(self, e.rhs()));
      case BoundExpr::Kind::Max: return BoundExpr::max(self(self, e.lhs()), self(self, e.rhs()));
      case BoundExpr::Kind::Guard: return BoundExpr::guard(self(self, e.test()), e.threshold(), self(self, e.guarded()));
    }
    return e;
  };
  for (size_t i = 0; i < sys.size(); ++i)
    if (kept[i]) out.rhs[new_index[i]] = simplify(subst(subst, sys.rhs[i]));
  return out;
}

}  // namespace cwb::bounds
