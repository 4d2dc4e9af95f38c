#pragma once

// Chronological rewriting systems over integer variables and linear
// simplification of expressions.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cwb/intervals/env.hpp"
#include "cwb/ir/ast.hpp"

namespace cwb::symrewrite {

/// sum(coeff * var) + constant, no zero coefficients.
struct LinearForm {
  std::map<std::string, int64_t> coeffs;
  int64_t constant = 0;

  static LinearForm of_constant(int64_t c) { return {{}, c}; }
  static LinearForm of_var(const std::string& v) { return {{{v, 1}}, 0}; }

  bool is_constant() const { return coeffs.empty(); }
  bool mentions(const std::string& v) const { return coeffs.count(v) != 0; }

  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

namespace detail {

inline int64_t add_checked(int64_t a, int64_t b) {
  int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("linear form overflow");
  return r;
}

inline int64_t mul_checked(int64_t a, int64_t b) {
  int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("linear form overflow");
  return r;
}

}  // namespace detail

/// a + k * b
inline LinearForm add_scaled(LinearForm a, const LinearForm& b, int64_t k) {
  for (const auto& [v, c] : b.coeffs) {
    const int64_t sum = detail::add_checked(a.coeffs[v], detail::mul_checked(k, c));
    if (sum == 0) {
      a.coeffs.erase(v);
    } else {
      a.coeffs[v] = sum;
    }
  }
  a.constant = detail::add_checked(a.constant, detail::mul_checked(k, b.constant));
  return a;
}

/// Linear form of a deterministic expression; nullopt when it contains `*`.
inline std::optional<LinearForm> linearize(const ir::Expr& e) {
  switch (e.kind()) {
    case ir::Expr::Kind::Const: return LinearForm::of_constant(e.value());
    case ir::Expr::Kind::Var: return LinearForm::of_var(e.name());
    case ir::Expr::Kind::Nondet: return std::nullopt;
    case ir::Expr::Kind::Binary: {
      auto a = linearize(e.lhs());
      const auto b = linearize(e.rhs());
      if (!a || !b) return std::nullopt;
      return add_scaled(std::move(*a), *b, e.op() == ir::BinOp::Add ? 1 : -1);
    }
  }
  return std::nullopt;
}

/// Expression with the same value; a coefficient k is written as k repeated
/// additions of the variable.
inline ir::Expr to_expr(const LinearForm& f) {
  std::optional<ir::Expr> out;
  auto push = [&](ir::Expr term, bool negative) {
    if (!out) {
      out = negative ? ir::Expr::constant(0) - term : term;
    } else {
      out = negative ? *out - term : *out + term;
    }
  };
  for (const auto& [v, c] : f.coeffs) {
    const bool neg = c < 0;
    for (int64_t i = 0; i < (neg ? -c : c); ++i) push(ir::Expr::var(v), neg);
  }
  if (!out) return ir::Expr::constant(f.constant);
  if (f.constant > 0) return *out + ir::Expr::constant(f.constant);
  if (f.constant < 0) return *out - ir::Expr::constant(-f.constant);
  return *out;
}

inline std::string to_string(const LinearForm& f) {
  std::string out;
  for (const auto& [v, c] : f.coeffs) {
    const int64_t mag = c < 0 ? -c : c;
    if (out.empty()) {
      out += c < 0 ? "-" : "";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    out += (mag == 1 ? "" : std::to_string(mag) + "*") + v;
  }
  if (out.empty()) return std::to_string(f.constant);
  if (f.constant > 0) out += " + " + std::to_string(f.constant);
  if (f.constant < 0) out += " - " + std::to_string(-f.constant);
  return out;
}

struct Rule {
  std::string var;
  LinearForm rhs;
  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Ordered rules var -> linear form. A rule never mentions its own variable
/// and only refers to variables whose rules are older, so rewriting
/// terminates.
class RewriteMap {
 public:
  const std::vector<Rule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

  const LinearForm* find(const std::string& v) const {
    for (const auto& r : rules_)
      if (r.var == v) return &r.rhs;
    return nullptr;
  }

  /// Drops the rules mentioning `v` on either side.
  void forget(const std::string& v) {
    std::erase_if(rules_, [&](const Rule& r) { return r.var == v || r.rhs.mentions(v); });
  }

  void append(Rule r) { rules_.push_back(std::move(r)); }

  /// Common identical rules, in this map's order.
  RewriteMap join(const RewriteMap& o) const {
    RewriteMap out;
    for (const auto& r : rules_)
      if (std::find(o.rules_.begin(), o.rules_.end(), r) != o.rules_.end()) out.rules_.push_back(r);
    return out;
  }

  friend bool operator==(const RewriteMap&, const RewriteMap&) = default;

 private:
  std::vector<Rule> rules_;
};

inline std::string to_string(const RewriteMap& m) {
  std::string out = "{";
  for (size_t i = 0; i < m.rules().size(); ++i) {
    if (i) out += ", ";
    out += m.rules()[i].var + " -> " + to_string(m.rules()[i].rhs);
  }
  return out + "}";
}

inline constexpr size_t kUnboundedRounds = std::numeric_limits<size_t>::max();

/// Substitutes every variable that has a rule, `rounds` times or until
/// nothing changes.
inline LinearForm rewrite(const RewriteMap& m, LinearForm f, size_t rounds = kUnboundedRounds) {
  for (size_t r = 0; r < rounds; ++r) {
    LinearForm next = LinearForm::of_constant(f.constant);
    bool changed = false;
    for (const auto& [v, c] : f.coeffs) {
      if (const LinearForm* rhs = m.find(v)) {
        next = add_scaled(std::move(next), *rhs, c);
        changed = true;
      } else {
        next = add_scaled(std::move(next), LinearForm::of_var(v), c);
      }
    }
    if (!changed) break;
    f = std::move(next);
  }
  return f;
}

/// Rewritten and linearly simplified `e`; nullopt when `e` contains `*`.
inline std::optional<LinearForm> rewrite_and_simplify(const RewriteMap& m, const ir::Expr& e,
                                                      size_t rounds = kUnboundedRounds) {
  const auto f = linearize(e);
  if (!f) return std::nullopt;
  return rewrite(m, *f, rounds);
}

/// After `v = e`: the old rules about v are dead; v -> e (rewritten through
/// the old map, `rounds` times) is appended when e is deterministic and the
/// result does not refer to v itself.
inline RewriteMap record(RewriteMap m, const std::string& v, const ir::Expr& e, size_t rounds = kUnboundedRounds) {
  const auto rhs = rewrite_and_simplify(m, e, rounds);
  m.forget(v);
  if (rhs && !rhs->mentions(v)) m.append({v, *rhs});
  return m;
}

inline Interval scale(const Interval& i, int64_t k) {
  if (i.is_bottom()) return i;
  if (k == 0) return Interval::point(0);
  auto mul = [k](const Bound& b) -> Bound {
    if (b.is_finite()) return Bound(detail::mul_checked(b.value(), k));
    return k > 0 ? b : -b;
  };
  return k > 0 ? Interval(mul(i.lo()), mul(i.hi())) : Interval(mul(i.hi()), mul(i.lo()));
}

inline Interval eval(const LinearForm& f, const AbstractEnv& env) {
  if (env.is_unreachable()) return Interval::bottom();
  Interval acc = Interval::point(f.constant);
  for (const auto& [v, c] : f.coeffs) acc = acc + scale(env.get(v), c);
  return acc;
}

}  // namespace cwb::symrewrite
