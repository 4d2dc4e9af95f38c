#pragma once

// Monotone equation systems over Z extended with -oo and +oo, built from
// constants, variables, +c, min, max and guards.
//
// Text form, one equation per line:
//   h = min(max(min(42, h + 1), h), 999)
//   x = guard(h > -oo, 0)
// guard(t > k, e) is e when t > k and -oo otherwise.

#include <cctype>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwb/intervals/bound.hpp"

namespace cwb::bounds {

class BoundExpr {
 public:
  enum class Kind { Const, Var, Add, Min, Max, Guard };

  static BoundExpr constant(Bound b) {
    Node n;
    n.kind = Kind::Const;
    n.value = b;
    return make(std::move(n));
  }
  static BoundExpr var(size_t index) {
    Node n;
    n.kind = Kind::Var;
    n.var = index;
    return make(std::move(n));
  }
  /// Infinite constants absorb the shift and nested shifts are merged.
  static BoundExpr add(const BoundExpr& e, int64_t c) {
    if (c == 0) return e;
    if (e.kind() == Kind::Const) return constant(e.value() + c);
    if (e.kind() == Kind::Add) return add(e.lhs(), checked_sum(e.offset(), c));
    Node n;
    n.kind = Kind::Add;
    n.offset = c;
    n.a = e.node_;
    return make(std::move(n));
  }
  static BoundExpr min(const BoundExpr& a, const BoundExpr& b) { return binary(Kind::Min, a, b); }
  static BoundExpr max(const BoundExpr& a, const BoundExpr& b) { return binary(Kind::Max, a, b); }
  /// `value` when test > threshold, -oo otherwise. The threshold is finite or -oo.
  static BoundExpr guard(const BoundExpr& test, Bound threshold, const BoundExpr& value) {
    if (threshold.is_pos_inf()) throw std::invalid_argument("guard threshold cannot be +oo");
    Node n;
    n.kind = Kind::Guard;
    n.value = threshold;
    n.a = test.node_;
    n.b = value.node_;
    return make(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  const Bound& value() const { return node_->value; }  // Const value or Guard threshold
  const Bound& threshold() const { return node_->value; }
  size_t var_index() const { return node_->var; }
  int64_t offset() const { return node_->offset; }
  BoundExpr lhs() const { return BoundExpr(node_->a); }  // Add operand, Min/Max left, Guard test
  BoundExpr rhs() const { return BoundExpr(node_->b); }  // Min/Max right, Guard value
  BoundExpr test() const { return lhs(); }
  BoundExpr guarded() const { return rhs(); }

  /// Min, Max and Guard nodes are the points where a policy chooses.
  bool is_choice() const { return kind() == Kind::Min || kind() == Kind::Max || kind() == Kind::Guard; }

  /// Stable identity of the node, used to key policies.
  const void* id() const { return node_.get(); }

  friend bool operator==(const BoundExpr& x, const BoundExpr& y) {
    if (x.node_ == y.node_) return true;
    if (x.kind() != y.kind()) return false;
    switch (x.kind()) {
      case Kind::Const: return x.value() == y.value();
      case Kind::Var: return x.var_index() == y.var_index();
      case Kind::Add: return x.offset() == y.offset() && x.lhs() == y.lhs();
      case Kind::Min:
      case Kind::Max: return x.lhs() == y.lhs() && x.rhs() == y.rhs();
      case Kind::Guard: return x.threshold() == y.threshold() && x.test() == y.test() && x.guarded() == y.guarded();
    }
    return false;
  }

 private:
  struct Node {
    Kind kind = Kind::Const;
    Bound value;
    size_t var = 0;
    int64_t offset = 0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };

  explicit BoundExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static BoundExpr make(Node n) { return BoundExpr(std::make_shared<const Node>(std::move(n))); }
  static BoundExpr binary(Kind k, const BoundExpr& a, const BoundExpr& b) {
    Node n;
    n.kind = k;
    n.a = a.node_;
    n.b = b.node_;
    return make(std::move(n));
  }
  static int64_t checked_sum(int64_t a, int64_t b) {
    int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("bound arithmetic overflow");
    return r;
  }

  std::shared_ptr<const Node> node_;
};

using Valuation = std::vector<Bound>;

inline Bound eval(const BoundExpr& e, const Valuation& val) {
  switch (e.kind()) {
    case BoundExpr::Kind::Const: return e.value();
    case BoundExpr::Kind::Var: return val.at(e.var_index());
    case BoundExpr::Kind::Add: return eval(e.lhs(), val) + e.offset();
    case BoundExpr::Kind::Min: return min(eval(e.lhs(), val), eval(e.rhs(), val));
    case BoundExpr::Kind::Max: return max(eval(e.lhs(), val), eval(e.rhs(), val));
    case BoundExpr::Kind::Guard:
      return eval(e.test(), val) > e.threshold() ? eval(e.guarded(), val) : Bound::neg_inf();
  }
  return Bound::neg_inf();
}

inline bool mentions_var(const BoundExpr& e) {
  switch (e.kind()) {
    case BoundExpr::Kind::Const: return false;
    case BoundExpr::Kind::Var: return true;
    case BoundExpr::Kind::Add: return mentions_var(e.lhs());
    default: return mentions_var(e.lhs()) || mentions_var(e.rhs());
  }
}

inline void collect_vars(const BoundExpr& e, std::vector<size_t>& out) {
  switch (e.kind()) {
    case BoundExpr::Kind::Const: return;
    case BoundExpr::Kind::Var: out.push_back(e.var_index()); return;
    case BoundExpr::Kind::Add: collect_vars(e.lhs(), out); return;
    default:
      collect_vars(e.lhs(), out);
      collect_vars(e.rhs(), out);
  }
}

/// Pre-order list of Min/Max/Guard nodes.
inline void collect_choices(const BoundExpr& e, std::vector<BoundExpr>& out) {
  switch (e.kind()) {
    case BoundExpr::Kind::Const:
    case BoundExpr::Kind::Var: return;
    case BoundExpr::Kind::Add: collect_choices(e.lhs(), out); return;
    default:
      out.push_back(e);
      collect_choices(e.lhs(), out);
      collect_choices(e.rhs(), out);
  }
}

/// Constant folding and the lattice identities of min/max with infinities.
inline BoundExpr simplify(const BoundExpr& e) {
  using K = BoundExpr::Kind;
  switch (e.kind()) {
    case K::Const:
    case K::Var: return e;
    case K::Add: return BoundExpr::add(simplify(e.lhs()), e.offset());
    case K::Min:
    case K::Max: {
      const BoundExpr a = simplify(e.lhs());
      const BoundExpr b = simplify(e.rhs());
      const bool is_min = e.kind() == K::Min;
      if (a.kind() == K::Const && b.kind() == K::Const)
        return BoundExpr::constant(is_min ? min(a.value(), b.value()) : max(a.value(), b.value()));
      const Bound absorbing = is_min ? Bound::neg_inf() : Bound::pos_inf();
      const Bound neutral = is_min ? Bound::pos_inf() : Bound::neg_inf();
      for (const auto* x : {&a, &b})
        if (x->kind() == K::Const && x->value() == absorbing) return *x;
      if (a.kind() == K::Const && a.value() == neutral) return b;
      if (b.kind() == K::Const && b.value() == neutral) return a;
      if (a == b) return a;
      return is_min ? BoundExpr::min(a, b) : BoundExpr::max(a, b);
    }
    case K::Guard: {
      const BoundExpr t = simplify(e.test());
      const BoundExpr v = simplify(e.guarded());
      if (t.kind() == K::Const) return t.value() > e.threshold() ? v : BoundExpr::constant(Bound::neg_inf());
      if (v.kind() == K::Const && v.value().is_neg_inf()) return v;
      return BoundExpr::guard(t, e.threshold(), v);
    }
  }
  return e;
}

struct BoundSystem {
  std::vector<std::string> names;
  std::vector<BoundExpr> rhs;

  size_t size() const { return names.size(); }

  size_t add_variable(const std::string& name, BoundExpr def = BoundExpr::constant(Bound::neg_inf())) {
    if (index_.count(name)) throw std::invalid_argument("bound variable '" + name + "' defined twice");
    index_[name] = names.size();
    names.push_back(name);
    rhs.push_back(std::move(def));
    return names.size() - 1;
  }

  size_t index_of(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown bound variable '" + name + "'");
    return it->second;
  }
  bool has(const std::string& name) const { return index_.count(name) != 0; }

  Valuation apply(const Valuation& val) const {
    Valuation out;
    out.reserve(size());
    for (const auto& e : rhs) out.push_back(eval(e, val));
    return out;
  }

  bool is_solution(const Valuation& val) const { return val.size() == size() && apply(val) == val; }

  size_t count_choices() const {
    std::vector<BoundExpr> nodes;
    for (const auto& e : rhs) collect_choices(e, nodes);
    return nodes.size();
  }

 private:
  std::map<std::string, size_t> index_;
};

inline void print(std::ostream& os, const BoundSystem& sys, const BoundExpr& e) {
  switch (e.kind()) {
    case BoundExpr::Kind::Const: os << e.value().str(); break;
    case BoundExpr::Kind::Var: os << sys.names.at(e.var_index()); break;
    case BoundExpr::Kind::Add:
      print(os, sys, e.lhs());
      if (e.offset() < 0) {
        os << " - " << (-Bound(e.offset())).str();
      } else {
        os << " + " << e.offset();
      }
      break;
    case BoundExpr::Kind::Min:
    case BoundExpr::Kind::Max:
      os << (e.kind() == BoundExpr::Kind::Min ? "min(" : "max(");
      print(os, sys, e.lhs());
      os << ", ";
      print(os, sys, e.rhs());
      os << ')';
      break;
    case BoundExpr::Kind::Guard:
      os << "guard(";
      print(os, sys, e.test());
      os << " > " << e.threshold().str() << ", ";
      print(os, sys, e.guarded());
      os << ')';
      break;
  }
}

inline std::string to_string(const BoundSystem& sys, const BoundExpr& e) {
  std::ostringstream os;
  print(os, sys, e);
  return os.str();
}

inline std::string dump(const BoundSystem& sys) {
  std::ostringstream os;
  for (size_t i = 0; i < sys.size(); ++i) {
    os << sys.names[i] << " = ";
    print(os, sys, sys.rhs[i]);
    os << '\n';
  }
  return os.str();
}

inline std::string to_string(const BoundSystem& sys, const Valuation& val) {
  std::string out;
  for (size_t i = 0; i < sys.size(); ++i) out += sys.names[i] + " = " + val.at(i).str() + "\n";
  return out;
}

class SystemParseError : public std::runtime_error {
 public:
  SystemParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

class SystemLineParser {
 public:
  SystemLineParser(std::string text, int line, const BoundSystem& sys) : s_(std::move(text)), line_(line), sys_(sys) {}

  BoundExpr parse_all() {
    BoundExpr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SystemParseError(line_, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip_ws();
    const size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  int64_t integer() {
    skip_ws();
    const size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    try {
      return std::stoll(s_.substr(start, pos_ - start));
    } catch (const std::out_of_range&) {
      fail("integer out of range");
    }
  }
  // integer, -oo or +oo, with an optional sign
  Bound signed_bound() {
    skip_ws();
    bool neg = false;
    if (eat('-')) {
      neg = true;
    } else {
      eat('+');
    }
    skip_ws();
    if (s_.compare(pos_, 2, "oo") == 0) {
      pos_ += 2;
      return neg ? Bound::neg_inf() : Bound::pos_inf();
    }
    const int64_t v = integer();
    return neg ? Bound(-v) : Bound(v);
  }

  BoundExpr expr() {
    BoundExpr e = atom();
    for (;;) {
      if (eat('+')) {
        e = BoundExpr::add(e, integer());
      } else if (eat('-')) {
        e = BoundExpr::add(e, -integer());
      } else {
        return e;
      }
    }
  }

  BoundExpr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of line");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      BoundExpr e = expr();
      expect(')');
      return e;
    }
    if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) return BoundExpr::constant(signed_bound());
    const std::string name = ident();
    if (name.empty()) fail(std::string("unexpected '") + c + "'");
    if (name == "min" || name == "max") {
      expect('(');
      BoundExpr a = expr();
      expect(',');
      BoundExpr b = expr();
      expect(')');
      return name == "min" ? BoundExpr::min(a, b) : BoundExpr::max(a, b);
    }
    if (name == "guard") {
      expect('(');
      BoundExpr t = expr();
      expect('>');
      const Bound k = signed_bound();
      if (k.is_pos_inf()) fail("guard threshold cannot be +oo");
      expect(',');
      BoundExpr v = expr();
      expect(')');
      return BoundExpr::guard(t, k, v);
    }
    if (!sys_.has(name)) fail("undefined variable '" + name + "'");
    return BoundExpr::var(sys_.index_of(name));
  }

  std::string s_;
  size_t pos_ = 0;
  int line_;
  const BoundSystem& sys_;
};

}  // namespace detail

/// Reads the text form written by dump(). Blank lines and `#` comments are
/// skipped; every referenced variable must have its own equation.
inline BoundSystem parse_system(const std::string& text) {
  struct Line {
    int number;
    std::string rhs;
  };
  std::vector<Line> lines;
  BoundSystem sys;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw SystemParseError(number, "expected 'name = expression'");
    std::string name = raw.substr(0, eq);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (name.empty()) throw SystemParseError(number, "missing variable name");
    for (char c : name)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') throw SystemParseError(number, "bad variable name '" + name + "'");
    if (name == "min" || name == "max" || name == "guard" || name == "oo")
      throw SystemParseError(number, "reserved name '" + name + "'");
    if (sys.has(name)) throw SystemParseError(number, "variable '" + name + "' defined twice");
    sys.add_variable(name);
    lines.push_back({number, raw.substr(eq + 1)});
  }
  for (size_t i = 0; i < lines.size(); ++i)
    sys.rhs[i] = detail::SystemLineParser(lines[i].rhs, lines[i].number, sys).parse_all();
  return sys;
}

}  // namespace cwb::bounds
