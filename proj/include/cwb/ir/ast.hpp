#pragma once

// Abstract syntax of the toy imperative language: integer variables,
// additive expressions, nondeterministic choice `*`, structured control
// flow, assertions and cache-block accesses.

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cwb::ir {

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class BinOp { Add, Sub };
enum class RelOp { Lt, Le, Eq, Ne, Ge, Gt };

inline const char* to_string(BinOp op) { return op == BinOp::Add ? "+" : "-"; }

inline const char* to_string(RelOp op) {
  switch (op) {
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
    case RelOp::Ge: return ">=";
    case RelOp::Gt: return ">";
  }
  return "?";
}

/// Complement over the integers: !(a > b) is a <= b.
inline RelOp complement(RelOp op) {
  switch (op) {
    case RelOp::Lt: return RelOp::Ge;
    case RelOp::Le: return RelOp::Gt;
    case RelOp::Eq: return RelOp::Ne;
    case RelOp::Ne: return RelOp::Eq;
    case RelOp::Ge: return RelOp::Lt;
    case RelOp::Gt: return RelOp::Le;
  }
  return op;
}

/// a op b  <=>  b mirror(op) a
inline RelOp mirror(RelOp op) {
  switch (op) {
    case RelOp::Lt: return RelOp::Gt;
    case RelOp::Le: return RelOp::Ge;
    case RelOp::Ge: return RelOp::Le;
    case RelOp::Gt: return RelOp::Lt;
    default: return op;
  }
}

inline bool holds(RelOp op, int64_t a, int64_t b) {
  switch (op) {
    case RelOp::Lt: return a < b;
    case RelOp::Le: return a <= b;
    case RelOp::Eq: return a == b;
    case RelOp::Ne: return a != b;
    case RelOp::Ge: return a >= b;
    case RelOp::Gt: return a > b;
  }
  return false;
}

/// Immutable expression tree with shared subterms.
class Expr {
 public:
  enum class Kind { Const, Var, Binary, Nondet };

  Expr() : Expr(constant(0)) {}

  static Expr constant(int64_t value);
  static Expr var(std::string name);
  static Expr binary(BinOp op, Expr lhs, Expr rhs);
  static Expr nondet();

  Kind kind() const;
  int64_t value() const;
  const std::string& name() const;
  BinOp op() const;
  const Expr& lhs() const;
  const Expr& rhs() const;

  bool is_const() const { return kind() == Kind::Const; }
  bool is_var() const { return kind() == Kind::Var; }

  /// No `*` anywhere in the tree.
  bool is_deterministic() const;
  bool mentions(const std::string& var) const;
  void collect_vars(std::vector<std::string>& out) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Kind kind;
  int64_t value = 0;
  std::string name;
  BinOp op = BinOp::Add;
  std::optional<Expr> lhs;
  std::optional<Expr> rhs;
};

inline Expr Expr::constant(int64_t value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = value;
  return Expr(std::move(n));
}

inline Expr Expr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = std::move(name);
  return Expr(std::move(n));
}

inline Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::move(n));
}

inline Expr Expr::nondet() {
  static const Expr star = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Nondet;
    return Expr(std::move(n));
  }();
  return star;
}

inline Expr::Kind Expr::kind() const { return node_->kind; }
inline int64_t Expr::value() const { return node_->value; }
inline const std::string& Expr::name() const { return node_->name; }
inline BinOp Expr::op() const { return node_->op; }
inline const Expr& Expr::lhs() const { return *node_->lhs; }
inline const Expr& Expr::rhs() const { return *node_->rhs; }

inline bool Expr::is_deterministic() const {
  switch (kind()) {
    case Kind::Nondet: return false;
    case Kind::Binary: return lhs().is_deterministic() && rhs().is_deterministic();
    default: return true;
  }
}

inline bool Expr::mentions(const std::string& v) const {
  switch (kind()) {
    case Kind::Var: return name() == v;
    case Kind::Binary: return lhs().mentions(v) || rhs().mentions(v);
    default: return false;
  }
}

inline void Expr::collect_vars(std::vector<std::string>& out) const {
  if (kind() == Kind::Var) {
    out.push_back(name());
  } else if (kind() == Kind::Binary) {
    lhs().collect_vars(out);
    rhs().collect_vars(out);
  }
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Const: return a.value() == b.value();
    case Expr::Kind::Var: return a.name() == b.name();
    case Expr::Kind::Nondet: return true;
    case Expr::Kind::Binary:
      return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

inline Expr operator+(Expr a, Expr b) { return Expr::binary(BinOp::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::binary(BinOp::Sub, std::move(a), std::move(b)); }

inline void print(std::ostream& os, const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const: os << e.value(); break;
    case Expr::Kind::Var: os << e.name(); break;
    case Expr::Kind::Nondet: os << '*'; break;
    case Expr::Kind::Binary:
      print(os, e.lhs());
      os << ' ' << to_string(e.op()) << ' ';
      // the grammar is left-associative, a compound right operand needs parentheses
      if (e.rhs().kind() == Expr::Kind::Binary) {
        os << '(';
        print(os, e.rhs());
        os << ')';
      } else {
        print(os, e.rhs());
      }
      break;
  }
}

inline std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

/// Either a comparison or the nondeterministic condition `*`.
struct Cond {
  bool nondet = true;
  Expr lhs;
  RelOp op = RelOp::Eq;
  Expr rhs;

  static Cond star() { return Cond{}; }
  static Cond compare(Expr lhs, RelOp op, Expr rhs) { return Cond{false, std::move(lhs), op, std::move(rhs)}; }

  /// Negation of `*` is `*`.
  Cond negated() const {
    if (nondet) return *this;
    return compare(lhs, complement(op), rhs);
  }

  friend bool operator==(const Cond& a, const Cond& b) {
    if (a.nondet || b.nondet) return a.nondet == b.nondet;
    return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
  }
};

inline std::string to_string(const Cond& c) {
  if (c.nondet) return "*";
  return to_string(c.lhs) + " " + to_string(c.op) + " " + to_string(c.rhs);
}

struct Stmt;
using Block = std::vector<Stmt>;

struct AssignStmt {
  std::string var;
  Expr expr;
};
struct IfStmt {
  Cond cond;
  Block then_body;
  Block else_body;
};
struct WhileStmt {
  Cond cond;
  Block body;
};
struct AssertStmt {
  Cond cond;
};
struct AccessStmt {
  std::string block;
};

struct Stmt {
  std::variant<AssignStmt, IfStmt, WhileStmt, AssertStmt, AccessStmt> node;
  SourcePos pos;
};

struct Decl {
  std::string name;
  std::optional<Expr> init;
  SourcePos pos;
};

struct Program {
  std::vector<Decl> decls;
  Block body;
};

// Structural equality, positions ignored.
bool same_structure(const Block& a, const Block& b);

inline bool same_structure(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, AssignStmt>) {
          return x.var == y.var && x.expr == y.expr;
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          return x.cond == y.cond && same_structure(x.then_body, y.then_body) &&
                 same_structure(x.else_body, y.else_body);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return x.cond == y.cond && same_structure(x.body, y.body);
        } else if constexpr (std::is_same_v<T, AssertStmt>) {
          return x.cond == y.cond;
        } else {
          return x.block == y.block;
        }
      },
      a.node);
}

inline bool same_structure(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!same_structure(a[i], b[i])) return false;
  return true;
}

inline bool same_structure(const Program& a, const Program& b) {
  if (a.decls.size() != b.decls.size()) return false;
  for (size_t i = 0; i < a.decls.size(); ++i) {
    const auto& x = a.decls[i];
    const auto& y = b.decls[i];
    if (x.name != y.name || x.init.has_value() != y.init.has_value()) return false;
    if (x.init && !(*x.init == *y.init)) return false;
  }
  return same_structure(a.body, b.body);
}

namespace detail {

inline void print_block(std::ostream& os, const Block& block, int indent);

inline void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AssignStmt>) {
          os << pad << x.var << " = " << to_string(x.expr) << ";\n";
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          os << pad << "if (" << to_string(x.cond) << ") {\n";
          print_block(os, x.then_body, indent + 1);
          os << pad << "}";
          if (!x.else_body.empty()) {
            os << " else {\n";
            print_block(os, x.else_body, indent + 1);
            os << pad << "}";
          }
          os << "\n";
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          os << pad << "while (" << to_string(x.cond) << ") {\n";
          print_block(os, x.body, indent + 1);
          os << pad << "}\n";
        } else if constexpr (std::is_same_v<T, AssertStmt>) {
          os << pad << "assert (" << to_string(x.cond) << ");\n";
        } else {
          os << pad << "access(" << x.block << ");\n";
        }
      },
      s.node);
}

inline void print_block(std::ostream& os, const Block& block, int indent) {
  for (const auto& s : block) print_stmt(os, s, indent);
}

}  // namespace detail

/// Pretty-prints in the concrete syntax accepted by parse_program.
inline std::string to_string(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.decls) {
    os << "int " << d.name;
    if (d.init) os << " = " << to_string(*d.init);
    os << ";\n";
  }
  detail::print_block(os, p.body, 0);
  return os.str();
}

}  // namespace cwb::ir
