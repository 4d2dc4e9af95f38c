#pragma once

// Recursive-descent parser for the toy language.
//
//   program := decl* stmt*
//   decl    := "int" ident ("=" expr)? ("," ident ("=" expr)?)* ";"
//   stmt    := ident "=" expr ";"
//            | "if" "(" cond ")" block ("else" block)?
//            | "while" "(" cond ")" block
//            | "assert" "(" cond ")" ";"
//            | "access" "(" ident ")" ";"
//   block   := "{" stmt* "}" | stmt
//   cond    := expr relop expr | "*"
//   expr    := term (("+" | "-") term)*
//   term    := "-"? integer | ident | "*" | "(" expr ")"
//
// Comments run from `#` or `//` to end of line.

#include <cctype>
#include <charconv>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cwb/ir/ast.hpp"

namespace cwb::ir {

class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& what)
      : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

namespace detail {

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const SourcePos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    static constexpr std::string_view two[] = {"==", "!=", "<=", ">="};
    bool matched = false;
    for (auto op : two) {
      if (src.substr(i, 2) == op) {
        out.push_back({Tok::Punct, std::string(op), pos});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("=<>+-*(){};,").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), pos});
      advance(1);
      continue;
    }
    throw ParseError(pos, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", SourcePos{line, col}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Program program() {
    Program p;
    while (is_ident("int")) parse_decl(p);
    while (peek().kind != Tok::End) p.body.push_back(statement());
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  bool is_punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool is_ident(std::string_view p) const { return peek().kind == Tok::Ident && peek().text == p; }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(peek().pos, "expected " + expected + " but found " + describe(peek()));
  }

  void expect(std::string_view p) {
    if (!is_punct(p)) fail("'" + std::string(p) + "'");
    ++pos_;
  }

  static bool is_keyword(const std::string& s) {
    return s == "int" || s == "if" || s == "else" || s == "while" || s == "assert" || s == "access";
  }

  std::string identifier() {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("identifier");
    return next().text;
  }

  void check_declared(const Token& t) const {
    if (!declared_.count(t.text)) throw ParseError(t.pos, "use of undeclared variable '" + t.text + "'");
  }

  void parse_decl(Program& p) {
    ++pos_;  // int
    for (;;) {
      const SourcePos at = peek().pos;
      const std::string name = identifier();
      if (declared_.count(name)) throw ParseError(at, "redeclaration of '" + name + "'");
      std::optional<Expr> init;
      if (is_punct("=")) {
        ++pos_;
        init = expr();
      }
      declared_.insert(name);
      p.decls.push_back(Decl{name, std::move(init), at});
      if (is_punct(",")) {
        ++pos_;
        continue;
      }
      expect(";");
      return;
    }
  }

  Block block() {
    Block b;
    if (is_punct("{")) {
      ++pos_;
      while (!is_punct("}")) {
        if (peek().kind == Tok::End) fail("'}'");
        b.push_back(statement());
      }
      ++pos_;
    } else {
      b.push_back(statement());
    }
    return b;
  }

  Cond paren_cond(bool allow_star) {
    expect("(");
    Cond c = cond(allow_star);
    expect(")");
    return c;
  }

  Stmt statement() {
    const SourcePos at = peek().pos;
    if (is_ident("if")) {
      ++pos_;
      IfStmt s{paren_cond(true), {}, {}};
      s.then_body = block();
      if (is_ident("else")) {
        ++pos_;
        s.else_body = block();
      }
      return Stmt{std::move(s), at};
    }
    if (is_ident("while")) {
      ++pos_;
      WhileStmt s{paren_cond(true), {}};
      s.body = block();
      return Stmt{std::move(s), at};
    }
    if (is_ident("assert")) {
      ++pos_;
      AssertStmt s{paren_cond(false)};
      expect(";");
      return Stmt{std::move(s), at};
    }
    if (is_ident("access")) {
      ++pos_;
      expect("(");
      AccessStmt s{identifier()};
      expect(")");
      expect(";");
      return Stmt{std::move(s), at};
    }
    if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
      const Token t = next();
      expect("=");
      AssignStmt s{t.text, expr()};
      expect(";");
      check_declared(t);
      return Stmt{std::move(s), at};
    }
    fail("statement");
  }

  Cond cond(bool allow_star) {
    if (is_punct("*") && toks_[pos_ + 1].kind == Tok::Punct && toks_[pos_ + 1].text == ")") {
      if (!allow_star) throw ParseError(peek().pos, "assert condition cannot be '*'");
      ++pos_;
      return Cond::star();
    }
    Expr lhs = expr();
    if (peek().kind != Tok::Punct) fail("comparison operator");
    RelOp op;
    const std::string& t = peek().text;
    if (t == "<") op = RelOp::Lt;
    else if (t == "<=") op = RelOp::Le;
    else if (t == "==") op = RelOp::Eq;
    else if (t == "!=") op = RelOp::Ne;
    else if (t == ">=") op = RelOp::Ge;
    else if (t == ">") op = RelOp::Gt;
    else fail("comparison operator");
    ++pos_;
    Expr rhs = expr();
    return Cond::compare(std::move(lhs), op, std::move(rhs));
  }

  Expr expr() {
    Expr e = term();
    while (is_punct("+") || is_punct("-")) {
      const BinOp op = next().text == "+" ? BinOp::Add : BinOp::Sub;
      e = Expr::binary(op, std::move(e), term());
    }
    return e;
  }

  int64_t integer(bool negative) {
    const Token& t = peek();
    if (t.kind != Tok::Int) fail("integer");
    int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) throw ParseError(t.pos, "integer literal out of range");
    ++pos_;
    return negative ? -v : v;
  }

  Expr term() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return Expr::constant(integer(false));
    if (t.kind == Tok::Ident && !is_keyword(t.text)) {
      check_declared(t);
      return Expr::var(next().text);
    }
    if (is_punct("*")) {
      ++pos_;
      return Expr::nondet();
    }
    if (is_punct("-")) {
      ++pos_;
      return Expr::constant(integer(true));
    }
    if (is_punct("(")) {
      ++pos_;
      Expr e = expr();
      expect(")");
      return e;
    }
    fail("expression");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::set<std::string> declared_;
};

}  // namespace detail

/// Throws ParseError on syntax errors and on use of undeclared variables.
inline Program parse_program(std::string_view text) { return detail::Parser(text).program(); }

}  // namespace cwb::ir
