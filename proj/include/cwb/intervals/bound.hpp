#pragma once

// Mathematical integers extended with -oo and +oo.

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cwb {

class Bound {
 public:
  enum class Kind : int8_t { NegInf = -1, Finite = 0, PosInf = 1 };

  constexpr Bound() = default;
  constexpr Bound(int64_t v) : kind_(Kind::Finite), value_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr Bound neg_inf() { return Bound(Kind::NegInf); }
  static constexpr Bound pos_inf() { return Bound(Kind::PosInf); }

  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  constexpr Kind kind() const { return kind_; }

  int64_t value() const {
    if (!is_finite()) throw std::logic_error("value() of an infinite bound");
    return value_;
  }

  /// Infinities absorb finite shifts.
  Bound operator+(int64_t c) const {
    if (!is_finite()) return *this;
    int64_t r = 0;
    if (__builtin_add_overflow(value_, c, &r)) throw std::overflow_error("bound arithmetic overflow");
    return Bound(r);
  }
  Bound operator-(int64_t c) const {
    if (c == std::numeric_limits<int64_t>::min()) throw std::overflow_error("bound arithmetic overflow");
    return *this + (-c);
  }

  /// Sum of two bounds; -oo + +oo has no meaning and throws.
  Bound operator+(const Bound& o) const {
    if (is_finite() && o.is_finite()) return *this + o.value_;
    if ((is_neg_inf() && o.is_pos_inf()) || (is_pos_inf() && o.is_neg_inf()))
      throw std::logic_error("-oo + +oo is undefined");
    return is_finite() ? o : *this;
  }

  Bound operator-() const {
    switch (kind_) {
      case Kind::NegInf: return pos_inf();
      case Kind::PosInf: return neg_inf();
      default:
        if (value_ == std::numeric_limits<int64_t>::min()) throw std::overflow_error("bound arithmetic overflow");
        return Bound(-value_);
    }
  }

  friend constexpr bool operator==(const Bound& a, const Bound& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }
  friend constexpr std::strong_ordering operator<=>(const Bound& a, const Bound& b) {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
    if (a.kind_ != Kind::Finite) return std::strong_ordering::equal;
    return a.value_ <=> b.value_;
  }

  std::string str() const {
    if (is_neg_inf()) return "-oo";
    if (is_pos_inf()) return "+oo";
    return std::to_string(value_);
  }

  /// Accepts an integer literal, "-oo", "+oo" or "oo".
  static Bound parse(const std::string& s) {
    if (s == "-oo") return neg_inf();
    if (s == "+oo" || s == "oo") return pos_inf();
    size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad bound '" + s + "'");
    return Bound(static_cast<int64_t>(v));
  }

  friend std::ostream& operator<<(std::ostream& os, const Bound& b) { return os << b.str(); }

 private:
  constexpr explicit Bound(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Finite;
  int64_t value_ = 0;
};

inline Bound min(const Bound& a, const Bound& b) { return b < a ? b : a; }
inline Bound max(const Bound& a, const Bound& b) { return a < b ? b : a; }

}  // namespace cwb
