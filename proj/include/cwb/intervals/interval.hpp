#pragma once

#include <optional>
#include <string>

#include "cwb/intervals/bound.hpp"

namespace cwb {

/// Integer interval [lo, hi] with infinite endpoints, or the empty interval.
class Interval {
 public:
  /// The whole line.
  Interval() = default;
  Interval(Bound lo, Bound hi) : lo_(lo), hi_(hi) { normalize(); }

  static Interval top() { return {}; }
  static Interval bottom() {
    Interval i;
    i.empty_ = true;
    return i;
  }
  static Interval point(int64_t c) { return {Bound(c), Bound(c)}; }
  static Interval at_least(Bound lo) { return {lo, Bound::pos_inf()}; }
  static Interval at_most(Bound hi) { return {Bound::neg_inf(), hi}; }

  bool is_bottom() const { return empty_; }
  bool is_top() const { return !empty_ && lo_.is_neg_inf() && hi_.is_pos_inf(); }
  const Bound& lo() const { return lo_; }
  const Bound& hi() const { return hi_; }

  std::optional<int64_t> singleton() const {
    if (!empty_ && lo_.is_finite() && lo_ == hi_) return lo_.value();
    return std::nullopt;
  }

  bool contains(int64_t v) const { return !empty_ && lo_ <= Bound(v) && Bound(v) <= hi_; }

  /// Inclusion.
  bool leq(const Interval& o) const {
    if (empty_) return true;
    if (o.empty_) return false;
    return o.lo_ <= lo_ && hi_ <= o.hi_;
  }

  Interval join(const Interval& o) const {
    if (empty_) return o;
    if (o.empty_) return *this;
    return {min(lo_, o.lo_), max(hi_, o.hi_)};
  }

  Interval meet(const Interval& o) const {
    if (empty_ || o.empty_) return bottom();
    return {max(lo_, o.lo_), min(hi_, o.hi_)};
  }

  /// Unstable bounds jump to infinity.
  Interval widen(const Interval& next) const {
    if (empty_) return next;
    if (next.empty_) return *this;
    return {next.lo_ < lo_ ? Bound::neg_inf() : lo_, hi_ < next.hi_ ? Bound::pos_inf() : hi_};
  }

  Interval operator+(const Interval& o) const {
    if (empty_ || o.empty_) return bottom();
    return {lo_ + o.lo_, hi_ + o.hi_};
  }
  Interval operator-() const {
    if (empty_) return bottom();
    return {-hi_, -lo_};
  }
  Interval operator-(const Interval& o) const { return *this + (-o); }

  friend bool operator==(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  std::string str() const {
    if (empty_) return "bot";
    return "[" + lo_.str() + ", " + hi_.str() + "]";
  }

 private:
  void normalize() {
    if (hi_ < lo_ || lo_.is_pos_inf() || hi_.is_neg_inf()) {
      empty_ = true;
      lo_ = Bound::neg_inf();
      hi_ = Bound::pos_inf();
    }
  }

  Bound lo_ = Bound::neg_inf();
  Bound hi_ = Bound::pos_inf();
  bool empty_ = false;
};

}  // namespace cwb
