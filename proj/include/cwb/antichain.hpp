#pragma once

// Families of pairwise ⊆-incomparable finite sets. A KeepMax antichain keeps
// only the maximal sets of everything inserted, a KeepMin antichain only the
// minimal ones; either way the stored family is canonical (sorted), so equal
// antichains compare equal.
//
// The element type is a small set type modeling BlockSetLike; BlockSet
// (a 64-bit bitset over interned block ids) is the default backend.

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace cwb {

enum class Orientation { KeepMin, KeepMax };

inline const char* to_string(Orientation o) { return o == Orientation::KeepMin ? "KeepMin" : "KeepMax"; }

template <typename S>
concept BlockSetLike = std::regular<S> && std::totally_ordered<S> && requires(const S& a, const S& b) {
  { a.subset_of(b) } -> std::convertible_to<bool>;
};

/// Set of block ids < 64.
class BlockSet {
 public:
  static constexpr unsigned kCapacity = 64;

  constexpr BlockSet() = default;
  constexpr explicit BlockSet(uint64_t bits) : bits_(bits) {}
  BlockSet(std::initializer_list<unsigned> ids) {
    for (unsigned id : ids) insert(id);
  }

  static BlockSet single(unsigned id) { return BlockSet{}.with(id); }

  void insert(unsigned id) {
    if (id >= kCapacity) throw std::out_of_range("BlockSet holds block ids below 64");
    bits_ |= uint64_t{1} << id;
  }
  BlockSet with(unsigned id) const {
    BlockSet s = *this;
    s.insert(id);
    return s;
  }
  bool contains(unsigned id) const { return id < kCapacity && ((bits_ >> id) & 1U); }
  unsigned size() const { return static_cast<unsigned>(std::popcount(bits_)); }
  bool empty() const { return bits_ == 0; }
  uint64_t bits() const { return bits_; }

  bool subset_of(const BlockSet& o) const { return (bits_ & ~o.bits_) == 0; }

  std::vector<unsigned> ids() const {
    std::vector<unsigned> out;
    for (uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<unsigned>(std::countr_zero(b)));
    return out;
  }

  friend bool operator==(const BlockSet&, const BlockSet&) = default;
  friend auto operator<=>(const BlockSet&, const BlockSet&) = default;

 private:
  uint64_t bits_ = 0;
};

template <BlockSetLike Set = BlockSet>
class Antichain {
 public:
  explicit Antichain(Orientation o = Orientation::KeepMax) : orientation_(o) {}
  Antichain(Orientation o, std::initializer_list<Set> sets) : orientation_(o) {
    for (const auto& s : sets) insert_in_place(s);
  }

  Orientation orientation() const { return orientation_; }
  const std::vector<Set>& elements() const { return elements_; }
  size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  /// True when `s` is covered: some stored set is ⊇ s (KeepMax) or ⊆ s (KeepMin).
  bool covers(const Set& s) const {
    return std::any_of(elements_.begin(), elements_.end(), [&](const Set& e) { return dominates(e, s); });
  }

  Antichain insert(const Set& s) const {
    Antichain out = *this;
    out.insert_in_place(s);
    return out;
  }

  void insert_in_place(const Set& s) {
    if (covers(s)) return;
    std::erase_if(elements_, [&](const Set& e) { return dominates(s, e); });
    elements_.insert(std::upper_bound(elements_.begin(), elements_.end(), s), s);
  }

  /// Least antichain subsuming both operands.
  friend Antichain join(const Antichain& a, const Antichain& b) {
    check_same(a, b);
    const Antichain& big = a.size() >= b.size() ? a : b;
    const Antichain& small = a.size() >= b.size() ? b : a;
    Antichain out = big;
    for (const auto& s : small.elements_) out.insert_in_place(s);
    return out;
  }

  /// union(a, b) == a, i.e. every element of b is covered by a.
  friend bool subsumes(const Antichain& a, const Antichain& b) {
    check_same(a, b);
    return std::all_of(b.elements_.begin(), b.elements_.end(), [&](const Set& s) { return a.covers(s); });
  }

  friend bool operator==(const Antichain&, const Antichain&) = default;

 private:
  // `x` makes `y` redundant under this orientation
  bool dominates(const Set& x, const Set& y) const {
    return orientation_ == Orientation::KeepMax ? y.subset_of(x) : x.subset_of(y);
  }

  static void check_same(const Antichain& a, const Antichain& b) {
    if (a.orientation_ != b.orientation_)
      throw std::invalid_argument(std::string("antichain orientation mismatch: ") + to_string(a.orientation_) +
                                  " vs " + to_string(b.orientation_));
  }

  Orientation orientation_;
  std::vector<Set> elements_;
};

}  // namespace cwb
