#pragma once

// Ground-truth LRU semantics for one cache set, and the explicit-state
// collecting semantics over a control-flow graph used as the oracle.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cwb/cache/common.hpp"

namespace cwb::cache {

/// Blocks currently cached, youngest first.
class CacheSetState {
 public:
  CacheSetState() = default;
  explicit CacheSetState(std::vector<BlockId> blocks) : blocks_(std::move(blocks)) {}

  const std::vector<BlockId>& blocks() const { return blocks_; }
  size_t size() const { return blocks_.size(); }

  /// Position of `b` (0 = youngest), or size() when absent.
  size_t age(BlockId b) const {
    return static_cast<size_t>(std::find(blocks_.begin(), blocks_.end(), b) - blocks_.begin());
  }

  friend bool operator==(const CacheSetState&, const CacheSetState&) = default;
  friend auto operator<=>(const CacheSetState&, const CacheSetState&) = default;

 private:
  std::vector<BlockId> blocks_;
};

/// LRU update: `b` becomes youngest; a present `b` is moved (the blocks that
/// were younger age by one), an absent one evicts the oldest of a full set.
inline CacheSetState access(const CacheSetState& s, BlockId b, unsigned assoc) {
  check_associativity(assoc);
  std::vector<BlockId> out;
  out.reserve(std::min<size_t>(s.size() + 1, assoc));
  out.push_back(b);
  for (BlockId x : s.blocks()) {
    if (out.size() == assoc) break;
    if (x != b) out.push_back(x);
  }
  return CacheSetState(std::move(out));
}

inline bool is_hit(const CacheSetState& s, BlockId b) { return s.age(b) < s.size(); }

/// Renders with block names, e.g. "dabc".
inline std::string to_string(const CacheSetState& s, const std::vector<std::string>& names) {
  std::string out;
  for (BlockId b : s.blocks()) out += b < names.size() ? names[b] : "?";
  return out;
}

using StateSet = std::set<CacheSetState>;

inline constexpr size_t kDefaultStateBudget = 1'000'000;

/// Every sequence of at most `assoc` distinct blocks over `universe` blocks.
inline StateSet all_states(unsigned universe, unsigned assoc) {
  StateSet out;
  std::vector<BlockId> cur;
  std::vector<bool> used(universe, false);
  auto rec = [&](auto&& self) -> void {
    out.insert(CacheSetState(cur));
    if (cur.size() == assoc) return;
    for (BlockId b = 0; b < universe; ++b) {
      if (used[b]) continue;
      used[b] = true;
      cur.push_back(b);
      self(self);
      cur.pop_back();
      used[b] = false;
    }
  };
  rec(rec);
  return out;
}

inline StateSet initial_states(const Cfg& g, unsigned assoc, InitialCachePolicy init) {
  if (init == InitialCachePolicy::Empty) return {CacheSetState{}};
  return all_states(universe_size(g, init), assoc);
}

/// Least fixpoint of the concrete transfer over sets of cache states. Edges
/// other than Access are treated as Nop. Throws BudgetExceeded when the total
/// number of stored states passes `budget`.
inline std::vector<StateSet> collect_states(const Cfg& g, unsigned assoc, InitialCachePolicy init,
                                            size_t budget = kDefaultStateBudget) {
  check_associativity(assoc);
  std::vector<StateSet> states(g.num_locations);
  if (g.num_locations == 0) return states;
  const auto succ = g.successors();
  size_t total = 0;

  // worklist of (location, state) pairs not yet propagated
  std::vector<std::pair<LocId, CacheSetState>> work;
  auto add = [&](LocId loc, CacheSetState s) {
    if (!states[loc].insert(s).second) return;
    if (++total > budget)
      throw BudgetExceeded("cache oracle exceeded its state budget of " + std::to_string(budget) + " states");
    work.emplace_back(loc, std::move(s));
  };
  for (const auto& s : initial_states(g, assoc, init)) add(g.entry, s);
  while (!work.empty()) {
    auto [loc, s] = std::move(work.back());
    work.pop_back();
    for (size_t ei : succ[loc]) {
      const auto& e = g.edges[ei];
      if (const auto* a = std::get_if<ir::AccessLabel>(&e.label)) {
        add(e.dst, access(s, a->block, assoc));
      } else {
        add(e.dst, s);
      }
    }
  }
  return states;
}

inline Classification classify_states(const StateSet& states, BlockId b) {
  if (states.empty()) return Classification::Unreachable;
  bool hit = false;
  bool miss = false;
  for (const auto& s : states) (is_hit(s, b) ? hit : miss) = true;
  if (hit && miss) return Classification::Variable;
  return hit ? Classification::AlwaysHit : Classification::AlwaysMiss;
}

inline SiteClassification classify_oracle(const Cfg& g, unsigned assoc, InitialCachePolicy init,
                                          size_t budget = kDefaultStateBudget) {
  const auto states = collect_states(g, assoc, init, budget);
  SiteClassification out;
  for (const auto& site : g.access_sites()) out[site.id] = classify_states(states[site.source], site.block);
  return out;
}

}  // namespace cwb::cache
