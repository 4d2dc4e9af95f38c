#pragma once

// Classical LRU must/may age analyses. Sound but incomplete; used to settle
// the easy access sites before running the exact analysis.

#include <algorithm>
#include <map>
#include <vector>

#include "cwb/cache/common.hpp"
#include "cwb/fixpoint.hpp"

namespace cwb::cache {

/// must: block -> upper bound on its age (the block is surely cached).
/// may:  block -> lower bound on its age; a block missing from `may` is
///       surely not cached.
struct AgeBounds {
  bool reachable = false;
  std::map<BlockId, unsigned> must;
  std::map<BlockId, unsigned> may;

  friend bool operator==(const AgeBounds&, const AgeBounds&) = default;
};

inline AgeBounds age_access(const AgeBounds& in, BlockId b, unsigned assoc) {
  if (!in.reachable) return in;
  AgeBounds out;
  out.reachable = true;

  // blocks surely younger than b's bound may be pushed back by one
  const auto mb = in.must.find(b);
  const unsigned must_b = mb == in.must.end() ? assoc : mb->second;
  for (const auto& [x, age] : in.must) {
    if (x == b) continue;
    const unsigned next = age < must_b ? age + 1 : age;
    if (next < assoc) out.must[x] = next;
  }
  out.must[b] = 0;

  const auto yb = in.may.find(b);
  const unsigned may_b = yb == in.may.end() ? assoc : yb->second;
  for (const auto& [x, age] : in.may) {
    if (x == b) continue;
    const unsigned next = age <= may_b ? age + 1 : age;
    if (next < assoc) out.may[x] = next;
  }
  out.may[b] = 0;
  return out;
}

inline AgeBounds age_join(const AgeBounds& a, const AgeBounds& b) {
  if (!a.reachable) return b;
  if (!b.reachable) return a;
  AgeBounds out;
  out.reachable = true;
  for (const auto& [x, age] : a.must) {
    const auto it = b.must.find(x);
    if (it != b.must.end()) out.must[x] = std::max(age, it->second);
  }
  out.may = a.may;
  for (const auto& [x, age] : b.may) {
    const auto [it, inserted] = out.may.emplace(x, age);
    if (!inserted) it->second = std::min(it->second, age);
  }
  return out;
}

namespace detail {

struct MustMayDomain {
  using value_type = AgeBounds;
  const Cfg* g;
  unsigned assoc;
  InitialCachePolicy init;

  AgeBounds bottom() const { return {}; }
  AgeBounds initial() const {
    AgeBounds a;
    a.reachable = true;
    if (init == InitialCachePolicy::Unknown)
      for (BlockId b = 0; b < g->blocks.size(); ++b) a.may[b] = 0;
    return a;
  }
  AgeBounds transfer(const ir::Edge& e, const AgeBounds& v) const {
    if (const auto* acc = std::get_if<ir::AccessLabel>(&e.label)) return age_access(v, acc->block, assoc);
    return v;
  }
  AgeBounds join(const AgeBounds& a, const AgeBounds& b) const { return age_join(a, b); }
  bool equal(const AgeBounds& a, const AgeBounds& b) const { return a == b; }
};

}  // namespace detail

/// Fixpoint of the must/may transfer; finite domain, no widening.
inline std::vector<AgeBounds> analyze_approx(const Cfg& g, unsigned assoc, InitialCachePolicy init,
                                             size_t* updates = nullptr) {
  check_associativity(assoc);
  auto res = solve_forward(g, detail::MustMayDomain{&g, assoc, init});
  if (updates) *updates += res.updates;
  return std::move(res.values);
}

/// AlwaysHit, AlwaysMiss, Unknown (or Unreachable for an unreached source).
inline Classification classify_approx(const AgeBounds& at_source, BlockId b, unsigned assoc) {
  check_associativity(assoc);
  if (!at_source.reachable) return Classification::Unreachable;
  if (at_source.must.count(b)) return Classification::AlwaysHit;
  if (!at_source.may.count(b)) return Classification::AlwaysMiss;
  return Classification::Unknown;
}

inline SiteClassification classify_approx(const Cfg& g, unsigned assoc, InitialCachePolicy init,
                                          size_t* updates = nullptr) {
  const auto bounds = analyze_approx(g, assoc, init, updates);
  SiteClassification out;
  for (const auto& site : g.access_sites()) out[site.id] = classify_approx(bounds[site.source], site.block, assoc);
  return out;
}

}  // namespace cwb::cache
