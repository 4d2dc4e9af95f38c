#pragma once

// Exact LRU classification relative to the control-flow model.
//
// For a focus block `a`, a cache state is abstracted to either "a is absent"
// or "a is cached and these blocks are younger than a". Collections of such
// configurations are kept as a may-absent flag plus an antichain of
// younger-sets: the maximal sets decide whether a later miss is reachable,
// the minimal sets whether a later hit is, so one fixpoint is run for each
// orientation. Both are exact for hit/miss reachability.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cwb/antichain.hpp"
#include "cwb/cache/approx.hpp"
#include "cwb/cache/common.hpp"
#include "cwb/fixpoint.hpp"

namespace cwb::cache {

struct BlockView {
  bool may_absent = false;
  Antichain<BlockSet> younger;

  explicit BlockView(Orientation o = Orientation::KeepMax) : younger(o) {}
  BlockView(bool absent, Antichain<BlockSet> sets) : may_absent(absent), younger(std::move(sets)) {}

  bool is_bottom() const { return !may_absent && younger.empty(); }
  bool may_be_present() const { return !younger.empty(); }

  friend bool operator==(const BlockView&, const BlockView&) = default;
};

inline BlockView join(const BlockView& a, const BlockView& b) {
  return BlockView(a.may_absent || b.may_absent, join(a.younger, b.younger));
}

/// Effect of accessing `accessed` on the configurations of `focus`.
inline BlockView transfer(const BlockView& v, BlockId accessed, BlockId focus, unsigned assoc) {
  check_associativity(assoc);
  const Orientation o = v.younger.orientation();
  if (v.is_bottom()) return v;
  if (accessed == focus) return BlockView(false, Antichain<BlockSet>(o, {BlockSet{}}));
  BlockView out(o);
  out.may_absent = v.may_absent;
  for (const BlockSet& s : v.younger) {
    if (s.contains(accessed)) {
      out.younger.insert_in_place(s);
    } else if (s.size() + 1 < assoc) {
      out.younger.insert_in_place(s.with(accessed));
    } else {
      out.may_absent = true;  // focus had age N-1 and is evicted
    }
  }
  return out;
}

inline BlockView initial_view(const Cfg& g, BlockId focus, unsigned assoc, Orientation o, InitialCachePolicy init) {
  if (init == InitialCachePolicy::Empty) return BlockView(true, Antichain<BlockSet>(o));
  if (o == Orientation::KeepMin) return BlockView(true, Antichain<BlockSet>(o, {BlockSet{}}));
  // KeepMax: the largest younger-sets the unknown content allows
  std::vector<unsigned> others;
  for (unsigned b = 0; b < universe_size(g, init); ++b)
    if (b != focus) others.push_back(b);
  const size_t want = std::min<size_t>(assoc - 1, others.size());
  Antichain<BlockSet> sets(o);
  BlockSet cur;
  auto rec = [&](auto&& self, size_t from, size_t left) -> void {
    if (left == 0) {
      sets.insert_in_place(cur);
      return;
    }
    for (size_t i = from; i + left <= others.size(); ++i) {
      const BlockSet saved = cur;
      cur.insert(others[i]);
      self(self, i + 1, left - 1);
      cur = saved;
    }
  };
  rec(rec, 0, want);
  return BlockView(true, std::move(sets));
}

namespace detail {

struct FocusDomain {
  using value_type = BlockView;
  const Cfg* g;
  BlockId focus;
  unsigned assoc;
  Orientation orientation;
  InitialCachePolicy init;

  BlockView bottom() const { return BlockView(orientation); }
  BlockView initial() const { return initial_view(*g, focus, assoc, orientation, init); }
  BlockView transfer(const ir::Edge& e, const BlockView& v) const {
    if (const auto* a = std::get_if<ir::AccessLabel>(&e.label)) return cache::transfer(v, a->block, focus, assoc);
    return v;
  }
  BlockView join(const BlockView& a, const BlockView& b) const { return cache::join(a, b); }
  bool equal(const BlockView& a, const BlockView& b) const { return a == b; }
};

}  // namespace detail

inline std::vector<BlockView> analyze_block(const Cfg& g, BlockId focus, unsigned assoc, Orientation orientation,
                                            InitialCachePolicy init) {
  check_associativity(assoc);
  if (universe_size(g, init) > BlockSet::kCapacity)
    throw std::invalid_argument("exact cache analysis supports at most 64 blocks per cache set");
  return solve_forward(g, detail::FocusDomain{&g, focus, assoc, orientation, init}).values;
}

inline Classification classify_views(const BlockView& keep_max, const BlockView& keep_min) {
  const bool exists_miss = keep_max.may_absent;
  const bool exists_hit = keep_min.may_be_present();
  if (exists_hit && exists_miss) return Classification::Variable;
  if (exists_hit) return Classification::AlwaysHit;
  if (exists_miss) return Classification::AlwaysMiss;
  return Classification::Unreachable;
}

struct ExactStats {
  size_t focus_runs = 0;  // blocks for which the KeepMin/KeepMax pair ran
  size_t updates = 0;
};

/// Classifies the sites of the given focus blocks only.
inline SiteClassification classify_exact_for(const Cfg& g, unsigned assoc, InitialCachePolicy init,
                                             const std::set<BlockId>& focus_blocks, ExactStats* stats = nullptr) {
  check_associativity(assoc);
  if (universe_size(g, init) > BlockSet::kCapacity)
    throw std::invalid_argument("exact cache analysis supports at most 64 blocks per cache set");
  const auto sites = g.access_sites();
  SiteClassification out;
  for (BlockId focus : focus_blocks) {
    const auto hi = solve_forward(g, detail::FocusDomain{&g, focus, assoc, Orientation::KeepMax, init});
    const auto lo = solve_forward(g, detail::FocusDomain{&g, focus, assoc, Orientation::KeepMin, init});
    if (stats) {
      ++stats->focus_runs;
      stats->updates += hi.updates + lo.updates;
    }
    for (const auto& site : sites)
      if (site.block == focus) out[site.id] = classify_views(hi.values[site.source], lo.values[site.source]);
  }
  return out;
}

inline SiteClassification classify_exact(const Cfg& g, unsigned assoc, InitialCachePolicy init,
                                         ExactStats* stats = nullptr) {
  std::set<BlockId> blocks;
  for (const auto& site : g.access_sites()) blocks.insert(site.block);
  return classify_exact_for(g, assoc, init, blocks, stats);
}

enum class Method { Approx, Exact };

inline const char* to_string(Method m) { return m == Method::Approx ? "approx" : "exact"; }

struct PipelineVerdict {
  Classification classification;
  Method method;
  friend bool operator==(const PipelineVerdict&, const PipelineVerdict&) = default;
};

struct PipelineResult {
  std::map<SiteId, PipelineVerdict> sites;
  ExactStats exact;
  size_t approx_updates = 0;
  size_t approx_resolved = 0;
};

/// Must/may first; the exact pair runs only for blocks that still have an
/// unclassified site.
inline PipelineResult classify_pipeline(const Cfg& g, unsigned assoc, InitialCachePolicy init) {
  PipelineResult res;
  const auto approx = classify_approx(g, assoc, init, &res.approx_updates);
  std::set<BlockId> unresolved;
  for (const auto& site : g.access_sites()) {
    const Classification c = approx.at(site.id);
    if (c == Classification::Unknown) {
      unresolved.insert(site.block);
    } else {
      res.sites[site.id] = {c, Method::Approx};
      ++res.approx_resolved;
    }
  }
  if (unresolved.empty()) return res;
  const auto exact = classify_exact_for(g, assoc, init, unresolved, &res.exact);
  for (const auto& site : g.access_sites())
    if (!res.sites.count(site.id)) res.sites[site.id] = {exact.at(site.id), Method::Exact};
  return res;
}

}  // namespace cwb::cache
