#pragma once

// Generic forward fixpoint engine over a Cfg.
//
// A domain supplies
//   using value_type;
//   value_type bottom() const;
//   value_type initial() const;                       // value at the entry
//   value_type transfer(const ir::Edge&, const value_type&) const;
//   value_type join(const value_type&, const value_type&) const;
//   bool equal(const value_type&, const value_type&) const;
// and, when it has infinite ascending chains,
//   value_type widen(const value_type& old, const value_type& next) const;
//
// Iteration is chaotic, driven by a worklist ordered by reverse postorder.
// Each update joins into the location's previous value.
// Widening applies at loop heads (targets of DFS back edges) once a head has
// been updated `widen_delay` times. Narrowing passes then re-apply the whole
// equation system simultaneously from the post-widening result.

#include <concepts>
#include <cstddef>
#include <set>
#include <vector>

#include "cwb/ir/cfg.hpp"

namespace cwb {

template <typename D>
concept ForwardDomain = requires(const D& d, const typename D::value_type& v, const ir::Edge& e) {
  { d.bottom() } -> std::convertible_to<typename D::value_type>;
  { d.initial() } -> std::convertible_to<typename D::value_type>;
  { d.transfer(e, v) } -> std::convertible_to<typename D::value_type>;
  { d.join(v, v) } -> std::convertible_to<typename D::value_type>;
  { d.equal(v, v) } -> std::convertible_to<bool>;
};

template <typename D>
concept WideningDomain = ForwardDomain<D> && requires(const D& d, const typename D::value_type& v) {
  { d.widen(v, v) } -> std::convertible_to<typename D::value_type>;
};

struct FixpointOptions {
  unsigned widen_delay = 0;
  unsigned narrow_passes = 0;
};

template <typename V>
struct FixpointResult {
  std::vector<V> values;
  size_t updates = 0;  // location updates during the ascending phase
  size_t narrowing_updates = 0;
};

template <ForwardDomain D>
FixpointResult<typename D::value_type> solve_forward(const ir::Cfg& g, const D& dom, FixpointOptions opts = {}) {
  using V = typename D::value_type;
  FixpointResult<V> res;
  res.values.assign(g.num_locations, dom.bottom());
  if (g.num_locations == 0) return res;

  const auto dfs = ir::depth_first(g);
  const auto preds = g.predecessors();
  const auto succs = g.successors();
  std::vector<unsigned> head_updates(g.num_locations, 0);

  auto recompute = [&](const std::vector<V>& from, ir::LocId loc) {
    V acc = loc == g.entry ? dom.initial() : dom.bottom();
    for (size_t ei : preds[loc]) {
      const auto& e = g.edges[ei];
      acc = dom.join(acc, dom.transfer(e, from[e.src]));
    }
    return acc;
  };

  // keyed by reverse-postorder index so inner locations settle before heads re-fire
  std::set<std::pair<size_t, ir::LocId>> work;
  work.emplace(dfs.rpo_index[g.entry], g.entry);
  while (!work.empty()) {
    const ir::LocId loc = work.begin()->second;
    work.erase(work.begin());
    // accumulate, so domains with non-monotone transfers still ascend
    V next = dom.join(res.values[loc], recompute(res.values, loc));
    if constexpr (WideningDomain<D>) {
      if (dfs.is_loop_head[loc] && head_updates[loc]++ >= opts.widen_delay) next = dom.widen(res.values[loc], next);
    }
    if (dom.equal(next, res.values[loc])) continue;
    res.values[loc] = std::move(next);
    ++res.updates;
    for (size_t ei : succs[loc]) {
      const ir::LocId dst = g.edges[ei].dst;
      work.emplace(dfs.rpo_index[dst], dst);
    }
  }

  if constexpr (WideningDomain<D>) {
    for (unsigned pass = 0; pass < opts.narrow_passes; ++pass) {
      std::vector<V> next(g.num_locations, dom.bottom());
      for (ir::LocId loc = 0; loc < g.num_locations; ++loc) {
        if (!dfs.reachable[loc]) continue;
        next[loc] = recompute(res.values, loc);
        if (!dom.equal(next[loc], res.values[loc])) ++res.narrowing_updates;
      }
      res.values = std::move(next);
    }
  }
  return res;
}

}  // namespace cwb
