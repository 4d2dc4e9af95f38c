#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "cwb/ir/cfg.hpp"

namespace cwb::cache {

using ir::BlockId;
using ir::Cfg;
using ir::LocId;
using ir::SiteId;

enum class Classification { AlwaysHit, AlwaysMiss, Variable, Unreachable, Unknown };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::AlwaysHit: return "AlwaysHit";
    case Classification::AlwaysMiss: return "AlwaysMiss";
    case Classification::Variable: return "Variable";
    case Classification::Unreachable: return "Unreachable";
    case Classification::Unknown: return "Unknown";
  }
  return "?";
}

/// Empty: the cache starts empty. Unknown: any content of at most N distinct
/// blocks drawn from the graph's blocks plus one block the graph never touches.
enum class InitialCachePolicy { Empty, Unknown };

inline const char* to_string(InitialCachePolicy p) { return p == InitialCachePolicy::Empty ? "empty" : "unknown"; }

using SiteClassification = std::map<SiteId, Classification>;

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of distinct blocks the analyses range over: the graph's blocks, plus
/// the untouched "other" block under Unknown init (its id is blocks.size()).
inline unsigned universe_size(const Cfg& g, InitialCachePolicy init) {
  return static_cast<unsigned>(g.blocks.size()) + (init == InitialCachePolicy::Unknown ? 1U : 0U);
}

inline void check_associativity(unsigned assoc) {
  if (assoc == 0) throw std::invalid_argument("associativity must be at least 1");
}

}  // namespace cwb::cache
