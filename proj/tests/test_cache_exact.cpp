#include <gtest/gtest.h>

#include "cwb/cache/concrete.hpp"
#include "cwb/cache/exact.hpp"
#include "cwb/ir/access_graph.hpp"
#include "cwb/ir/parser.hpp"
#include "support/generators.hpp"

namespace {

using namespace cwb;
using namespace cwb::cache;
using C = Classification;

enum : BlockId { A, B, C_, D };

BlockView view(Orientation o, bool absent, std::initializer_list<BlockSet> sets) {
  return BlockView(absent, Antichain<BlockSet>(o, sets));
}

TEST(Transfer, FocusAccessResetsToYoungest) {
  const BlockView v = view(Orientation::KeepMax, true, {{B, C_}});
  EXPECT_EQ(transfer(v, A, A, 4), view(Orientation::KeepMax, false, {BlockSet{}}));
}

TEST(Transfer, OtherAccessAgesOrEvicts) {
  const BlockView v = view(Orientation::KeepMax, false, {{B}});
  EXPECT_EQ(transfer(v, C_, A, 4), view(Orientation::KeepMax, false, {{B, C_}}));
  EXPECT_EQ(transfer(v, C_, A, 2), view(Orientation::KeepMax, true, {}));
  EXPECT_EQ(transfer(v, B, A, 2), v);
}

TEST(Transfer, BottomIsPreserved) {
  const BlockView bottom(Orientation::KeepMin);
  EXPECT_EQ(transfer(bottom, A, A, 2), bottom);
}

TEST(Transfer, KeepMinDropsSupersets) {
  const BlockView v = view(Orientation::KeepMin, false, {BlockSet{}, {B}});
  EXPECT_EQ(v, view(Orientation::KeepMin, false, {BlockSet{}}));
  EXPECT_EQ(transfer(v, C_, A, 4), view(Orientation::KeepMin, false, {{C_}}));
}

TEST(InitialView, UnknownInitKeepMaxEnumeratesFullSets) {
  const ir::Cfg g = ir::parse_access_graph("loc s\nloc t\nentry s\nedge s t access a\nedge s t access b\n");
  // blocks a, b and the untouched block 2
  EXPECT_EQ(initial_view(g, A, 2, Orientation::KeepMax, InitialCachePolicy::Unknown),
            view(Orientation::KeepMax, true, {{B}, {2}}));
  EXPECT_EQ(initial_view(g, A, 3, Orientation::KeepMax, InitialCachePolicy::Unknown),
            view(Orientation::KeepMax, true, {{B, 2}}));
  EXPECT_EQ(initial_view(g, A, 2, Orientation::KeepMin, InitialCachePolicy::Unknown),
            view(Orientation::KeepMin, true, {BlockSet{}}));
  EXPECT_EQ(initial_view(g, A, 2, Orientation::KeepMin, InitialCachePolicy::Empty),
            view(Orientation::KeepMin, true, {}));
}

const char* kFlagGraph = "loc start\nloc mid\nloc end\nentry start\nedge start mid access a\nedge start mid access b\n"
                         "edge mid end access a\nedge mid end access b\n";

TEST(AnalyzeBlock, FlagViewAtJoin) {
  const ir::Cfg g = ir::parse_access_graph(kFlagGraph);
  for (auto o : {Orientation::KeepMax, Orientation::KeepMin}) {
    const auto views = analyze_block(g, A, 4, o, InitialCachePolicy::Empty);
    EXPECT_EQ(views[1], view(o, true, {BlockSet{}}));
    EXPECT_EQ(views[0], view(o, true, {}));
  }
}

TEST(ClassifyExact, FlagGraph) {
  const auto cls = classify_exact(ir::parse_access_graph(kFlagGraph), 4, InitialCachePolicy::Empty);
  EXPECT_EQ(cls.at(0), C::AlwaysMiss);
  EXPECT_EQ(cls.at(1), C::AlwaysMiss);
  EXPECT_EQ(cls.at(2), C::Variable);
  EXPECT_EQ(cls.at(3), C::Variable);
}

TEST(ClassifyExact, RejectsOversizedUniverse) {
  std::string text = "loc s\nloc t\nentry s\n";
  for (int i = 0; i < 65; ++i) text += "edge s t access m" + std::to_string(i) + "\n";
  const ir::Cfg g = ir::parse_access_graph(text);
  EXPECT_THROW(classify_exact(g, 4, InitialCachePolicy::Empty), std::invalid_argument);
}

// a is cached with younger-set {} or {b} before c; c evicts only the second
const char* kOrientationGraph = "loc s\nloc p\nloc q\nloc r\nloc t\nentry s\nedge s p access a\nedge s q access a\n"
                                "edge q p access b\nedge p r access c\nedge r t access a\n";

TEST(Orientation, KeepMinAloneMissesTheMiss) {
  const ir::Cfg g = ir::parse_access_graph(kOrientationGraph);
  const auto lo = analyze_block(g, A, 2, Orientation::KeepMin, InitialCachePolicy::Empty);
  const auto hi = analyze_block(g, A, 2, Orientation::KeepMax, InitialCachePolicy::Empty);
  const LocId r = 3;
  EXPECT_FALSE(lo[r].may_absent);
  EXPECT_TRUE(hi[r].may_absent);
  EXPECT_EQ(classify_oracle(g, 2, InitialCachePolicy::Empty).at(4), C::Variable);
  EXPECT_EQ(classify_exact(g, 2, InitialCachePolicy::Empty).at(4), C::Variable);
}

TEST(Orientation, KeepMaxAloneMissesTheHit) {
  const ir::Cfg g = ir::parse_access_graph(kOrientationGraph);
  const auto lo = analyze_block(g, A, 2, Orientation::KeepMin, InitialCachePolicy::Empty);
  const auto hi = analyze_block(g, A, 2, Orientation::KeepMax, InitialCachePolicy::Empty);
  const LocId r = 3;
  EXPECT_FALSE(hi[r].may_be_present());
  EXPECT_TRUE(lo[r].may_be_present());
}

TEST(Pipeline, ApproxSettlesStraightLine) {
  const ir::Cfg g = ir::parse_access_graph("loc l0\nloc l1\nloc l2\nloc l3\nentry l0\nedge l0 l1 access a\nedge l1 l2 access b\nedge l2 l3 access a\n");
  const auto res = classify_pipeline(g, 2, InitialCachePolicy::Empty);
  EXPECT_EQ(res.exact.focus_runs, 0u);
  EXPECT_EQ(res.approx_resolved, 3u);
  EXPECT_EQ(res.sites.at(2), (PipelineVerdict{C::AlwaysHit, Method::Approx}));
}

TEST(Pipeline, FlagProgramFallsBackToExact) {
  const char* src = "int flag;\nif (flag > 0) { access(a); } else { access(b); }\nif (flag > 0) { access(a); } else { access(b); }\n";
  const ir::Cfg g = ir::erase_guards(ir::build_cfg(ir::parse_program(src)));
  const auto res = classify_pipeline(g, 4, InitialCachePolicy::Empty);
  EXPECT_EQ(res.sites.at(0), (PipelineVerdict{C::AlwaysMiss, Method::Approx}));
  EXPECT_EQ(res.sites.at(1), (PipelineVerdict{C::AlwaysMiss, Method::Approx}));
  EXPECT_EQ(res.sites.at(2), (PipelineVerdict{C::Variable, Method::Exact}));
  EXPECT_EQ(res.sites.at(3), (PipelineVerdict{C::Variable, Method::Exact}));
  EXPECT_EQ(res.exact.focus_runs, 2u);
}

// ------------------------------------------------------------- properties

TEST(Properties, ExactEqualsOracle) {
  testkit::Rng rng(4242);
  size_t compared = 0;
  for (int n = 0; n < 1200; ++n) {
    const ir::Cfg g = testkit::random_access_cfg(rng);
    for (unsigned assoc : {1U, 2U, 4U})
      for (auto init : {InitialCachePolicy::Empty, InitialCachePolicy::Unknown}) {
        const auto exact = classify_exact(g, assoc, init);
        const auto oracle = classify_oracle(g, assoc, init);
        ASSERT_EQ(exact.size(), oracle.size());
        for (const auto& [site, c] : oracle) {
          ++compared;
          ASSERT_EQ(exact.at(site), c) << "case " << n << " N=" << assoc << " init=" << to_string(init) << " site "
                                       << site;
        }
        const auto pipeline = classify_pipeline(g, assoc, init);
        for (const auto& [site, verdict] : pipeline.sites) ASSERT_EQ(verdict.classification, oracle.at(site));
      }
  }
  EXPECT_GT(compared, 1000u);
}

TEST(Properties, YoungerSetsAreBounded) {
  testkit::Rng rng(77);
  for (int n = 0; n < 400; ++n) {
    const ir::Cfg g = testkit::random_access_cfg(rng);
    if (g.blocks.empty()) continue;
    const auto assoc = static_cast<unsigned>(rng.pick(std::vector<unsigned>{1, 2, 4}));
    const auto focus = static_cast<BlockId>(rng.index(g.blocks.size()));
    for (auto o : {Orientation::KeepMax, Orientation::KeepMin})
      for (const auto& v : analyze_block(g, focus, assoc, o, InitialCachePolicy::Unknown))
        for (const BlockSet& s : v.younger) {
          ASSERT_LT(s.size(), assoc);
          ASSERT_FALSE(s.contains(focus));
        }
  }
}

TEST(Properties, HitAndMissPredicatesMonotoneInInitialPolicy) {
  testkit::Rng rng(78);
  for (int n = 0; n < 400; ++n) {
    const ir::Cfg g = testkit::random_access_cfg(rng);
    if (g.blocks.empty()) continue;
    const auto assoc = static_cast<unsigned>(rng.range(1, 4));
    const auto focus = static_cast<BlockId>(rng.index(g.blocks.size()));
    const auto max_small = analyze_block(g, focus, assoc, Orientation::KeepMax, InitialCachePolicy::Empty);
    const auto max_large = analyze_block(g, focus, assoc, Orientation::KeepMax, InitialCachePolicy::Unknown);
    const auto min_small = analyze_block(g, focus, assoc, Orientation::KeepMin, InitialCachePolicy::Empty);
    const auto min_large = analyze_block(g, focus, assoc, Orientation::KeepMin, InitialCachePolicy::Unknown);
    for (LocId l = 0; l < g.num_locations; ++l) {
      ASSERT_TRUE(!max_small[l].may_absent || max_large[l].may_absent);
      ASSERT_TRUE(!min_small[l].may_be_present() || min_large[l].may_be_present());
    }
  }
}

}  // namespace
