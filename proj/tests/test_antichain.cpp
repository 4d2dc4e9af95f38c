#include <gtest/gtest.h>

#include "cwb/antichain.hpp"
#include "support/generators.hpp"

namespace {

using namespace cwb;
using AC = Antichain<>;

enum : unsigned { a, b, c, d };

std::set<BlockSet> elems(const AC& x) { return {x.begin(), x.end()}; }

TEST(Insert, KeepMaxRetainsSuperset) {
  const AC x(Orientation::KeepMax, {{b}, {b, c}});
  EXPECT_EQ(elems(x.insert({b, c, d})), (std::set<BlockSet>{{b, c, d}}));
}

TEST(Insert, KeepMinRetainsSubset) {
  const AC x(Orientation::KeepMin, {{b, c}, {b, c, d}});
  EXPECT_EQ(elems(x.insert({b})), (std::set<BlockSet>{{b}}));
}

TEST(Insert, Idempotent) {
  const AC x(Orientation::KeepMax, {{b, c, d}});
  EXPECT_EQ(x.insert({b, c, d}), x);
}

TEST(Insert, EmptySetIsAnElement) {
  const AC x(Orientation::KeepMin, {BlockSet{}});
  EXPECT_EQ(x.size(), 1u);
  EXPECT_EQ(x.insert({a}), x);
}

TEST(Join, Examples) {
  EXPECT_EQ(elems(join(AC(Orientation::KeepMax, {{b}}), AC(Orientation::KeepMax, {{b, c}}))),
            (std::set<BlockSet>{{b, c}}));
  EXPECT_EQ(elems(join(AC(Orientation::KeepMin, {{b}}), AC(Orientation::KeepMin, {{c}}))),
            (std::set<BlockSet>{{b}, {c}}));
  const AC x(Orientation::KeepMax, {{a, b}, {c}});
  EXPECT_EQ(join(x, AC(Orientation::KeepMax)), x);
}

TEST(Join, OrientationMismatch) {
  EXPECT_THROW(join(AC(Orientation::KeepMax), AC(Orientation::KeepMin)), std::invalid_argument);
  EXPECT_THROW((void)subsumes(AC(Orientation::KeepMax), AC(Orientation::KeepMin)), std::invalid_argument);
}

TEST(Subsumes, Examples) {
  EXPECT_TRUE(subsumes(AC(Orientation::KeepMax, {{b, c, d}}), AC(Orientation::KeepMax, {{b}, {b, c}})));
  EXPECT_TRUE(subsumes(AC(Orientation::KeepMin, {{a}}), AC(Orientation::KeepMin)));
  EXPECT_TRUE(subsumes(AC(Orientation::KeepMax), AC(Orientation::KeepMax)));
  EXPECT_FALSE(subsumes(AC(Orientation::KeepMin, {{b}}), AC(Orientation::KeepMin, {{c}})));
}

TEST(Structure, CanonicalOrder) {
  const AC x(Orientation::KeepMax, {{c}, {a, b}, {d}});
  const AC y(Orientation::KeepMax, {{d}, {c}, {a, b}});
  EXPECT_EQ(x, y);
  EXPECT_TRUE(std::is_sorted(x.begin(), x.end()));
}

// ------------------------------------------------------------- properties

constexpr unsigned kUniverse = 5;

bool is_antichain(const AC& x) {
  for (const auto& s : x)
    for (const auto& t : x)
      if (!(s == t) && s.subset_of(t)) return false;
  return true;
}

AC random_antichain(testkit::Rng& rng, Orientation o) {
  AC x(o);
  for (int64_t i = 0, n = rng.range(0, 6); i < n; ++i) x.insert_in_place(testkit::random_block_set(rng, kUniverse));
  return x;
}

class Laws : public ::testing::TestWithParam<Orientation> {};

TEST_P(Laws, InsertMatchesNaiveModel) {
  testkit::Rng rng(101);
  for (int n = 0; n < 2000; ++n) {
    AC x(GetParam());
    std::set<BlockSet> family;
    for (int64_t i = 0, k = rng.range(1, 12); i < k; ++i) {
      const BlockSet s = testkit::random_block_set(rng, kUniverse);
      family.insert(s);
      x.insert_in_place(s);
      ASSERT_TRUE(is_antichain(x));
      ASSERT_EQ(elems(x), testkit::extremal_elements(family, GetParam()));
      ASSERT_EQ(x.insert(s), x);
    }
  }
}

TEST_P(Laws, JoinIsLeastUpperBound) {
  testkit::Rng rng(202);
  for (int n = 0; n < 2000; ++n) {
    const AC x = random_antichain(rng, GetParam());
    const AC y = random_antichain(rng, GetParam());
    const AC z = random_antichain(rng, GetParam());
    const AC u = join(x, y);
    ASSERT_TRUE(is_antichain(u));
    EXPECT_TRUE(subsumes(u, x));
    EXPECT_TRUE(subsumes(u, y));
    EXPECT_EQ(u, join(y, x));
    EXPECT_EQ(join(u, z), join(x, join(y, z)));
    EXPECT_EQ(join(x, x), x);
    // any upper bound of both is above the join
    if (subsumes(z, x) && subsumes(z, y)) {
      EXPECT_TRUE(subsumes(z, u));
    }
    const AC w = join(u, z);
    EXPECT_TRUE(subsumes(w, u));
    // subsumes(a, b) iff join(a, b) == a
    EXPECT_EQ(subsumes(x, y), join(x, y) == x);
  }
}

TEST_P(Laws, LeastUpperBoundExhaustiveOverSmallFamilies) {
  // every antichain over a 3-block universe, as the extremal sets of each family
  constexpr unsigned kSmall = 3;
  std::vector<AC> all;
  std::set<std::set<BlockSet>> seen;
  for (uint32_t fam = 0; fam < (1u << (1u << kSmall)); ++fam) {
    std::set<BlockSet> family;
    for (uint64_t s = 0; s < (1u << kSmall); ++s)
      if ((fam >> s) & 1U) family.insert(BlockSet(s));
    const auto ext = testkit::extremal_elements(family, GetParam());
    if (!seen.insert(ext).second) continue;
    AC x(GetParam());
    for (const auto& s : ext) x.insert_in_place(s);
    all.push_back(x);
  }
  for (const auto& x : all)
    for (const auto& y : all) {
      const AC u = join(x, y);
      for (const auto& z : all)
        if (subsumes(z, x) && subsumes(z, y)) {
          ASSERT_TRUE(subsumes(z, u));
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Orientations, Laws, ::testing::Values(Orientation::KeepMin, Orientation::KeepMax),
                         [](const auto& info) { return std::string(to_string(info.param)); });

}  // namespace
