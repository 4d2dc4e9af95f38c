#include <gtest/gtest.h>

#include <fstream>

#include "cwb/bounds/oracle.hpp"
#include "cwb/intervals/analyzer.hpp"
#include "cwb/ir/parser.hpp"
#include "support/generators.hpp"

namespace cwb {
inline void PrintTo(const Interval& i, std::ostream* os) { *os << i.str(); }
}  // namespace cwb

namespace {

using namespace cwb;
using ir::Cond;
using ir::Expr;
using ir::RelOp;

const Bound kInf = Bound::pos_inf();
const Bound kNegInf = Bound::neg_inf();

Interval iv(Bound lo, Bound hi) { return {lo, hi}; }

TEST(Interval, Arithmetic) {
  EXPECT_EQ(iv(0, 2) + iv(1, 3), iv(1, 5));
  EXPECT_EQ(iv(0, kInf) + iv(-1, 1), iv(-1, kInf));
  EXPECT_EQ(iv(0, 2) - iv(1, 3), iv(-3, 1));
  EXPECT_EQ(-iv(kNegInf, 4), iv(-4, kInf));
  EXPECT_TRUE((Interval::bottom() + iv(0, 1)).is_bottom());
}

TEST(Interval, Lattice) {
  EXPECT_EQ(iv(0, 2).join(iv(5, 7)), iv(0, 7));
  EXPECT_EQ(iv(0, 5).meet(iv(3, 9)), iv(3, 5));
  EXPECT_TRUE(iv(0, 2).meet(iv(3, 9)).is_bottom());
  EXPECT_TRUE(Interval::bottom().leq(iv(1, 1)));
  EXPECT_TRUE(iv(1, 2).leq(Interval::top()));
  EXPECT_FALSE(iv(0, 3).leq(iv(1, 3)));
  EXPECT_EQ(iv(4, 2), Interval::bottom());
}

TEST(Interval, Widening) {
  EXPECT_EQ(iv(0, 0).widen(iv(0, 1)), iv(0, kInf));
  EXPECT_EQ(iv(0, 5).widen(iv(-1, 5)), iv(kNegInf, 5));
  EXPECT_EQ(iv(0, 5).widen(iv(1, 3)), iv(0, 5));
  EXPECT_EQ(Interval::bottom().widen(iv(2, 3)), iv(2, 3));
}

TEST(Interval, Printing) {
  EXPECT_EQ(iv(0, kInf).str(), "[0, +oo]");
  EXPECT_EQ(Interval::bottom().str(), "bot");
}

AbstractEnv env_of(std::initializer_list<std::pair<const char*, Interval>> vars) {
  AbstractEnv e;
  for (const auto& [v, i] : vars) e.set(v, i);
  return e;
}

Cond cmp(Expr l, RelOp op, Expr r) { return Cond::compare(std::move(l), op, std::move(r)); }

TEST(Eval, Examples) {
  const AbstractEnv e = env_of({{"x", iv(0, 10)}, {"y", iv(-2, 3)}});
  EXPECT_EQ(eval(Expr::var("x") + Expr::var("y"), e), iv(-2, 13));
  EXPECT_EQ(eval(Expr::var("x") - Expr::var("x"), e), iv(-10, 10));
  EXPECT_EQ(eval(Expr::nondet(), e), Interval::top());
  EXPECT_EQ(eval(Expr::constant(7), e), iv(7, 7));
}

TEST(Filter, SingleVariableAgainstConstant) {
  const auto i = Expr::var("i");
  const AbstractEnv e = env_of({{"i", iv(0, kInf)}});
  EXPECT_EQ(filter(cmp(i, RelOp::Lt, Expr::constant(1000)), e).get("i"), iv(0, 999));
  EXPECT_EQ(filter(cmp(i, RelOp::Ge, Expr::constant(1000)), e).get("i"), iv(1000, kInf));
  EXPECT_EQ(filter(cmp(i, RelOp::Eq, Expr::constant(5)), e).get("i"), iv(5, 5));
  EXPECT_EQ(filter(cmp(i, RelOp::Ne, Expr::constant(0)), e).get("i"), iv(1, kInf));
  EXPECT_TRUE(filter(cmp(i, RelOp::Gt, Expr::constant(42)), env_of({{"i", iv(0, 42)}})).is_unreachable());
  EXPECT_EQ(filter(Cond::star(), e), e);
}

TEST(Filter, TwoVariables) {
  const AbstractEnv e = env_of({{"x", iv(0, 10)}, {"y", iv(0, 5)}});
  const AbstractEnv f = filter(cmp(Expr::var("x"), RelOp::Lt, Expr::var("y")), e);
  EXPECT_EQ(f.get("x"), iv(0, 4));
  EXPECT_EQ(f.get("y"), iv(1, 5));
}

TEST(AssertProved, NegationIsUnreachable) {
  const Cond c = cmp(Expr::var("i"), RelOp::Lt, Expr::constant(1000));
  EXPECT_TRUE(assert_proved(c, env_of({{"i", iv(0, 42)}})));
  EXPECT_FALSE(assert_proved(c, env_of({{"i", iv(0, 1000)}})));
  EXPECT_TRUE(assert_proved(c, AbstractEnv::unreachable()));
}

// ------------------------------------------------------------- trigger loop

std::string sample(const std::string& name) {
  std::ifstream in(std::string(CWB_SAMPLES_DIR) + "/" + name);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct LoopRun {
  Interval head;
  bool proved;
};

LoopRun run_trigger(const std::string& file, AbstractEnv entry, unsigned narrow) {
  const ir::Cfg g = ir::build_cfg(ir::parse_program(sample(file)));
  const auto res = analyze_intervals(g, entry, {0, narrow});
  const auto head = std::find(res.loop_heads.begin(), res.loop_heads.end(), true);
  EXPECT_NE(head, res.loop_heads.end());
  EXPECT_EQ(std::count(res.loop_heads.begin(), res.loop_heads.end(), true), 1);
  EXPECT_EQ(res.asserts.size(), 1u);
  return {res.envs[static_cast<size_t>(head - res.loop_heads.begin())].get("i"), res.all_proved()};
}

TEST(TriggerLoop, WideningOnly) {
  const auto r = run_trigger("trigger_loop.toy", {}, 0);
  EXPECT_EQ(r.head, iv(0, kInf));
  EXPECT_FALSE(r.proved);
}

TEST(TriggerLoop, OneNarrowingPass) {
  const auto r = run_trigger("trigger_loop.toy", {}, 1);
  EXPECT_EQ(r.head, iv(0, 999));
  EXPECT_FALSE(r.proved);
}

TEST(TriggerLoop, LargerEntryProves) {
  const auto r = run_trigger("trigger_loop_pre.toy", env_of({{"i", iv(0, 42)}}), 1);
  EXPECT_EQ(r.head, iv(0, 42));
  EXPECT_TRUE(r.proved);
}

TEST(TriggerLoop, NotMonotoneInEntry) {
  // a smaller entry state yields a weaker result
  const auto small = run_trigger("trigger_loop_pre.toy", env_of({{"i", iv(0, 0)}}), 1);
  const auto large = run_trigger("trigger_loop_pre.toy", env_of({{"i", iv(0, 42)}}), 1);
  EXPECT_FALSE(small.proved);
  EXPECT_TRUE(large.proved);
  EXPECT_FALSE(small.head.leq(large.head));
}

TEST(TriggerLoop, LongWidenDelayConvergesWithoutWidening) {
  const ir::Cfg g = ir::build_cfg(ir::parse_program(sample("trigger_loop.toy")));
  const auto res = analyze_intervals(g, {}, {50, 0});
  const auto head = static_cast<size_t>(std::find(res.loop_heads.begin(), res.loop_heads.end(), true) - res.loop_heads.begin());
  EXPECT_EQ(res.envs[head].get("i"), iv(0, 42));
  EXPECT_TRUE(res.all_proved());
}

// ------------------------------------------------------------- properties

Interval random_interval(testkit::Rng& rng) {
  if (rng.chance(0.05)) return Interval::bottom();
  const Bound lo = rng.chance(0.15) ? kNegInf : Bound(rng.range(-20, 20));
  const Bound hi = rng.chance(0.15) ? kInf : Bound(rng.range(-20, 20));
  return lo <= hi ? iv(lo, hi) : iv(hi, lo);
}

TEST(Properties, WideningLaws) {
  testkit::Rng rng(31);
  for (int n = 0; n < 5000; ++n) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const Interval w = a.widen(b);
    ASSERT_TRUE(a.leq(w));
    ASSERT_TRUE(b.leq(w));
    // chains stabilize after at most two strict increases
    Interval x = a;
    int strict = 0;
    for (int k = 0; k < 20; ++k) {
      const Interval next = x.widen(x.join(random_interval(rng)));
      if (!(next == x)) ++strict;
      x = next;
    }
    ASSERT_LE(strict, 3);  // bottom to finite, then one per bound
  }
}

TEST(Properties, FilterIsSoundAndReductive) {
  testkit::Rng rng(32);
  const std::vector<RelOp> ops{RelOp::Lt, RelOp::Le, RelOp::Eq, RelOp::Ne, RelOp::Ge, RelOp::Gt};
  for (int n = 0; n < 3000; ++n) {
    const int64_t xl = rng.range(-6, 6), xh = xl + rng.range(0, 6);
    const int64_t yl = rng.range(-6, 6), yh = yl + rng.range(0, 6);
    const AbstractEnv e = env_of({{"x", iv(xl, xh)}, {"y", iv(yl, yh)}});
    auto operand = [&] {
      switch (rng.range(0, 3)) {
        case 0: return Expr::var("x");
        case 1: return Expr::var("y");
        case 2: return Expr::constant(rng.range(-8, 8));
        default: return Expr::var("x") + Expr::var("y");
      }
    };
    const Cond c = cmp(operand(), rng.pick(ops), operand());
    const AbstractEnv f = filter(c, e);
    ASSERT_TRUE(f.leq(e));
    const ir::Cfg names = ir::build_cfg(ir::parse_program("int x; int y;"));
    for (int64_t x = xl; x <= xh; ++x)
      for (int64_t y = yl; y <= yh; ++y)
        if (bounds::detail::holds_concrete(c, names, {x, y})) {
          ASSERT_FALSE(f.is_unreachable());
          ASSERT_TRUE(f.get("x").contains(x) && f.get("y").contains(y));
        }
  }
}

TEST(Properties, SoundAgainstReachableStores) {
  testkit::Rng rng(33);
  int checked = 0;
  for (int n = 0; n < 1500; ++n) {
    const std::string src = testkit::random_fragment_source(rng);
    const ir::Cfg g = ir::build_cfg(ir::parse_program(src));
    const auto entry = testkit::random_entry_range(rng);
    std::vector<std::set<bounds::Store>> stores;
    try {
      stores = bounds::explore_stores(g, {{"i", entry}}, {{-128, 1100}, 100'000});
    } catch (const std::runtime_error&) {
      continue;
    }
    ++checked;
    const auto opts = rng.pick(std::vector<IntervalOptions>{{0, 0}, {0, 1}, {0, 2}, {2, 1}});
    const auto widened = analyze_intervals(g, env_of({{"i", iv(entry.lo, entry.hi)}}), {opts.widen_delay, 0});
    const auto res = analyze_intervals(g, env_of({{"i", iv(entry.lo, entry.hi)}}), opts);
    for (ir::LocId l = 0; l < g.num_locations; ++l) {
      ASSERT_TRUE(res.envs[l].leq(widened.envs[l])) << src;
      for (const auto& s : stores[l]) ASSERT_TRUE(res.envs[l].get("i").contains(s[0])) << src << "location " << l;
    }
    for (const auto& v : res.asserts) {
      if (!v.proved) continue;
      for (const auto& s : stores[v.source]) ASSERT_TRUE(bounds::detail::holds_concrete(v.cond, g, s)) << src;
    }
  }
  EXPECT_GT(checked, 1000);
}

}  // namespace
