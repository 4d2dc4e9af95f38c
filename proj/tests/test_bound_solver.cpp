#include <gtest/gtest.h>

#include <fstream>

#include "cwb/bounds/exhaustive.hpp"
#include "cwb/bounds/extract.hpp"
#include "cwb/bounds/oracle.hpp"
#include "cwb/bounds/policy.hpp"
#include "cwb/ir/parser.hpp"
#include "support/fragment_check.hpp"
#include "support/generators.hpp"

namespace cwb {
inline void PrintTo(const Bound& b, std::ostream* os) { *os << b.str(); }
inline void PrintTo(const Interval& i, std::ostream* os) { *os << i.str(); }
}  // namespace cwb

namespace {

using namespace cwb;
using namespace cwb::bounds;

const Bound kInf = Bound::pos_inf();
const Bound kNegInf = Bound::neg_inf();

std::string sample(const std::string& name) {
  std::ifstream in(std::string(CWB_SAMPLES_DIR) + "/" + name);
  return {std::istreambuf_iterator<char>(in), {}};
}

Valuation both_solvers(const BoundSystem& sys) {
  const Valuation ex = solve_exhaustive(sys);
  const Valuation pi = solve_policy_iteration(sys);
  EXPECT_EQ(ex, pi) << dump(sys);
  EXPECT_TRUE(sys.is_solution(ex)) << dump(sys);
  return ex;
}

// ------------------------------------------------------------- loop equation

/// Plain Kleene iteration from -oo; the least fixpoint when it converges.
std::optional<Valuation> kleene(const BoundSystem& sys, int max_steps = 400) {
  Valuation v(sys.size(), kNegInf);
  for (int k = 0; k < max_steps; ++k) {
    const Valuation next = sys.apply(v);
    if (next == v) return v;
    v = next;
  }
  return std::nullopt;
}


const char* kLoopEquation = "h = min(max(min(42, h + 1), h), 999)\n";
const char* kAnchoredLoopEquation = "h = max(0, min(max(min(42, h + 1), h), 999))\n";

TEST(LoopEquation, FortyTwoAndNineNineNineAreSolutions) {
  const BoundSystem sys = parse_system(kLoopEquation);
  EXPECT_TRUE(sys.is_solution({Bound(42)}));
  EXPECT_TRUE(sys.is_solution({Bound(999)}));
  EXPECT_TRUE(sys.is_solution({Bound(500)}));
  EXPECT_FALSE(sys.is_solution({Bound(41)}));
  EXPECT_FALSE(sys.is_solution({Bound(1000)}));
}

TEST(LoopEquation, WithoutEntryTheLeastSolutionIsEmpty) {
  // nothing feeds h, so -oo is a fixpoint below 42
  const BoundSystem sys = parse_system(kLoopEquation);
  EXPECT_EQ(both_solvers(sys), Valuation{kNegInf});
}

TEST(LoopEquation, EntryAnchoredSolvesToFortyTwo) {
  const BoundSystem sys = parse_system(kAnchoredLoopEquation);
  EXPECT_EQ(both_solvers(sys), Valuation{Bound(42)});
  EXPECT_TRUE(sys.is_solution({Bound(999)}));
}

TEST(LoopEquation, PolicyEndsOnTheInnerMinArgument) {
  const auto res = solve_policy_iteration_traced(parse_system(kAnchoredLoopEquation));
  ASSERT_FALSE(res.trace.empty());
  const auto& last = res.trace.back();
  ASSERT_EQ(last.max_right.size(), 2u);
  EXPECT_TRUE(last.max_right[0]);   // max(0, .) takes the loop value
  EXPECT_FALSE(last.max_right[1]);  // max(min(42, h + 1), h) takes min(42, h + 1)
  EXPECT_EQ(last.values, Valuation{Bound(42)});
}

struct TriggerSystem {
  ir::Cfg g;
  ExtractedSystem ex;
  ir::LocId head;
};

TriggerSystem trigger_system(const std::string& src) {
  TriggerSystem t{ir::build_cfg(ir::parse_program(src)), {}, 0};
  t.ex = extract_upper_bounds(t.g, "i");
  const auto dfs = ir::depth_first(t.g);
  t.head = static_cast<ir::LocId>(std::find(dfs.is_loop_head.begin(), dfs.is_loop_head.end(), true) - dfs.is_loop_head.begin());
  return t;
}

TEST(TriggerLoop, ExtractedSystemSolvesToFortyTwo) {
  const auto t = trigger_system(sample("trigger_loop.toy"));
  const Valuation v = both_solvers(t.ex.system);
  EXPECT_EQ(v[t.ex.hi[t.head]], Bound(42));
  EXPECT_EQ(t.ex.interval_at(v, t.head), Interval(0, 42));
  EXPECT_EQ(count_distinct_choices(t.ex.system), 19u);
}

TEST(TriggerLoop, HeadEquationHasTheLoopShape) {
  const auto t = trigger_system(sample("trigger_loop.toy"));
  const BoundSystem head = inline_into(t.ex.system, {t.ex.hi[t.head], t.ex.nlo[t.head]});
  const std::string text = dump(head);
  EXPECT_NE(text.find("min(42, hi_"), std::string::npos) << text;
  EXPECT_NE(text.find("min(999, "), std::string::npos) << text;
  EXPECT_EQ(kleene(head), (Valuation{Bound(42), Bound(0)}));
  EXPECT_EQ(solve_policy_iteration(head), (Valuation{Bound(42), Bound(0)}));
  // 999 is a fixpoint too, just not the least one
  EXPECT_TRUE(head.is_solution({Bound(999), Bound(0)}));
  EXPECT_LT(Bound(42), Bound(999));
}

TEST(TriggerLoop, SevenVariantAgreesWithOracle) {
  std::string src = sample("trigger_loop.toy");
  src.replace(src.find("42"), 2, "7");
  const auto t = trigger_system(src);
  const Valuation v = both_solvers(t.ex.system);
  EXPECT_EQ(v[t.ex.hi[t.head]], Bound(7));
  const auto oracle = bounded_concrete_oracle(t.g, "i", {-1, 1100}, {{"i", {0, 0}}});
  EXPECT_EQ(oracle[t.head], Interval(0, 7));
}

TEST(TriggerLoop, CapExceeded) {
  const auto t = trigger_system(sample("trigger_loop.toy"));
  EXPECT_THROW(solve_exhaustive(t.ex.system, {5}), CapExceeded);
  EXPECT_NO_THROW(solve_exhaustive(t.ex.system, {19}));
}

// ------------------------------------------------------------- small systems

TEST(Solvers, StableEntryValue) {
  EXPECT_EQ(both_solvers(parse_system("h = min(10, max(0, h))\n")), Valuation{Bound(0)});
}

TEST(Solvers, MinOnlyLoopWithEntry) {
  EXPECT_EQ(both_solvers(parse_system("h = max(0, min(5, h + 1))\n")), Valuation{Bound(5)});
}

TEST(Solvers, ConstantInOnePolicyRound) {
  const auto res = solve_policy_iteration_traced(parse_system("h = 3\n"));
  EXPECT_EQ(res.values, Valuation{Bound(3)});
  EXPECT_EQ(res.trace.size(), 1u);
}

TEST(Solvers, PositiveCycleGoesToInfinity) {
  EXPECT_EQ(both_solvers(parse_system("h = max(0, h + 1)\n")), Valuation{kInf});
}

TEST(Solvers, GuardsAndChains) {
  const BoundSystem open = parse_system("a = max(1, b - 1)\nb = guard(a > 0, a + 2)\nc = guard(b > 10, 7)\n");
  EXPECT_EQ(both_solvers(open), (Valuation{kInf, kInf, Bound(7)}));
  const BoundSystem closed = parse_system("a = max(1, b - 3)\nb = guard(a > 0, a + 2)\nc = guard(b > 10, 7)\n");
  EXPECT_EQ(both_solvers(closed), (Valuation{Bound(1), Bound(3), kNegInf}));
}

// ------------------------------------------------------------- extraction

TEST(Extract, StraightLine) {
  const ir::Cfg g = ir::build_cfg(ir::parse_program("int i;\ni = 0;\ni = i + 1;\n"));
  const auto ex = extract_upper_bounds(g, "i");
  const Valuation v = both_solvers(ex.system);
  std::vector<Interval> seen;
  for (ir::LocId l = 0; l < g.num_locations; ++l) seen.push_back(ex.interval_at(v, l));
  EXPECT_EQ(seen, (std::vector<Interval>{Interval::top(), Interval(0, 0), Interval(1, 1)}));
  EXPECT_EQ(count_distinct_choices(ex.system), 2u);  // entry guards only
}

TEST(Extract, UnsupportedConstructs) {
  auto extract = [](const char* src) {
    return extract_upper_bounds(ir::build_cfg(ir::parse_program(src)), "i");
  };
  EXPECT_THROW(extract("int i; int j;\ni = i + j;\n"), UnsupportedConstruct);
  EXPECT_THROW(extract("int i;\nif (i != 3) { i = 0; }\n"), UnsupportedConstruct);
  EXPECT_THROW(extract("int i;\ni = 2 - i;\n"), UnsupportedConstruct);
  try {
    extract("int i; int j;\ni = i + j;\n");
  } catch (const UnsupportedConstruct& e) {
    EXPECT_NE(std::string(e.what()).find("i + j"), std::string::npos) << e.what();
  }
}

TEST(Extract, EntryIntervalSeedsTheSystem) {
  const ir::Cfg g = ir::build_cfg(ir::parse_program(sample("trigger_loop_pre.toy")));
  const auto ex = extract_upper_bounds(g, "i", Interval(0, 42));
  const Valuation v = both_solvers(ex.system);
  const auto dfs = ir::depth_first(g);
  for (ir::LocId l = 0; l < g.num_locations; ++l)
    if (dfs.is_loop_head[l]) {
      EXPECT_EQ(ex.interval_at(v, l), Interval(0, 42));
    }
}

// ------------------------------------------------------------- oracle

TEST(Oracle, Examples) {
  const auto t = trigger_system(sample("trigger_loop.toy"));
  EXPECT_EQ(bounded_concrete_oracle(t.g, "i", {-1, 1100}, {{"i", {0, 0}}})[t.head], Interval(0, 42));
  const ir::Cfg g = ir::build_cfg(ir::parse_program("int i;\ni = 0;\n"));
  EXPECT_EQ(bounded_concrete_oracle(g, "i", {-1, 10}, {{"i", {3, 3}}}).back(), Interval(0, 0));
}

TEST(Oracle, Errors) {
  const ir::Cfg g = ir::build_cfg(ir::parse_program("int i;\ni = 0;\nwhile (*) { i = i + 1; }\n"));
  EXPECT_THROW(bounded_concrete_oracle(g, "i", {-1, 100}, {{"i", {0, 0}}}), OracleRangeExceeded);
  OracleOptions tight;
  tight.budget = 10;
  EXPECT_THROW(reachable_values(g, "i", {{"i", {0, 0}}}, tight), OracleBudgetExceeded);
}

// ------------------------------------------------------------- text form

TEST(SystemText, ParseErrorsCarryLines) {
  try {
    parse_system("a = 1\nb = max(a, \n");
    FAIL() << "expected a parse error";
  } catch (const SystemParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_system("a = b\n"), SystemParseError);
}

// ------------------------------------------------------------- properties

bool pointwise_leq(const Valuation& a, const Valuation& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (b[i] < a[i]) return false;
  return true;
}

TEST(Properties, RandomSystemsSolversAgree) {
  testkit::Rng rng(555);
  int compared = 0;
  int by_kleene = 0;
  for (int n = 0; n < 3000; ++n) {
    const BoundSystem sys = testkit::random_system(rng);
    if (count_distinct_choices(sys) > 20) continue;
    ++compared;
    const Valuation ex = solve_exhaustive(sys);
    const Valuation pi = solve_policy_iteration(sys);
    ASSERT_EQ(ex, pi) << dump(sys);
    ASSERT_TRUE(sys.is_solution(ex)) << dump(sys);
    if (const auto lfp = kleene(sys)) {
      ++by_kleene;
      ASSERT_EQ(ex, *lfp) << dump(sys);
    }
  }
  EXPECT_GT(compared, 1000);
  EXPECT_GT(by_kleene, 500);
}

TEST(Properties, NoSmallerSolutionInABox) {
  testkit::Rng rng(556);
  std::vector<Bound> box{kNegInf, kInf};
  for (int64_t c = -25; c <= 25; ++c) box.emplace_back(c);
  for (int n = 0; n < 300; ++n) {
    testkit::SystemShape shape;
    shape.max_vars = 2;
    const BoundSystem sys = testkit::random_system(rng, shape);
    if (count_distinct_choices(sys) > 20) continue;
    const Valuation least = solve_policy_iteration(sys);
    Valuation v(sys.size());
    std::function<void(size_t)> each = [&](size_t i) {
      if (i == sys.size()) {
        if (sys.is_solution(v)) {
          ASSERT_TRUE(pointwise_leq(least, v)) << dump(sys);
        }
        return;
      }
      for (const Bound& b : box) {
        v[i] = b;
        each(i + 1);
      }
    };
    each(0);
  }
}

TEST(Properties, TextRoundTrip) {
  testkit::Rng rng(557);
  for (int n = 0; n < 1000; ++n) {
    const BoundSystem sys = testkit::random_system(rng);
    const BoundSystem back = parse_system(dump(sys));
    ASSERT_EQ(dump(back), dump(sys));
    ASSERT_EQ(back.apply(Valuation(sys.size(), Bound(3))), sys.apply(Valuation(sys.size(), Bound(3))));
  }
}

TEST(Properties, FragmentsMatchOracle) {
  testkit::Rng rng(12345);
  int agree_with_choices = 0;
  int attempts = 0;
  for (; attempts < 20000 && agree_with_choices < 500; ++attempts) {
    const std::string src = testkit::random_fragment_source(rng);
    const auto entry = testkit::random_entry_range(rng);
    const auto out = testkit::cross_validate_fragment(src, entry);
    ASSERT_NE(out.status, testkit::FragmentOutcome::Status::Mismatch) << out.detail << "\n" << src;
    if (out.status == testkit::FragmentOutcome::Status::Agree && out.choices > 0) ++agree_with_choices;
  }
  EXPECT_GE(agree_with_choices, 500) << "after " << attempts << " programs";
}

}  // namespace
