#include <gtest/gtest.h>

#include "common.hpp"

using namespace pcfl;
using namespace pcfl::testutil;

namespace {

const char* kHalf = "((\\x:int. \\y:bool. y) (+) (\\x:int. (fix f:int -> bool -> bool. f) 0)) 0";
const char* kGeo = "(fix x:int -> int. (\\y:int. y) (+) (\\y:int. x (y + 1))) 0";
const char* kRetry = "(fix x:int -> int. (\\y:int. y) (+) x) 0";

}  // namespace

TEST(Values, Grammar) {
  EXPECT_TRUE(is_value(P("\\x:bool. x")));
  EXPECT_TRUE(is_value(Term::cons(omega("int"), Term::nil(Type::integer()))));
  EXPECT_TRUE(is_value(P("(1 + 1, 2)")));
  EXPECT_FALSE(is_value(P("fst (1, 2)")));
  EXPECT_TRUE(is_value(P("fix f:int -> int. f")));
}

TEST(EvalBig, OmegaIsEmpty) {
  for (unsigned f : {0u, 1u, 5u, 40u}) EXPECT_TRUE(eval_big(omega("bool"), f).empty());
}

TEST(EvalBig, HalfIdentity) {
  ValueDist d = eval_big(P(kHalf), 4);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(d.prob(id_bool()), Q(1, 2));
}

TEST(EvalBig, Geometric) {
  ValueDist d = eval_big(P(kGeo), 40);
  for (unsigned n = 0; n <= 10; ++n) EXPECT_EQ(d.prob(Term::num(n)), Rational(1, mpz_class(1) << (n + 1)));
}

TEST(EvalBig, FuelZeroIsEmpty) { EXPECT_TRUE(eval_big(P("true"), 0).empty()); }

TEST(EvalBig, Rules) {
  EXPECT_EQ(eval_big(P("fst (1, (fix f:int -> int. f) 0)"), 5).prob(Term::num(1)), 1);
  EXPECT_EQ(eval_big(P("if 2 <= 1 then 1 else 2"), 5).prob(Term::num(2)), 1);
  EXPECT_EQ(eval_big(P("case nil[int] of { nil -> 3 | h::t -> h }"), 5).prob(Term::num(3)), 1);
  EXPECT_EQ(eval_big(P("case 1 + 1 :: nil[int] of { nil -> 3 | h::t -> h }"), 5).prob(Term::num(2)), 1);
  EXPECT_EQ(eval_big(P("(fix f:int -> int. \\x:int. if x == 0 then 7 else f 0) 3"), 10).prob(Term::num(7)), 1);
}

TEST(Step, Examples) {
  StepResult r = step(omega("bool"));
  ASSERT_EQ(r.kind, StepResult::Kind::Reduced);
  ASSERT_EQ(r.reducts.size(), 1u);
  EXPECT_TRUE(alpha_equal(r.reducts[0], omega("bool")));

  r = step(P("1 (+) 2"));
  ASSERT_EQ(r.reducts.size(), 2u);
  EXPECT_TRUE(alpha_equal(r.reducts[0], Term::num(1)));
  EXPECT_TRUE(alpha_equal(r.reducts[1], Term::num(2)));

  r = step(Term::fst(Term::pair(Term::num(1), omega("int"))));
  ASSERT_EQ(r.reducts.size(), 1u);
  EXPECT_TRUE(alpha_equal(r.reducts[0], Term::num(1)));

  EXPECT_EQ(step(P("true")).kind, StepResult::Kind::Value);
  EXPECT_EQ(step(P("fst 1")).kind, StepResult::Kind::Stuck);
}

TEST(Step, Progress) {
  for (std::size_t s = 1; s <= 6; ++s)
    for (const auto& ty : {Type::integer(), Type::boolean()})
      for (const auto& m : detail::enum_terms({}, ty, s, 2, 0))
        if (!is_value(m)) {
          EXPECT_EQ(step(m).kind, StepResult::Kind::Reduced) << m.str();
        }
}

TEST(EvalSmall, Examples) {
  Term v = P("\\x:bool. x");
  EXPECT_EQ(eval_small(v, 0).prob(v), 1);
  Term io = Term::choice(id_bool(), omega("bool -> bool"));
  for (unsigned f : {1u, 3u, 10u}) EXPECT_EQ(eval_small(io, f).mass(), Q(1, 2));
  Rational prev = 0;
  for (unsigned f : {4u, 8u, 16u, 32u, 64u}) {
    ValueDist d = eval_small(P(kRetry), f);
    EXPECT_EQ(d.size(), 1u);
    EXPECT_GE(d.mass(), prev);
    prev = d.mass();
  }
  EXPECT_GT(prev, Q(1) - Q(1, 1000));
}

TEST(Mass, Examples) {
  EXPECT_EQ(ValueDist().mass(), 0);
  ValueDist d;
  d.add(alpha_key(Term::num(0)), Term::num(0), Q(1, 2));
  d.add(alpha_key(Term::num(1)), Term::num(1), Q(1, 4));
  EXPECT_EQ(mass(d), Q(3, 4));
}

TEST(EvalBig, AgreesWithUnfolding) {
  for (const auto& ty : {Type::integer(), Type::boolean()})
    for (std::size_t s = 1; s <= 6; ++s)
      for (const auto& m : detail::enum_terms({}, ty, s, 2, 0)) {
        std::map<std::string, Rational> ref;
        unfold(m, 1, 64, ref);
        EXPECT_EQ(keyed(eval_big(m, 64)), ref) << m.str();
      }
}

TEST(EvalBig, MonotoneInFuel) {
  for (const char* src : {kHalf, kGeo, kRetry, "fst ((1 (+) 2) + 3, true)"}) {
    Term m = P(src);
    ValueDist prev;
    for (unsigned f = 0; f <= 24; ++f) {
      ValueDist d = eval_big(m, f);
      EXPECT_TRUE(prev.leq(d)) << src << " at fuel " << f;
      prev = d;
    }
  }
}

TEST(EvalBig, DyadicAndTyped) {
  for (const auto& t : corpus().terms) {
    ValueDist d = eval_big(t.term, 24);
    for (const auto& [k, e] : d.entries()) {
      EXPECT_TRUE(power_of_two(e.prob.get_den())) << t.name;
      EXPECT_EQ(infer(e.value), t.type) << t.name;
    }
    EXPECT_LE(d.mass(), 1);
  }
}

TEST(EvalBig, BetaValue) {
  std::vector<std::pair<Term, Term>> redexes = {
      {P("\\x:int. x + x (+) 3"), Term::num(2)},
      {P("\\p:int * bool. if snd p then fst p else 0"), P("(1 (+) 2, true)")},
      {P("\\b:bool. if b then b else false"), P("true")}};
  for (const auto& [lam, v] : redexes) {
    Term redex = Term::app(lam, v);
    Term contracted = subst(lam.body(), v, lam.name());
    for (unsigned f = 0; f <= 12; ++f) EXPECT_TRUE(eval_big(redex, f + 2).leq(eval_big(contracted, f + 2)));
    EXPECT_EQ(eval_big(redex, 30), eval_big(contracted, 30));
  }
}

TEST(EvalExact, ClosedGraphs) {
  ExactResult r = eval_exact(P(kRetry));
  ASSERT_TRUE(r.closed);
  EXPECT_EQ(r.dist.prob(Term::num(0)), 1);
  EXPECT_TRUE(eval_exact(omega("bool")).closed);
  EXPECT_TRUE(eval_exact(omega("bool")).dist.empty());
  EXPECT_FALSE(eval_exact(P(kGeo), 200).closed);
}

TEST(EvalExact, MatchesStableFuel) {
  for (const auto& t : corpus().terms) {
    if (!t.finite) continue;
    ExactResult r = eval_exact(t.term);
    ASSERT_TRUE(r.closed) << t.name;
    if (t.name == "retry") continue;  // a cycle with exit: reached only in the limit
    EXPECT_EQ(r.dist, eval_big(t.term, 64)) << t.name;
  }
}

TEST(Approximate, Deficit) {
  Approx a = approximate(P(kGeo), 20);
  EXPECT_FALSE(a.exact);
  EXPECT_EQ(a.dist.mass() + a.deficit, 1);
  Approx b = approximate(P(kHalf), 1);
  EXPECT_TRUE(b.exact);
  EXPECT_EQ(b.deficit, 0);
}

TEST(Arithmetic, Overflow) {
  Term big = Term::num(std::numeric_limits<std::uint64_t>::max());
  EXPECT_THROW(eval_big(Term::op(Op::Add, big, Term::num(1)), 4), ResourceLimit);
}
