#include <gtest/gtest.h>

#include "common.hpp"

using namespace pcfl;
using namespace pcfl::testutil;
namespace u = pcfl::untyped;

namespace {

Term untyped_omega() {
  Term w = u::lam("x", u::app(u::var("x"), u::var("x")));
  return u::app(w, w);
}

// Runs an untyped term to its unique value.
Term run(const Term& m) {
  Approx a = approximate_untyped(m, 4096);
  EXPECT_TRUE(a.exact);
  EXPECT_EQ(a.dist.size(), 1u);
  EXPECT_EQ(a.dist.mass(), 1);
  return a.dist.entries().begin()->second.value;
}

}  // namespace

TEST(Embed, Examples) {
  EXPECT_TRUE(alpha_equal(embed(P("\\x:bool. x")), u::lam("x", u::var("x"))));
  EXPECT_TRUE(alpha_equal(embed(P("true")), scott::tt()));
  EXPECT_TRUE(alpha_equal(embed(Term::num(2)), scott::succ_of(scott::succ_of(scott::zero()))));
  EXPECT_TRUE(u::is_untyped(embed(corpus().at("cpa_fst").term)));
  EXPECT_EQ(scott::decode_numeral(scott::numeral(7)), 7u);
  EXPECT_EQ(scott::decode_bool(scott::ff()), false);
  EXPECT_FALSE(scott::decode_numeral(scott::tt()));
}

TEST(Untyped, OmegaIsEmpty) {
  for (unsigned f : {1u, 10u, 100u}) EXPECT_TRUE(eval_untyped(untyped_omega(), f).empty());
  Approx a = approximate_untyped(untyped_omega(), 100);
  EXPECT_TRUE(a.exact);
  EXPECT_TRUE(a.dist.empty());
}

TEST(Untyped, HalfMass) {
  Term i = u::lam("x", u::var("x"));
  Term m = u::choice(i, untyped_omega());
  EXPECT_EQ(eval_untyped(m, 10).mass(), Q(1, 2));
  EXPECT_EQ(approximate_untyped(embed(corpus().at("half_id").term), 512).dist.mass(), Q(1, 2));
}

TEST(Untyped, StepIsWeak) {
  Term v = u::lam("x", u::app(u::lam("y", u::var("y")), u::var("x")));
  EXPECT_EQ(u::step(v).kind, StepResult::Kind::Value);
  EXPECT_EQ(u::step(u::var("x")).kind, StepResult::Kind::Stuck);
}

TEST(Embed, ValueReflection) {
  std::size_t checked = 0;
  for (const auto& t : corpus().terms) {
    if (!t.finite) continue;
    ExactResult src = eval_exact(t.term);
    ASSERT_TRUE(src.closed) << t.name;
    Approx tgt = approximate_untyped(embed(t.term), 1 << 12);
    ASSERT_TRUE(tgt.exact) << t.name;
    EXPECT_EQ(tgt.dist, embed_dist(src.dist)) << t.name << ": " << tgt.dist.str();
    ++checked;
  }
  EXPECT_GE(checked, 10u);
}

TEST(Embed, MassPreservation) {
  std::size_t exact = 0;
  for (const auto& t : corpus().terms) {
    MassComparison c = mass_preservation(t.term, 64);
    EXPECT_TRUE(c.agree) << t.name;
    if (t.finite) {
      EXPECT_TRUE(c.src.is_exact()) << t.name;
      EXPECT_EQ(c.src, c.tgt) << t.name;
      ++exact;
    }
  }
  EXPECT_GE(exact, 10u);
}

TEST(Scott, ArithmeticMatchesNative) {
  for (std::uint64_t a = 0; a <= 5; ++a)
    for (std::uint64_t b = 0; b <= 5; ++b) {
      Term sum = run(u::app(scott::plus(), scott::numeral(a), scott::numeral(b)));
      EXPECT_EQ(scott::decode_numeral(sum), a + b);
      EXPECT_EQ(scott::decode_bool(run(u::app(scott::leq(), scott::numeral(a), scott::numeral(b)))), a <= b);
      EXPECT_EQ(scott::decode_bool(run(u::app(scott::eq(), scott::numeral(a), scott::numeral(b)))), a == b);
    }
}

TEST(Scott, EmbeddedOperators) {
  for (std::uint64_t a = 0; a <= 5; ++a)
    for (std::uint64_t b = 0; b <= 5; ++b) {
      Term src = Term::op(Op::Add, Term::num(a), Term::num(b));
      EXPECT_EQ(scott::decode_numeral(run(embed(src))), a + b);
      EXPECT_TRUE(alpha_equal(run(embed(src)), scott::numeral(a + b)));
      Term cmp = Term::op(Op::Leq, Term::num(a), Term::num(b));
      EXPECT_TRUE(alpha_equal(run(embed(cmp)), scott::boolean(a <= b)));
    }
}

TEST(Embed, FreshNamesAvoidCapture) {
  // Source binders named like the embedder's own helpers.
  Term m = P("(\\x:bool. \\y:bool. if x then y else false) true true");
  EXPECT_TRUE(alpha_equal(run(embed(m)), scott::tt()));
  Term n = P("fst ((\\x:int. (x, x)) 1)");
  EXPECT_EQ(scott::decode_numeral(run(embed(n))), 1u);
}
