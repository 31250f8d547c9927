#include <gtest/gtest.h>

#include "common.hpp"

using namespace pcfl;
using namespace pcfl::testutil;

namespace {

const char* kWitness = "eval.arg(false).eval.arg(false).<eval.w, eval.w>";

Type cex_type() { return T("bool -> bool -> bool -> bool"); }

LmcFragment joint(const Term& m, const Term& n, const Type& sigma, std::size_t depth) {
  LmcConfig cfg;
  cfg.depth = depth;
  return build_fragment({LmcState::program(m, sigma), LmcState::program(n, sigma)}, arg_universe_for(sigma, 2), cfg);
}

Rational ctx_mass(const Context& c, const Term& m) {
  ExactResult r = eval_exact(fill(c, m));
  EXPECT_TRUE(r.closed);
  return r.dist.mass();
}

}  // namespace

TEST(ParseTest, RoundTrip) {
  for (const char* src : {"w", "eval.w", kWitness, "ty(int -> int).arg(\\x:int. x).num(3).w", "fst.snd.hd.tl.nil.w",
                          "bool(true).w"}) {
    pcfl::Test t = parse_test(src);
    EXPECT_EQ(parse_test(t.str()).str(), t.str()) << src;
  }
  EXPECT_EQ(parse_test(kWitness).depth(), 5u);
  EXPECT_THROW(parse_test("eval."), SyntaxError);
  EXPECT_THROW(parse_test("<eval.w>"), std::exception);
}

TEST(SuccessProb, OmegaIsOne) {
  LmcFragment f = joint(corpus().at("id").term, corpus().at("not").term, T("bool -> bool"), 3);
  for (std::size_t s = 0; s < f.size(); ++s) EXPECT_EQ(success_prob(f, s, pcfl::Test::omega()), Interval::exact(1));
}

TEST(SuccessProb, HalfIdentity) {
  Term io = Term::choice(id_bool(), omega("bool -> bool"));
  LmcFragment f = build_fragment({LmcState::program(io, T("bool -> bool"))}, {}, LmcConfig{});
  EXPECT_EQ(success_prob(f, 0, parse_test("eval.w")), Interval::exact(Q(1, 2)));
  EXPECT_EQ(success_prob(f, 0, parse_test("fst.w")), Interval::exact(0));
}

TEST(SuccessProb, CounterexampleWitness) {
  // By hand: M runs Omega (+) I twice (1/2 * 1/2); N commits once and then
  // either diverges or returns I with certainty (1/2 * 1).
  LmcFragment f = joint(corpus().at("cex_m").term, corpus().at("cex_n").term, cex_type(), 6);
  std::size_t r = *f.find(LmcState::program(corpus().at("cex_n").term, cex_type()));
  pcfl::Test t = parse_test(kWitness);
  EXPECT_EQ(success_prob(f, 0, t), Interval::exact(Q(1, 4)));
  EXPECT_EQ(success_prob(f, r, t), Interval::exact(Q(1, 2)));
  pcfl::Test single = parse_test("eval.arg(false).eval.arg(false).eval.w");
  EXPECT_EQ(success_prob(f, 0, single), success_prob(f, r, single));
}

TEST(SuccessProb, FrontierIsUnknown) {
  LmcFragment f = joint(corpus().at("cex_m").term, corpus().at("cex_n").term, cex_type(), 2);
  Interval iv = success_prob(f, 0, parse_test(kWitness));
  EXPECT_EQ(iv.lo, 0);
  EXPECT_EQ(iv.hi, 1);
}

TEST(SuccessProb, ConjunctionUnit) {
  LmcFragment f = joint(corpus().at("exp").term, corpus().at("rnd").term, cex_type().right(), 5);
  for (const auto& t : {parse_test("eval.arg(true).eval.w"), parse_test("eval.arg(false).eval.arg(true).eval.w")}) {
    TestEvaluator ev(f);
    EXPECT_EQ(ev.eval(pcfl::Test::conj({t, pcfl::Test::omega()})), ev.eval(t));
  }
}

TEST(Search, SameStateHasNoWitness) {
  LmcFragment f = joint(corpus().at("id").term, corpus().at("not").term, T("bool -> bool"), 4);
  EXPECT_FALSE(find_distinguishing_test(f, 0, 0));
}

TEST(Search, SeparatesIdentityAndNegation) {
  LmcFragment f = joint(corpus().at("id").term, corpus().at("not").term, T("bool -> bool"), 4);
  std::size_t r = *f.find(LmcState::program(corpus().at("not").term, T("bool -> bool")));
  auto w = find_distinguishing_test(f, 0, r);
  ASSERT_TRUE(w);
  EXPECT_TRUE(w->left.disjoint(w->right));
  EXPECT_EQ(success_prob(f, 0, w->test), w->left);
  EXPECT_EQ(success_prob(f, r, w->test), w->right);
}

TEST(Search, EquivalentPairHasNone) {
  Type sigma = cex_type().right();
  LmcFragment f = joint(corpus().at("exp_fst").term, corpus().at("exp_snd").term, sigma, 6);
  std::size_t r = *f.find(LmcState::program(corpus().at("exp_snd").term, sigma));
  EXPECT_FALSE(find_distinguishing_test(f, 0, r, {4, 200000}));
}

TEST(Search, ResourceLimit) {
  LmcFragment f = joint(corpus().at("exp").term, corpus().at("rnd").term, cex_type().right(), 6);
  EXPECT_THROW(enumerate_tests(f, {4, 5}, [](const pcfl::Test&, const TestEvaluator::Vec&) { return false; }),
               ResourceLimit);
}

TEST(Compile, OmegaContext) {
  CompiledTest c = compile_test(pcfl::Test::omega(), Type::integer());
  EXPECT_EQ(ctx_mass(c.c, P("1 (+) 2")), 1);
  EXPECT_EQ(ctx_mass(c.c, omega("int")), 1);
}

TEST(Compile, EvalOnHalfIdentity) {
  Term io = Term::choice(id_bool(), omega("bool -> bool"));
  CompiledTest c = compile_test(parse_test("eval.w"), T("bool -> bool"));
  EXPECT_EQ(ctx_mass(c.c, io), Q(1, 2));
}

TEST(Compile, NumberObservation) {
  CompiledTest c = compile_test(parse_test("num(3).w"), Type::integer());
  EXPECT_EQ(ctx_mass(c.d, Term::num(3)), 1);
  EXPECT_EQ(ctx_mass(c.d, Term::num(4)), 0);
  CompiledTest e = compile_test(parse_test("eval.num(3).w"), Type::integer());
  EXPECT_EQ(ctx_mass(e.c, P("3 (+) 4")), Q(1, 2));
}

TEST(Compile, ContextsAreBoolean) {
  std::vector<std::pair<Term, Type>> subjects;
  for (const char* name : {"cex_m", "lazy_pair", "coin_list", "is_two", "exp"})
    subjects.emplace_back(corpus().at(name).term, corpus().at(name).type);
  for (const auto& [m, sigma] : subjects)
    for (const auto& t : tests_for(m, sigma, 3)) {
      CompiledTest c = compile_test(t, sigma);
      EXPECT_EQ(check_context({}, c.c, {}, sigma), Type::boolean()) << t.str();
      EXPECT_EQ(check_context({}, c.d, {}, sigma), Type::boolean()) << t.str();
    }
}

TEST(Bridge, Examples) {
  BridgeResult r = bridge_check(corpus().at("cex_m").term, cex_type(), parse_test(kWitness), 32);
  EXPECT_EQ(r.pr, Interval::exact(Q(1, 4)));
  EXPECT_EQ(r.ctx_mass, Interval::exact(Q(1, 4)));
  r = bridge_check(corpus().at("cex_n").term, cex_type(), parse_test(kWitness), 32);
  EXPECT_EQ(r.ctx_mass, Interval::exact(Q(1, 2)));
  r = bridge_check(corpus().at("lazy_pair").term, corpus().at("lazy_pair").type,
                   parse_test("eval.<fst.eval.num(1).w, snd.eval.arg(1).eval.num(2).w>"), 32);
  EXPECT_EQ(r.pr, Interval::exact(Q(1, 2)));
  EXPECT_EQ(r.ctx_mass, r.pr);
}

TEST(Bridge, AgreesOnTerminatingCorpus) {
  std::size_t cases = 0;
  for (const char* name : {"id", "not", "gen", "exp_fst", "rnd", "half_id", "proj", "coin_list", "lazy_pair",
                           "is_two"}) {
    const auto& ct = corpus().at(name);
    for (const auto& t : all_tests(ct.term, ct.type, 3)) {
      BridgeResult r = bridge_check(ct.term, ct.type, t, 32);
      EXPECT_TRUE(r.pr.is_exact()) << name << " " << t.str();
      EXPECT_EQ(r.pr, r.ctx_mass) << name << " " << t.str();
      ++cases;
    }
  }
  EXPECT_GE(cases, 300u);
}

TEST(Witness, SoundByCompiledMasses) {
  const auto& m = corpus().at("cex_m");
  const auto& n = corpus().at("cex_n");
  LmcFragment f = joint(m.term, n.term, cex_type(), 6);
  std::size_t r = *f.find(LmcState::program(n.term, cex_type()));
  auto w = find_distinguishing_test(f, 0, r, {5, 200000});
  ASSERT_TRUE(w);
  CompiledTest c = compile_test(w->test, cex_type());
  Rational a = ctx_mass(c.c, m.term), b = ctx_mass(c.c, n.term);
  EXPECT_NE(a, b);
  EXPECT_EQ(Interval::exact(a), w->left);
  EXPECT_EQ(Interval::exact(b), w->right);
}
