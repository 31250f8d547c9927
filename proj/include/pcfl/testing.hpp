#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eval.hpp"
#include "lmc.hpp"
#include "parser.hpp"
#include "syntax.hpp"
#include "typing.hpp"

namespace pcfl {

// ---------------------------------------------------------------------------
// Tests

struct Test {
  enum class Kind { Omega, Prefix, Conj };
  Kind kind = Kind::Omega;
  Label label = Label::eval();  // Prefix only
  std::vector<Test> kids;        // one for Prefix, at least two for Conj

  static Test omega() { return {}; }
  static Test prefix(Label l, Test rest) { return {Kind::Prefix, std::move(l), {std::move(rest)}}; }
  static Test conj(std::vector<Test> ts) {
    if (ts.size() < 2) throw std::invalid_argument("a conjunction needs at least two tests");
    return {Kind::Conj, Label::eval(), std::move(ts)};
  }
  /// a1 . a2 . ... . rest
  static Test path(const std::vector<Label>& labels, Test rest = omega()) {
    for (auto it = labels.rbegin(); it != labels.rend(); ++it) rest = prefix(*it, std::move(rest));
    return rest;
  }

  /// Prefix nesting depth.
  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& k : kids) d = std::max(d, k.depth());
    return kind == Kind::Prefix ? d + 1 : d;
  }

  std::string str() const {
    switch (kind) {
      case Kind::Omega: return "w";
      case Kind::Prefix: return label.str() + "." + kids[0].str();
      case Kind::Conj: {
        std::string s = "<";
        for (std::size_t i = 0; i < kids.size(); ++i) s += (i ? ", " : "") + kids[i].str();
        return s + ">";
      }
    }
    return "?";
  }

  void collect_labels(std::vector<Label>& out) const {
    if (kind == Kind::Prefix) out.push_back(label);
    for (const auto& k : kids) k.collect_labels(out);
  }
};

namespace detail {

inline Label parse_label(Parser& p) {
  const auto& tok = p.peek();
  if (tok.kind != Token::Kind::Ident) p.fail("expected a test label");
  std::string name = p.next().text;
  if (name == "eval") return Label::eval();
  if (name == "fst") return Label::fst();
  if (name == "snd") return Label::snd();
  if (name == "hd") return Label::hd();
  if (name == "tl") return Label::tl();
  if (name == "nil") return Label::nil();
  if (name == "arg") {
    p.expect("(");
    Term v = p.term();
    p.expect(")");
    if (!is_value(v) || !v.closed()) p.fail("arg label needs a closed value");
    return Label::arg(v);
  }
  if (name == "num") {
    p.expect("(");
    auto k = p.number();
    p.expect(")");
    return Label::number(k);
  }
  if (name == "bool") {
    p.expect("(");
    bool b;
    if (p.is_kw("true"))
      b = true;
    else if (p.is_kw("false"))
      b = false;
    else
      p.fail("expected true or false");
    p.next();
    p.expect(")");
    return Label::boolean(b);
  }
  if (name == "ty") {
    p.expect("(");
    Type t = p.type();
    p.expect(")");
    return Label::of_type(t);
  }
  throw SyntaxError("unknown test label '" + name + "'", tok.line, tok.col);
}

inline Test parse_test(Parser& p) {
  if (p.is_kw("w")) {
    p.next();
    return Test::omega();
  }
  if (p.accept("<")) {
    std::vector<Test> ts{parse_test(p)};
    while (p.accept(",")) ts.push_back(parse_test(p));
    p.expect(">");
    if (ts.size() < 2) p.fail("a conjunction needs at least two tests");
    return Test::conj(std::move(ts));
  }
  Label l = parse_label(p);
  p.expect(".");
  return Test::prefix(std::move(l), parse_test(p));
}

}  // namespace detail

inline Test parse_test(std::string_view src) {
  Parser p(src);
  Test t = detail::parse_test(p);
  p.expect_end();
  return t;
}

// ---------------------------------------------------------------------------
// Success probabilities on a fragment

/// Success probability interval of every state of `f` for each test.
/// Frontier states answer [0,1] for any test other than w.
class TestEvaluator {
 public:
  using Vec = std::vector<Interval>;

  explicit TestEvaluator(const LmcFragment& f) : f_(f) {}

  Vec omega() const { return Vec(f_.size(), Interval{1, 1}); }

  Vec prefix(const Label& l, const Vec& rest) const {
    Vec out(f_.size(), Interval{0, 0});
    const std::string lk = l.key();
    for (std::size_t x = 0; x < f_.size(); ++x) {
      if (f_.is_frontier(x)) {
        out[x] = {0, 1};
        continue;
      }
      const Row* r = f_.row(x, lk);
      if (!r) continue;
      Interval iv{0, r->deficit};
      for (const auto& [y, w] : r->succ) {
        iv.lo += w * rest[y].lo;
        iv.hi += w * rest[y].hi;
      }
      out[x] = std::move(iv);
    }
    return out;
  }

  Vec conj(const Vec& a, const Vec& b) const {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = {a[i].lo * b[i].lo, a[i].hi * b[i].hi};
    return out;
  }

  Vec eval(const Test& t) const {
    switch (t.kind) {
      case Test::Kind::Omega: return omega();
      case Test::Kind::Prefix: return prefix(t.label, eval(t.kids[0]));
      case Test::Kind::Conj: {
        Vec v = eval(t.kids[0]);
        for (std::size_t i = 1; i < t.kids.size(); ++i) v = conj(v, eval(t.kids[i]));
        return v;
      }
    }
    return omega();
  }

 private:
  const LmcFragment& f_;
};

inline Interval success_prob(const LmcFragment& f, std::size_t state, const Test& t) {
  return TestEvaluator(f).eval(t).at(state);
}

// ---------------------------------------------------------------------------
// Distinguishing-test search

struct SearchLimits {
  std::size_t max_depth = 4;
  std::size_t max_vectors = 200000;
};

struct Witness {
  Test test;
  Interval left, right;
};

/// Breadth-first enumeration of tests over the fragment's labels. Level d adds a.t
/// for every label a and every test t of lower level, then binary conjunctions of
/// the new prefix tests whose success sets meet. Tests with an already seen vector
/// of intervals over the whole fragment are dropped. Type labels are left out: they
/// self-loop on every state, so they never separate two states of one type.
/// `visit(test, vector)` returns true to stop the enumeration.
template <class Visit>
void enumerate_tests(const LmcFragment& f, const SearchLimits& lim, Visit visit) {
  TestEvaluator ev(f);
  using Vec = TestEvaluator::Vec;
  std::vector<Label> alphabet;
  for (const auto& [k, l] : f.alphabet())
    if (l.kind != Label::Kind::TypeLbl) alphabet.push_back(l);

  std::vector<Test> tests;
  std::vector<Vec> vecs;
  std::set<std::string> seen;
  auto vkey = [](const Vec& v) {
    std::string k;
    for (const auto& iv : v) {
      k += iv.lo.get_str();
      k += ':';
      k += iv.hi.get_str();
      k += ';';
    }
    return k;
  };
  bool stop = false;
  auto offer = [&](Test t, Vec v) {
    if (!seen.insert(vkey(v)).second) return;
    stop = visit(t, v);
    tests.push_back(std::move(t));
    vecs.push_back(std::move(v));
    if (tests.size() > lim.max_vectors)
      throw ResourceLimit("test search exceeded " + std::to_string(lim.max_vectors) + " candidate tests");
  };
  offer(Test::omega(), ev.omega());
  for (std::size_t d = 1; d <= lim.max_depth && !stop; ++d) {
    const std::size_t prev = tests.size();
    for (std::size_t a = 0; a < alphabet.size() && !stop; ++a)
      for (std::size_t i = 0; i < prev && !stop; ++i)
        offer(Test::prefix(alphabet[a], tests[i]), ev.prefix(alphabet[a], vecs[i]));
    const std::size_t level_end = tests.size();
    for (std::size_t i = prev; i < level_end && !stop; ++i) {
      for (std::size_t j = i; j < level_end && !stop; ++j) {
        bool meet = false;
        for (std::size_t x = 0; x < f.size() && !meet; ++x)
          meet = sgn(vecs[i][x].hi) > 0 && sgn(vecs[j][x].hi) > 0;
        if (meet) offer(Test::conj({tests[i], tests[j]}), ev.conj(vecs[i], vecs[j]));
      }
    }
  }
}

/// First enumerated test whose intervals at `s` and `r` are disjoint.
inline std::optional<Witness> find_distinguishing_test(const LmcFragment& f, std::size_t s, std::size_t r,
                                                       const SearchLimits& lim = {}) {
  if (s == r) return std::nullopt;
  std::optional<Witness> found;
  enumerate_tests(f, lim, [&](const Test& t, const TestEvaluator::Vec& v) {
    if (v[s].disjoint(v[r])) found = Witness{t, v[s], v[r]};
    return found.has_value();
  });
  return found;
}

// ---------------------------------------------------------------------------
// Tests as contexts

namespace detail {

class ContextCompiler {
 public:
  struct Pair {
    Term c;  // for program states
    Term d;  // for value states
  };

  Pair compile(const Test& t, const Type& sigma) {
    switch (t.kind) {
      case Test::Kind::Omega: {
        Term c = Term::app(Term::lam(fresh("x"), Type::arrow(Type::integer(), sigma), Term::boolean(true)),
                           Term::lam(fresh("z"), Type::integer(), Term::hole()));
        return {c, c};
      }
      case Test::Kind::Conj: {
        std::vector<Pair> parts;
        for (const auto& k : t.kids) parts.push_back(compile(k, sigma));
        std::string x = fresh("x"), z = fresh("z");
        Type xt = Type::arrow(Type::integer(), sigma);
        // Each conjunct re-evaluates the thunk x 0, so the conjuncts observe
        // independent runs of the filled term.
        Term thunk = Term::app(Term::var(x), Term::num(0));
        auto chain = [&](bool use_d) {
          Term acc = Term::boolean(true);
          for (std::size_t i = parts.size(); i-- > 0;) {
            Term probe = fill(use_d ? parts[i].d : parts[i].c, thunk);
            Term guard = Term::app(Term::lam(fresh("y"), Type::boolean(), Term::boolean(true)), probe);
            acc = Term::ite(guard, acc, Term::boolean(true));
          }
          return acc;
        };
        Term arg = Term::lam(z, Type::integer(), Term::hole());
        Term c = Term::app(Term::lam(x, xt, chain(false)), arg);
        Term d = Term::app(Term::lam(x, xt, chain(true)), arg);
        return {c, d};
      }
      case Test::Kind::Prefix: break;
    }
    const Label& a = t.label;
    const Test& rest = t.kids[0];
    Term div = diverge(sigma);
    switch (a.kind) {
      case Label::Kind::Eval: {
        Pair s = compile(rest, sigma);
        std::string x = fresh("x");
        Term c = Term::app(Term::lam(x, sigma, fill(s.d, Term::var(x))), Term::hole());
        return {c, div};
      }
      case Label::Kind::TypeLbl: {
        if (a.type != sigma) return {div, div};
        return compile(rest, sigma);
      }
      case Label::Kind::Arg: {
        if (!sigma.is(Type::Kind::Arrow) || !well_typed(a.value, sigma.left())) return {div, div};
        Pair s = compile(rest, sigma.right());
        return {div, fill(s.c, Term::app(Term::hole(), a.value))};
      }
      case Label::Kind::Fst:
      case Label::Kind::Snd: {
        if (!sigma.is(Type::Kind::Prod)) return {div, div};
        bool first = a.kind == Label::Kind::Fst;
        Pair s = compile(rest, first ? sigma.left() : sigma.right());
        return {div, fill(s.c, first ? Term::fst(Term::hole()) : Term::snd(Term::hole()))};
      }
      case Label::Kind::Hd:
      case Label::Kind::Tl: {
        if (!sigma.is(Type::Kind::List)) return {div, div};
        bool head = a.kind == Label::Kind::Hd;
        Type target = head ? sigma.left() : sigma;
        Pair s = compile(rest, target);
        std::string h = fresh("h"), tl = fresh("t");
        Term pick = Term::case_of(Term::hole(), omega(target), h, tl, Term::var(head ? h : tl));
        return {div, fill(s.c, pick)};
      }
      case Label::Kind::Nil: {
        if (!sigma.is(Type::Kind::List)) return {div, div};
        Pair s = compile(rest, sigma);
        Term d = Term::case_of(Term::hole(), fill(s.d, Term::nil(sigma.left())), fresh("h"), fresh("t"),
                               omega(Type::boolean()));
        return {div, d};
      }
      case Label::Kind::Num: {
        if (!sigma.is(Type::Kind::Int)) return {div, div};
        Pair s = compile(rest, sigma);
        Term k = Term::num(a.num);
        Term d = Term::ite(Term::op(Op::Eq, Term::hole(), k), fill(s.d, k), omega(Type::boolean()));
        return {div, d};
      }
      case Label::Kind::Bool: {
        if (!sigma.is(Type::Kind::Bool)) return {div, div};
        Pair s = compile(rest, sigma);
        Term hit = fill(s.d, Term::boolean(a.flag));
        Term miss = omega(Type::boolean());
        Term d = a.flag ? Term::ite(Term::hole(), hit, miss) : Term::ite(Term::hole(), miss, hit);
        return {div, d};
      }
    }
    return {div, div};
  }

 private:
  std::string fresh(const char* base) { return base + std::to_string(++counter_); }

  /// (fix f:int->t. f) 0
  Term omega(const Type& t) {
    std::string f = fresh("f");
    return Term::app(Term::fix(f, Type::arrow(Type::integer(), t), Term::var(f)), Term::num(0));
  }

  /// Evaluates the hole, then diverges.
  Term diverge(const Type& sigma) { return Term::app(Term::lam(fresh("w"), sigma, omega(Type::boolean())), Term::hole()); }

  unsigned counter_ = 0;
};

}  // namespace detail

struct CompiledTest {
  Context c;  // observes program states
  Context d;  // observes value states
};

/// Contexts of result type bool whose convergence probability on a term (resp. value)
/// of type `sigma` equals the success probability of `t` at the matching state.
inline CompiledTest compile_test(const Test& t, const Type& sigma) {
  detail::ContextCompiler cc;
  auto p = cc.compile(t, sigma);
  return {Context(p.c), Context(p.d)};
}

struct BridgeResult {
  Interval pr;
  Interval ctx_mass;
  bool agree = false;
};

/// Compares the success probability of `t` at (M, sigma) with the convergence
/// probability of the compiled program context filled with M.
inline BridgeResult bridge_check(const Term& m, const Type& sigma, const Test& t, unsigned fuel,
                                 std::size_t exact_cap = kDefaultExactCap) {
  std::vector<Label> ls;
  t.collect_labels(ls);
  std::vector<Term> args;
  for (const auto& l : ls)
    if (l.kind == Label::Kind::Arg) args.push_back(l.value);
  LmcConfig cfg;
  cfg.fuel = fuel;
  cfg.depth = t.depth();
  cfg.exact_cap = exact_cap;
  LmcFragment f = build_fragment({LmcState::program(m, sigma)}, ArgUniverse::of(args), cfg);
  BridgeResult r;
  r.pr = success_prob(f, 0, t);
  Approx a = approximate(fill(compile_test(t, sigma).c, m), fuel, exact_cap);
  Rational lo = a.dist.mass();
  r.ctx_mass = {lo, lo + a.deficit};
  r.agree = r.pr.overlaps(r.ctx_mass);
  return r;
}

}  // namespace pcfl
