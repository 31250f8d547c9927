#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eval.hpp"
#include "syntax.hpp"

namespace pcfl {

/// Untyped terms share the Term representation and use only Var, Lam, App and
/// Choice. Lambda annotations carry no meaning; they are all set to bool.
using UntypedTerm = Term;

namespace untyped {

inline Term var(const std::string& x) { return Term::var(x); }
inline Term lam(const std::string& x, Term body) { return Term::lam(x, Type::boolean(), std::move(body)); }
inline Term app(Term f, Term a) { return Term::app(std::move(f), std::move(a)); }
inline Term app(Term f, Term a, Term b) { return app(app(std::move(f), std::move(a)), std::move(b)); }
inline Term choice(Term a, Term b) { return Term::choice(std::move(a), std::move(b)); }

inline bool is_untyped(const Term& m) {
  switch (m.kind()) {
    case TK::Var: return true;
    case TK::Lam: return is_untyped(m.body());
    case TK::App:
    case TK::Choice: return is_untyped(m.kid(0)) && is_untyped(m.kid(1));
    default: return false;
  }
}

inline bool is_value(const Term& m) { return m.is(TK::Lam); }

namespace detail {

inline void print(const Term& m, int prec, std::string& out) {
  switch (m.kind()) {
    case TK::Var: out += m.name(); return;
    case TK::Lam:
      if (prec > 0) out += '(';
      out += "\\" + m.name() + ". ";
      print(m.body(), 0, out);
      if (prec > 0) out += ')';
      return;
    case TK::App:
      if (prec > 2) out += '(';
      print(m.kid(0), 2, out);
      out += ' ';
      print(m.kid(1), 3, out);
      if (prec > 2) out += ')';
      return;
    case TK::Choice:
      if (prec > 1) out += '(';
      print(m.kid(0), 1, out);
      out += " (+) ";
      print(m.kid(1), 2, out);
      if (prec > 1) out += ')';
      return;
    default: out += m.str(); return;
  }
}

}  // namespace detail

/// `\x. M`, juxtaposition, `(+)`.
inline std::string str(const Term& m) {
  std::string out;
  detail::print(m, 0, out);
  return out;
}

/// Weak call-by-value step: function, then argument, then the call.
inline StepResult step(const Term& m) {
  switch (m.kind()) {
    case TK::Lam: return {StepResult::Kind::Value, {}};
    case TK::Choice: return {StepResult::Kind::Reduced, {m.kid(0), m.kid(1)}};
    case TK::App: {
      const Term& f = m.kid(0);
      const Term& a = m.kid(1);
      if (!untyped::is_value(f)) return pcfl::detail::step_in(m, 0, untyped::step(f));
      if (!untyped::is_value(a)) return pcfl::detail::step_in(m, 1, untyped::step(a));
      return {StepResult::Kind::Reduced, {subst(f.body(), a, f.name())}};
    }
    default: return {StepResult::Kind::Stuck, {}};
  }
}

}  // namespace untyped

/// Abstractions reachable within `fuel` chained steps, each choice weighted 1/2.
inline ValueDist eval_untyped(const UntypedTerm& m, unsigned fuel) {
  ValueDist out;
  std::map<std::string, std::pair<Term, Rational>> frontier;
  frontier.emplace(alpha_key(m), std::pair{m, Rational(1)});
  for (unsigned round = 0; !frontier.empty(); ++round) {
    std::map<std::string, std::pair<Term, Rational>> next;
    for (auto& [k, tp] : frontier) {
      auto& [t, w] = tp;
      if (untyped::is_value(t)) {
        out.add(k, t, w);
        continue;
      }
      if (round == fuel) continue;
      StepResult r = untyped::step(t);
      if (r.kind != StepResult::Kind::Reduced) continue;
      Rational share = w / Rational(static_cast<long>(r.reducts.size()));
      for (const auto& red : r.reducts) {
        std::string rk = alpha_key(red);
        auto it = next.find(rk);
        if (it == next.end())
          next.emplace(std::move(rk), std::pair{red, share});
        else
          it->second.second += share;
      }
    }
    if (round == fuel) break;
    frontier.swap(next);
  }
  return out;
}

inline constexpr std::size_t kUntypedExactCap = 1 << 15;

/// Limit semantics when the reduction graph closes, else the fuel-bounded lower bound.
inline Approx approximate_untyped(const UntypedTerm& m, unsigned fuel, std::size_t cap = kUntypedExactCap) {
  auto step_fn = [](const Term& t, std::vector<Term>& out) {
    StepResult r = untyped::step(t);
    if (r.kind != StepResult::Kind::Reduced) return false;
    out = std::move(r.reducts);
    return true;
  };
  auto g = detail::explore(m, cap, step_fn, untyped::is_value);
  if (!g.closed) {
    ValueDist d = eval_untyped(m, fuel);
    Rational def = 1 - d.mass();
    return {std::move(d), def, false};
  }
  detail::Absorb x = detail::absorb(g, untyped::is_value);
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < g.keys.size(); ++i) where.emplace(g.keys[i], i);
  ValueDist d;
  for (const auto& [k, p] : x) d.add(k, g.terms[where.at(k)], p);
  return {std::move(d), Rational(0), true};
}

// ---------------------------------------------------------------------------
// Scott encodings and the embedding

namespace scott {

using untyped::app;
using untyped::lam;
using untyped::var;

/// The unit-like argument used to force thunks.
inline Term star() { return lam("u", var("u")); }

inline Term tt() { return lam("a", lam("b", var("a"))); }
inline Term ff() { return lam("a", lam("b", var("b"))); }
inline Term boolean(bool b) { return b ? tt() : ff(); }

inline Term zero() { return lam("s", lam("z", var("z"))); }
inline Term succ_of(Term n) { return lam("s", lam("z", app(var("s"), std::move(n)))); }
inline Term numeral(std::uint64_t k) {
  Term n = zero();
  for (std::uint64_t i = 0; i < k; ++i) n = succ_of(n);
  return n;
}

/// NN with N = \x.\y. y (\z. ((x x) y) z)
inline Term mfix() {
  Term n = lam("x", lam("y", app(var("y"), lam("z", app(app(app(var("x"), var("x")), var("y")), var("z"))))));
  return app(n, n);
}

// \a.\b. (mfix F) a b, so that the operator is itself a value.
inline Term recursive_binary(Term f) { return lam("a", lam("b", app(app(mfix(), std::move(f)), var("a"), var("b")))); }

inline Term plus() {
  Term succ = lam("v", succ_of(var("v")));
  Term body = app(var("m"), lam("k", app(succ, app(var("p"), var("k"), var("n")))), var("n"));
  return recursive_binary(lam("p", lam("m", lam("n", body))));
}

inline Term leq() {
  Term inner = app(var("n"), lam("n'", app(var("l"), var("m'"), var("n'"))), ff());
  Term body = app(var("m"), lam("m'", inner), tt());
  return recursive_binary(lam("l", lam("m", lam("n", body))));
}

inline Term eq() {
  Term inner = app(var("n"), lam("n'", app(var("e"), var("m'"), var("n'"))), ff());
  Term on_zero = app(var("n"), lam("q", ff()), tt());
  Term body = app(var("m"), lam("m'", inner), on_zero);
  return recursive_binary(lam("e", lam("m", lam("n", body))));
}

inline Term op(Op o) {
  switch (o) {
    case Op::Add: return plus();
    case Op::Leq: return leq();
    case Op::Eq: return eq();
  }
  return plus();
}

inline std::optional<std::uint64_t> decode_numeral(const Term& v) {
  std::uint64_t k = 0;
  Term cur = v;
  while (true) {
    if (alpha_equal(cur, zero())) return k;
    if (!cur.is(TK::Lam) || !cur.body().is(TK::Lam)) return std::nullopt;
    const Term& b = cur.body().body();
    if (!b.is(TK::App) || !b.kid(0).is(TK::Var) || b.kid(0).name() != cur.name() || cur.name() == cur.body().name())
      return std::nullopt;
    Term next = b.kid(1);
    cur = next;
    ++k;
  }
}

inline std::optional<bool> decode_bool(const Term& v) {
  if (alpha_equal(v, tt())) return true;
  if (alpha_equal(v, ff())) return false;
  return std::nullopt;
}

}  // namespace scott

namespace detail {

inline void collect_names(const Term& m, std::set<std::string>& out) {
  if (m.is(TK::Var) || m.is(TK::Lam) || m.is(TK::Fix) || m.is(TK::Case)) out.insert(m.name());
  if (m.is(TK::Case)) out.insert(m.name2());
  for (std::size_t i = 0; i < m.arity(); ++i) collect_names(m.kid(i), out);
}

class Embedder {
 public:
  explicit Embedder(const Term& root) { collect_names(root, avoid_); }

  Term go(const Term& m) {
    using namespace untyped;
    switch (m.kind()) {
      case TK::Var: return var(m.name());
      case TK::Num: return scott::numeral(m.number());
      case TK::Bool: return scott::boolean(m.flag());
      case TK::Nil: {
        std::string x = fresh("x"), y = fresh("y");
        return lam(x, lam(y, app(var(x), scott::star())));
      }
      case TK::Cons: {
        std::string x = fresh("x"), y = fresh("y");
        return lam(x, lam(y, app(var(y), go(m.kid(0)), go(m.kid(1)))));
      }
      case TK::Pair: {
        std::string x = fresh("x");
        return lam(x, app(var(x), thunk(go(m.kid(0))), thunk(go(m.kid(1)))));
      }
      case TK::Lam: return lam(m.name(), go(m.body()));
      case TK::Fix: {
        std::string y = fresh("y");
        return lam(y, app(app(scott::mfix(), lam(m.name(), go(m.body()))), var(y)));
      }
      case TK::Choice: return choice(go(m.kid(0)), go(m.kid(1)));
      case TK::If:
        return app(app(go(m.kid(0)), thunk(go(m.kid(1))), thunk(go(m.kid(2)))), scott::star());
      case TK::Op: return app(scott::op(m.op()), go(m.kid(0)), go(m.kid(1)));
      case TK::Fst:
      case TK::Snd: {
        std::string x = fresh("x"), y = fresh("y");
        Term sel = lam(x, lam(y, var(m.is(TK::Fst) ? x : y)));
        return app(app(go(m.kid(0)), sel), scott::star());
      }
      case TK::Case:
        return app(go(m.kid(0)), thunk(go(m.kid(1))), lam(m.name(), lam(m.name2(), go(m.kid(2)))));
      case TK::App: return app(go(m.kid(0)), go(m.kid(1)));
      case TK::Hole: break;
    }
    throw std::invalid_argument("cannot embed a context");
  }

 private:
  std::string fresh(const char* base) {
    std::string x = fresh_name(base, avoid_);
    avoid_.insert(x);
    return x;
  }
  Term thunk(Term body) { return untyped::lam(fresh("_"), std::move(body)); }

  std::set<std::string> avoid_;
};

}  // namespace detail

/// Scott-encoded image of a PCFL term in the untyped calculus.
inline UntypedTerm embed(const Term& m) { return detail::Embedder(m).go(m); }

/// Pointwise image of a distribution under the embedding.
inline ValueDist embed_dist(const ValueDist& d) {
  ValueDist out;
  for (const auto& [k, e] : d.entries()) {
    Term v = embed(e.value);
    out.add(alpha_key(v), v, e.prob);
  }
  return out;
}

struct MassComparison {
  Interval src, tgt;
  bool agree = false;
};

/// Convergence mass of M against that of its embedding, each as an interval.
inline MassComparison mass_preservation(const Term& m, unsigned fuel) {
  Approx a = approximate(m, fuel);
  Approx b = approximate_untyped(embed(m), fuel * 16);
  MassComparison r;
  r.src = {a.dist.mass(), a.dist.mass() + a.deficit};
  r.tgt = {b.dist.mass(), b.dist.mass() + b.deficit};
  r.agree = r.src.overlaps(r.tgt);
  return r;
}

}  // namespace pcfl
