#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "syntax.hpp"

namespace pcfl {

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TypingContext = std::map<std::string, Type>;

namespace detail {

struct HoleSpec {
  TypingContext delta;  // hole variables not yet introduced by a binder on the path
  Type sigma;
  bool seen = false;
};

inline Type check(const TypingContext& g, const Term& m, HoleSpec* hole);

inline Type check_under(TypingContext g, const std::string& x, const Type& t, const Term& body, HoleSpec* hole) {
  HoleSpec* h = body.hole_count() ? hole : nullptr;
  if (h) {
    auto it = h->delta.find(x);
    if (it != h->delta.end()) {
      if (it->second != t)
        throw TypeError("hole variable " + x + " bound at " + t.str() + " but expected " + it->second.str());
      h->delta.erase(it);
    }
  }
  g[x] = t;
  return check(g, body, h);
}

inline void expect_type(const Type& got, const Type& want, const Term& where) {
  if (got != want)
    throw TypeError("expected " + want.str() + " but found " + got.str() + " in " + where.str());
}

inline Type check(const TypingContext& g, const Term& m, HoleSpec* hole) {
  switch (m.kind()) {
    case TK::Var: {
      auto it = g.find(m.name());
      if (it == g.end()) throw TypeError("unbound variable " + m.name());
      return it->second;
    }
    case TK::Num: return Type::integer();
    case TK::Bool: return Type::boolean();
    case TK::Nil: return Type::list(m.annot());
    case TK::Hole: {
      if (!hole) throw TypeError("unexpected hole in a term");
      for (const auto& [x, t] : hole->delta)
        if (g.count(x)) throw TypeError("hole context clash on variable " + x);
      hole->seen = true;
      return hole->sigma;
    }
    case TK::Pair: return Type::prod(check(g, m.kid(0), hole), check(g, m.kid(1), hole));
    case TK::Cons: {
      Type h = check(g, m.kid(0), hole);
      expect_type(check(g, m.kid(1), hole), Type::list(h), m);
      return Type::list(h);
    }
    case TK::Lam: return Type::arrow(m.annot(), check_under(g, m.name(), m.annot(), m.body(), hole));
    case TK::Fix: {
      if (!m.annot().is(Type::Kind::Arrow))
        throw TypeError("fix needs a function type, got " + m.annot().str());
      expect_type(check_under(g, m.name(), m.annot(), m.body(), hole), m.annot(), m);
      return m.annot();
    }
    case TK::Choice: {
      Type a = check(g, m.kid(0), hole);
      expect_type(check(g, m.kid(1), hole), a, m);
      return a;
    }
    case TK::If: {
      expect_type(check(g, m.kid(0), hole), Type::boolean(), m);
      Type a = check(g, m.kid(1), hole);
      expect_type(check(g, m.kid(2), hole), a, m);
      return a;
    }
    case TK::Op: {
      expect_type(check(g, m.kid(0), hole), Type::integer(), m);
      expect_type(check(g, m.kid(1), hole), Type::integer(), m);
      return m.op() == Op::Add ? Type::integer() : Type::boolean();
    }
    case TK::Fst:
    case TK::Snd: {
      Type p = check(g, m.kid(0), hole);
      if (!p.is(Type::Kind::Prod)) throw TypeError("projection of non-pair type " + p.str());
      return m.is(TK::Fst) ? p.left() : p.right();
    }
    case TK::App: {
      Type f = check(g, m.kid(0), hole);
      if (!f.is(Type::Kind::Arrow)) throw TypeError("applying a term of non-function type " + f.str());
      expect_type(check(g, m.kid(1), hole), f.left(), m);
      return f.right();
    }
    case TK::Case: {
      Type l = check(g, m.kid(0), hole);
      if (!l.is(Type::Kind::List)) throw TypeError("case on non-list type " + l.str());
      Type a = check(g, m.kid(1), hole);
      if (m.name() == m.name2()) throw TypeError("case binders must differ");
      TypingContext g2 = g;
      HoleSpec* h = m.kid(2).hole_count() ? hole : nullptr;
      for (const auto& [x, t] : {std::pair{m.name(), l.left()}, std::pair{m.name2(), l}}) {
        if (h) {
          auto it = h->delta.find(x);
          if (it != h->delta.end()) {
            if (it->second != t) throw TypeError("hole variable " + x + " bound at a different type");
            h->delta.erase(it);
          }
        }
        g2[x] = t;
      }
      expect_type(check(g2, m.kid(2), h), a, m);
      return a;
    }
  }
  throw TypeError("unknown term");
}

}  // namespace detail

/// Type of `m` under `g`; throws TypeError.
inline Type infer(const TypingContext& g, const Term& m) { return detail::check(g, m, nullptr); }

inline Type infer(const Term& m) { return infer({}, m); }

inline bool well_typed(const Term& m, const Type& t) {
  try {
    return infer(m) == t;
  } catch (const TypeError&) {
    return false;
  }
}

/// Result type of `c` when its hole is filled by a term of type `sigma` under `delta`.
/// Binders on the path to the hole that appear in `delta` must bind them at the
/// listed type; path binders not listed are admitted (the filler may use them).
inline Type check_context(const TypingContext& g, const Context& c, const TypingContext& delta, const Type& sigma) {
  for (const auto& [x, t] : delta)
    if (g.count(x)) throw TypeError("hole context clash on variable " + x);
  detail::HoleSpec spec{delta, sigma};
  Type t = detail::check(g, c.term(), &spec);
  if (!spec.seen) throw TypeError("context has no hole");
  return t;
}

}  // namespace pcfl
