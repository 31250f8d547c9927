#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rational.hpp"
#include "syntax.hpp"

namespace pcfl {

class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite subdistribution over values, keyed by alpha-class.
class ValueDist {
 public:
  struct Entry {
    Term value;
    Rational prob;
  };

  void add(const Term& v, const Rational& p) { add(alpha_key(v), v, p); }
  void add(const std::string& key, const Term& v, const Rational& p) {
    if (sgn(p) == 0) return;
    auto it = entries_.find(key);
    if (it == entries_.end())
      entries_.emplace(key, Entry{v, p});
    else
      it->second.prob += p;
  }
  /// this += scale * other
  void add_scaled(const ValueDist& other, const Rational& scale) {
    if (sgn(scale) == 0) return;
    for (const auto& [k, e] : other.entries_) add(k, e.value, e.prob * scale);
  }

  Rational prob(const Term& v) const { return prob_key(alpha_key(v)); }
  Rational prob_key(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? Rational(0) : it->second.prob;
  }
  Rational mass() const {
    Rational m = 0;
    for (const auto& [k, e] : entries_) m += e.prob;
    return m;
  }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  /// Entries ordered by alpha-key, so iteration order is deterministic.
  const std::map<std::string, Entry>& entries() const { return entries_; }

  static ValueDist point(const Term& v) {
    ValueDist d;
    d.add(v, 1);
    return d;
  }

  /// Pointwise order.
  bool leq(const ValueDist& other) const {
    for (const auto& [k, e] : entries_)
      if (e.prob > other.prob_key(k)) return false;
    return true;
  }

  friend bool operator==(const ValueDist& a, const ValueDist& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (const auto& [k, e] : a.entries_)
      if (b.prob_key(k) != e.prob) return false;
    return true;
  }

  std::string str() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [k, e] : entries_) {
      if (!first) s += ", ";
      first = false;
      s += e.value.str() + " : " + to_string(e.prob);
    }
    return s + "}";
  }

 private:
  std::map<std::string, Entry> entries_;
};

inline Rational mass(const ValueDist& d) { return d.mass(); }

inline std::uint64_t apply_op(Op op, std::uint64_t a, std::uint64_t b, bool* as_bool) {
  switch (op) {
    case Op::Add:
      if (a > std::numeric_limits<std::uint64_t>::max() - b) throw ResourceLimit("integer overflow in +");
      *as_bool = false;
      return a + b;
    case Op::Leq: *as_bool = true; return a <= b;
    case Op::Eq: *as_bool = true; return a == b;
  }
  return 0;
}

inline Term op_result(Op op, const Term& a, const Term& b) {
  bool as_bool = false;
  std::uint64_t r = apply_op(op, a.number(), b.number(), &as_bool);
  return as_bool ? Term::boolean(r != 0) : Term::num(r);
}

// ---------------------------------------------------------------------------
// Big-step approximation semantics

/// Fuel-bounded big-step evaluator. Fuel is derivation depth: at fuel 0 only the
/// empty distribution is derivable, and every premise runs at fuel - 1.
class BigStep {
 public:
  ValueDist eval(const Term& m, unsigned fuel) {
    if (fuel == 0) return {};
    if (is_value(m)) return ValueDist::point(m);
    std::string key = alpha_key(m) + "@" + std::to_string(fuel);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    ValueDist d = rule(m, fuel - 1);
    memo_.emplace(std::move(key), d);
    return d;
  }

 private:
  ValueDist rule(const Term& m, unsigned f) {
    ValueDist out;
    switch (m.kind()) {
      case TK::Choice: {
        out.add_scaled(eval(m.kid(0), f), half());
        out.add_scaled(eval(m.kid(1), f), half());
        return out;
      }
      case TK::Op: {
        ValueDist d = eval(m.kid(0), f);
        if (d.empty()) return out;
        ValueDist e = eval(m.kid(1), f);
        for (const auto& [k1, a] : d.entries())
          for (const auto& [k2, b] : e.entries())
            if (a.value.is(TK::Num) && b.value.is(TK::Num)) out.add(op_result(m.op(), a.value, b.value), a.prob * b.prob);
        return out;
      }
      case TK::App: {
        ValueDist k = eval(m.kid(0), f);
        if (k.empty()) return out;
        ValueDist fd = eval(m.kid(1), f);
        for (const auto& [kv, v] : fd.entries()) {
          for (const auto& [kf, fn] : k.entries()) {
            Term next;
            if (fn.value.is(TK::Lam))
              next = subst(fn.value.body(), v.value, fn.value.name());
            else if (fn.value.is(TK::Fix))
              next = Term::app(subst(fn.value.body(), fn.value, fn.value.name()), v.value);
            else
              continue;
            out.add_scaled(eval(next, f), v.prob * fn.prob);
          }
        }
        return out;
      }
      case TK::If: {
        ValueDist d = eval(m.kid(0), f);
        Rational pt = d.prob(Term::boolean(true)), pf = d.prob(Term::boolean(false));
        if (sgn(pt) > 0) out.add_scaled(eval(m.kid(1), f), pt);
        if (sgn(pf) > 0) out.add_scaled(eval(m.kid(2), f), pf);
        return out;
      }
      case TK::Fst:
      case TK::Snd: {
        ValueDist d = eval(m.kid(0), f);
        for (const auto& [k, p] : d.entries())
          if (p.value.is(TK::Pair)) out.add_scaled(eval(p.value.kid(m.is(TK::Fst) ? 0 : 1), f), p.prob);
        return out;
      }
      case TK::Case: {
        ValueDist d = eval(m.kid(0), f);
        for (const auto& [k, l] : d.entries()) {
          if (l.value.is(TK::Nil)) {
            out.add_scaled(eval(m.kid(1), f), l.prob);
          } else if (l.value.is(TK::Cons)) {
            // Head and tail are both evaluated before the branch runs.
            ValueDist g = eval(l.value.kid(0), f);
            if (g.empty()) continue;
            ValueDist kt = eval(l.value.kid(1), f);
            for (const auto& [kh, h] : g.entries())
              for (const auto& [ktl, t] : kt.entries()) {
                Term body = subst(subst(m.kid(2), h.value, m.name()), t.value, m.name2());
                out.add_scaled(eval(body, f), l.prob * h.prob * t.prob);
              }
          }
        }
        return out;
      }
      default: return out;
    }
  }

  std::unordered_map<std::string, ValueDist> memo_;
};

/// Distribution derivable with derivation depth at most `fuel`.
inline ValueDist eval_big(const Term& m, unsigned fuel) {
  BigStep b;
  return b.eval(m, fuel);
}

// ---------------------------------------------------------------------------
// Small-step semantics

struct StepResult {
  enum class Kind { Value, Stuck, Reduced };
  Kind kind;
  std::vector<Term> reducts;  // one, or two for a choice
};

namespace detail {

inline StepResult stuck() { return {StepResult::Kind::Stuck, {}}; }

// Steps kid `i` of `m` inside an evaluation context and rebuilds `m` around each reduct.
inline StepResult step_in(const Term& m, std::size_t i, StepResult inner) {
  if (inner.kind != StepResult::Kind::Reduced) return inner.kind == StepResult::Kind::Value ? stuck() : inner;
  for (auto& r : inner.reducts) {
    std::vector<Term> kids;
    for (std::size_t j = 0; j < m.arity(); ++j) kids.push_back(j == i ? r : m.kid(j));
    r = m.with_kids(std::move(kids));
  }
  return inner;
}

}  // namespace detail

inline StepResult step(const Term& m);

namespace detail {

inline StepResult reduced(Term t) { return {StepResult::Kind::Reduced, {std::move(t)}}; }

}  // namespace detail

/// One reduction step of the unique evaluation-context decomposition of `m`.
inline StepResult step(const Term& m) {
  using detail::reduced;
  using detail::step_in;
  if (is_value(m)) return {StepResult::Kind::Value, {}};
  switch (m.kind()) {
    case TK::Choice: return {StepResult::Kind::Reduced, {m.kid(0), m.kid(1)}};
    case TK::App: {
      const Term& f = m.kid(0);
      const Term& a = m.kid(1);
      if (!is_value(f)) return step_in(m, 0, step(f));
      if (!is_value(a)) return step_in(m, 1, step(a));
      if (f.is(TK::Lam)) return reduced(subst(f.body(), a, f.name()));
      if (f.is(TK::Fix)) return reduced(Term::app(subst(f.body(), f, f.name()), a));
      return detail::stuck();
    }
    case TK::Op: {
      if (!is_value(m.kid(0))) return step_in(m, 0, step(m.kid(0)));
      if (!is_value(m.kid(1))) return step_in(m, 1, step(m.kid(1)));
      if (!m.kid(0).is(TK::Num) || !m.kid(1).is(TK::Num)) return detail::stuck();
      return reduced(op_result(m.op(), m.kid(0), m.kid(1)));
    }
    case TK::Fst:
    case TK::Snd: {
      if (!is_value(m.kid(0))) return step_in(m, 0, step(m.kid(0)));
      if (!m.kid(0).is(TK::Pair)) return detail::stuck();
      return reduced(m.kid(0).kid(m.is(TK::Fst) ? 0 : 1));
    }
    case TK::If: {
      if (!is_value(m.kid(0))) return step_in(m, 0, step(m.kid(0)));
      if (!m.kid(0).is(TK::Bool)) return detail::stuck();
      return reduced(m.kid(0).flag() ? m.kid(1) : m.kid(2));
    }
    case TK::Case: {
      const Term& l = m.kid(0);
      if (!is_value(l)) return step_in(m, 0, step(l));
      if (l.is(TK::Nil)) return reduced(m.kid(1));
      if (!l.is(TK::Cons)) return detail::stuck();
      // case E::M and case V::E
      for (std::size_t i = 0; i < 2; ++i) {
        if (!is_value(l.kid(i))) {
          StepResult r = step_in(l, i, step(l.kid(i)));
          return step_in(m, 0, std::move(r));
        }
      }
      return reduced(subst(subst(m.kid(2), l.kid(0), m.name()), l.kid(1), m.name2()));
    }
    default: return detail::stuck();
  }
}

/// Values reachable within `fuel` chained steps, each choice weighted 1/2.
inline ValueDist eval_small(const Term& m, unsigned fuel) {
  ValueDist out;
  std::map<std::string, std::pair<Term, Rational>> frontier;
  frontier.emplace(alpha_key(m), std::pair{m, Rational(1)});
  for (unsigned round = 0;; ++round) {
    std::map<std::string, std::pair<Term, Rational>> next;
    for (auto& [k, tp] : frontier) {
      auto& [t, w] = tp;
      if (is_value(t)) {
        out.add(k, t, w);
        continue;
      }
      if (round == fuel) continue;
      StepResult r = step(t);
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
    if (next.empty() || round == fuel) break;
    frontier.swap(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact semantics on finite reduction graphs

namespace detail {

// Sparse vector over value keys.
using Absorb = std::map<std::string, Rational>;

inline void axpy(Absorb& y, const Absorb& x, const Rational& a) {
  if (sgn(a) == 0) return;
  for (const auto& [k, v] : x) {
    Rational& slot = y[k];
    slot += a * v;
    if (sgn(slot) == 0) y.erase(k);
  }
}

/// Reduction graph of a term: nodes are alpha-classes, edges carry step probabilities.
struct ReductionGraph {
  std::vector<Term> terms;
  std::vector<std::string> keys;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> succ;
  bool closed = true;
};

template <class StepFn, class IsValueFn>
ReductionGraph explore(const Term& root, std::size_t cap, StepFn step_fn, IsValueFn is_val) {
  ReductionGraph g;
  std::unordered_map<std::string, std::size_t> index;
  auto intern = [&](const Term& t) -> std::pair<std::size_t, bool> {
    std::string k = alpha_key(t);
    auto it = index.find(k);
    if (it != index.end()) return {it->second, false};
    std::size_t id = g.terms.size();
    index.emplace(k, id);
    g.terms.push_back(t);
    g.keys.push_back(std::move(k));
    g.succ.emplace_back();
    return {id, true};
  };
  intern(root);
  for (std::size_t i = 0; i < g.terms.size(); ++i) {
    if (g.terms.size() > cap) {
      g.closed = false;
      return g;
    }
    Term t = g.terms[i];
    if (is_val(t)) continue;
    std::vector<Term> reducts;
    if (!step_fn(t, reducts)) continue;
    Rational share(1, static_cast<unsigned long>(reducts.size()));
    for (const auto& r : reducts) {
      std::size_t j = intern(r).first;
      auto& row = g.succ[i];
      auto it = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.first == j; });
      if (it == row.end())
        row.emplace_back(j, share);
      else
        it->second += share;
    }
  }
  return g;
}

/// Absorption distribution of node 0 into value nodes. Requires a closed graph.
template <class IsValueFn>
Absorb absorb(const ReductionGraph& g, IsValueFn is_val) {
  const std::size_t n = g.terms.size();
  // Nodes that can reach a value; the rest absorb nothing.
  std::vector<std::vector<std::size_t>> pred(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, p] : g.succ[i]) pred[j].push_back(i);
  std::vector<char> live(n, 0);
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < n; ++i)
    if (is_val(g.terms[i])) {
      live[i] = 1;
      work.push_back(i);
    }
  while (!work.empty()) {
    std::size_t j = work.back();
    work.pop_back();
    for (std::size_t i : pred[j])
      if (!live[i]) {
        live[i] = 1;
        work.push_back(i);
      }
  }
  if (!live[0]) return {};

  // Tarjan SCCs (iterative) emit components sinks-first.
  std::vector<long> idx(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> comps;
  long counter = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (idx[s] != -1 || !live[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> call{{s, 0}};
    idx[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = 1;
    while (!call.empty()) {
      auto& [v, ei] = call.back();
      if (ei < g.succ[v].size()) {
        std::size_t w = g.succ[v][ei++].first;
        if (!live[w]) continue;
        if (idx[w] == -1) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
      } else {
        std::size_t vv = v;
        call.pop_back();
        if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[vv]);
        if (low[vv] == idx[vv]) {
          std::vector<std::size_t> c;
          std::size_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = static_cast<long>(comps.size());
            c.push_back(w);
          } while (w != vv);
          comps.push_back(std::move(c));
        }
      }
    }
  }

  std::vector<Absorb> x(n);
  for (const auto& c : comps) {
    const long cid = comp[c[0]];
    if (c.size() == 1 && is_val(g.terms[c[0]])) {
      x[c[0]][g.keys[c[0]]] = 1;
      continue;
    }
    // Solve (I - P_cc) x_c = P_out x_out by Gaussian elimination.
    const std::size_t k = c.size();
    std::map<std::size_t, std::size_t> local;
    for (std::size_t i = 0; i < k; ++i) local[c[i]] = i;
    std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k, 0));
    std::vector<Absorb> rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
      a[i][i] = 1;
      for (const auto& [j, p] : g.succ[c[i]]) {
        if (!live[j]) continue;
        if (comp[j] == cid)
          a[i][local[j]] -= p;
        else
          axpy(rhs[i], x[j], p);
      }
    }
    for (std::size_t col = 0; col < k; ++col) {
      std::size_t piv = col;
      while (piv < k && sgn(a[piv][col]) == 0) ++piv;
      if (piv == k) throw std::logic_error("singular absorption system");
      std::swap(a[piv], a[col]);
      std::swap(rhs[piv], rhs[col]);
      Rational inv = 1 / a[col][col];
      for (std::size_t j = col; j < k; ++j) a[col][j] *= inv;
      Absorb scaled;
      axpy(scaled, rhs[col], inv);
      rhs[col] = std::move(scaled);
      for (std::size_t r = 0; r < k; ++r) {
        if (r == col || sgn(a[r][col]) == 0) continue;
        Rational f = a[r][col];
        for (std::size_t j = col; j < k; ++j) a[r][j] -= f * a[col][j];
        axpy(rhs[r], rhs[col], -f);
      }
    }
    for (std::size_t i = 0; i < k; ++i) x[c[i]] = std::move(rhs[i]);
  }
  return x[0];
}

inline bool pcfl_step(const Term& t, std::vector<Term>& out) {
  StepResult r = step(t);
  if (r.kind != StepResult::Kind::Reduced) return false;
  out = std::move(r.reducts);
  return true;
}

}  // namespace detail

inline constexpr std::size_t kDefaultExactCap = 4096;

/// The limit semantics of `m`, when its reduction graph is finite and has at most
/// `cap` nodes; empty optional-like result (`closed == false`) otherwise.
struct ExactResult {
  bool closed = false;
  ValueDist dist;
  std::size_t states = 0;
};

inline ExactResult eval_exact(const Term& m, std::size_t cap = kDefaultExactCap) {
  auto g = detail::explore(m, cap, detail::pcfl_step, [](const Term& t) { return is_value(t); });
  ExactResult r;
  r.states = g.terms.size();
  if (!g.closed) return r;
  r.closed = true;
  detail::Absorb x = detail::absorb(g, [](const Term& t) { return is_value(t); });
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < g.keys.size(); ++i) where.emplace(g.keys[i], i);
  for (const auto& [k, p] : x) r.dist.add(k, g.terms[where.at(k)], p);
  return r;
}

/// Semantics of `m` as a lower bound plus the mass it may still be missing.
/// `deficit` is zero whenever the reduction graph closes and the result is exact.
struct Approx {
  ValueDist dist;
  Rational deficit;
  bool exact = false;
};

inline Approx approximate(const Term& m, unsigned fuel, std::size_t cap = kDefaultExactCap) {
  ExactResult e = eval_exact(m, cap);
  if (e.closed) return {std::move(e.dist), Rational(0), true};
  ValueDist d = eval_big(m, fuel);
  Rational def = 1 - d.mass();
  return {std::move(d), def, false};
}

}  // namespace pcfl
