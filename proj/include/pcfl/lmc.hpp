#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eval.hpp"
#include "syntax.hpp"
#include "typing.hpp"

namespace pcfl {

// ---------------------------------------------------------------------------
// States and labels

struct LmcState {
  enum class Kind { Program, Hat };
  Kind kind;
  Term term;
  Type type;

  static LmcState program(Term m, Type t) { return {Kind::Program, std::move(m), std::move(t)}; }
  static LmcState hat(Term v, Type t) { return {Kind::Hat, std::move(v), std::move(t)}; }

  bool is_hat() const { return kind == Kind::Hat; }
  std::string key() const { return (is_hat() ? "H|" : "P|") + alpha_key(term) + "|" + type.str(); }
  std::string str() const {
    return (is_hat() ? "^(" + term.str() + ")" : term.str()) + " : " + type.str();
  }
};

struct Label {
  enum class Kind { Eval, TypeLbl, Arg, Fst, Snd, Hd, Tl, Nil, Num, Bool };
  Kind kind;
  Type type;       // TypeLbl
  Term value;      // Arg
  std::uint64_t num = 0;  // Num
  bool flag = false;      // Bool

  static Label eval() { return {Kind::Eval, {}, {}, 0, false}; }
  static Label of_type(Type t) { return {Kind::TypeLbl, std::move(t), {}, 0, false}; }
  static Label arg(Term v) { return {Kind::Arg, {}, std::move(v), 0, false}; }
  static Label fst() { return {Kind::Fst, {}, {}, 0, false}; }
  static Label snd() { return {Kind::Snd, {}, {}, 0, false}; }
  static Label hd() { return {Kind::Hd, {}, {}, 0, false}; }
  static Label tl() { return {Kind::Tl, {}, {}, 0, false}; }
  static Label nil() { return {Kind::Nil, {}, {}, 0, false}; }
  static Label number(std::uint64_t k) { return {Kind::Num, {}, {}, k, false}; }
  static Label boolean(bool b) { return {Kind::Bool, {}, {}, 0, b}; }

  /// Surface spelling, as used in tests: eval, arg(V), ty(T), num(k), ...
  std::string str() const {
    switch (kind) {
      case Kind::Eval: return "eval";
      case Kind::TypeLbl: return "ty(" + type.str() + ")";
      case Kind::Arg: return "arg(" + value.str() + ")";
      case Kind::Fst: return "fst";
      case Kind::Snd: return "snd";
      case Kind::Hd: return "hd";
      case Kind::Tl: return "tl";
      case Kind::Nil: return "nil";
      case Kind::Num: return "num(" + std::to_string(num) + ")";
      case Kind::Bool: return flag ? "bool(true)" : "bool(false)";
    }
    return "?";
  }
  /// Identity of the label up to alpha-equivalence of Arg payloads.
  std::string key() const { return kind == Kind::Arg ? "arg:" + alpha_key(value) : str(); }
};

/// One row of the transition matrix: known successors plus the mass whose
/// destination is unknown.
struct Row {
  std::vector<std::pair<std::size_t, Rational>> succ;
  Rational deficit = 0;

  Rational mass() const {
    Rational m = 0;
    for (const auto& [t, p] : succ) m += p;
    return m;
  }
};

/// Finite explored piece of the chain. Rows are stored for defined labels only;
/// every other (state, label) row is empty with no deficit.
class LmcFragment {
 public:
  std::size_t size() const { return states_.size(); }
  const LmcState& state(std::size_t i) const { return states_.at(i); }
  const std::vector<LmcState>& states() const { return states_; }
  bool is_frontier(std::size_t i) const { return frontier_.at(i); }
  std::size_t depth_of(std::size_t i) const { return depth_.at(i); }
  std::optional<std::size_t> find(const LmcState& s) const {
    auto it = index_.find(s.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Row of `s` under label key `lk`; nullptr for an empty row.
  const Row* row(std::size_t s, const std::string& lk) const {
    const auto& m = rows_.at(s);
    auto it = m.find(lk);
    return it == m.end() ? nullptr : &it->second;
  }
  const std::map<std::string, Row>& rows(std::size_t s) const { return rows_.at(s); }

  /// Every label with a stored row somewhere in the fragment, keyed by Label::key.
  const std::map<std::string, Label>& alphabet() const { return alphabet_; }

  std::size_t frontier_count() const {
    std::size_t n = 0;
    for (char f : frontier_) n += f != 0;
    return n;
  }

  // Construction interface.
  std::pair<std::size_t, bool> intern(const LmcState& s, std::size_t depth) {
    std::string k = s.key();
    auto it = index_.find(k);
    if (it != index_.end()) return {it->second, false};
    std::size_t id = states_.size();
    index_.emplace(std::move(k), id);
    states_.push_back(s);
    rows_.emplace_back();
    frontier_.push_back(1);
    depth_.push_back(depth);
    return {id, true};
  }
  void set_row(std::size_t s, const Label& l, Row r) {
    alphabet_.emplace(l.key(), l);
    rows_.at(s)[l.key()] = std::move(r);
  }
  void mark_expanded(std::size_t s) { frontier_.at(s) = 0; }

 private:
  std::vector<LmcState> states_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::map<std::string, Row>> rows_;
  std::vector<char> frontier_;
  std::vector<std::size_t> depth_;
  std::map<std::string, Label> alphabet_;
};

/// Closed values usable as Arg labels, each with its (unique) type.
struct ArgUniverse {
  std::vector<std::pair<Term, Type>> values;

  static ArgUniverse of(const std::vector<Term>& vs) {
    ArgUniverse u;
    std::set<std::string> seen;
    for (const auto& v : vs) {
      if (!is_value(v) || !v.closed()) throw std::invalid_argument("argument universe needs closed values: " + v.str());
      if (seen.insert(alpha_key(v)).second) u.values.emplace_back(v, infer(v));
    }
    return u;
  }
};

struct LmcConfig {
  unsigned fuel = 32;
  std::size_t depth = 6;
  std::size_t state_cap = 100000;
  std::size_t exact_cap = kDefaultExactCap;
};

/// Successor rows of `s`: every label whose row is defined, with its row.
inline std::vector<std::pair<Label, std::map<std::string, std::pair<LmcState, Rational>>>> successor_rows(
    const LmcState& s, const ArgUniverse& args, const LmcConfig& cfg, Rational* eval_deficit) {
  using Targets = std::map<std::string, std::pair<LmcState, Rational>>;
  std::vector<std::pair<Label, Targets>> out;
  auto single = [](LmcState t) {
    Targets m;
    std::string k = t.key();
    m.emplace(std::move(k), std::pair{std::move(t), Rational(1)});
    return m;
  };
  out.emplace_back(Label::of_type(s.type), single(s));
  if (!s.is_hat()) {
    Approx a = approximate(s.term, cfg.fuel, cfg.exact_cap);
    Targets m;
    for (const auto& [k, e] : a.dist.entries()) {
      LmcState h = LmcState::hat(e.value, s.type);
      m.emplace(h.key(), std::pair{h, e.prob});
    }
    if (eval_deficit) *eval_deficit = a.deficit;
    out.emplace_back(Label::eval(), std::move(m));
    return out;
  }
  const Term& v = s.term;
  switch (s.type.kind()) {
    case Type::Kind::Arrow:
      for (const auto& [w, wt] : args.values) {
        if (wt != s.type.left()) continue;
        Term next;
        if (v.is(TK::Lam))
          next = subst(v.body(), w, v.name());
        else if (v.is(TK::Fix))
          next = Term::app(subst(v.body(), v, v.name()), w);
        else
          continue;
        out.emplace_back(Label::arg(w), single(LmcState::program(next, s.type.right())));
      }
      break;
    case Type::Kind::Prod:
      if (v.is(TK::Pair)) {
        out.emplace_back(Label::fst(), single(LmcState::program(v.kid(0), s.type.left())));
        out.emplace_back(Label::snd(), single(LmcState::program(v.kid(1), s.type.right())));
      }
      break;
    case Type::Kind::Int:
      if (v.is(TK::Num)) out.emplace_back(Label::number(v.number()), single(s));
      break;
    case Type::Kind::Bool:
      if (v.is(TK::Bool)) out.emplace_back(Label::boolean(v.flag()), single(s));
      break;
    case Type::Kind::List:
      if (v.is(TK::Nil)) {
        out.emplace_back(Label::nil(), single(s));
      } else if (v.is(TK::Cons)) {
        out.emplace_back(Label::hd(), single(LmcState::program(v.kid(0), s.type.left())));
        out.emplace_back(Label::tl(), single(LmcState::program(v.kid(1), s.type)));
      }
      break;
  }
  return out;
}

/// Transition row of `s` under `l`, as a map from state keys to (state, weight).
inline std::map<std::string, std::pair<LmcState, Rational>> successors(const LmcState& s, const Label& l,
                                                                       const ArgUniverse& args,
                                                                       const LmcConfig& cfg = {}) {
  if (l.kind == Label::Kind::Arg) {
    bool found = false;
    for (const auto& [w, t] : args.values) found = found || alpha_equal(w, l.value);
    if (!found) {
      ArgUniverse one = ArgUniverse::of({l.value});
      return successors(s, l, one, cfg);
    }
  }
  for (auto& [lab, targets] : successor_rows(s, args, cfg, nullptr))
    if (lab.key() == l.key()) return targets;
  return {};
}

/// Breadth-first exploration of the chain from `roots`, expanding states whose
/// distance from a root is below `cfg.depth`; the rest are left in the frontier.
inline LmcFragment build_fragment(const std::vector<LmcState>& roots, const ArgUniverse& args,
                                  const LmcConfig& cfg) {
  LmcFragment f;
  std::deque<std::size_t> queue;
  for (const auto& r : roots) {
    auto [id, fresh] = f.intern(r, 0);
    if (fresh) queue.push_back(id);
  }
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop_front();
    if (f.depth_of(s) >= cfg.depth) continue;
    LmcState st = f.state(s);
    Rational deficit = 0;
    auto rows = successor_rows(st, args, cfg, &deficit);
    f.mark_expanded(s);
    for (auto& [lab, targets] : rows) {
      Row row;
      for (auto& [k, tp] : targets) {
        auto [id, fresh] = f.intern(tp.first, f.depth_of(s) + 1);
        if (f.size() > cfg.state_cap)
          throw ResourceLimit("fragment exceeds the state cap of " + std::to_string(cfg.state_cap));
        if (fresh) queue.push_back(id);
        row.succ.emplace_back(id, tp.second);
      }
      if (lab.kind == Label::Kind::Eval) row.deficit = deficit;
      f.set_row(s, lab, std::move(row));
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Enumeration of small closed values

namespace detail {

inline std::vector<Term> enum_terms(const TypingContext& g, const Type& t, std::size_t size, std::size_t int_bound,
                                    std::size_t depth);

// All ways to split `total` into `parts` positive sizes.
inline void splits(std::size_t total, std::size_t parts, std::vector<std::size_t>& cur,
                   std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    if (total >= 1) {
      cur.push_back(total);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  for (std::size_t a = 1; a + parts - 1 <= total; ++a) {
    cur.push_back(a);
    splits(total - a, parts - 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<std::size_t>> splits(std::size_t total, std::size_t parts) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  splits(total, parts, cur, out);
  return out;
}

// Terms of type `t` under `g` with exactly `size` nodes.
inline std::vector<Term> enum_terms(const TypingContext& g, const Type& t, std::size_t size, std::size_t int_bound,
                                    std::size_t depth) {
  std::vector<Term> out;
  if (size == 0) return out;
  if (size == 1) {
    for (const auto& [x, xt] : g)
      if (xt == t) out.push_back(Term::var(x));
    switch (t.kind()) {
      case Type::Kind::Bool:
        out.push_back(Term::boolean(true));
        out.push_back(Term::boolean(false));
        break;
      case Type::Kind::Int:
        for (std::size_t k = 0; k <= int_bound; ++k) out.push_back(Term::num(k));
        break;
      case Type::Kind::List: out.push_back(Term::nil(t.left())); break;
      default: break;
    }
    return out;
  }
  const std::string x = "x" + std::to_string(depth);
  switch (t.kind()) {
    case Type::Kind::Arrow: {
      TypingContext g2 = g;
      g2[x] = t.left();
      for (auto& b : enum_terms(g2, t.right(), size - 1, int_bound, depth + 1)) out.push_back(Term::lam(x, t.left(), b));
      break;
    }
    case Type::Kind::Prod:
      for (const auto& sp : splits(size - 1, 2))
        for (auto& a : enum_terms(g, t.left(), sp[0], int_bound, depth))
          for (auto& b : enum_terms(g, t.right(), sp[1], int_bound, depth)) out.push_back(Term::pair(a, b));
      break;
    case Type::Kind::List:
      for (const auto& sp : splits(size - 1, 2))
        for (auto& a : enum_terms(g, t.left(), sp[0], int_bound, depth))
          for (auto& b : enum_terms(g, t, sp[1], int_bound, depth)) out.push_back(Term::cons(a, b));
      break;
    default: break;
  }
  if (t.is(Type::Kind::Int))
    for (const auto& sp : splits(size - 1, 2))
      for (auto& a : enum_terms(g, t, sp[0], int_bound, depth))
        for (auto& b : enum_terms(g, t, sp[1], int_bound, depth)) out.push_back(Term::op(Op::Add, a, b));
  if (t.is(Type::Kind::Bool))
    for (Op o : {Op::Leq, Op::Eq})
      for (const auto& sp : splits(size - 1, 2))
        for (auto& a : enum_terms(g, Type::integer(), sp[0], int_bound, depth))
          for (auto& b : enum_terms(g, Type::integer(), sp[1], int_bound, depth)) out.push_back(Term::op(o, a, b));
  for (const auto& sp : splits(size - 1, 2))
    for (auto& a : enum_terms(g, t, sp[0], int_bound, depth))
      for (auto& b : enum_terms(g, t, sp[1], int_bound, depth)) out.push_back(Term::choice(a, b));
  for (const auto& sp : splits(size - 1, 3))
    for (auto& c : enum_terms(g, Type::boolean(), sp[0], int_bound, depth))
      for (auto& a : enum_terms(g, t, sp[1], int_bound, depth))
        for (auto& b : enum_terms(g, t, sp[2], int_bound, depth)) out.push_back(Term::ite(c, a, b));
  // Applications of a variable to an argument.
  if (size >= 3)
    for (const auto& [f, ft] : g)
      if (ft.is(Type::Kind::Arrow) && ft.right() == t)
        for (auto& a : enum_terms(g, ft.left(), size - 2, int_bound, depth)) out.push_back(Term::app(Term::var(f), a));
  return out;
}

}  // namespace detail

/// Closed values of type `t` with at most `size_bound` nodes, in a fixed order.
/// Integer literals count as size 1 and range over 0..size_bound.
inline std::vector<Term> enumerate_values(const Type& t, std::size_t size_bound) {
  std::vector<Term> out;
  std::set<std::string> seen;
  auto push = [&](const Term& v) {
    if (seen.insert(alpha_key(v)).second) out.push_back(v);
  };
  for (std::size_t s = 1; s <= size_bound; ++s) {
    for (const auto& m : detail::enum_terms({}, t, s, size_bound, 0))
      if (is_value(m) && m.closed()) push(m);
    if (t.is(Type::Kind::Arrow) && s >= 3) {
      TypingContext g{{"f", t}};
      for (const auto& b : detail::enum_terms(g, t, s - 1, size_bound, 0))
        if (b.has_free("f")) push(Term::fix("f", t, b));
    }
  }
  return out;
}

/// Argument universe covering every arrow domain occurring inside `t`.
inline ArgUniverse arg_universe_for(const Type& t, std::size_t size_bound) {
  std::vector<Type> domains;
  std::vector<Type> work{t};
  while (!work.empty()) {
    Type u = work.back();
    work.pop_back();
    switch (u.kind()) {
      case Type::Kind::Arrow:
        if (std::find(domains.begin(), domains.end(), u.left()) == domains.end()) domains.push_back(u.left());
        work.push_back(u.left());
        work.push_back(u.right());
        break;
      case Type::Kind::Prod:
        work.push_back(u.left());
        work.push_back(u.right());
        break;
      case Type::Kind::List: work.push_back(u.left()); break;
      default: break;
    }
  }
  std::vector<Term> vs;
  for (const auto& d : domains)
    for (auto& v : enumerate_values(d, size_bound)) vs.push_back(v);
  return ArgUniverse::of(vs);
}

}  // namespace pcfl
