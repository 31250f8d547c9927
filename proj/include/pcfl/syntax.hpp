#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcfl {

// ---------------------------------------------------------------------------
// Types

class Type {
 public:
  enum class Kind { Bool, Int, Arrow, Prod, List };

  Type() : Type(Kind::Bool, {}) {}

  static Type boolean() { return Type(Kind::Bool, {}); }
  static Type integer() { return Type(Kind::Int, {}); }
  static Type arrow(Type dom, Type cod) { return Type(Kind::Arrow, {std::move(dom), std::move(cod)}); }
  static Type prod(Type l, Type r) { return Type(Kind::Prod, {std::move(l), std::move(r)}); }
  static Type list(Type elem) { return Type(Kind::List, {std::move(elem)}); }

  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return node_->kind == k; }
  /// Domain of an arrow, left of a product, element of a list.
  const Type& left() const { return node_->kids.at(0); }
  /// Codomain of an arrow, right of a product.
  const Type& right() const { return node_->kids.at(1); }

  friend bool operator==(const Type& a, const Type& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.node_->kids.size() != b.node_->kids.size()) return false;
    for (std::size_t i = 0; i < a.node_->kids.size(); ++i)
      if (!(a.node_->kids[i] == b.node_->kids[i])) return false;
    return true;
  }
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }
  friend bool operator<(const Type& a, const Type& b) { return a.str() < b.str(); }

  std::string str() const { return print(0); }

 private:
  struct Node {
    Kind kind;
    std::vector<Type> kids;
  };

  Type(Kind k, std::vector<Type> kids)
      : node_(std::make_shared<const Node>(Node{k, std::move(kids)})) {}

  // 0: arrow level, 1: product operand, 2: atom
  std::string print(int ctx) const {
    switch (kind()) {
      case Kind::Bool: return "bool";
      case Kind::Int: return "int";
      case Kind::List: return "[" + left().print(0) + "]";
      case Kind::Arrow: {
        std::string s = left().print(1) + " -> " + right().print(0);
        return ctx > 0 ? "(" + s + ")" : s;
      }
      case Kind::Prod: {
        std::string s = left().print(1) + " * " + right().print(2);
        return ctx > 1 ? "(" + s + ")" : s;
      }
    }
    return "?";
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Terms and contexts

enum class Op { Add, Leq, Eq };

inline const char* op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Leq: return "<=";
    case Op::Eq: return "==";
  }
  return "?";
}

class Term {
 public:
  enum class Kind { Var, Num, Bool, Nil, Pair, Cons, Lam, Fix, Choice, If, Op, Fst, Snd, Case, App, Hole };

  Term() = default;

  static Term var(std::string x) {
    Node n(Kind::Var);
    n.name = std::move(x);
    n.fv = {n.name};
    return Term(std::move(n));
  }
  static Term num(std::uint64_t k) {
    Node n(Kind::Num);
    n.num = k;
    return Term(std::move(n));
  }
  static Term boolean(bool b) {
    Node n(Kind::Bool);
    n.flag = b;
    return Term(std::move(n));
  }
  static Term nil(Type elem) {
    Node n(Kind::Nil);
    n.annot = std::move(elem);
    return Term(std::move(n));
  }
  static Term pair(Term a, Term b) { return make(Kind::Pair, {std::move(a), std::move(b)}); }
  static Term cons(Term h, Term t) { return make(Kind::Cons, {std::move(h), std::move(t)}); }
  static Term lam(std::string x, Type annot, Term body) {
    return binder(Kind::Lam, std::move(x), std::move(annot), std::move(body));
  }
  static Term fix(std::string x, Type annot, Term body) {
    return binder(Kind::Fix, std::move(x), std::move(annot), std::move(body));
  }
  static Term choice(Term a, Term b) { return make(Kind::Choice, {std::move(a), std::move(b)}); }
  static Term ite(Term c, Term t, Term e) { return make(Kind::If, {std::move(c), std::move(t), std::move(e)}); }
  static Term op(Op o, Term a, Term b) {
    return make(Kind::Op, {std::move(a), std::move(b)}, o);
  }
  static Term fst(Term a) { return make(Kind::Fst, {std::move(a)}); }
  static Term snd(Term a) { return make(Kind::Snd, {std::move(a)}); }
  /// case l of { nil -> on_nil | h::t -> on_cons }
  static Term case_of(Term l, Term on_nil, std::string h, std::string t, Term on_cons) {
    Node n(Kind::Case);
    n.name = std::move(h);
    n.name2 = std::move(t);
    n.kids = {std::move(l), std::move(on_nil), std::move(on_cons)};
    n.size = 1;
    std::set<std::string> fv;
    for (int i = 0; i < 3; ++i) {
      const Node& k = *n.kids[i].node_;
      n.size += k.size;
      n.holes += k.holes;
      for (const auto& v : k.fv)
        if (i < 2 || (v != n.name && v != n.name2)) fv.insert(v);
    }
    n.fv.assign(fv.begin(), fv.end());
    return Term(std::move(n));
  }
  static Term app(Term f, Term a) { return make(Kind::App, {std::move(f), std::move(a)}); }
  static Term app(Term f, std::initializer_list<Term> args) {
    for (const auto& a : args) f = app(std::move(f), a);
    return f;
  }
  static Term hole() {
    Node n(Kind::Hole);
    n.holes = 1;
    return Term(std::move(n));
  }

  bool valid() const { return node_ != nullptr; }
  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return node_->kind == k; }

  /// Variable name, or binder of Lam/Fix, or head binder of Case.
  const std::string& name() const { return node_->name; }
  /// Tail binder of Case.
  const std::string& name2() const { return node_->name2; }
  std::uint64_t number() const { return node_->num; }
  bool flag() const { return node_->flag; }
  Op op() const { return node_->op; }
  /// Binder annotation of Lam/Fix, element type of Nil.
  const Type& annot() const { return node_->annot; }
  const Term& kid(std::size_t i) const { return node_->kids.at(i); }
  std::size_t arity() const { return node_->kids.size(); }
  const Term& body() const { return node_->kids.at(0); }

  /// Sorted free variable names.
  const std::vector<std::string>& free_vars() const { return node_->fv; }
  bool closed() const { return node_->fv.empty(); }
  bool has_free(const std::string& x) const {
    return std::binary_search(node_->fv.begin(), node_->fv.end(), x);
  }
  std::size_t size() const { return node_->size; }
  std::size_t hole_count() const { return node_->holes; }
  bool same_node(const Term& o) const { return node_ == o.node_; }

  /// Rebuilds this node with new children (same kind, labels, annotation).
  Term with_kids(std::vector<Term> kids) const {
    switch (kind()) {
      case Kind::Lam: return lam(name(), annot(), std::move(kids.at(0)));
      case Kind::Fix: return fix(name(), annot(), std::move(kids.at(0)));
      case Kind::Case:
        return case_of(std::move(kids.at(0)), std::move(kids.at(1)), name(), name2(), std::move(kids.at(2)));
      case Kind::Op: return op(node_->op, std::move(kids.at(0)), std::move(kids.at(1)));
      default: return make(kind(), std::move(kids));
    }
  }

  std::string str() const { return print(0); }

 private:
  struct Node {
    explicit Node(Kind k) : kind(k) {}
    Kind kind;
    std::string name, name2;
    std::uint64_t num = 0;
    bool flag = false;
    Op op = Op::Add;
    Type annot;
    std::vector<Term> kids;
    std::vector<std::string> fv;
    std::size_t size = 1;
    std::size_t holes = 0;
  };

  explicit Term(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  static Term make(Kind k, std::vector<Term> kids, Op o = Op::Add) {
    Node n(k);
    n.op = o;
    n.kids = std::move(kids);
    std::vector<std::string> fv;
    for (const auto& kid : n.kids) {
      n.size += kid.node_->size;
      n.holes += kid.node_->holes;
      std::vector<std::string> merged;
      std::set_union(fv.begin(), fv.end(), kid.node_->fv.begin(), kid.node_->fv.end(),
                     std::back_inserter(merged));
      fv.swap(merged);
    }
    n.fv = std::move(fv);
    return Term(std::move(n));
  }

  static Term binder(Kind k, std::string x, Type annot, Term body) {
    Node n(k);
    n.name = std::move(x);
    n.annot = std::move(annot);
    n.size = 1 + body.node_->size;
    n.holes = body.node_->holes;
    for (const auto& v : body.node_->fv)
      if (v != n.name) n.fv.push_back(v);
    n.kids = {std::move(body)};
    return Term(std::move(n));
  }

  // Precedence: 0 binder forms, 1 (+), 2 ::, 3 comparisons, 4 +, 5 application, 6 atoms.
  int prec() const {
    switch (kind()) {
      case Kind::Lam:
      case Kind::Fix:
      case Kind::If: return 0;
      case Kind::Choice: return 1;
      case Kind::Cons: return 2;
      case Kind::Op: return node_->op == Op::Add ? 4 : 3;
      case Kind::App:
      case Kind::Fst:
      case Kind::Snd: return 5;
      default: return 6;
    }
  }

  std::string print(int ctx) const {
    std::string s;
    switch (kind()) {
      case Kind::Var: s = name(); break;
      case Kind::Num: s = std::to_string(number()); break;
      case Kind::Bool: s = flag() ? "true" : "false"; break;
      case Kind::Nil: s = "nil[" + annot().str() + "]"; break;
      case Kind::Hole: s = "[.]"; break;
      case Kind::Pair: s = "(" + kid(0).print(0) + ", " + kid(1).print(0) + ")"; break;
      case Kind::Cons: s = kid(0).print(3) + " :: " + kid(1).print(2); break;
      case Kind::Lam: s = "\\" + name() + ":" + annot().str() + ". " + body().print(0); break;
      case Kind::Fix: s = "fix " + name() + ":" + annot().str() + ". " + body().print(0); break;
      case Kind::Choice: s = kid(0).print(1) + " (+) " + kid(1).print(2); break;
      case Kind::If:
        s = "if " + kid(0).print(0) + " then " + kid(1).print(0) + " else " + kid(2).print(0);
        break;
      case Kind::Op:
        if (op() == Op::Add)
          s = kid(0).print(4) + " + " + kid(1).print(5);
        else
          s = kid(0).print(4) + " " + op_symbol(op()) + " " + kid(1).print(4);
        break;
      case Kind::Fst: s = "fst " + kid(0).print(6); break;
      case Kind::Snd: s = "snd " + kid(0).print(6); break;
      case Kind::App: s = kid(0).print(5) + " " + kid(1).print(6); break;
      case Kind::Case:
        s = "case " + kid(0).print(0) + " of { nil -> " + kid(1).print(0) + " | " + name() +
            "::" + name2() + " -> " + kid(2).print(0) + " }";
        break;
    }
    return prec() < ctx ? "(" + s + ")" : s;
  }

  std::shared_ptr<const Node> node_;
};

using TK = Term::Kind;

/// A term containing exactly one hole.
class Context {
 public:
  explicit Context(Term t) : term_(std::move(t)) {
    if (term_.hole_count() != 1)
      throw std::invalid_argument("context must contain exactly one hole, found " +
                                  std::to_string(term_.hole_count()));
  }
  static Context hole() { return Context(Term::hole()); }
  const Term& term() const { return term_; }
  std::string str() const { return term_.str(); }

 private:
  Term term_;
};

// ---------------------------------------------------------------------------
// Basic operations

inline bool is_value(const Term& m) {
  switch (m.kind()) {
    case TK::Num:
    case TK::Bool:
    case TK::Nil:
    case TK::Lam:
    case TK::Fix:
    case TK::Cons:
    case TK::Pair: return true;
    default: return false;
  }
}

inline std::set<std::string> free_vars(const Term& m) {
  return {m.free_vars().begin(), m.free_vars().end()};
}

namespace detail {

inline void alpha_key(const Term& m, std::vector<std::string>& env, std::string& out) {
  auto lookup = [&](const std::string& x) {
    for (std::size_t i = env.size(); i-- > 0;)
      if (env[i] == x) {
        out += '#';
        out += std::to_string(env.size() - 1 - i);
        return;
      }
    out += '$';
    out += x;
  };
  switch (m.kind()) {
    case TK::Var: lookup(m.name()); return;
    case TK::Num: out += std::to_string(m.number()); return;
    case TK::Bool: out += m.flag() ? 'T' : 'F'; return;
    case TK::Nil: out += "N[" + m.annot().str() + "]"; return;
    case TK::Hole: out += 'H'; return;
    case TK::Lam:
    case TK::Fix:
      out += m.is(TK::Lam) ? "L[" : "X[";
      out += m.annot().str();
      out += "](";
      env.push_back(m.name());
      alpha_key(m.body(), env, out);
      env.pop_back();
      out += ')';
      return;
    case TK::Case:
      out += "C(";
      alpha_key(m.kid(0), env, out);
      out += ',';
      alpha_key(m.kid(1), env, out);
      out += ',';
      env.push_back(m.name());
      env.push_back(m.name2());
      alpha_key(m.kid(2), env, out);
      env.pop_back();
      env.pop_back();
      out += ')';
      return;
    default: break;
  }
  switch (m.kind()) {
    case TK::Pair: out += "P("; break;
    case TK::Cons: out += "K("; break;
    case TK::Choice: out += "S("; break;
    case TK::If: out += "I("; break;
    case TK::Op: out += std::string("O") + op_symbol(m.op()) + "("; break;
    case TK::Fst: out += "1("; break;
    case TK::Snd: out += "2("; break;
    case TK::App: out += "A("; break;
    default: break;
  }
  for (std::size_t i = 0; i < m.arity(); ++i) {
    if (i) out += ',';
    alpha_key(m.kid(i), env, out);
  }
  out += ')';
}

}  // namespace detail

/// Canonical nameless rendering; two terms are alpha-equivalent iff their keys match.
inline std::string alpha_key(const Term& m) {
  std::vector<std::string> env;
  std::string out;
  out.reserve(m.size() * 4);
  detail::alpha_key(m, env, out);
  return out;
}

inline bool alpha_equal(const Term& a, const Term& b) {
  return a.same_node(b) || alpha_key(a) == alpha_key(b);
}

/// Appends primes to `base` until it avoids every name in `avoid`.
inline std::string fresh_name(std::string base, const std::set<std::string>& avoid) {
  while (avoid.count(base)) base += '\'';
  return base;
}

namespace detail {

inline Term subst(const Term& body, const Term& repl, const std::string& x, const std::set<std::string>& repl_fv);

// Substitutes under a single binder named y; renames y when it would capture.
inline std::pair<std::string, Term> subst_under(const std::string& y, const Term& inner, const Term& repl,
                                                const std::string& x, const std::set<std::string>& repl_fv) {
  if (y == x || !inner.has_free(x)) return {y, inner};
  if (!repl_fv.count(y)) return {y, subst(inner, repl, x, repl_fv)};
  std::set<std::string> avoid = repl_fv;
  avoid.insert(inner.free_vars().begin(), inner.free_vars().end());
  avoid.insert(x);
  std::string y2 = fresh_name(y, avoid);
  Term renamed = subst(inner, Term::var(y2), y, {y2});
  return {y2, subst(renamed, repl, x, repl_fv)};
}

inline Term subst(const Term& body, const Term& repl, const std::string& x, const std::set<std::string>& repl_fv) {
  if (!body.has_free(x)) return body;
  switch (body.kind()) {
    case TK::Var: return repl;
    case TK::Lam:
    case TK::Fix: {
      auto [y, inner] = subst_under(body.name(), body.body(), repl, x, repl_fv);
      return body.is(TK::Lam) ? Term::lam(y, body.annot(), inner) : Term::fix(y, body.annot(), inner);
    }
    case TK::Case: {
      Term scrut = subst(body.kid(0), repl, x, repl_fv);
      Term on_nil = subst(body.kid(1), repl, x, repl_fv);
      std::string h = body.name(), t = body.name2();
      Term on_cons = body.kid(2);
      if (h != x && t != x && on_cons.has_free(x)) {
        std::set<std::string> avoid = repl_fv;
        avoid.insert(on_cons.free_vars().begin(), on_cons.free_vars().end());
        avoid.insert(x);
        avoid.insert(h);
        avoid.insert(t);
        if (repl_fv.count(h)) {
          std::string h2 = fresh_name(h, avoid);
          avoid.insert(h2);
          on_cons = subst(on_cons, Term::var(h2), h, {h2});
          h = h2;
        }
        if (repl_fv.count(t)) {
          std::string t2 = fresh_name(t, avoid);
          on_cons = subst(on_cons, Term::var(t2), t, {t2});
          t = t2;
        }
        on_cons = subst(on_cons, repl, x, repl_fv);
      }
      return Term::case_of(scrut, on_nil, h, t, on_cons);
    }
    default: {
      std::vector<Term> kids;
      kids.reserve(body.arity());
      for (std::size_t i = 0; i < body.arity(); ++i) kids.push_back(subst(body.kid(i), repl, x, repl_fv));
      return body.with_kids(std::move(kids));
    }
  }
}

}  // namespace detail

/// Capture-avoiding body[repl/x].
inline Term subst(const Term& body, const Term& repl, const std::string& x) {
  return detail::subst(body, repl, x, free_vars(repl));
}

/// Plain grafting of `m` into the hole; variables of `m` may be captured.
inline Term fill(const Term& c, const Term& m) {
  if (c.hole_count() == 0) return c;
  if (c.is(TK::Hole)) return m;
  std::vector<Term> kids;
  kids.reserve(c.arity());
  for (std::size_t i = 0; i < c.arity(); ++i) kids.push_back(fill(c.kid(i), m));
  return c.with_kids(std::move(kids));
}

inline Term fill(const Context& c, const Term& m) { return fill(c.term(), m); }

/// Context composition: outer[inner].
inline Context compose(const Context& outer, const Context& inner) {
  return Context(fill(outer.term(), inner.term()));
}

}  // namespace pcfl
