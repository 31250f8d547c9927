#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "flow.hpp"
#include "lmc.hpp"
#include "testing.hpp"

namespace pcfl {

/// Block id of every fragment state.
using Partition = std::vector<std::size_t>;

/// relation[s][t] says whether (s, t) is in the relation.
using Relation = std::vector<std::vector<char>>;

namespace detail {

// Rows that carry no information (no successor, no unknown mass) count as absent.
inline bool trivial(const Row& r) { return r.succ.empty() && sgn(r.deficit) == 0; }

inline std::string signature(const LmcFragment& f, std::size_t x, const Partition& p) {
  std::string sig;
  for (const auto& [lk, row] : f.rows(x)) {
    if (trivial(row)) continue;
    std::map<std::size_t, Rational> into;
    for (const auto& [y, w] : row.succ) into[p[y]] += w;
    sig += lk;
    sig += '{';
    for (const auto& [b, w] : into) sig += std::to_string(b) + ":" + w.get_str() + ",";
    sig += "d:" + row.deficit.get_str() + "}";
  }
  return sig;
}

inline std::size_t count_blocks(const Partition& p) { return std::set<std::size_t>(p.begin(), p.end()).size(); }

}  // namespace detail

/// One refinement pass: states stay together only if their block and signature agree.
inline Partition refine(const LmcFragment& f, const Partition& p) {
  std::map<std::pair<std::size_t, std::string>, std::size_t> ids;
  Partition out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) {
    auto key = std::pair{p[x], detail::signature(f, x, p)};
    auto it = ids.find(key);
    if (it == ids.end()) it = ids.emplace(key, ids.size()).first;
    out[x] = it->second;
  }
  return out;
}

/// Coarsest partition in which states of one block have identical weights and
/// deficits into every block under every label. Frontier states stay alone.
inline Partition bisim_classes(const LmcFragment& f) {
  Partition p(f.size(), 0);
  std::size_t next = 1;
  for (std::size_t x = 0; x < f.size(); ++x)
    if (f.is_frontier(x)) p[x] = next++;
  std::size_t blocks = detail::count_blocks(p);
  while (true) {
    Partition q = refine(f, p);
    std::size_t nb = detail::count_blocks(q);
    p = std::move(q);
    if (nb == blocks) return p;
    blocks = nb;
  }
}

namespace detail {

// Whether the (s, l) row may be dominated by the (t, l) row under `r`. The s-row
// is taken at its lower weights and the t-row gets its deficit as an extra point
// related to everything, so a failure here is a failure for every completion.
inline bool row_dominated(const Row* sr, const Row* tr, const Relation& r) {
  if (!sr || sr->succ.empty()) return true;
  std::vector<Rational> d, e;
  for (const auto& [y, w] : sr->succ) d.push_back(w);
  std::vector<std::size_t> targets;
  if (tr) {
    for (const auto& [y, w] : tr->succ) {
      e.push_back(w);
      targets.push_back(y);
    }
  }
  bool wildcard = tr && sgn(tr->deficit) > 0;
  if (wildcard) e.push_back(tr->deficit);
  std::vector<std::vector<char>> rel(d.size(), std::vector<char>(e.size(), 0));
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < targets.size(); ++j) rel[i][j] = r[sr->succ[i].first][targets[j]];
    if (wildcard) rel[i][e.size() - 1] = 1;
  }
  return lift_check(d, e, rel);
}

inline bool pair_ok(const LmcFragment& f, std::size_t s, std::size_t t, const Relation& r) {
  for (const auto& [lk, row] : f.rows(s))
    if (!row_dominated(&row, f.row(t, lk), r)) return false;
  return true;
}

}  // namespace detail

/// Greatest simulation on the fragment, by deleting failing pairs until nothing changes.
/// Frontier states are related to themselves only.
inline Relation sim_preorder(const LmcFragment& f) {
  const std::size_t n = f.size();
  Relation r(n, std::vector<char>(n, 0));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t)
      r[s][t] = s == t || (!f.is_frontier(s) && !f.is_frontier(t) && f.state(s).type == f.state(t).type);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t)
        if (s != t && r[s][t] && !detail::pair_ok(f, s, t, r)) {
          r[s][t] = 0;
          changed = true;
        }
  }
  return r;
}

/// Checks that every pair of `r` satisfies the simulation condition on `f`.
inline bool is_simulation(const LmcFragment& f, const Relation& r) {
  for (std::size_t s = 0; s < f.size(); ++s)
    for (std::size_t t = 0; t < f.size(); ++t)
      if (r[s][t] && s != t && !detail::pair_ok(f, s, t, r)) return false;
  return true;
}

/// Checks that the equivalence closure of `r` is a bisimulation on `f`.
inline bool is_bisimulation(const LmcFragment& f, const Relation& r) {
  const std::size_t n = f.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t)
      if (r[s][t]) parent[root(s)] = root(t);
  Partition p(n);
  for (std::size_t x = 0; x < n; ++x) p[x] = root(x);
  return detail::count_blocks(refine(f, p)) == detail::count_blocks(p);
}

inline Relation relation_of(const Partition& p) {
  Relation r(p.size(), std::vector<char>(p.size(), 0));
  for (std::size_t s = 0; s < p.size(); ++s)
    for (std::size_t t = 0; t < p.size(); ++t) r[s][t] = p[s] == p[t];
  return r;
}

// ---------------------------------------------------------------------------
// Verdicts

struct EquivConfig {
  unsigned fuel = 32;
  std::size_t arg_size = 2;
  std::size_t depth = 6;
  std::size_t test_depth = 4;
  std::size_t state_cap = 100000;
  std::size_t max_tests = 200000;
};

struct Verdict {
  enum class Kind { EquivalentUpToBound, NotEquivalent };
  Kind kind = Kind::EquivalentUpToBound;
  std::optional<Witness> witness;
  // Bisimulation separated the roots but no test within the depth bound did.
  bool partition_separated = false;
  std::size_t states = 0;
  std::size_t arg_count = 0;
  EquivConfig cfg;
  // open_check: the closure that separated the terms, as (variable, value) pairs.
  std::vector<std::pair<std::string, Term>> closure;

  bool equivalent() const { return kind == Kind::EquivalentUpToBound; }
};

inline LmcConfig lmc_config(const EquivConfig& c) {
  LmcConfig l;
  l.fuel = c.fuel;
  l.depth = c.depth;
  l.state_cap = c.state_cap;
  return l;
}

/// Bounded check of M against N at type `sigma` on a joint fragment.
inline Verdict check_equiv(const Term& m, const Term& n, const Type& sigma, const EquivConfig& cfg = {}) {
  for (const Term* t : {&m, &n})
    if (infer(*t) != sigma) throw TypeError(t->str() + " does not have type " + sigma.str());
  ArgUniverse args = arg_universe_for(sigma, cfg.arg_size);
  LmcFragment f =
      build_fragment({LmcState::program(m, sigma), LmcState::program(n, sigma)}, args, lmc_config(cfg));
  std::size_t s = 0, r = *f.find(LmcState::program(n, sigma));
  Verdict v;
  v.cfg = cfg;
  v.states = f.size();
  v.arg_count = args.values.size();
  Partition p = bisim_classes(f);
  if (p[s] == p[r]) return v;
  auto w = find_distinguishing_test(f, s, r, {cfg.test_depth, cfg.max_tests});
  if (w) {
    v.kind = Verdict::Kind::NotEquivalent;
    v.witness = std::move(w);
  } else {
    v.partition_separated = true;
  }
  return v;
}

namespace detail {

inline void closures(const std::vector<std::pair<std::string, std::vector<Term>>>& choices, std::size_t i,
                     std::vector<std::pair<std::string, Term>>& cur,
                     std::vector<std::vector<std::pair<std::string, Term>>>& out) {
  if (i == choices.size()) {
    out.push_back(cur);
    return;
  }
  for (const auto& v : choices[i].second) {
    cur.emplace_back(choices[i].first, v);
    closures(choices, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Every map from the variables of `g` to closed values of at most `size` nodes.
inline std::vector<std::vector<std::pair<std::string, Term>>> gamma_closures(const TypingContext& g,
                                                                             std::size_t size) {
  std::vector<std::pair<std::string, std::vector<Term>>> choices;
  for (const auto& [x, t] : g) choices.emplace_back(x, enumerate_values(t, size));
  std::vector<std::vector<std::pair<std::string, Term>>> out;
  std::vector<std::pair<std::string, Term>> cur;
  detail::closures(choices, 0, cur, out);
  return out;
}

inline Term close_term(Term m, const std::vector<std::pair<std::string, Term>>& xi) {
  for (const auto& [x, v] : xi) m = subst(m, v, x);
  return m;
}

/// Open extension: compares every closed instance of M and N under small closures of `g`.
inline Verdict open_check(const TypingContext& g, const Term& m, const Term& n, const Type& sigma,
                          const EquivConfig& cfg = {}) {
  for (const Term* t : {&m, &n})
    if (infer(g, *t) != sigma) throw TypeError(t->str() + " does not have type " + sigma.str());
  Verdict last;
  last.cfg = cfg;
  for (const auto& xi : gamma_closures(g, cfg.arg_size)) {
    Verdict v = check_equiv(close_term(m, xi), close_term(n, xi), sigma, cfg);
    v.closure = xi;
    if (!v.equivalent()) return v;
    last.partition_separated = last.partition_separated || v.partition_separated;
    last.states = std::max(last.states, v.states);
    last.arg_count = v.arg_count;
  }
  return last;
}

}  // namespace pcfl
