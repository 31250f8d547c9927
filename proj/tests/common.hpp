#pragma once

#include <random>
#include <string>

#include "pcfl/io/corpus.hpp"
#include "pcfl/pcfl.hpp"

namespace pcfl {

// Readable gtest failure output.
inline void PrintTo(const Interval& i, std::ostream* os) { *os << to_string(i); }
inline void PrintTo(const ValueDist& d, std::ostream* os) { *os << d.str(); }

}  // namespace pcfl

namespace pcfl::testutil {

inline Term P(const std::string& s) { return parse_term(s); }
inline Type T(const std::string& s) { return parse_type(s); }
inline Rational Q(long n, long d = 1) { return rational(n, d); }

inline const io::Corpus& corpus() {
  static const io::Corpus c = io::load_corpus(PCFL_CORPUS_DIR);
  return c;
}

// Omega at type t.
inline Term omega(const std::string& t) { return P("(fix f:int -> " + t + ". f) 0"); }

// Identity on booleans.
inline Term id_bool() { return P("\\z:bool. z"); }

inline bool power_of_two(const mpz_class& d) { return d > 0 && (d & (d - 1)) == 0; }

// Reference semantics by exhaustive unfolding of the small-step relation, without
// any sharing of states. Only for terms whose every path ends within `depth` steps.
inline void unfold(const Term& m, const Rational& w, unsigned depth, std::map<std::string, Rational>& out) {
  if (is_value(m)) {
    out[alpha_key(m)] += w;
    return;
  }
  if (depth == 0) return;
  StepResult r = step(m);
  for (const auto& t : r.reducts) unfold(t, w / static_cast<long>(r.reducts.size()), depth - 1, out);
}

inline std::map<std::string, Rational> keyed(const ValueDist& d) {
  std::map<std::string, Rational> out;
  for (const auto& [k, e] : d.entries()) out[k] = e.prob;
  return out;
}

// Every test of depth at most `depth` enumerated on the fragment of (M, sigma).
inline std::vector<Test> tests_for(const Term& m, const Type& sigma, std::size_t depth, std::size_t arg_size = 1) {
  LmcConfig cfg;
  cfg.depth = depth;
  LmcFragment f = build_fragment({LmcState::program(m, sigma)}, arg_universe_for(sigma, arg_size), cfg);
  std::vector<Test> out;
  enumerate_tests(f, {depth, 200000}, [&](const Test& t, const TestEvaluator::Vec&) {
    out.push_back(t);
    return false;
  });
  return out;
}

namespace gen {

inline void paths(const std::vector<Label>& sigma, std::size_t depth, std::vector<Label>& cur,
                  std::vector<std::vector<Label>>& out) {
  out.push_back(cur);
  if (cur.size() == depth) return;
  for (const auto& a : sigma) {
    cur.push_back(a);
    paths(sigma, depth, cur, out);
    cur.pop_back();
  }
}

}  // namespace gen

// Every label path of length at most `depth` over the alphabet of the fragment
// of (M, sigma), and every a.<p, q> with p, q distinct nonempty paths below it.
inline std::vector<Test> all_tests(const Term& m, const Type& sigma, std::size_t depth, std::size_t arg_size = 1) {
  LmcConfig cfg;
  cfg.depth = depth;
  LmcFragment f = build_fragment({LmcState::program(m, sigma)}, arg_universe_for(sigma, arg_size), cfg);
  std::vector<Label> alphabet;
  for (const auto& [k, l] : f.alphabet()) alphabet.push_back(l);
  std::vector<std::vector<Label>> ps, shorter;
  std::vector<Label> cur;
  gen::paths(alphabet, depth, cur, ps);
  if (depth >= 1) gen::paths(alphabet, depth - 1, cur, shorter);
  std::vector<Test> out;
  for (const auto& p : ps) out.push_back(Test::path(p));
  for (const auto& a : alphabet)
    for (std::size_t i = 1; i < shorter.size(); ++i)
      for (std::size_t j = i + 1; j < shorter.size(); ++j)
        out.push_back(Test::prefix(a, Test::conj({Test::path(shorter[i]), Test::path(shorter[j])})));
  return out;
}

}  // namespace pcfl::testutil
