#pragma once

#include <optional>
#include <string>
#include <vector>

#include "equivalence.hpp"
#include "eval.hpp"
#include "testing.hpp"
#include "typing.hpp"

namespace pcfl {

struct SpotRow {
  Context context;
  Interval mass_m, mass_n;
  ValueDist dist_m, dist_n;
  bool leq = true;  // false only when mass(C[M]) > mass(C[N]) for certain
  std::optional<std::string> error;
};

/// Convergence of C[M] and C[N] for every context. Contexts that do not close
/// terms of type `sigma` are reported with an error instead of masses.
inline std::vector<SpotRow> ctx_spot_check(const Term& m, const Term& n, const Type& sigma,
                                           const std::vector<Context>& contexts, unsigned fuel) {
  std::vector<SpotRow> rows;
  for (const auto& c : contexts) {
    SpotRow row{c, {}, {}, {}, {}, true, std::nullopt};
    try {
      check_context({}, c, {}, sigma);
      Approx a = approximate(fill(c, m), fuel);
      Approx b = approximate(fill(c, n), fuel);
      row.mass_m = {a.dist.mass(), a.dist.mass() + a.deficit};
      row.mass_n = {b.dist.mass(), b.dist.mass() + b.deficit};
      row.dist_m = std::move(a.dist);
      row.dist_n = std::move(b.dist);
      row.leq = row.mass_m.lo <= row.mass_n.hi;
    } catch (const TypeError& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Program contexts compiled from the first `count` enumerated tests on the joint
/// fragment of M and N that succeed with positive probability at one of them.
inline std::vector<Context> sample_contexts(const Term& m, const Term& n, const Type& sigma, const EquivConfig& cfg,
                                            std::size_t count) {
  ArgUniverse args = arg_universe_for(sigma, cfg.arg_size);
  LmcFragment f =
      build_fragment({LmcState::program(m, sigma), LmcState::program(n, sigma)}, args, lmc_config(cfg));
  const std::size_t r = *f.find(LmcState::program(n, sigma));
  std::vector<Context> out;
  enumerate_tests(f, {cfg.test_depth, cfg.max_tests}, [&](const Test& t, const TestEvaluator::Vec& v) {
    if (sgn(v[0].hi) > 0 || sgn(v[r].hi) > 0) out.push_back(compile_test(t, sigma).c);
    return out.size() >= count;
  });
  return out;
}

}  // namespace pcfl
