#pragma once

// JSON views of distributions, fragments, verdicts and probability assignments.
// Requires nlohmann/json on the include path.

#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "../equivalence.hpp"
#include "../eval.hpp"
#include "../flow.hpp"
#include "../lmc.hpp"
#include "../testing.hpp"

namespace pcfl::io {

using nlohmann::json;

inline std::string q(const Rational& r) { return r.get_str(); }

inline json to_json(const ValueDist& d) {
  json support = json::array();
  for (const auto& [k, e] : d.entries()) support.push_back({{"value", e.value.str()}, {"prob", q(e.prob)}});
  return {{"mass", q(d.mass())}, {"support", support}};
}

inline json to_json(const Interval& i) { return json::array({q(i.lo), q(i.hi)}); }

inline json to_json(const EquivConfig& c) {
  return {{"fuel", c.fuel},
          {"arg_size", c.arg_size},
          {"depth", c.depth},
          {"test_depth", c.test_depth},
          {"state_cap", c.state_cap}};
}

inline json to_json(const Verdict& v) {
  json j;
  if (v.equivalent()) {
    j["verdict"] = "equivalent_up_to_bound";
    j["partition_separated"] = v.partition_separated;
  } else {
    j["verdict"] = "not_equivalent";
    const Witness& w = *v.witness;
    j["witness_test"] = w.test.str();
    j["p_left"] = w.left.is_exact() ? json(q(w.left.lo)) : to_json(w.left);
    j["p_right"] = w.right.is_exact() ? json(q(w.right.lo)) : to_json(w.right);
  }
  if (!v.closure.empty()) {
    json c = json::object();
    for (const auto& [x, t] : v.closure) c[x] = t.str();
    j["closure"] = c;
  }
  j["states"] = v.states;
  j["arg_universe_size"] = v.arg_count;
  j["config"] = to_json(v.cfg);
  return j;
}

inline json to_json(const LmcFragment& f) {
  json states = json::array(), edges = json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const LmcState& s = f.state(i);
    states.push_back({{"id", i},
                      {"kind", s.is_hat() ? "value" : "program"},
                      {"term", s.term.str()},
                      {"type", s.type.str()},
                      {"frontier", f.is_frontier(i)}});
    for (const auto& [lk, row] : f.rows(i)) {
      json to = json::array();
      for (const auto& [t, w] : row.succ) to.push_back({{"state", t}, {"prob", q(w)}});
      edges.push_back({{"from", i}, {"label", f.alphabet().at(lk).str()}, {"to", to}, {"deficit", q(row.deficit)}});
    }
  }
  return {{"states", states}, {"edges", edges}};
}

// ---------------------------------------------------------------------------
// Probability assignments: {"p":["1/2","1/2"],"r":{"1":"1/2","2":"1/2","1,2":"0"}}

inline Subset parse_subset(const std::string& s, std::size_t n) {
  Subset out = 0;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    int k = std::stoi(item, &pos);
    if (pos != item.size() || k < 1 || static_cast<std::size_t>(k) > n)
      throw std::invalid_argument("bad subset element '" + item + "'");
    out |= Subset(1) << (k - 1);
  }
  if (!out) throw std::invalid_argument("empty subset");
  return out;
}

inline std::string subset_str(Subset s) {
  std::string out;
  for (int k : subset_elements(s)) out += (out.empty() ? "" : ",") + std::to_string(k);
  return out;
}

inline ProbAssignment parse_assignment(const json& j) {
  ProbAssignment P;
  for (const auto& x : j.at("p")) P.p.push_back(parse_rational(x.get<std::string>()));
  if (j.contains("r"))
    for (const auto& [k, v] : j.at("r").items()) P.r[parse_subset(k, P.n())] += parse_rational(v.get<std::string>());
  return P;
}

inline json to_json(const DisentangleResult& r) {
  if (!r.solution) {
    json cut = json::array();
    for (int k : subset_elements(r.invalid_cut)) cut.push_back(k);
    return {{"invalid_cut", cut}};
  }
  json s = json::object();
  for (const auto& [key, v] : r.solution->s) s[std::to_string(key.first) + "|" + subset_str(key.second)] = q(v);
  return {{"s", s}};
}

}  // namespace pcfl::io
