#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace pcfl {

/// Directed network with exact rational capacities; Edmonds-Karp max flow.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : adj_(nodes) {}

  std::size_t add_node() {
    adj_.emplace_back();
    return adj_.size() - 1;
  }

  /// Returns an edge id usable with flow().
  std::size_t add_edge(std::size_t from, std::size_t to, const Rational& cap) {
    if (sgn(cap) < 0) throw std::invalid_argument("negative capacity");
    std::size_t id = edges_.size();
    edges_.push_back({from, to, cap, 0});
    edges_.push_back({to, from, 0, 0});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  Rational max_flow(std::size_t s, std::size_t t) {
    Rational total = 0;
    if (s == t) return total;
    while (true) {
      std::vector<long> via(adj_.size(), -1);
      std::vector<char> seen(adj_.size(), 0);
      std::queue<std::size_t> q;
      q.push(s);
      seen[s] = 1;
      while (!q.empty() && !seen[t]) {
        std::size_t u = q.front();
        q.pop();
        for (std::size_t e : adj_[u]) {
          const Edge& ed = edges_[e];
          if (!seen[ed.to] && ed.flow < ed.cap) {
            seen[ed.to] = 1;
            via[ed.to] = static_cast<long>(e);
            q.push(ed.to);
          }
        }
      }
      if (!seen[t]) break;
      Rational push = -1;
      for (std::size_t v = t; v != s; v = edges_[via[v]].from) {
        const Edge& ed = edges_[via[v]];
        Rational room = ed.cap - ed.flow;
        if (sgn(push) < 0 || room < push) push = room;
      }
      for (std::size_t v = t; v != s; v = edges_[via[v]].from) {
        edges_[via[v]].flow += push;
        edges_[via[v] ^ 1].flow -= push;
      }
      total += push;
    }
    return total;
  }

  const Rational& flow(std::size_t edge) const { return edges_.at(edge).flow; }
  const Rational& capacity(std::size_t edge) const { return edges_.at(edge).cap; }
  std::size_t from(std::size_t edge) const { return edges_.at(edge).from; }
  std::size_t to(std::size_t edge) const { return edges_.at(edge).to; }
  std::size_t node_count() const { return adj_.size(); }
  /// Forward edge ids leaving `u`.
  std::vector<std::size_t> out_edges(std::size_t u) const {
    std::vector<std::size_t> out;
    for (std::size_t e : adj_[u])
      if (e % 2 == 0) out.push_back(e);
    return out;
  }

  /// Nodes reachable from `s` in the residual network (the source side of a min cut).
  std::vector<char> source_side(std::size_t s) const {
    std::vector<char> seen(adj_.size(), 0);
    std::vector<std::size_t> st{s};
    seen[s] = 1;
    while (!st.empty()) {
      std::size_t u = st.back();
      st.pop_back();
      for (std::size_t e : adj_[u]) {
        const Edge& ed = edges_[e];
        if (!seen[ed.to] && ed.flow < ed.cap) {
          seen[ed.to] = 1;
          st.push_back(ed.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    std::size_t from, to;
    Rational cap, flow;
  };
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adj_;
};

// ---------------------------------------------------------------------------
// Probability assignments

/// Subsets of {1..n} are bitmasks: element i is bit (i - 1).
using Subset = std::uint32_t;

inline std::vector<int> subset_elements(Subset s) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (s & (Subset(1) << i)) out.push_back(i + 1);
  return out;
}

struct ProbAssignment {
  std::vector<Rational> p;          // p[0] is p_1
  std::map<Subset, Rational> r;     // missing subsets have r = 0

  std::size_t n() const { return p.size(); }
  Rational r_of(Subset s) const {
    auto it = r.find(s);
    return it == r.end() ? Rational(0) : it->second;
  }
};

/// Brute-force check of the validity predicate; returns the first violated subset.
inline std::optional<Subset> violated_subset(const ProbAssignment& P) {
  const Subset full = (Subset(1) << P.n()) - 1;
  for (Subset i = 1; i <= full; ++i) {
    Rational lhs = 0, rhs = 0;
    for (int k : subset_elements(i)) lhs += P.p[k - 1];
    for (Subset j = 1; j <= full; ++j)
      if (j & i) rhs += P.r_of(j);
    if (lhs > rhs) return i;
  }
  return std::nullopt;
}

/// s[(k, I)] for k in I; absent entries are zero.
struct Disentangling {
  std::map<std::pair<int, Subset>, Rational> s;

  Rational at(int k, Subset i) const {
    auto it = s.find({k, i});
    return it == s.end() ? Rational(0) : it->second;
  }
};

struct DisentangleResult {
  std::optional<Disentangling> solution;
  Subset invalid_cut = 0;  // set when no solution exists
};

/// True iff `d` is a disentangling of `P`: row sums at most 1 and every p_k covered.
inline bool satisfies_bullets(const ProbAssignment& P, const Disentangling& d) {
  const Subset full = (Subset(1) << P.n()) - 1;
  for (const auto& [key, v] : d.s) {
    if (sgn(v) < 0 || v > 1) return false;
    if (!(key.second & (Subset(1) << (key.first - 1)))) return false;
  }
  for (Subset i = 1; i <= full; ++i) {
    Rational sum = 0;
    for (int k : subset_elements(i)) sum += d.at(k, i);
    if (sum > 1) return false;
  }
  for (int k = 1; k <= static_cast<int>(P.n()); ++k) {
    Rational sum = 0;
    for (Subset i = 1; i <= full; ++i)
      if (i & (Subset(1) << (k - 1))) sum += d.at(k, i) * P.r_of(i);
    if (P.p[k - 1] > sum) return false;
  }
  return true;
}

/// Solves the disentangling problem on the subset-lattice flow network.
inline DisentangleResult disentangle(const ProbAssignment& P) {
  const std::size_t n = P.n();
  if (n == 0) return {Disentangling{}, 0};
  if (n > 16) throw std::invalid_argument("disentangle supports at most 16 elements");
  const Subset full = (Subset(1) << n) - 1;
  Rational total = 0;
  for (const auto& pi : P.p) total += pi;
  // Lattice edges carry capacity 1; when the p_i sum above 1 that bound could
  // bind, so it is raised to the total supply, which is the same as unbounded.
  Rational lattice_cap = total > 1 ? total : Rational(1);

  // Node ids: subset masks 1..full, source = 0, sink = full + 1.
  const std::size_t src = 0, sink = full + 1;
  FlowNetwork net(full + 2);
  std::vector<std::size_t> src_edge(n);
  std::map<Subset, std::size_t> sink_edge;
  for (std::size_t i = 0; i < n; ++i) src_edge[i] = net.add_edge(src, Subset(1) << i, P.p[i]);
  for (Subset s = 1; s <= full; ++s) {
    for (std::size_t i = 0; i < n; ++i)
      if (!(s & (Subset(1) << i))) net.add_edge(s, s | (Subset(1) << i), lattice_cap);
    sink_edge[s] = net.add_edge(s, sink, P.r_of(s));
  }
  Rational value = net.max_flow(src, sink);

  if (value < total) {
    auto side = net.source_side(src);
    Subset cut = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (side[Subset(1) << i]) cut |= Subset(1) << i;
    DisentangleResult r;
    r.invalid_cut = cut;
    return r;
  }

  // Path decomposition: each unit of flow from {k} ends at some I -> sink edge.
  std::map<std::size_t, Rational> left;
  for (std::size_t u = 0; u < net.node_count(); ++u)
    for (std::size_t e : net.out_edges(u))
      if (sgn(net.flow(e)) > 0) left[e] = net.flow(e);
  std::map<std::pair<int, Subset>, Rational> amount;
  for (std::size_t k = 0; k < n; ++k) {
    while (sgn(left[src_edge[k]]) > 0) {
      std::vector<std::size_t> path{src_edge[k]};
      std::size_t u = Subset(1) << k;
      Subset end = 0;
      while (true) {
        auto se = sink_edge.at(static_cast<Subset>(u));
        if (sgn(left[se]) > 0) {
          path.push_back(se);
          end = static_cast<Subset>(u);
          break;
        }
        bool moved = false;
        for (std::size_t e : net.out_edges(u)) {
          if (net.to(e) == sink) continue;
          if (sgn(left[e]) > 0) {
            path.push_back(e);
            u = net.to(e);
            moved = true;
            break;
          }
        }
        if (!moved) throw std::logic_error("flow decomposition got stuck");
      }
      Rational b = left[path[0]];
      for (std::size_t e : path) b = std::min(b, left[e]);
      for (std::size_t e : path) left[e] -= b;
      amount[{static_cast<int>(k + 1), end}] += b;
    }
  }
  Disentangling d;
  for (const auto& [key, a] : amount) {
    Rational ri = P.r_of(key.second);
    if (sgn(ri) > 0 && sgn(a) > 0) d.s[key] = a / ri;
  }
  return {d, 0};
}

// ---------------------------------------------------------------------------
// Lifting of a relation to subdistributions

/// True iff D(X) <= E(R(X)) for every X within the support of D, where
/// `related[i][j]` says whether D's i-th point is related to E's j-th point.
inline bool lift_check(const std::vector<Rational>& D, const std::vector<Rational>& E,
                       const std::vector<std::vector<char>>& related) {
  const std::size_t a = D.size(), b = E.size();
  const std::size_t src = a + b, sink = a + b + 1;
  FlowNetwork net(a + b + 2);
  Rational total = 0;
  for (std::size_t i = 0; i < a; ++i) {
    net.add_edge(src, i, D[i]);
    total += D[i];
  }
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j)
      if (related[i][j]) net.add_edge(i, a + j, 1);
  for (std::size_t j = 0; j < b; ++j) net.add_edge(a + j, sink, E[j]);
  return net.max_flow(src, sink) == total;
}

}  // namespace pcfl
