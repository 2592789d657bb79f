#pragma once

// Test-only oracles and generators. Nothing here calls into the solver.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "mwucb/topology.hpp"

namespace testsupport {

inline mwucb::NetworkTopology random_topology(std::mt19937_64& rng, std::size_t max_nodes,
                                              std::size_t max_links) {
  std::uniform_int_distribution<std::size_t> node_count(2, max_nodes);
  const std::size_t n = node_count(rng);
  std::vector<mwucb::Link> all;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) all.push_back({i, j});
  std::shuffle(all.begin(), all.end(), rng);
  std::uniform_int_distribution<std::size_t> link_count(0, std::min(max_links, all.size()));
  all.resize(link_count(rng));
  return mwucb::NetworkTopology(n, all);
}

inline bool is_matching(const mwucb::NetworkTopology& t, std::uint32_t mask) {
  std::vector<int> used(t.node_count(), 0);
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    if (!(mask >> e & 1u)) continue;
    const auto& l = t.links()[e];
    if (used[l.tail]++ || used[l.head]++) return false;
  }
  return true;
}

inline double mask_value(const std::vector<double>& w, std::uint32_t mask) {
  double total = 0.0;
  for (std::size_t e = 0; e < w.size(); ++e)
    if (mask >> e & 1u) total += w[e];
  return total;
}

/// Maximum of sum w_e x_e over all subsets accepted by `admissible`.
inline double brute_force_max(const std::vector<double>& w,
                              const std::function<bool(std::uint32_t)>& admissible) {
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << w.size()); ++mask)
    if (admissible(mask)) best = std::max(best, mask_value(w, mask));
  return best;
}

/// Matchings counted by include/exclude recursion over edges.
inline std::size_t count_matchings(const std::vector<mwucb::Link>& links, std::size_t from,
                                   std::set<std::size_t>& used) {
  if (from == links.size()) return 1;
  std::size_t total = count_matchings(links, from + 1, used);
  const auto& l = links[from];
  if (!used.count(l.tail) && !used.count(l.head)) {
    used.insert(l.tail);
    used.insert(l.head);
    total += count_matchings(links, from + 1, used);
    used.erase(l.tail);
    used.erase(l.head);
  }
  return total;
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n, double lo = 0.0,
                                          double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> w(n);
  for (auto& x : w) x = u(rng);
  return w;
}

}  // namespace testsupport
