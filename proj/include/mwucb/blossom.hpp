#pragma once

#include <cstddef>
#include <vector>

namespace mwucb::blossom {

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

inline constexpr long kUnmatched = -1;

/// Maximum-weight matching on a general undirected graph (Edmonds' blossom
/// algorithm with dual variables, O(n^3)). Edges with non-positive weight
/// never improve the objective and may be left out of the result.
///
/// Returns mate[v] = matched vertex, or kUnmatched. The vector has
/// `vertex_count` entries. Parallel edges and self-loops are not allowed.
std::vector<long> max_weight_matching(std::size_t vertex_count,
                                      const std::vector<WeightedEdge>& edges);

}  // namespace mwucb::blossom
