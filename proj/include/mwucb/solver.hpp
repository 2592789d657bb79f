#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "mwucb/topology.hpp"

namespace mwucb {

/// Per-link objective coefficients. Entries must be finite.
using WeightVector = std::vector<double>;

/// Guard for exhaustive enumeration of M.
inline constexpr std::size_t kMaxEnumerationLinks = 24;

/// Node-exclusive solvers cache M when it has at most this many members and
/// fall back to the blossom path otherwise.
inline constexpr std::size_t kMaxCachedMatchings = 1 << 14;

/// Relative tolerance under which two objective values count as tied.
inline constexpr double kTieTolerance = 1e-12;

bool objectives_tied(double a, double b);

/// Sum of weights over active links, accumulated in link-id order.
double activation_value(std::span<const double> weights, const ActivationVector& x);

/// Exact argmax of sum_e w_e x_e over M.
///
/// Links with weight <= 0 are never activated. Among maximizers the
/// lexicographically smallest bit vector wins (x_0 first, 0 before 1).
ActivationVector max_weight_activation(std::span<const double> weights,
                                       const InterferenceModel& model,
                                       const NetworkTopology& topology);

/// Maximum-weight matching on the undirected support, via the blossom
/// algorithm, with the same tie-break contract as max_weight_activation.
ActivationVector max_weight_matching_exact(const NetworkTopology& topology,
                                           std::span<const double> weights);

/// Every member of M, in ascending lexicographic order. Throws
/// std::length_error when the topology has more than kMaxEnumerationLinks
/// links (explicit sets are returned as stored).
std::vector<ActivationVector> enumerate_activations(const InterferenceModel& model,
                                                    const NetworkTopology& topology);

/// Repeated argmax over a fixed (model, topology) pair. Precomputes M once for
/// conflict-graph and explicit models, and for node-exclusive models whose
/// matching set is small; large node-exclusive instances use the blossom path.
class ActivationSolver {
 public:
  ActivationSolver(std::shared_ptr<const NetworkTopology> topology, InterferenceModel model);

  ActivationVector solve(std::span<const double> weights) const;

  const NetworkTopology& topology() const { return *topology_; }
  const InterferenceModel& model() const { return model_; }
  bool uses_enumeration() const { return enumerated_; }

 private:
  std::shared_ptr<const NetworkTopology> topology_;
  InterferenceModel model_;
  bool enumerated_ = false;
  std::vector<ActivationVector> candidates_;
  // Active links of candidate i are active_[offsets_[i] .. offsets_[i + 1]).
  std::vector<std::size_t> offsets_;
  std::vector<LinkId> active_;
};

}  // namespace mwucb
