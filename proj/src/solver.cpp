#include "mwucb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "mwucb/blossom.hpp"

namespace mwucb {
namespace {

void check_weights(std::span<const double> weights, const NetworkTopology& topology) {
  if (weights.size() != topology.link_count())
    throw std::invalid_argument("weight vector has dimension " + std::to_string(weights.size()) +
                                ", topology has " + std::to_string(topology.link_count()) +
                                " links");
  for (double w : weights)
    if (!std::isfinite(w)) throw std::invalid_argument("weight vector has a non-finite entry");
}

// Blossom matching over the allowed links only. Antiparallel links (i,j) and
// (j,i) collapse onto one undirected edge; the heavier one represents the pair.
ActivationVector restricted_matching(const NetworkTopology& topology,
                                     std::span<const double> weights,
                                     const std::vector<std::uint8_t>& allowed) {
  std::map<std::pair<NodeId, NodeId>, LinkId> chosen;
  for (LinkId e = 0; e < topology.link_count(); ++e) {
    if (!allowed[e]) continue;
    const Link& l = topology.links()[e];
    const auto key = std::minmax(l.tail, l.head);
    auto [it, inserted] = chosen.emplace(key, e);
    if (!inserted && weights[e] > weights[it->second]) it->second = e;
  }

  std::vector<blossom::WeightedEdge> edges;
  std::vector<LinkId> edge_link;
  edges.reserve(chosen.size());
  for (const auto& [key, e] : chosen) {
    edges.push_back({key.first, key.second, weights[e]});
    edge_link.push_back(e);
  }

  ActivationVector x(topology.link_count());
  if (edges.empty()) return x;
  const auto mate = blossom::max_weight_matching(topology.node_count(), edges);
  for (std::size_t k = 0; k < edges.size(); ++k)
    if (mate[edges[k].u] == static_cast<long>(edges[k].v)) x.set(edge_link[k], true);
  return x;
}

struct TooManyActivations {};

template <typename Compatible>
void enumerate_downward_closed(std::size_t links, Compatible&& compatible,
                               std::vector<ActivationVector>& out, std::size_t limit) {
  ActivationVector x(links);
  // Depth-first with 0 explored before 1 yields ascending lexicographic order.
  auto recurse = [&](auto&& self, LinkId e) -> void {
    if (e == links) {
      if (out.size() == limit) throw TooManyActivations{};
      out.push_back(x);
      return;
    }
    self(self, e + 1);
    if (compatible(x, e)) {
      x.set(e, true);
      self(self, e + 1);
      x.set(e, false);
    }
  };
  recurse(recurse, 0);
}

std::vector<ActivationVector> enumerate_bounded(const InterferenceModel& model,
                                               const NetworkTopology& topology,
                                               std::size_t limit) {
  const std::size_t n = topology.link_count();
  std::vector<ActivationVector> out;
  if (model.is_node_exclusive()) {
    enumerate_downward_closed(
        n,
        [&](const ActivationVector& x, LinkId e) {
          for (LinkId f = 0; f < e; ++f)
            if (x[f] && topology.share_node(e, f)) return false;
          return true;
        },
        out, limit);
  } else {
    const auto& cg = std::get<ConflictGraph>(model.kind());
    std::vector<std::vector<LinkId>> conflicts(n);
    for (auto [a, b] : cg.conflicts) {
      conflicts[a].push_back(b);
      conflicts[b].push_back(a);
    }
    enumerate_downward_closed(
        n,
        [&](const ActivationVector& x, LinkId e) {
          for (LinkId f : conflicts[e])
            if (f <= e && (f == e || x[f])) return false;
          return true;
        },
        out, limit);
  }
  return out;
}

ActivationVector best_candidate(std::span<const double> weights,
                                const std::vector<ActivationVector>& candidates) {
  std::size_t best = 0;
  double best_value = activation_value(weights, candidates.front());
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = activation_value(weights, candidates[i]);
    if (v > best_value && !objectives_tied(v, best_value)) {
      best = i;
      best_value = v;
    }
  }
  return candidates[best];
}

}  // namespace

bool objectives_tied(double a, double b) {
  return std::abs(a - b) <= kTieTolerance * std::max(std::abs(a), std::abs(b));
}

double activation_value(std::span<const double> weights, const ActivationVector& x) {
  if (weights.size() != x.size())
    throw std::invalid_argument("weight and activation dimensions differ");
  double total = 0.0;
  for (LinkId e = 0; e < x.size(); ++e)
    if (x[e]) total += weights[e];
  return total;
}

ActivationVector max_weight_matching_exact(const NetworkTopology& topology,
                                           std::span<const double> weights) {
  check_weights(weights, topology);
  const std::size_t n = topology.link_count();
  std::vector<std::uint8_t> allowed(n);
  for (LinkId e = 0; e < n; ++e) allowed[e] = weights[e] > 0.0 ? 1 : 0;

  ActivationVector current = restricted_matching(topology, weights, allowed);
  double best = activation_value(weights, current);

  // Decide links in id order, preferring x_e = 0 whenever an optimum
  // consistent with earlier decisions survives without e.
  for (LinkId e = 0; e < n; ++e) {
    if (!allowed[e]) continue;
    allowed[e] = 0;
    if (!current[e]) continue;
    ActivationVector candidate = restricted_matching(topology, weights, allowed);
    const double value = activation_value(weights, candidate);
    if (value >= best || objectives_tied(value, best)) {
      current = std::move(candidate);
      best = std::max(best, value);
      continue;
    }
    // e is in every remaining optimum: keep it, drop links that touch it.
    allowed[e] = 1;
    const Link& l = topology.links()[e];
    for (NodeId v : {l.tail, l.head})
      for (LinkId f : topology.adjacent_links(v))
        if (f != e) allowed[f] = 0;
  }
  return current;
}

std::vector<ActivationVector> enumerate_activations(const InterferenceModel& model,
                                                    const NetworkTopology& topology) {
  model.validate(topology);
  if (const auto* es = std::get_if<ExplicitSet>(&model.kind())) return es->members();

  const std::size_t n = topology.link_count();
  if (n > kMaxEnumerationLinks)
    throw std::length_error("enumeration limited to " + std::to_string(kMaxEnumerationLinks) +
                            " links, topology has " + std::to_string(n));
  return enumerate_bounded(model, topology, std::numeric_limits<std::size_t>::max());
}

ActivationVector max_weight_activation(std::span<const double> weights,
                                       const InterferenceModel& model,
                                       const NetworkTopology& topology) {
  check_weights(weights, topology);
  if (model.is_node_exclusive()) return max_weight_matching_exact(topology, weights);
  return best_candidate(weights, enumerate_activations(model, topology));
}

ActivationSolver::ActivationSolver(std::shared_ptr<const NetworkTopology> topology,
                                   InterferenceModel model)
    : topology_(std::move(topology)), model_(std::move(model)) {
  if (!topology_) throw std::invalid_argument("solver needs a topology");
  model_.validate(*topology_);
  std::vector<ActivationVector> members;
  if (!model_.is_node_exclusive()) {
    members = enumerate_activations(model_, *topology_);
  } else if (topology_->link_count() <= kMaxEnumerationLinks) {
    try {
      members = enumerate_bounded(model_, *topology_, kMaxCachedMatchings);
    } catch (const TooManyActivations&) {
      members.clear();
    }
  }
  enumerated_ = !members.empty();
  offsets_.push_back(0);
  for (const auto& x : members) {
    for (LinkId e : x.active_links()) active_.push_back(e);
    offsets_.push_back(active_.size());
  }
  if (enumerated_) candidates_ = std::move(members);
}

ActivationVector ActivationSolver::solve(std::span<const double> weights) const {
  check_weights(weights, *topology_);
  if (!enumerated_) return max_weight_matching_exact(*topology_, weights);
  // Same scan as best_candidate, over sparse member lists summed in id order.
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) {
    double v = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) v += weights[active_[k]];
    if (i == 0 || (v > best_value && !objectives_tied(v, best_value))) {
      best = i;
      best_value = v;
    }
  }
  return candidates_[best];
}

}  // namespace mwucb
