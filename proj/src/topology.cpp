#include "mwucb/topology.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mwucb {

ActivationVector::ActivationVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

void ActivationVector::clear() { std::fill(bits_.begin(), bits_.end(), 0); }

std::size_t ActivationVector::active_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<LinkId> ActivationVector::active_links() const {
  std::vector<LinkId> out;
  for (LinkId e = 0; e < bits_.size(); ++e)
    if (bits_[e]) out.push_back(e);
  return out;
}

NetworkTopology::NetworkTopology(std::size_t nodes, std::vector<Link> links)
    : nodes_(nodes), links_(std::move(links)), adjacency_(nodes) {
  for (const auto& l : links_) {
    if (l.tail >= nodes_ || l.head >= nodes_)
      throw std::invalid_argument("link (" + std::to_string(l.tail) + "," +
                                  std::to_string(l.head) + ") has an endpoint outside 0.." +
                                  std::to_string(nodes_ == 0 ? 0 : nodes_ - 1));
    if (l.tail == l.head)
      throw std::invalid_argument("self-loop link on node " + std::to_string(l.tail));
  }
  std::sort(links_.begin(), links_.end());
  if (std::adjacent_find(links_.begin(), links_.end()) != links_.end())
    throw std::invalid_argument("duplicate directed link");
  for (LinkId e = 0; e < links_.size(); ++e) {
    adjacency_[links_[e].tail].push_back(e);
    adjacency_[links_[e].head].push_back(e);
  }
  // Ids are appended in increasing order, so each list is already sorted.
}

const Link& NetworkTopology::link(LinkId e) const {
  if (e >= links_.size()) throw std::out_of_range("link id " + std::to_string(e));
  return links_[e];
}

std::span<const LinkId> NetworkTopology::adjacent_links(NodeId v) const {
  if (v >= nodes_) throw std::out_of_range("node id " + std::to_string(v));
  return adjacency_[v];
}

bool NetworkTopology::share_node(LinkId a, LinkId b) const {
  const Link& x = link(a);
  const Link& y = link(b);
  return x.tail == y.tail || x.tail == y.head || x.head == y.tail || x.head == y.head;
}

LinkId NetworkTopology::index_of(const Link& l) const {
  auto it = std::lower_bound(links_.begin(), links_.end(), l);
  if (it == links_.end() || *it != l)
    throw std::out_of_range("no link (" + std::to_string(l.tail) + "," + std::to_string(l.head) +
                            ")");
  return static_cast<LinkId>(it - links_.begin());
}

NetworkTopology build_grid(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("grid dimensions must be positive");
  std::vector<Link> links;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const NodeId v = r * cols + c;
      if (c + 1 < cols) links.push_back({v, v + 1});
      if (r + 1 < rows) links.push_back({v, v + cols});
    }
  }
  return NetworkTopology(rows * cols, std::move(links));
}

std::vector<LinkId> adjacent_links(const NetworkTopology& topology, NodeId node) {
  auto s = topology.adjacent_links(node);
  return {s.begin(), s.end()};
}

ExplicitSet::ExplicitSet(std::size_t links, std::vector<ActivationVector> members)
    : links_(links), members_(std::move(members)) {
  for (const auto& m : members_)
    if (m.size() != links_)
      throw std::invalid_argument("explicit activation has dimension " + std::to_string(m.size()) +
                                  ", expected " + std::to_string(links_));
  members_.emplace_back(links_);
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool ExplicitSet::contains(const ActivationVector& x) const {
  return std::binary_search(members_.begin(), members_.end(), x);
}

InterferenceModel InterferenceModel::conflict_graph(
    std::vector<std::pair<LinkId, LinkId>> conflicts) {
  return InterferenceModel(ConflictGraph{std::move(conflicts)});
}

InterferenceModel InterferenceModel::explicit_set(std::size_t links,
                                                  std::vector<ActivationVector> members) {
  return InterferenceModel(ExplicitSet(links, std::move(members)));
}

void InterferenceModel::validate(const NetworkTopology& topology) const {
  const std::size_t n = topology.link_count();
  if (const auto* cg = std::get_if<ConflictGraph>(&kind_)) {
    for (auto [a, b] : cg->conflicts) {
      if (a >= n || b >= n)
        throw std::invalid_argument("conflict pair (" + std::to_string(a) + "," +
                                    std::to_string(b) + ") refers to a missing link");
      if (a == b) throw std::invalid_argument("link " + std::to_string(a) + " conflicts with itself");
    }
  } else if (const auto* es = std::get_if<ExplicitSet>(&kind_)) {
    if (es->link_count() != n)
      throw std::invalid_argument("explicit set dimension " + std::to_string(es->link_count()) +
                                  " does not match " + std::to_string(n) + " links");
  }
}

std::string InterferenceModel::name() const {
  switch (kind_.index()) {
    case 0: return "node_exclusive";
    case 1: return "conflict_graph";
    default: return "explicit_set";
  }
}

bool is_admissible(const InterferenceModel& model, const ActivationVector& x,
                   const NetworkTopology& topology) {
  const std::size_t n = topology.link_count();
  if (x.size() != n)
    throw std::invalid_argument("activation has dimension " + std::to_string(x.size()) +
                                ", topology has " + std::to_string(n) + " links");
  return std::visit(
      [&](const auto& kind) -> bool {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, NodeExclusive>) {
          std::vector<std::uint8_t> used(topology.node_count(), 0);
          for (LinkId e = 0; e < n; ++e) {
            if (!x[e]) continue;
            const Link& l = topology.links()[e];
            if (used[l.tail] || used[l.head]) return false;
            used[l.tail] = used[l.head] = 1;
          }
          return true;
        } else if constexpr (std::is_same_v<K, ConflictGraph>) {
          for (auto [a, b] : kind.conflicts) {
            if (a >= n || b >= n) throw std::invalid_argument("conflict pair out of range");
            if (x[a] && x[b]) return false;
          }
          return true;
        } else {
          if (kind.link_count() != n) throw std::invalid_argument("explicit set dimension mismatch");
          return kind.contains(x);
        }
      },
      model.kind());
}

}  // namespace mwucb
