#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mwucb {

using NodeId = std::size_t;
using LinkId = std::size_t;

/// Directed point-to-point link `tail -> head`.
struct Link {
  NodeId tail = 0;
  NodeId head = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Binary link activation vector x, indexed by link id.
class ActivationVector {
 public:
  ActivationVector() = default;
  explicit ActivationVector(std::size_t links) : bits_(links, 0) {}
  explicit ActivationVector(std::vector<std::uint8_t> bits);

  std::size_t size() const { return bits_.size(); }
  bool operator[](LinkId e) const { return bits_[e] != 0; }
  void set(LinkId e, bool on) { bits_[e] = on ? 1 : 0; }
  void clear();
  std::size_t active_count() const;
  std::vector<LinkId> active_links() const;
  std::span<const std::uint8_t> bits() const { return bits_; }

  // Lexicographic order over (x_0, x_1, ...), with 0 < 1.
  friend auto operator<=>(const ActivationVector&, const ActivationVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Directed-link network graph with deterministic link indexing.
///
/// Links are sorted by (tail, head); link ids are positions in that order.
/// Immutable after construction.
class NetworkTopology {
 public:
  NetworkTopology() = default;
  NetworkTopology(std::size_t nodes, std::vector<Link> links);

  std::size_t node_count() const { return nodes_; }
  std::size_t link_count() const { return links_.size(); }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId e) const;

  /// Links with tail or head equal to `v`, ascending by id.
  std::span<const LinkId> adjacent_links(NodeId v) const;

  /// True when the two links share an endpoint (undirected support).
  bool share_node(LinkId a, LinkId b) const;

  LinkId index_of(const Link& l) const;

 private:
  std::size_t nodes_ = 0;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> adjacency_;
};

/// rows x cols grid, node id r*cols + c, one link per grid edge from the
/// lower to the higher node id.
NetworkTopology build_grid(std::size_t rows, std::size_t cols);

std::vector<LinkId> adjacent_links(const NetworkTopology& topology, NodeId node);

// Interference models. Each one defines the admissible set M.

struct NodeExclusive {};

struct ConflictGraph {
  std::vector<std::pair<LinkId, LinkId>> conflicts;
};

/// An explicit list of admissible activations. The zero vector is always a
/// member; members are kept sorted and unique.
class ExplicitSet {
 public:
  ExplicitSet(std::size_t links, std::vector<ActivationVector> members);

  std::size_t link_count() const { return links_; }
  const std::vector<ActivationVector>& members() const { return members_; }
  bool contains(const ActivationVector& x) const;

 private:
  std::size_t links_;
  std::vector<ActivationVector> members_;
};

class InterferenceModel {
 public:
  using Kind = std::variant<NodeExclusive, ConflictGraph, ExplicitSet>;

  InterferenceModel() : kind_(NodeExclusive{}) {}
  explicit InterferenceModel(Kind kind) : kind_(std::move(kind)) {}

  static InterferenceModel node_exclusive() { return InterferenceModel(NodeExclusive{}); }
  static InterferenceModel conflict_graph(std::vector<std::pair<LinkId, LinkId>> conflicts);
  static InterferenceModel explicit_set(std::size_t links, std::vector<ActivationVector> members);

  const Kind& kind() const { return kind_; }
  bool is_node_exclusive() const { return std::holds_alternative<NodeExclusive>(kind_); }

  /// Throws std::invalid_argument if the model refers to links the topology
  /// does not have.
  void validate(const NetworkTopology& topology) const;

  std::string name() const;

 private:
  Kind kind_;
};

bool is_admissible(const InterferenceModel& model, const ActivationVector& x,
                   const NetworkTopology& topology);

}  // namespace mwucb
