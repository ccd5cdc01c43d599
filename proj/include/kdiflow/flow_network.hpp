#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kdiflow/error.hpp"

namespace kdiflow {

using NodeId = std::string;
using EdgeKey = std::pair<NodeId, NodeId>;
using EdgeFlows = std::map<EdgeKey, double>;

enum class NodeKind { Source, Sink, Regular, Pseudo };

std::string_view to_string(NodeKind kind) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;

struct Node {
  NodeId id;
  std::string label;
  int level = 0;  // 0 is the source tier
  NodeKind kind = NodeKind::Regular;
  int clearance = 0;
  std::optional<double> reliability;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  NodeId from;
  NodeId to;
  double capacity = 0.0;
  double flow = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Leveled organizational flow network with a single source and sink.
///
/// Instances are immutable once built; nodes are held sorted by id and edges
/// by (from, to), so two networks built from the same inputs in any order
/// compare equal. Every edge runs from level L to level L or L+1.
class FlowNetwork {
 public:
  /// Validates and canonicalizes. Throws Error on any invariant violation.
  static FlowNetwork build(std::vector<Node> nodes, std::vector<Edge> edges,
                           NodeId source, NodeId sink);

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const NodeId& source() const noexcept { return source_; }
  const NodeId& sink() const noexcept { return sink_; }

  const Node* find_node(std::string_view id) const noexcept;
  const Edge* find_edge(std::string_view from, std::string_view to) const noexcept;
  const Node& node(std::string_view id) const;  // throws UnknownNode

  bool is_terminal(std::string_view id) const noexcept {
    return id == source_ || id == sink_;
  }
  int max_level() const noexcept;

  double inflow(std::string_view id) const noexcept;
  double outflow(std::string_view id) const noexcept;
  double inbound_capacity(std::string_view id) const noexcept;
  double outbound_capacity(std::string_view id) const noexcept;

  /// Non-terminal nodes at `level`, in id order.
  std::vector<NodeId> nodes_at_level(int level) const;

  /// Copy with edge flows replaced; edges missing from `flows` get 0.
  FlowNetwork with_flows(const EdgeFlows& flows) const;

  friend bool operator==(const FlowNetwork&, const FlowNetwork&) = default;

 private:
  FlowNetwork() = default;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  NodeId source_;
  NodeId sink_;
};

inline FlowNetwork build_network(std::vector<Node> nodes, std::vector<Edge> edges,
                                 NodeId source, NodeId sink) {
  return FlowNetwork::build(std::move(nodes), std::move(edges), std::move(source),
                            std::move(sink));
}

/// Adds one Pseudo node at `level`, fed by every sponsor (capacity_in split
/// equally) and feeding every successor the sponsors have in common
/// (capacity_out split equally). Clearance is one below the lowest Regular
/// clearance at the level, floored at 0. When `id` is empty a fresh id of the
/// form "pseudo-N" is chosen.
FlowNetwork add_pseudo_node(const FlowNetwork& net, int level,
                            const std::vector<NodeId>& sponsors, double capacity_in,
                            double capacity_out, NodeId id = {});

/// Turns a Pseudo node into a Regular one; its incident flows drop to 0.
FlowNetwork promote_pseudo_node(const FlowNetwork& net, std::string_view id,
                                int clearance);

}  // namespace kdiflow
