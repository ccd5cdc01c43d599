#include "kdiflow/flow_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace kdiflow {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::Source: return "Source";
    case NodeKind::Sink: return "Sink";
    case NodeKind::Regular: return "Regular";
    case NodeKind::Pseudo: return "Pseudo";
  }
  return "Regular";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
  if (text == "Source") return NodeKind::Source;
  if (text == "Sink") return NodeKind::Sink;
  if (text == "Regular") return NodeKind::Regular;
  if (text == "Pseudo") return NodeKind::Pseudo;
  return std::nullopt;
}

namespace {

const Node* lookup(const std::vector<Node>& nodes, std::string_view id) noexcept {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const Node& n, std::string_view key) { return n.id < key; });
  return (it != nodes.end() && it->id == id) ? &*it : nullptr;
}

// Lowest Regular clearance among nodes at `level`, if any Regular node exists.
std::optional<int> min_regular_clearance(const std::vector<Node>& nodes, int level) {
  std::optional<int> lowest;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::Regular && n.level == level) {
      lowest = lowest ? std::min(*lowest, n.clearance) : n.clearance;
    }
  }
  return lowest;
}

int pseudo_clearance_ceiling(std::optional<int> regular_min) {
  return regular_min ? std::max(*regular_min - 1, 0) : std::numeric_limits<int>::max();
}

}  // namespace

FlowNetwork FlowNetwork::build(std::vector<Node> nodes, std::vector<Edge> edges,
                               NodeId source, NodeId sink) {
  if (nodes.empty()) {
    throw Error(ErrorCode::MissingTerminal, "network has no nodes");
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].id == nodes[i - 1].id) {
      throw Error(ErrorCode::DuplicateNode, "duplicate node id '" + nodes[i].id + "'");
    }
  }

  int sources = 0;
  int sinks = 0;
  for (const auto& n : nodes) {
    if (n.level < 0) {
      throw Error(ErrorCode::InvalidNode, "node '" + n.id + "' has a negative level");
    }
    if (n.clearance < 0) {
      throw Error(ErrorCode::InvalidNode, "node '" + n.id + "' has a negative clearance");
    }
    if (n.reliability &&
        !(*n.reliability >= 0.0 && *n.reliability <= 1.0)) {
      throw Error(ErrorCode::InvalidNode,
                  "node '" + n.id + "' has reliability outside [0,1]");
    }
    sources += n.kind == NodeKind::Source;
    sinks += n.kind == NodeKind::Sink;
  }
  if (sources > 1) throw Error(ErrorCode::MultipleSources, "more than one Source node");
  if (sinks > 1) throw Error(ErrorCode::MultipleSources, "more than one Sink node");

  const Node* s = lookup(nodes, source);
  const Node* t = lookup(nodes, sink);
  if (s == nullptr || s->kind != NodeKind::Source) {
    throw Error(ErrorCode::MissingTerminal, "source '" + source + "' is not a Source node");
  }
  if (t == nullptr || t->kind != NodeKind::Sink) {
    throw Error(ErrorCode::MissingTerminal, "sink '" + sink + "' is not a Sink node");
  }
  if (s->level != 0) {
    throw Error(ErrorCode::LevelViolation, "source must sit at level 0");
  }
  for (const auto& n : nodes) {
    if (n.level > t->level) {
      throw Error(ErrorCode::LevelViolation,
                  "node '" + n.id + "' is above the sink level");
    }
  }

  for (const auto& n : nodes) {
    if (n.kind != NodeKind::Pseudo) continue;
    const auto ceiling = pseudo_clearance_ceiling(min_regular_clearance(nodes, n.level));
    if (n.clearance > ceiling) {
      throw Error(ErrorCode::InvalidNode,
                  "pseudo node '" + n.id + "' must have clearance below its level's Regular nodes");
    }
  }

  for (const auto& e : edges) {
    const std::string name = e.from + "->" + e.to;
    if (e.from == e.to) throw Error(ErrorCode::SelfLoop, "self-loop on '" + e.from + "'");
    if (!(e.capacity >= 0.0) || !std::isfinite(e.capacity)) {
      throw Error(ErrorCode::NegativeCapacity, "edge " + name + " has an invalid capacity");
    }
    if (!std::isfinite(e.flow)) {
      throw Error(ErrorCode::SchemaError, "edge " + name + " has a non-finite flow");
    }
    const Node* from = lookup(nodes, e.from);
    const Node* to = lookup(nodes, e.to);
    if (from == nullptr || to == nullptr) {
      throw Error(ErrorCode::DanglingEdge, "edge " + name + " names a missing node");
    }
    if (to->level != from->level && to->level != from->level + 1) {
      throw Error(ErrorCode::LevelViolation,
                  "edge " + name + " goes from level " + std::to_string(from->level) +
                      " to level " + std::to_string(to->level));
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].from == edges[i - 1].from && edges[i].to == edges[i - 1].to) {
      throw Error(ErrorCode::DuplicateEdge,
                  "parallel edge " + edges[i].from + "->" + edges[i].to);
    }
  }

  FlowNetwork net;
  net.nodes_ = std::move(nodes);
  net.edges_ = std::move(edges);
  net.source_ = std::move(source);
  net.sink_ = std::move(sink);
  return net;
}

const Node* FlowNetwork::find_node(std::string_view id) const noexcept {
  return lookup(nodes_, id);
}

const Edge* FlowNetwork::find_edge(std::string_view from, std::string_view to) const noexcept {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{from, to},
                             [](const Edge& e, const std::pair<std::string_view, std::string_view>& key) {
                               return std::pair<std::string_view, std::string_view>{e.from, e.to} < key;
                             });
  return (it != edges_.end() && it->from == from && it->to == to) ? &*it : nullptr;
}

const Node& FlowNetwork::node(std::string_view id) const {
  const Node* n = find_node(id);
  if (n == nullptr) throw Error(ErrorCode::UnknownNode, "unknown node '" + std::string(id) + "'");
  return *n;
}

int FlowNetwork::max_level() const noexcept {
  int top = 0;
  for (const auto& n : nodes_) top = std::max(top, n.level);
  return top;
}

double FlowNetwork::inflow(std::string_view id) const noexcept {
  double sum = 0.0;
  for (const auto& e : edges_) if (e.to == id) sum += e.flow;
  return sum;
}

double FlowNetwork::outflow(std::string_view id) const noexcept {
  double sum = 0.0;
  for (const auto& e : edges_) if (e.from == id) sum += e.flow;
  return sum;
}

double FlowNetwork::inbound_capacity(std::string_view id) const noexcept {
  double sum = 0.0;
  for (const auto& e : edges_) if (e.to == id) sum += e.capacity;
  return sum;
}

double FlowNetwork::outbound_capacity(std::string_view id) const noexcept {
  double sum = 0.0;
  for (const auto& e : edges_) if (e.from == id) sum += e.capacity;
  return sum;
}

std::vector<NodeId> FlowNetwork::nodes_at_level(int level) const {
  std::vector<NodeId> ids;
  for (const auto& n : nodes_) {
    if (n.level == level && !is_terminal(n.id)) ids.push_back(n.id);
  }
  return ids;
}

FlowNetwork FlowNetwork::with_flows(const EdgeFlows& flows) const {
  FlowNetwork copy = *this;
  for (auto& e : copy.edges_) {
    auto it = flows.find(EdgeKey{e.from, e.to});
    e.flow = it == flows.end() ? 0.0 : it->second;
  }
  return copy;
}

FlowNetwork add_pseudo_node(const FlowNetwork& net, int level,
                            const std::vector<NodeId>& sponsors, double capacity_in,
                            double capacity_out, NodeId id) {
  if (sponsors.empty()) {
    throw Error(ErrorCode::UnknownSponsor, "a pseudo node needs at least one sponsor");
  }
  if (!(capacity_in >= 0.0) || !(capacity_out >= 0.0)) {
    throw Error(ErrorCode::NegativeCapacity, "pseudo node capacities must be non-negative");
  }
  if (level < 1 || level > net.max_level()) {
    throw Error(ErrorCode::LevelMismatch,
                "pseudo node level " + std::to_string(level) + " is outside the network");
  }
  std::set<NodeId> unique_sponsors;
  for (const auto& sponsor : sponsors) {
    const Node* n = net.find_node(sponsor);
    if (n == nullptr) {
      throw Error(ErrorCode::UnknownSponsor, "unknown sponsor '" + sponsor + "'");
    }
    if (n->level != level && n->level != level - 1) {
      throw Error(ErrorCode::LevelMismatch,
                  "sponsor '" + sponsor + "' sits at level " + std::to_string(n->level) +
                      ", not " + std::to_string(level) + " or " + std::to_string(level - 1));
    }
    if (n->id == net.sink()) {
      throw Error(ErrorCode::LevelMismatch, "the sink cannot sponsor a pseudo node");
    }
    unique_sponsors.insert(sponsor);
  }

  if (id.empty()) {
    for (int i = 1;; ++i) {
      id = "pseudo-" + std::to_string(i);
      if (net.find_node(id) == nullptr) break;
    }
  } else if (net.find_node(id) != nullptr) {
    throw Error(ErrorCode::DuplicateNode, "duplicate node id '" + id + "'");
  }

  // Successors every sponsor feeds, restricted to levels the new node may reach.
  std::optional<std::set<NodeId>> shared;
  for (const auto& sponsor : unique_sponsors) {
    std::set<NodeId> mine;
    for (const auto& e : net.edges()) {
      if (e.from != sponsor) continue;
      const Node& succ = net.node(e.to);
      if (succ.kind == NodeKind::Pseudo) continue;
      if (succ.level != level && succ.level != level + 1) continue;
      if (unique_sponsors.contains(succ.id)) continue;
      mine.insert(succ.id);
    }
    if (!shared) {
      shared = std::move(mine);
    } else {
      std::set<NodeId> both;
      std::set_intersection(shared->begin(), shared->end(), mine.begin(), mine.end(),
                            std::inserter(both, both.end()));
      shared = std::move(both);
    }
  }

  std::vector<Node> nodes(net.nodes().begin(), net.nodes().end());
  std::vector<Edge> edges(net.edges().begin(), net.edges().end());

  int clearance = 0;
  if (auto lowest = min_regular_clearance(nodes, level)) clearance = std::max(*lowest - 1, 0);
  nodes.push_back(Node{id, "pseudo node", level, NodeKind::Pseudo, clearance, std::nullopt});

  const double share_in = capacity_in / static_cast<double>(unique_sponsors.size());
  for (const auto& sponsor : unique_sponsors) {
    edges.push_back(Edge{sponsor, id, share_in, 0.0});
  }
  if (shared && !shared->empty()) {
    const double share_out = capacity_out / static_cast<double>(shared->size());
    for (const auto& succ : *shared) edges.push_back(Edge{id, succ, share_out, 0.0});
  }
  return FlowNetwork::build(std::move(nodes), std::move(edges), net.source(), net.sink());
}

FlowNetwork promote_pseudo_node(const FlowNetwork& net, std::string_view id, int clearance) {
  const Node& target = net.node(id);
  if (target.kind != NodeKind::Pseudo) {
    throw Error(ErrorCode::NotPseudo, "node '" + target.id + "' is not a pseudo node");
  }
  std::vector<Node> nodes(net.nodes().begin(), net.nodes().end());
  std::vector<Edge> edges(net.edges().begin(), net.edges().end());
  for (auto& n : nodes) {
    if (n.id == id) {
      n.kind = NodeKind::Regular;
      n.clearance = clearance;
    }
  }
  for (auto& e : edges) {
    if (e.from == id || e.to == id) e.flow = 0.0;
  }
  return FlowNetwork::build(std::move(nodes), std::move(edges), net.source(), net.sink());
}

}  // namespace kdiflow
