#include "kdiflow/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "residual_graph.hpp"

namespace kdiflow {

std::string_view to_string(Rule rule) noexcept {
  switch (rule) {
    case Rule::CapacityLimit: return "CapacityLimit";
    case Rule::SkewSymmetry: return "SkewSymmetry";
    case Rule::LevelConservation: return "LevelConservation";
  }
  return "CapacityLimit";
}

namespace {

std::string describe(double value) {
  std::ostringstream out;
  out.precision(9);
  out << value;
  return out.str();
}

void sort_violations(std::vector<Violation>& violations) {
  std::sort(violations.begin(), violations.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.rule, a.subject) < std::tie(b.rule, b.subject);
  });
}

std::size_t index_of(const FlowNetwork& net, std::string_view id) {
  const auto nodes = net.nodes();
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const Node& n, std::string_view key) { return n.id < key; });
  return static_cast<std::size_t>(it - nodes.begin());
}

double clean(double value) { return std::abs(value) <= detail::kResidualEpsilon ? 0.0 : value; }

}  // namespace

std::vector<Violation> check_capacity(const FlowNetwork& net) {
  std::vector<Violation> out;
  for (const auto& e : net.edges()) {
    if (e.flow > e.capacity + kTolerance) {
      out.push_back({Rule::CapacityLimit, {e.from, e.to},
                     "flow " + describe(e.flow) + " exceeds capacity " + describe(e.capacity),
                     e.flow - e.capacity});
    } else if (e.flow < -kTolerance) {
      out.push_back({Rule::CapacityLimit, {e.from, e.to},
                     "negative flow " + describe(e.flow), -e.flow});
    }
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> check_skew_symmetry(const FlowNetwork& net) {
  std::vector<Violation> out;
  for (const auto& e : net.edges()) {
    if (!(e.from < e.to)) continue;
    const Edge* back = net.find_edge(e.to, e.from);
    if (back == nullptr) continue;
    const double common = std::min(e.flow, back->flow);
    if (common > kTolerance) {
      out.push_back({Rule::SkewSymmetry, {e.from, e.to},
                     "simultaneous flows " + describe(e.flow) + " and " +
                         describe(back->flow) + "; net flow " + describe(e.flow - back->flow),
                     common});
    }
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> check_conservation(const FlowNetwork& net) {
  std::vector<Violation> out;
  for (const auto& n : net.nodes()) {
    if (net.is_terminal(n.id)) continue;
    const double in = net.inflow(n.id);
    const double outflow = net.outflow(n.id);
    if (std::abs(in - outflow) > kTolerance) {
      out.push_back({Rule::LevelConservation, {n.id},
                     "inflow " + describe(in) + " differs from outflow " + describe(outflow),
                     std::abs(in - outflow)});
    }
  }
  sort_violations(out);
  return out;
}

std::vector<LevelFlowSummary> check_level_conservation(const FlowNetwork& net) {
  std::map<int, LevelFlowSummary> levels;
  for (const auto& n : net.nodes()) {
    if (net.is_terminal(n.id)) continue;
    auto& summary = levels[n.level];
    summary.level = n.level;
    summary.throughflow[n.id] = net.inflow(n.id);
  }
  const auto imbalances = check_conservation(net);

  std::vector<LevelFlowSummary> out;
  for (auto& [level, summary] : levels) {
    double lo = summary.throughflow.begin()->second;
    double hi = lo;
    double sum = 0.0;
    for (const auto& [id, value] : summary.throughflow) {
      lo = std::min(lo, value);
      hi = std::max(hi, value);
      sum += value;
    }
    if (hi - lo <= kTolerance) {
      summary.k = sum / static_cast<double>(summary.throughflow.size());
    }
    for (const auto& v : imbalances) {
      if (summary.throughflow.contains(v.subject.front())) summary.violations.push_back(v);
    }
    out.push_back(std::move(summary));
  }
  return out;
}

MaxFlowResult max_flow(const FlowNetwork& net) {
  const auto edges = net.edges();
  detail::ResidualGraph graph(net.nodes().size());
  std::vector<std::size_t> arc_of;
  arc_of.reserve(edges.size());
  for (const auto& e : edges) {
    arc_of.push_back(graph.add_arc(index_of(net, e.from), index_of(net, e.to), e.capacity));
  }
  const std::size_t s = index_of(net, net.source());
  const std::size_t t = index_of(net, net.sink());

  MaxFlowResult result;
  result.value = graph.augment(s, t);
  const auto reachable = graph.reachable_from(s);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    result.flows[{e.from, e.to}] = std::clamp(clean(graph.flow(arc_of[i])), 0.0, e.capacity);
    if (reachable[index_of(net, e.from)] && !reachable[index_of(net, e.to)]) {
      result.min_cut.insert({e.from, e.to});
    }
  }
  return result;
}

std::vector<NodeId> stressed_nodes(const FlowNetwork& net, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidThreshold, "stress threshold must lie in (0, 1]");
  }
  std::vector<std::pair<double, NodeId>> hits;
  for (const auto& n : net.nodes()) {
    if (net.is_terminal(n.id)) continue;
    const double cap = net.inbound_capacity(n.id);
    if (cap <= kTolerance) continue;
    const double in = net.inflow(n.id);
    if (in >= threshold * cap - kTolerance) hits.emplace_back(in / cap, n.id);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<NodeId> out;
  for (auto& [utilization, id] : hits) out.push_back(std::move(id));
  return out;
}

namespace {

struct PeerShare {
  NodeId id;
  double spare;
  double headroom;
  double share = 0.0;
};

// Splits `amount` across peers in proportion to spare capacity, capping each
// at its headroom and handing any capped remainder to the rest.
void proportional_fill(std::vector<PeerShare>& peers, double amount) {
  std::vector<PeerShare*> open;
  for (auto& p : peers) open.push_back(&p);
  double remaining = amount;
  while (remaining > detail::kResidualEpsilon && !open.empty()) {
    double weight = 0.0;
    for (auto* p : open) weight += p->spare;
    bool capped = false;
    for (auto* p : open) {
      if (p->share + remaining * p->spare / weight >= p->headroom) capped = true;
    }
    if (!capped) {
      for (auto* p : open) p->share += remaining * p->spare / weight;
      return;
    }
    std::vector<PeerShare*> still_open;
    for (auto* p : open) {
      if (p->share + remaining * p->spare / weight >= p->headroom) {
        remaining -= p->headroom - p->share;
        p->share = p->headroom;
      } else {
        still_open.push_back(p);
      }
    }
    open = std::move(still_open);
  }
}

}  // namespace

FlowNetwork redistribute(const FlowNetwork& net, std::string_view node) {
  const Node& target = net.node(node);
  if (net.is_terminal(target.id)) {
    throw Error(ErrorCode::InvalidTarget, "cannot redistribute the source or sink");
  }
  const auto level_nodes = net.nodes_at_level(target.level);
  double mean = 0.0;
  for (const auto& id : level_nodes) mean += net.inflow(id);
  mean /= static_cast<double>(level_nodes.size());

  const double excess = net.inflow(target.id) - mean;
  if (excess <= kTolerance) return net;

  std::vector<PeerShare> peers;
  for (const auto& id : level_nodes) {
    if (id == target.id) continue;
    const double in = net.inflow(id);
    const double spare = net.inbound_capacity(id) - in;
    if (in < mean - kTolerance && spare > kTolerance) {
      peers.push_back({id, spare, std::min(spare, mean - in)});
    }
  }
  if (peers.empty()) {
    throw Error(ErrorCode::NoPeerCapacity,
                "no peer of '" + target.id + "' has spare inbound capacity");
  }
  double room = 0.0;
  for (const auto& p : peers) room += p.headroom;
  const double amount = std::min(excess, room);
  proportional_fill(peers, amount);

  // Level nodes are split into in/out halves. Only peers get an in->out arc,
  // so any circulation from the target's in-half to its out-half has to pass
  // through a peer, and no other node at the level changes throughflow.
  const auto nodes = net.nodes();
  const std::size_t n = nodes.size();
  std::map<NodeId, std::size_t> out_half;
  for (const auto& id : level_nodes) out_half.emplace(id, n + out_half.size());
  auto tail = [&](const NodeId& id) {
    auto it = out_half.find(id);
    return it == out_half.end() ? index_of(net, id) : it->second;
  };

  detail::ResidualGraph graph(n + out_half.size());
  struct Arcs { std::size_t up; std::size_t down; };
  std::vector<std::pair<const Edge*, Arcs>> arcs;
  for (const auto& e : net.edges()) {
    if (e.to == net.source() || e.from == net.sink()) continue;
    const std::size_t from = tail(e.from);
    const std::size_t to = index_of(net, e.to);
    const std::size_t up = graph.add_arc(from, to, std::max(e.capacity - e.flow, 0.0));
    const std::size_t down = graph.add_arc(to, from, std::max(e.flow, 0.0));
    arcs.push_back({&e, {up, down}});
  }
  for (const auto& p : peers) {
    graph.add_arc(index_of(net, p.id), out_half.at(p.id), p.share);
  }
  const double moved =
      graph.augment(index_of(net, target.id), out_half.at(target.id), amount);
  if (moved <= kTolerance) {
    throw Error(ErrorCode::NoPeerCapacity,
                "no peer of '" + target.id + "' can absorb flow along a residual path");
  }

  EdgeFlows flows;
  for (const auto& e : net.edges()) flows[{e.from, e.to}] = e.flow;
  for (const auto& [edge, pair] : arcs) {
    const double delta = graph.flow(pair.up) - graph.flow(pair.down);
    if (delta == 0.0) continue;
    flows[{edge->from, edge->to}] = std::clamp(clean(edge->flow + delta), 0.0, edge->capacity);
  }
  return net.with_flows(flows);
}

}  // namespace kdiflow
