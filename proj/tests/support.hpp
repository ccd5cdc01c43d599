#pragma once

// Shared fixtures, random generators and brute-force oracles for the test
// suites. Nothing here calls into the algorithms under test except to build
// inputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kdiflow/dispersion.hpp"
#include "kdiflow/flow_network.hpp"
#include "kdiflow/metrics.hpp"

namespace kdiflow::testing {

inline Node node(std::string id, int level, NodeKind kind = NodeKind::Regular,
                 int clearance = 1) {
  return Node{std::move(id), "", level, kind, clearance, std::nullopt};
}

inline Edge edge(std::string from, std::string to, double capacity, double flow = 0.0) {
  return Edge{std::move(from), std::move(to), capacity, flow};
}

// s -> a (3), s -> b (2), a -> t (2), b -> t (2)
inline FlowNetwork diamond() {
  return build_network(
      {node("s", 0, NodeKind::Source), node("a", 1), node("b", 1), node("t", 2, NodeKind::Sink)},
      {edge("s", "a", 3), edge("s", "b", 2), edge("a", "t", 2), edge("b", "t", 2)}, "s", "t");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct RandomNetworkOptions {
  int min_nodes = 2;
  int max_nodes = 8;
  int max_capacity = 10;
  double edge_probability = 0.5;
  bool same_level_edges = true;
};

/// Random leveled network with integer capacities: source at level 0, sink
/// one level above the highest interior node.
template <typename Rng>
FlowNetwork random_network(Rng& rng, const RandomNetworkOptions& opt = {}) {
  std::uniform_int_distribution<int> count(opt.min_nodes, opt.max_nodes);
  const int n = count(rng);
  const int interior = n - 2;
  std::uniform_int_distribution<int> level_pick(1, std::max(1, interior));
  std::vector<Node> nodes{node("s", 0, NodeKind::Source)};
  int top = 0;
  for (int i = 0; i < interior; ++i) {
    const int level = std::min(level_pick(rng), 3);
    top = std::max(top, level);
    nodes.push_back(node("n" + std::to_string(i), level));
  }
  // Keep the level sequence gap-free so that paths can exist.
  std::vector<int> used;
  for (const auto& v : nodes) used.push_back(v.level);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (auto& v : nodes) {
    v.level = static_cast<int>(std::lower_bound(used.begin(), used.end(), v.level) - used.begin());
  }
  top = static_cast<int>(used.size()) - 1;
  nodes.push_back(node("t", top + 1, NodeKind::Sink));

  std::bernoulli_distribution keep(opt.edge_probability);
  std::uniform_int_distribution<int> cap(0, opt.max_capacity);
  std::vector<Edge> edges;
  for (const auto& u : nodes) {
    for (const auto& v : nodes) {
      if (u.id == v.id || u.kind == NodeKind::Sink || v.kind == NodeKind::Source) continue;
      const bool forward = v.level == u.level + 1;
      const bool same = v.level == u.level && opt.same_level_edges;
      if ((forward || same) && keep(rng)) {
        edges.push_back(edge(u.id, v.id, cap(rng)));
      }
    }
  }
  return build_network(std::move(nodes), std::move(edges), "s", "t");
}

/// Minimum s-t cut by enumerating every subset of interior nodes.
inline double brute_force_min_cut(const FlowNetwork& net) {
  std::vector<NodeId> interior;
  for (const auto& v : net.nodes()) {
    if (!net.is_terminal(v.id)) interior.push_back(v.id);
  }
  double best = std::numeric_limits<double>::infinity();
  const std::uint32_t subsets = 1u << interior.size();
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    auto on_source_side = [&](const NodeId& id) {
      if (id == net.source()) return true;
      if (id == net.sink()) return false;
      const auto i = std::find(interior.begin(), interior.end(), id) - interior.begin();
      return ((mask >> i) & 1u) != 0;
    };
    double cut = 0.0;
    for (const auto& e : net.edges()) {
      if (on_source_side(e.from) && !on_source_side(e.to)) cut += e.capacity;
    }
    best = std::min(best, cut);
  }
  return best;
}

/// Largest conserving integer flow value, by enumerating every integer flow
/// assignment. Only for tiny networks.
inline int brute_force_integer_max_flow(const FlowNetwork& net) {
  const auto edges = net.edges();
  std::vector<int> flow(edges.size(), 0);
  int best = 0;
  while (true) {
    bool conserving = true;
    for (const auto& v : net.nodes()) {
      if (net.is_terminal(v.id)) continue;
      int balance = 0;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].to == v.id) balance += flow[i];
        if (edges[i].from == v.id) balance -= flow[i];
      }
      conserving = conserving && balance == 0;
    }
    if (conserving) {
      int value = 0;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].from == net.source()) value += flow[i];
        if (edges[i].to == net.source()) value -= flow[i];
      }
      best = std::max(best, value);
    }
    std::size_t i = 0;
    while (i < edges.size() && flow[i] == static_cast<int>(edges[i].capacity)) flow[i++] = 0;
    if (i == edges.size()) break;
    ++flow[i];
  }
  return best;
}

/// A handful of OrgMicro and RegionMacro records with random bounds,
/// orientation and positive weights. Values may fall outside the bounds.
template <typename Rng>
std::vector<MetricRecord> random_metric_set(Rng& rng) {
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<MetricRecord> records;
  for (ScopeKind scope : {ScopeKind::OrgMicro, ScopeKind::RegionMacro}) {
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      MetricRecord r;
      r.name = "m" + std::to_string(i);
      r.scope = scope;
      r.min = -50.0 + 100.0 * unit(rng);
      r.max = r.min + 0.5 + 100.0 * unit(rng);
      r.value = r.min - 10.0 + (r.max - r.min + 20.0) * unit(rng);
      r.orientation = coin(rng) ? Orientation::HigherBetter : Orientation::LowerBetter;
      r.weight = 0.01 + 10.0 * unit(rng);
      records.push_back(std::move(r));
    }
  }
  return records;
}

struct RandomScenario {
  Region region;
  std::vector<Phase> phases;
};

/// All five phases; every phase after the invisible college brings in exactly
/// one new channel and may re-activate any earlier one.
template <typename Rng>
RandomScenario random_single_new_channel_scenario(Rng& rng, double max_influence = 0.9) {
  std::uniform_real_distribution<double> influence(0.0, max_influence);
  std::bernoulli_distribution again(0.4);
  RandomScenario out;
  out.region.name = "R";
  out.region.population = 1000;
  out.phases = canonical_phases();
  std::vector<std::string> introduced;
  for (std::size_t i = 1; i < out.phases.size(); ++i) {
    auto& active = out.phases[i].active_channels;
    for (const auto& c : introduced) {
      if (again(rng)) active.push_back(c);
    }
    const std::string fresh = "c" + std::to_string(i);
    out.region.channels.push_back(MediaChannel{fresh, influence(rng)});
    active.push_back(fresh);
    introduced.push_back(fresh);
  }
  return out;
}

/// Fills bins in the given order, each up to its capacity.
inline std::vector<double> greedy_fill(const std::vector<double>& spares, double amount) {
  std::vector<double> fills;
  for (double spare : spares) {
    const double take = std::min(spare, amount);
    fills.push_back(take);
    amount -= take;
  }
  return fills;
}

}  // namespace kdiflow::testing
