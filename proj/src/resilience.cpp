#include "kdiflow/resilience.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "residual_graph.hpp"

namespace kdiflow {

std::vector<NodeId> OverloadPlan::at_level(int level) const {
  std::vector<NodeId> ids;
  for (const auto& m : overloaded) {
    if (m.level == level) ids.push_back(m.id);
  }
  return ids;
}

namespace {

std::map<int, std::vector<const Node*>> regular_by_level(const FlowNetwork& net) {
  std::map<int, std::vector<const Node*>> levels;
  for (const auto& n : net.nodes()) {
    if (n.kind == NodeKind::Regular) levels[n.level].push_back(&n);
  }
  return levels;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

OverloadPlan select_overload_set(const ReliabilityProfile& profile, const FlowNetwork& net,
                                 double quota, double capacity_factor) {
  if (!(quota > 0.0 && quota <= 1.0)) {
    throw Error(ErrorCode::InvalidQuota, "overload quota must lie in (0, 1]");
  }
  if (!(capacity_factor > 1.0) || !std::isfinite(capacity_factor)) {
    throw Error(ErrorCode::OutOfRange, "capacity factor must be greater than 1");
  }
  const auto levels = regular_by_level(net);
  if (levels.empty()) throw Error(ErrorCode::EmptyNetwork, "network has no Regular nodes");

  OverloadPlan plan;
  plan.capacity_factor = capacity_factor;
  for (const auto& [level, nodes] : levels) {
    std::vector<OverloadMember> ranked;
    double throughflow = 0.0;
    for (const Node* n : nodes) {
      const auto score = profile.score(n->id);
      if (!score) {
        throw Error(ErrorCode::MissingReliability, "no reliability score for '" + n->id + "'");
      }
      ranked.push_back({n->id, level, *score});
      throughflow += net.inflow(n->id);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.reliability != b.reliability) return a.reliability > b.reliability;
      return a.id < b.id;
    });
    // Floor with a minimum of one; 0.34 of three nodes is one node.
    const auto wanted = static_cast<std::size_t>(
        std::floor(quota * static_cast<double>(ranked.size()) + kTolerance));
    ranked.resize(std::clamp<std::size_t>(wanted, 1, ranked.size()));

    const double k = throughflow / static_cast<double>(nodes.size());
    plan.tier_constants[level] = TierConstants{k, 0.5 * k};
    plan.overloaded.insert(plan.overloaded.end(), ranked.begin(), ranked.end());
  }
  std::sort(plan.overloaded.begin(), plan.overloaded.end(), [](const auto& a, const auto& b) {
    return std::tie(a.level, a.id) < std::tie(b.level, b.id);
  });
  return plan;
}

FlowNetwork onboard(const FlowNetwork& net, const OverloadPlan& plan, int n_new, int level) {
  if (n_new < 1) throw Error(ErrorCode::OutOfRange, "onboarding needs at least one new node");
  const auto sponsors = plan.at_level(level);
  if (sponsors.empty()) {
    throw Error(ErrorCode::NoSponsorsAtLevel,
                "no overloaded nodes at level " + std::to_string(level));
  }
  for (const auto& id : sponsors) net.node(id);

  const std::set<NodeId> boosted(sponsors.begin(), sponsors.end());
  std::vector<Node> nodes(net.nodes().begin(), net.nodes().end());
  std::vector<Edge> edges(net.edges().begin(), net.edges().end());
  for (auto& e : edges) {
    if (boosted.contains(e.to)) e.capacity *= plan.capacity_factor;
  }
  FlowNetwork grown = FlowNetwork::build(std::move(nodes), std::move(edges), net.source(),
                                         net.sink());

  auto tier = plan.tier_constants.find(level);
  const double k_pseudo = tier == plan.tier_constants.end() ? 0.0 : tier->second.k_pseudo;
  for (int i = 0; i < n_new; ++i) {
    grown = add_pseudo_node(grown, level, sponsors, k_pseudo, k_pseudo);
  }
  return grown;
}

std::vector<Violation> check_two_tier(const FlowNetwork& net, const OverloadPlan& plan) {
  std::vector<Violation> out;
  for (const auto& [level, tier] : plan.tier_constants) {
    for (const auto& n : net.nodes()) {
      if (n.level != level || n.kind != NodeKind::Pseudo) continue;
      const double through = net.inflow(n.id);
      if (through > tier.k_pseudo + kTolerance) {
        out.push_back({Rule::LevelConservation, {n.id}, "pseudo throughflow above k_pseudo",
                       through - tier.k_pseudo});
      }
    }
    const double ceiling = plan.capacity_factor * tier.k_reliable;
    for (const auto& id : plan.at_level(level)) {
      const Node* n = net.find_node(id);
      if (n == nullptr) continue;
      const double through = net.inflow(id);
      if (through > ceiling + kTolerance) {
        out.push_back({Rule::LevelConservation, {id},
                       "overloaded throughflow above capacity_factor * k_reliable",
                       through - ceiling});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.rule, a.subject) < std::tie(b.rule, b.subject);
  });
  return out;
}

PerturbationReport absorb_perturbation(const FlowNetwork& net, const OverloadPlan& plan,
                                       double magnitude) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw Error(ErrorCode::NegativeMagnitude, "perturbation magnitude must be non-negative");
  }
  std::vector<OverloadMember> order = plan.overloaded;
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.reliability != b.reliability) return a.reliability > b.reliability;
    return a.id < b.id;
  });

  PerturbationReport report;
  report.injected = magnitude;
  double remaining = magnitude;
  double filled = 0.0;
  for (const auto& m : order) {
    net.node(m.id);
    const double spare = std::max(net.inbound_capacity(m.id) - net.inflow(m.id), 0.0);
    const double take = std::min(spare, remaining);
    report.absorbers[m.id] = take;
    filled += take;
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  if (remaining <= 0.0) {
    report.absorbed = magnitude;
    report.residual = 0.0;
  } else {
    // One of these two subtractions is exact (Sterbenz), so the parts add
    // back to the magnitude bit for bit.
    report.residual = magnitude - filled;
    report.absorbed = magnitude - report.residual;
  }
  return report;
}

std::vector<SuperFamily> detect_superfamilies(const ReliabilityProfile& profile,
                                              const FlowNetwork& net) {
  std::vector<SuperFamily> families;
  for (const auto& [level, nodes] : regular_by_level(net)) {
    std::vector<std::pair<NodeId, double>> scored;
    for (const Node* n : nodes) {
      if (auto s = profile.score(n->id)) scored.emplace_back(n->id, *s);
    }
    if (scored.size() < kMinFamilyLevelSize) continue;

    std::vector<double> values;
    for (const auto& [id, s] : scored) values.push_back(s);
    const double median = median_of(values);
    std::vector<double> deviations;
    for (double v : values) deviations.push_back(std::abs(v - median));
    const double mad = median_of(deviations);

    SuperFamily family{level, {}, 0.0};
    if (mad > 0.0) {
      family.score_threshold = median + kModifiedZThreshold * mad / kMadConsistency;
      for (const auto& [id, s] : scored) {
        if (kMadConsistency * (s - median) / mad > kModifiedZThreshold) {
          family.members.push_back(id);
        }
      }
    } else {
      // More than half the level shares one score; only a lone clear leader counts.
      const double top = *std::max_element(values.begin(), values.end());
      const auto at_top = std::count(values.begin(), values.end(), top);
      family.score_threshold = median + kFlatLevelMargin;
      if (at_top == 1 && top > family.score_threshold) {
        for (const auto& [id, s] : scored) {
          if (s == top) family.members.push_back(id);
        }
      }
    }
    if (!family.members.empty()) families.push_back(std::move(family));
  }
  return families;
}

DamageOutcome divert_damage(const FlowNetwork& net, std::string_view attack_entry,
                            double magnitude, int protected_clearance) {
  const Node& entry = net.node(attack_entry);
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw Error(ErrorCode::NegativeMagnitude, "attack magnitude must be non-negative");
  }
  const auto nodes = net.nodes();
  const bool any_pseudo = std::any_of(nodes.begin(), nodes.end(),
                                      [](const Node& n) { return n.kind == NodeKind::Pseudo; });
  if (!any_pseudo) throw Error(ErrorCode::NoPseudoNodes, "network has no pseudo nodes");

  auto index_of = [&](std::string_view id) {
    return static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), id,
                         [](const Node& n, std::string_view key) { return n.id < key; }) -
        nodes.begin());
  };
  const std::size_t attacker = nodes.size();
  const std::size_t absorber = nodes.size() + 1;
  detail::ResidualGraph graph(nodes.size() + 2);

  std::vector<std::pair<const Edge*, std::size_t>> arcs;
  for (const auto& e : net.edges()) {
    if (net.node(e.from).kind == NodeKind::Pseudo) continue;
    arcs.emplace_back(&e, graph.add_arc(index_of(e.from), index_of(e.to), e.capacity));
  }
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::Pseudo) {
      graph.add_arc(index_of(n.id), absorber, net.inbound_capacity(n.id));
    }
  }
  graph.add_arc(attacker, index_of(entry.id), magnitude);

  DamageOutcome outcome;
  outcome.attack_magnitude = magnitude;
  outcome.protected_clearance = protected_clearance;
  const double routed = graph.augment(attacker, absorber, magnitude);
  outcome.diverted_to_pseudo = magnitude - routed <= detail::kResidualEpsilon ? magnitude : routed;
  outcome.reached_protected = magnitude - outcome.diverted_to_pseudo;

  if (outcome.reached_protected > 0.0) {
    // Where the undiverted remainder can still travel: edges with capacity
    // left after diversion, stopping at pseudo nodes.
    std::set<NodeId> seen{entry.id};
    std::vector<NodeId> stack{entry.id};
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (const auto& [edge, arc] : arcs) {
        if (edge->from != u || graph.residual(arc) <= detail::kResidualEpsilon) continue;
        if (seen.insert(edge->to).second && net.node(edge->to).kind != NodeKind::Pseudo) {
          stack.push_back(edge->to);
        }
      }
    }
    for (const auto& id : seen) {
      const Node& n = net.node(id);
      if (n.kind != NodeKind::Pseudo && n.clearance >= protected_clearance) {
        outcome.exposed.push_back(id);
      }
    }
  }
  return outcome;
}

}  // namespace kdiflow
