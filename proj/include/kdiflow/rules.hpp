#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kdiflow/flow_network.hpp"

namespace kdiflow {

enum class Rule { CapacityLimit, SkewSymmetry, LevelConservation };

std::string_view to_string(Rule rule) noexcept;

struct Violation {
  Rule rule = Rule::CapacityLimit;
  std::vector<NodeId> subject;  // one node, or an ordered (from, to) pair
  std::string detail;
  double magnitude = 0.0;  // always > 0

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Throughflow of every non-terminal node at one level. `k` is set only when
/// all of them agree within kTolerance; `violations` lists nodes whose inflow
/// and outflow differ.
struct LevelFlowSummary {
  int level = 0;
  std::map<NodeId, double> throughflow;
  std::optional<double> k;
  std::vector<Violation> violations;
};

struct MaxFlowResult {
  double value = 0.0;
  EdgeFlows flows;
  std::set<EdgeKey> min_cut;
};

std::vector<Violation> check_capacity(const FlowNetwork& net);

/// Flags every pair carrying positive flow in both directions at once; the
/// magnitude is the smaller of the two, i.e. the flow that cancels out.
std::vector<Violation> check_skew_symmetry(const FlowNetwork& net);

std::vector<LevelFlowSummary> check_level_conservation(const FlowNetwork& net);

/// Standard inflow == outflow conservation at every non-terminal node.
std::vector<Violation> check_conservation(const FlowNetwork& net);

/// Shortest-augmenting-path max-flow, ignoring the flows already on `net`.
MaxFlowResult max_flow(const FlowNetwork& net);

inline constexpr double kDefaultStressThreshold = 0.9;

/// Non-terminal nodes whose inflow reaches `threshold` of their inbound
/// capacity, most utilized first.
std::vector<NodeId> stressed_nodes(const FlowNetwork& net,
                                   double threshold = kDefaultStressThreshold);

/// Moves the part of `node`'s inflow above its level mean onto same-level
/// peers that sit below the mean and have spare inbound capacity. Each peer
/// is offered a share proportional to its spare capacity, never enough to
/// lift it past the mean. The change is a circulation in the residual
/// network, so capacities hold and the source outflow is untouched.
FlowNetwork redistribute(const FlowNetwork& net, std::string_view node);

}  // namespace kdiflow
