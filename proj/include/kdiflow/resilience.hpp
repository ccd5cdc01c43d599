#pragma once

#include <map>
#include <string_view>
#include <vector>

#include "kdiflow/flow_network.hpp"
#include "kdiflow/metrics.hpp"
#include "kdiflow/rules.hpp"

namespace kdiflow {

/// Conservation targets for one level once it is split into a reliable tier
/// and a pseudo (trainee) tier.
struct TierConstants {
  double k_reliable = 0.0;
  double k_pseudo = 0.0;
};

struct OverloadMember {
  NodeId id;
  int level = 0;
  double reliability = 0.0;
};

struct OverloadPlan {
  std::vector<OverloadMember> overloaded;  // sorted by (level, id)
  double capacity_factor = 1.5;
  std::map<int, TierConstants> tier_constants;  // per level

  std::vector<NodeId> at_level(int level) const;
};

inline constexpr double kDefaultCapacityFactor = 1.5;

/// Picks the top floor(quota * n) Regular nodes per level, at least one, by
/// reliability with ties broken by id.
OverloadPlan select_overload_set(const ReliabilityProfile& profile, const FlowNetwork& net,
                                 double quota,
                                 double capacity_factor = kDefaultCapacityFactor);

/// Scales every inbound edge of the level's overloaded nodes by the plan's
/// capacity factor, then attaches `n_new` pseudo nodes sponsored by them.
/// Each pseudo node gets the level's k_pseudo as inbound and outbound
/// capacity, which caps its throughflow at the pseudo tier constant.
FlowNetwork onboard(const FlowNetwork& net, const OverloadPlan& plan, int n_new, int level);

/// Two-tier conservation check for an onboarded network: pseudo throughflow
/// above k_pseudo, or overloaded throughflow above capacity_factor *
/// k_reliable, is reported as a LevelConservation violation.
std::vector<Violation> check_two_tier(const FlowNetwork& net, const OverloadPlan& plan);

struct PerturbationReport {
  double injected = 0.0;
  double absorbed = 0.0;
  double residual = 0.0;
  std::map<NodeId, double> absorbers;
};

/// Greedy fill of the overloaded nodes' spare inbound capacity, most
/// reliable first.
PerturbationReport absorb_perturbation(const FlowNetwork& net, const OverloadPlan& plan,
                                       double magnitude);

struct SuperFamily {
  int level = 0;
  std::vector<NodeId> members;
  double score_threshold = 0.0;
};

inline constexpr double kModifiedZThreshold = 3.5;
inline constexpr double kMadConsistency = 0.6745;
inline constexpr double kFlatLevelMargin = 0.3;
inline constexpr std::size_t kMinFamilyLevelSize = 3;

/// High-side outliers in reliability, per level, by modified z-score.
std::vector<SuperFamily> detect_superfamilies(const ReliabilityProfile& profile,
                                              const FlowNetwork& net);

struct DamageOutcome {
  double attack_magnitude = 0.0;
  double diverted_to_pseudo = 0.0;
  double reached_protected = 0.0;
  int protected_clearance = 0;
  /// Nodes at or above the protected clearance that undiverted damage can
  /// still reach from the entry point.
  std::vector<NodeId> exposed;
};

/// Routes an attack of `magnitude` units entering at `attack_entry` toward the
/// pseudo nodes, which absorb up to their inbound capacity.
DamageOutcome divert_damage(const FlowNetwork& net, std::string_view attack_entry,
                            double magnitude, int protected_clearance);

}  // namespace kdiflow
