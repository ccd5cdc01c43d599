#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kdiflow/flow_network.hpp"

namespace kdiflow {

enum class Orientation { HigherBetter, LowerBetter };
enum class ScopeKind { OrgMicro, RegionMacro, Node };

std::string_view to_string(Orientation orientation) noexcept;
std::string_view to_string(ScopeKind scope) noexcept;

struct MetricRecord {
  std::string name;
  ScopeKind scope = ScopeKind::OrgMicro;
  NodeId node_id;  // only for ScopeKind::Node
  double value = 0.0;
  Orientation orientation = Orientation::HigherBetter;
  double weight = 1.0;
  double min = 0.0;
  double max = 1.0;

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

/// Organizational metrics, in table order.
std::span<const std::string_view> micro_metric_names() noexcept;
/// Regional (consumer-side) metrics.
std::span<const std::string_view> macro_metric_names() noexcept;

/// Known metric names: the built-in tables plus caller-registered extras.
class MetricRegistry {
 public:
  MetricRegistry();

  void register_extension(std::string name) { extensions_.insert(std::move(name)); }
  bool contains(std::string_view name) const;

 private:
  std::set<std::string, std::less<>> extensions_;
};

struct MetricLoad {
  std::vector<MetricRecord> records;
  std::vector<std::string> warnings;  // e.g. unregistered metric names
};

/// Parses `name,scope,node_id,value,orientation,weight,min,max` CSV with a
/// mandatory header row. Fields may be quoted; quotes inside quoted fields
/// are doubled.
MetricLoad load_metrics(std::string_view csv_text,
                        const MetricRegistry& registry = MetricRegistry{});

/// Canonical CSV emission; load_metrics reads it back unchanged.
std::string to_csv(std::span<const MetricRecord> records);

/// Min-max normalization into [0,1], flipped for LowerBetter.
double normalize(const MetricRecord& record) noexcept;

double micro_kdi(std::span<const MetricRecord> records);
double macro_kdi(std::span<const MetricRecord> records);

struct ReliabilityProfile {
  std::map<NodeId, double> scores;

  std::optional<double> score(std::string_view id) const;
};

inline constexpr double kDefaultReliability = 0.5;

ReliabilityProfile node_reliability(std::span<const MetricRecord> records,
                                    std::span<const NodeId> nodes);

struct KdiScore {
  std::optional<double> micro;
  std::optional<double> macro;
  std::optional<double> composite;  // set iff both micro and macro are
};

inline constexpr double kDefaultMicroWeight = 0.5;

KdiScore composite_kdi(double micro, double macro,
                       double micro_weight = kDefaultMicroWeight);

/// Assembles whichever halves are available; composite only when both are.
KdiScore kdi_score(std::optional<double> micro, std::optional<double> macro,
                   double micro_weight = kDefaultMicroWeight);

}  // namespace kdiflow
