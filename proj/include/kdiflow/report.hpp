#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kdiflow/dispersion.hpp"
#include "kdiflow/flow_network.hpp"
#include "kdiflow/metrics.hpp"
#include "kdiflow/resilience.hpp"
#include "kdiflow/rules.hpp"

namespace kdiflow {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Command {
  Validate,
  MaxFlow,
  Kdi,
  SimulateOnboard,
  SimulateDamage,
  SimulateDispersion,
  Report,
};

std::string_view to_string(Command command) noexcept;
std::optional<Command> parse_command(std::string_view text) noexcept;

struct RunParameters {
  std::optional<double> threshold;
  std::optional<double> quota;
  std::optional<double> capacity_factor;
  std::optional<double> micro_weight;
  std::optional<std::uint64_t> seed;
  std::optional<int> level;
  std::optional<int> new_nodes;
  std::optional<double> magnitude;
  std::optional<std::string> attack_entry;
  std::optional<int> protected_clearance;
  std::optional<std::string> objective;
};

inline constexpr double kDefaultQuota = 0.2;

struct RunConfig {
  Command command = Command::Validate;
  std::optional<std::string> network_path;
  std::optional<std::string> metrics_path;
  std::optional<std::string> scenario_path;
  RunParameters parameters;
};

struct RegionSummary {
  std::vector<InterestSet> interest_sets;
  std::optional<double> macro_kdi;
};

struct KdiReport {
  std::optional<KdiScore> kdi;
  std::optional<std::vector<Violation>> violations;
  std::optional<std::vector<LevelFlowSummary>> level_summaries;
  std::optional<std::vector<SuperFamily>> superfamilies;
  std::optional<std::vector<NodeId>> stressed_nodes;
  std::optional<PerturbationReport> perturbation;
  std::optional<DamageOutcome> damage;
  std::optional<std::map<std::string, DispersionTimeline>> timeline;
  std::optional<std::map<std::string, RegionSummary>> regions;
  std::optional<std::string> selected_region;
  std::optional<MaxFlowResult> max_flow;
  std::optional<OverloadPlan> overload_plan;
  std::optional<FlowNetwork> network;
  std::vector<std::string> warnings;
  std::string tool_version{kToolVersion};
  RunConfig config_echo;
};

/// Failure classes of a run; each has its own process exit status.
enum class RunErrorKind { Config, Io, Schema, Domain };

int exit_code(RunErrorKind kind) noexcept;
std::string_view to_string(RunErrorKind kind) noexcept;

class RunError : public std::runtime_error {
 public:
  RunError(RunErrorKind kind, const std::string& message, std::string hint)
      : std::runtime_error(message), kind_(kind), hint_(std::move(hint)) {}

  RunErrorKind kind() const noexcept { return kind_; }
  const std::string& hint() const noexcept { return hint_; }

 private:
  RunErrorKind kind_;
  std::string hint_;
};

/// Executes one command. Throws RunError.
KdiReport run(const RunConfig& config);

nlohmann::json report_to_json(const KdiReport& report);

/// Canonical JSON text of the report: sorted keys, 9 significant digits.
std::string emit_report(const KdiReport& report);

/// {"code", "message", "hint"} for a failed run, in canonical form.
std::string emit_error(const RunError& error);

/// Canonical rendering of any JSON value: object keys sorted, two-space
/// indentation, floating-point numbers printed with %.9g, trailing newline.
std::string canonical_json(const nlohmann::json& value);

}  // namespace kdiflow
