#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kdiflow {

/// Every failure raised by the library carries one of these codes.
enum class ErrorCode {
  // network construction
  DuplicateNode,
  DuplicateEdge,
  DanglingEdge,
  MultipleSources,
  MissingTerminal,
  LevelViolation,
  NegativeCapacity,
  SelfLoop,
  InvalidNode,
  UnknownSponsor,
  LevelMismatch,
  NotPseudo,
  UnknownNode,
  // rules
  InvalidThreshold,
  InvalidTarget,
  NoPeerCapacity,
  // metrics
  MalformedCsv,
  InvalidBounds,
  NegativeWeight,
  NoMicroMetrics,
  NoMacroMetrics,
  UnknownNodeInMetrics,
  OutOfRange,
  // resilience
  EmptyNetwork,
  InvalidQuota,
  MissingReliability,
  NoSponsorsAtLevel,
  NegativeMagnitude,
  NoPseudoNodes,
  // dispersion
  UnknownChannel,
  PhaseOrderViolation,
  InconsistentTimeline,
  NoRegions,
  ObjectiveAbsentEverywhere,
  // interchange
  SchemaError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Absolute tolerance for comparing capacities, flows and scores.
inline constexpr double kTolerance = 1e-9;

}  // namespace kdiflow
