#include "kdiflow/error.hpp"

namespace kdiflow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::MultipleSources: return "MultipleSources";
    case ErrorCode::MissingTerminal: return "MissingTerminal";
    case ErrorCode::LevelViolation: return "LevelViolation";
    case ErrorCode::NegativeCapacity: return "NegativeCapacity";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::UnknownSponsor: return "UnknownSponsor";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::NotPseudo: return "NotPseudo";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::NoPeerCapacity: return "NoPeerCapacity";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::NoMicroMetrics: return "NoMicroMetrics";
    case ErrorCode::NoMacroMetrics: return "NoMacroMetrics";
    case ErrorCode::UnknownNodeInMetrics: return "UnknownNodeInMetrics";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyNetwork: return "EmptyNetwork";
    case ErrorCode::InvalidQuota: return "InvalidQuota";
    case ErrorCode::MissingReliability: return "MissingReliability";
    case ErrorCode::NoSponsorsAtLevel: return "NoSponsorsAtLevel";
    case ErrorCode::NegativeMagnitude: return "NegativeMagnitude";
    case ErrorCode::NoPseudoNodes: return "NoPseudoNodes";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::PhaseOrderViolation: return "PhaseOrderViolation";
    case ErrorCode::InconsistentTimeline: return "InconsistentTimeline";
    case ErrorCode::NoRegions: return "NoRegions";
    case ErrorCode::ObjectiveAbsentEverywhere: return "ObjectiveAbsentEverywhere";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

}  // namespace kdiflow
