#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kdiflow/metrics.hpp"

namespace kdiflow {

// Stages a development passes through on its way to the public, in order.
enum class PhaseId { InvisibleCollege, Breaking, DaysAfter, WeeksAfter, MonthsAfter };

std::string_view to_string(PhaseId id) noexcept;
std::optional<PhaseId> parse_phase_id(std::string_view text) noexcept;

struct MediaChannel {
  std::string name;
  double influence = 0.0;  // fraction of the population reached per active phase
};

struct Phase {
  PhaseId id = PhaseId::InvisibleCollege;
  std::vector<std::string> active_channels;
  std::string duration_label;
};

/// The five stages with their customary duration labels and no channels.
std::vector<Phase> canonical_phases();

struct Region {
  std::string name;
  std::uint64_t population = 1;
  std::map<std::string, double> interests;  // tag -> fraction of population
  std::vector<MediaChannel> channels;
  std::vector<MetricRecord> macro_records;

  /// Throws OutOfRange when population, fractions or influences are invalid.
  void validate() const;
};

struct DispersionTimeline {
  std::vector<std::pair<PhaseId, double>> reach;  // cumulative informed fraction
};

/// Cumulative reach after each phase. The invisible college reaches nobody;
/// every later phase composes independent exposures:
///   reach' = 1 - (1 - reach) * prod(1 - influence_c) over its active channels.
DispersionTimeline simulate_phases(const Region& region, std::span<const Phase> phases);

struct InterestSet {
  std::string tag;
  std::uint64_t members = 0;

  friend bool operator==(const InterestSet&, const InterestSet&) = default;
};

/// Members per tag, largest set first, ties by tag.
std::vector<InterestSet> classify_interest_sets(const Region& region);

/// Region whose set for `objective` is largest. Ties go to the higher macro
/// KDI, then the lexicographically smaller name.
std::string select_region(std::span<const Region> regions, std::string_view objective);

struct BackcastResult {
  std::map<std::string, double> influences;
  /// False when the phases do not pin down every channel on their own and
  /// the influences come from a least-squares fit instead.
  bool exact = true;
};

/// Recovers per-channel influence from an observed timeline under the same
/// composition model simulate_phases uses.
BackcastResult backcast_currents(const DispersionTimeline& timeline,
                                 std::span<const Phase> phases);

}  // namespace kdiflow
