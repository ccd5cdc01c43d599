#include "kdiflow/dispersion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace kdiflow {

std::string_view to_string(PhaseId id) noexcept {
  switch (id) {
    case PhaseId::InvisibleCollege: return "InvisibleCollege";
    case PhaseId::Breaking: return "Breaking";
    case PhaseId::DaysAfter: return "DaysAfter";
    case PhaseId::WeeksAfter: return "WeeksAfter";
    case PhaseId::MonthsAfter: return "MonthsAfter";
  }
  return "InvisibleCollege";
}

std::optional<PhaseId> parse_phase_id(std::string_view text) noexcept {
  for (auto id : {PhaseId::InvisibleCollege, PhaseId::Breaking, PhaseId::DaysAfter,
                  PhaseId::WeeksAfter, PhaseId::MonthsAfter}) {
    if (to_string(id) == text) return id;
  }
  return std::nullopt;
}

std::vector<Phase> canonical_phases() {
  return {
      {PhaseId::InvisibleCollege, {}, "before the development"},
      {PhaseId::Breaking, {}, "as the development occurs"},
      {PhaseId::DaysAfter, {}, "the next day or days after"},
      {PhaseId::WeeksAfter, {}, "a week or weeks after"},
      {PhaseId::MonthsAfter, {}, "a month or more after"},
  };
}

void Region::validate() const {
  if (population < 1) throw Error(ErrorCode::OutOfRange, "region '" + name + "' is empty");
  double total = 0.0;
  for (const auto& [tag, fraction] : interests) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
      throw Error(ErrorCode::OutOfRange, "interest '" + tag + "' fraction outside [0, 1]");
    }
    total += fraction;
  }
  if (total > 1.0 + kTolerance) {
    throw Error(ErrorCode::OutOfRange, "interest fractions of '" + name + "' exceed 1");
  }
  for (const auto& c : channels) {
    if (!(c.influence >= 0.0 && c.influence <= 1.0)) {
      throw Error(ErrorCode::OutOfRange, "channel '" + c.name + "' influence outside [0, 1]");
    }
  }
}

namespace {

void check_order(std::span<const Phase> phases) {
  for (std::size_t i = 1; i < phases.size(); ++i) {
    if (!(phases[i - 1].id < phases[i].id)) {
      throw Error(ErrorCode::PhaseOrderViolation,
                  std::string(to_string(phases[i].id)) + " cannot follow " +
                      std::string(to_string(phases[i - 1].id)));
    }
  }
}

std::vector<std::string> distinct(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const auto& n : names) {
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

}  // namespace

DispersionTimeline simulate_phases(const Region& region, std::span<const Phase> phases) {
  region.validate();
  check_order(phases);
  std::map<std::string, double> influence;
  for (const auto& c : region.channels) influence[c.name] = c.influence;

  DispersionTimeline timeline;
  double reach = 0.0;
  for (const auto& phase : phases) {
    double untouched = 1.0;
    for (const auto& name : distinct(phase.active_channels)) {
      auto it = influence.find(name);
      if (it == influence.end()) {
        throw Error(ErrorCode::UnknownChannel,
                    "channel '" + name + "' is not available in region '" + region.name + "'");
      }
      untouched *= 1.0 - it->second;
    }
    if (phase.id != PhaseId::InvisibleCollege) {
      reach = std::clamp(1.0 - (1.0 - reach) * untouched, reach, 1.0);
    }
    timeline.reach.emplace_back(phase.id, reach);
  }
  return timeline;
}

std::vector<InterestSet> classify_interest_sets(const Region& region) {
  region.validate();
  const auto population = static_cast<double>(region.population);
  struct Count {
    InterestSet set;
    double rounded_up_by;
  };
  std::vector<Count> counts;
  std::uint64_t total = 0;
  for (const auto& [tag, fraction] : region.interests) {
    const double exact = fraction * population;
    const auto members = static_cast<std::uint64_t>(std::llround(exact));
    counts.push_back({{tag, members}, static_cast<double>(members) - exact});
    total += members;
  }
  // Rounding can overshoot the population; take the excess back from the
  // sets that were rounded up the most.
  while (total > region.population) {
    auto most = std::max_element(counts.begin(), counts.end(), [](const Count& a, const Count& b) {
      if (a.rounded_up_by != b.rounded_up_by) return a.rounded_up_by < b.rounded_up_by;
      return a.set.tag > b.set.tag;
    });
    most->set.members -= 1;
    most->rounded_up_by -= 1.0;
    total -= 1;
  }

  std::vector<InterestSet> out;
  for (auto& c : counts) out.push_back(std::move(c.set));
  std::sort(out.begin(), out.end(), [](const InterestSet& a, const InterestSet& b) {
    if (a.members != b.members) return a.members > b.members;
    return a.tag < b.tag;
  });
  return out;
}

std::string select_region(std::span<const Region> regions, std::string_view objective) {
  if (regions.empty()) throw Error(ErrorCode::NoRegions, "no regions to choose from");

  struct Candidate {
    std::uint64_t members;
    double macro;
    const std::string* name;
  };
  std::vector<Candidate> candidates;
  for (const auto& r : regions) {
    std::uint64_t members = 0;
    for (const auto& set : classify_interest_sets(r)) {
      if (set.tag == objective) members = set.members;
    }
    double macro = -1.0;
    try {
      macro = macro_kdi(r.macro_records);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoMacroMetrics) throw;
    }
    candidates.push_back({members, macro, &r.name});
  }
  const auto best = std::min_element(
      candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.members != b.members) return a.members > b.members;
        if (a.macro != b.macro) return a.macro > b.macro;
        return *a.name < *b.name;
      });
  if (best->members == 0) {
    throw Error(ErrorCode::ObjectiveAbsentEverywhere,
                "no region has members interested in '" + std::string(objective) + "'");
  }
  return *best->name;
}

namespace {

// -log(1 - reach), capped so saturated phases stay finite in the fit.
constexpr double kSaturatedExposure = 36.0;

double exposure(double reach) {
  return reach >= 1.0 ? std::numeric_limits<double>::infinity() : -std::log1p(-reach);
}

double influence_from(double z) {
  return std::isinf(z) ? 1.0 : std::clamp(-std::expm1(-z), 0.0, 1.0);
}

}  // namespace

BackcastResult backcast_currents(const DispersionTimeline& timeline,
                                 std::span<const Phase> phases) {
  check_order(phases);
  if (timeline.reach.size() != phases.size()) {
    throw Error(ErrorCode::InconsistentTimeline, "timeline and phase list differ in length");
  }
  double previous = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto [id, reach] = timeline.reach[i];
    if (id != phases[i].id) {
      throw Error(ErrorCode::InconsistentTimeline, "timeline phases do not match the schedule");
    }
    if (!(reach >= 0.0 && reach <= 1.0) || reach < previous) {
      throw Error(ErrorCode::InconsistentTimeline, "cumulative reach must be non-decreasing in [0, 1]");
    }
    if (id == PhaseId::InvisibleCollege && reach > 0.0) {
      throw Error(ErrorCode::InconsistentTimeline, "the invisible college reaches nobody");
    }
    previous = reach;
  }

  // One equation per informative phase: the channels it activates must add
  // up to the growth in exposure -log(1 - reach).
  struct Row {
    std::vector<std::string> channels;
    double growth;
  };
  std::vector<Row> rows;
  std::vector<std::string> columns;
  bool saturated_rows = false;
  previous = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double reach = timeline.reach[i].second;
    const auto channels = distinct(phases[i].active_channels);
    if (phases[i].id == PhaseId::InvisibleCollege) continue;
    for (const auto& c : channels) {
      if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
    }
    if (previous >= 1.0) {
      saturated_rows = saturated_rows || !channels.empty();
      previous = reach;
      continue;
    }
    rows.push_back({channels, exposure(reach) - exposure(previous)});
    previous = reach;
  }

  BackcastResult result;
  // Forward substitution when every phase introduces at most one new channel.
  std::map<std::string, double> solved;
  bool exact = !saturated_rows;
  for (const auto& row : rows) {
    if (!exact) break;
    std::vector<std::string> fresh;
    double known = 0.0;
    for (const auto& c : row.channels) {
      if (auto it = solved.find(c); it != solved.end()) {
        known += it->second;
      } else {
        fresh.push_back(c);
      }
    }
    if (fresh.size() > 1) {
      exact = false;
    } else if (fresh.size() == 1) {
      solved[fresh.front()] = std::isinf(row.growth) ? row.growth : std::max(row.growth - known, 0.0);
    } else if (!(std::isinf(row.growth) && std::isinf(known)) &&
               std::abs(row.growth - known) > kTolerance) {
      exact = false;
    }
  }
  for (const auto& c : columns) exact = exact && solved.contains(c);

  if (exact) {
    for (const auto& c : columns) result.influences[c] = influence_from(solved[c]);
    return result;
  }

  result.exact = false;
  if (columns.empty()) return result;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(columns.size()));
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& c : rows[r].channels) {
      const auto col = std::find(columns.begin(), columns.end(), c) - columns.begin();
      a(static_cast<Eigen::Index>(r), col) = 1.0;
    }
    b(static_cast<Eigen::Index>(r)) = std::min(rows[r].growth, kSaturatedExposure);
  }
  const Eigen::VectorXd z = rows.empty()
                                ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(columns.size()))
                                : Eigen::VectorXd(a.completeOrthogonalDecomposition().solve(b));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    result.influences[columns[c]] = influence_from(std::max(z(static_cast<Eigen::Index>(c)), 0.0));
  }
  return result;
}

}  // namespace kdiflow
