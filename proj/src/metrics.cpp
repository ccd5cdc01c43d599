#include "kdiflow/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace kdiflow {

std::string_view to_string(Orientation orientation) noexcept {
  return orientation == Orientation::HigherBetter ? "HigherBetter" : "LowerBetter";
}

std::string_view to_string(ScopeKind scope) noexcept {
  switch (scope) {
    case ScopeKind::OrgMicro: return "OrgMicro";
    case ScopeKind::RegionMacro: return "RegionMacro";
    case ScopeKind::Node: return "Node";
  }
  return "OrgMicro";
}

namespace {

constexpr std::array<std::string_view, 17> kMicroNames = {
    "Patents pending",
    "% Investment in IT",
    "% R&D invested in basic research",
    "Average years of service with the company",
    "Number of employees",
    "Number of managers",
    "Average duration of employment",
    "Number of new solutions/products suggested",
    "New patents/software/etc. filed",
    "IT development expense/IT expense",
    "Average age of employees",
    "IT literacy of a staff",
    "Company managers with advanced degrees",
    "Revenues resulting from new business operations",
    "IT performance/employee",
    "IT capacity (CPU and DASD)",
    "Changes in IT inventory",
};

constexpr std::array<std::string_view, 5> kMacroNames = {
    "Transport infrastructure",
    "Availability of communications facilities such as television and internet",
    "Public spending on broadcasting",
    "Access to internet",
    "Frequency of local awareness campaigns",
};

constexpr std::array<std::string_view, 8> kHeader = {
    "name", "scope", "node_id", "value", "orientation", "weight", "min", "max"};

[[noreturn]] void malformed(std::size_t row, const std::string& what) {
  throw Error(ErrorCode::MalformedCsv, "row " + std::to_string(row) + ": " + what);
}

// RFC-4180 style reader. Returns rows paired with the line they start on.
std::vector<std::pair<std::size_t, std::vector<std::string>>> split_csv(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  std::size_t line = 1;
  std::size_t row_start = 1;

  auto end_row = [&] {
    fields.push_back(std::move(field));
    field.clear();
    const bool blank = fields.size() == 1 && fields.front().empty() && !field_was_quoted;
    if (!blank) rows.emplace_back(row_start, std::move(fields));
    fields.clear();
    field_was_quoted = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) malformed(line, "stray quote inside an unquoted field");
        quoted = true;
        field_was_quoted = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row_start = line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (quoted) malformed(row_start, "unterminated quoted field");
  if (!field.empty() || !fields.empty() || field_was_quoted) end_row();
  return rows;
}

double parse_number(std::size_t row, std::string_view column, const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    malformed(row, "column '" + std::string(column) + "' is not a finite number: '" + text + "'");
  }
  return value;
}

std::string format_number(double value) {
  std::array<char, 32> buffer{};
  auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), ptr);
}

std::string quote_if_needed(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

double weighted_mean(std::span<const MetricRecord> records, ScopeKind scope,
                     ErrorCode when_empty, const char* what) {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& r : records) {
    if (r.scope != scope || r.weight <= 0.0) continue;
    weighted += r.weight * normalize(r);
    total += r.weight;
  }
  if (total <= 0.0) throw Error(when_empty, what);
  return std::clamp(weighted / total, 0.0, 1.0);
}

}  // namespace

std::span<const std::string_view> micro_metric_names() noexcept { return kMicroNames; }
std::span<const std::string_view> macro_metric_names() noexcept { return kMacroNames; }

MetricRegistry::MetricRegistry() = default;

bool MetricRegistry::contains(std::string_view name) const {
  return std::find(kMicroNames.begin(), kMicroNames.end(), name) != kMicroNames.end() ||
         std::find(kMacroNames.begin(), kMacroNames.end(), name) != kMacroNames.end() ||
         extensions_.contains(name);
}

MetricLoad load_metrics(std::string_view csv_text, const MetricRegistry& registry) {
  auto rows = split_csv(csv_text);
  if (rows.empty()) malformed(1, "missing header row");

  const auto& [header_line, header] = rows.front();
  if (header.size() != kHeader.size() ||
      !std::equal(header.begin(), header.end(), kHeader.begin())) {
    malformed(header_line, "header must be name,scope,node_id,value,orientation,weight,min,max");
  }

  MetricLoad load;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& [line, f] = rows[i];
    if (f.size() != kHeader.size()) {
      malformed(line, "expected 8 fields, found " + std::to_string(f.size()));
    }
    MetricRecord r;
    r.name = f[0];
    if (r.name.empty()) malformed(line, "metric name is empty");

    if (f[1] == "OrgMicro") {
      r.scope = ScopeKind::OrgMicro;
    } else if (f[1] == "RegionMacro") {
      r.scope = ScopeKind::RegionMacro;
    } else if (f[1] == "Node") {
      r.scope = ScopeKind::Node;
    } else {
      malformed(line, "unknown scope '" + f[1] + "'");
    }
    r.node_id = f[2];
    if (r.scope == ScopeKind::Node && r.node_id.empty()) {
      malformed(line, "scope Node requires a node_id");
    }
    if (r.scope != ScopeKind::Node && !r.node_id.empty()) {
      malformed(line, "node_id is only allowed with scope Node");
    }

    r.value = parse_number(line, "value", f[3]);
    if (f[4] == "HigherBetter") {
      r.orientation = Orientation::HigherBetter;
    } else if (f[4] == "LowerBetter") {
      r.orientation = Orientation::LowerBetter;
    } else {
      malformed(line, "unknown orientation '" + f[4] + "'");
    }
    r.weight = parse_number(line, "weight", f[5]);
    r.min = parse_number(line, "min", f[6]);
    r.max = parse_number(line, "max", f[7]);
    if (r.weight < 0.0) {
      throw Error(ErrorCode::NegativeWeight,
                  "row " + std::to_string(line) + ": weight must be non-negative");
    }
    if (!(r.min < r.max)) {
      throw Error(ErrorCode::InvalidBounds,
                  "row " + std::to_string(line) + ": min must be below max");
    }
    if (!registry.contains(r.name)) {
      load.warnings.push_back("row " + std::to_string(line) + ": unregistered metric '" +
                              r.name + "'");
    }
    load.records.push_back(std::move(r));
  }
  return load;
}

std::string to_csv(std::span<const MetricRecord> records) {
  std::string out = "name,scope,node_id,value,orientation,weight,min,max\n";
  for (const auto& r : records) {
    out += quote_if_needed(r.name);
    out += ',';
    out += to_string(r.scope);
    out += ',';
    out += quote_if_needed(r.node_id);
    out += ',' + format_number(r.value);
    out += ',';
    out += to_string(r.orientation);
    out += ',' + format_number(r.weight) + ',' + format_number(r.min) + ',' +
           format_number(r.max) + '\n';
  }
  return out;
}

double normalize(const MetricRecord& record) noexcept {
  const double t = std::clamp((record.value - record.min) / (record.max - record.min), 0.0, 1.0);
  return record.orientation == Orientation::HigherBetter ? t : 1.0 - t;
}

double micro_kdi(std::span<const MetricRecord> records) {
  return weighted_mean(records, ScopeKind::OrgMicro, ErrorCode::NoMicroMetrics,
                       "no organizational metrics with positive weight");
}

double macro_kdi(std::span<const MetricRecord> records) {
  return weighted_mean(records, ScopeKind::RegionMacro, ErrorCode::NoMacroMetrics,
                       "no regional metrics with positive weight");
}

std::optional<double> ReliabilityProfile::score(std::string_view id) const {
  auto it = scores.find(std::string(id));
  if (it == scores.end()) return std::nullopt;
  return it->second;
}

ReliabilityProfile node_reliability(std::span<const MetricRecord> records,
                                    std::span<const NodeId> nodes) {
  std::map<NodeId, std::pair<double, double>> sums;
  for (const auto& id : nodes) sums.emplace(id, std::pair{0.0, 0.0});
  for (const auto& r : records) {
    if (r.scope != ScopeKind::Node) continue;
    auto it = sums.find(r.node_id);
    if (it == sums.end()) {
      throw Error(ErrorCode::UnknownNodeInMetrics,
                  "metric '" + r.name + "' names unknown node '" + r.node_id + "'");
    }
    if (r.weight <= 0.0) continue;
    it->second.first += r.weight * normalize(r);
    it->second.second += r.weight;
  }
  ReliabilityProfile profile;
  for (const auto& [id, sum] : sums) {
    profile.scores[id] =
        sum.second > 0.0 ? std::clamp(sum.first / sum.second, 0.0, 1.0) : kDefaultReliability;
  }
  return profile;
}

KdiScore composite_kdi(double micro, double macro, double micro_weight) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(micro) || !in_unit(macro)) {
    throw Error(ErrorCode::OutOfRange, "micro and macro scores must lie in [0, 1]");
  }
  if (!in_unit(micro_weight)) {
    throw Error(ErrorCode::OutOfRange, "micro weight must lie in [0, 1]");
  }
  const double blended = micro_weight * micro + (1.0 - micro_weight) * macro;
  return KdiScore{micro, macro, std::clamp(blended, 0.0, 1.0)};
}

KdiScore kdi_score(std::optional<double> micro, std::optional<double> macro,
                   double micro_weight) {
  if (micro && macro) return composite_kdi(*micro, *macro, micro_weight);
  if (!(micro_weight >= 0.0 && micro_weight <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "micro weight must lie in [0, 1]");
  }
  return KdiScore{micro, macro, std::nullopt};
}

}  // namespace kdiflow
