#include "kdiflow/report.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "kdiflow/interchange.hpp"

namespace kdiflow {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 7> kCommands = {{
    {Command::Validate, "validate"},
    {Command::MaxFlow, "maxflow"},
    {Command::Kdi, "kdi"},
    {Command::SimulateOnboard, "simulate-onboard"},
    {Command::SimulateDamage, "simulate-damage"},
    {Command::SimulateDispersion, "simulate-dispersion"},
    {Command::Report, "report"},
}};

}  // namespace

std::string_view to_string(Command command) noexcept {
  for (const auto& [c, name] : kCommands) {
    if (c == command) return name;
  }
  return "validate";
}

std::optional<Command> parse_command(std::string_view text) noexcept {
  for (const auto& [c, name] : kCommands) {
    if (name == text) return c;
  }
  return std::nullopt;
}

int exit_code(RunErrorKind kind) noexcept {
  switch (kind) {
    case RunErrorKind::Config: return 2;
    case RunErrorKind::Io: return 3;
    case RunErrorKind::Schema: return 4;
    case RunErrorKind::Domain: return 5;
  }
  return 1;
}

std::string_view to_string(RunErrorKind kind) noexcept {
  switch (kind) {
    case RunErrorKind::Config: return "ConfigError";
    case RunErrorKind::Io: return "IoError";
    case RunErrorKind::Schema: return "SchemaError";
    case RunErrorKind::Domain: return "DomainError";
  }
  return "DomainError";
}

namespace {

[[noreturn]] void config_error(const std::string& message, std::string hint) {
  throw RunError(RunErrorKind::Config, message, std::move(hint));
}

std::string describe(const Error& e) {
  return std::string(to_string(e.code())) + ": " + e.what();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw RunError(RunErrorKind::Io, "cannot read '" + path + "'",
                   "check that the file exists and is readable");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const std::string& required(const std::optional<std::string>& path, const char* flag,
                            Command command) {
  if (!path) {
    config_error(std::string(to_string(command)) + " requires " + flag,
                 std::string("pass ") + flag + " PATH");
  }
  return *path;
}

// Loading failures mean the input does not match its schema or invariants.
template <typename Fn>
auto load(Fn&& fn, const char* hint) {
  try {
    return fn();
  } catch (const Error& e) {
    throw RunError(RunErrorKind::Schema, describe(e), hint);
  }
}

FlowNetwork load_network(const std::string& path) {
  const std::string text = read_file(path);
  return load([&] { return parse_network(text); },
              "the network must follow the nodes/edges/source/sink schema");
}

MetricLoad load_metric_file(const std::string& path) {
  const std::string text = read_file(path);
  return load([&] { return load_metrics(text); },
              "metrics CSV header: name,scope,node_id,value,orientation,weight,min,max");
}

Scenario load_scenario(const std::string& path) {
  const std::string text = read_file(path);
  return load([&] { return parse_scenario(text); },
              "the scenario must follow the regions/phases schema");
}

// Networks shipped without flows are evaluated at their max-flow operating point.
FlowNetwork operating_point(const FlowNetwork& net) {
  const bool carries_flow = std::any_of(net.edges().begin(), net.edges().end(),
                                        [](const Edge& e) { return e.flow != 0.0; });
  return carries_flow ? net : net.with_flows(max_flow(net).flows);
}

std::optional<double> try_score(double (*score)(std::span<const MetricRecord>),
                                std::span<const MetricRecord> records) {
  try {
    return score(records);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoMicroMetrics || e.code() == ErrorCode::NoMacroMetrics) {
      return std::nullopt;
    }
    throw;
  }
}

ReliabilityProfile profile_for(const FlowNetwork& net, std::span<const MetricRecord> records) {
  std::vector<NodeId> ids;
  for (const auto& n : net.nodes()) ids.push_back(n.id);
  return node_reliability(records, ids);
}

std::vector<Violation> rule_violations(const FlowNetwork& net) {
  std::vector<Violation> all = check_capacity(net);
  for (auto& v : check_skew_symmetry(net)) all.push_back(std::move(v));
  for (auto& v : check_conservation(net)) all.push_back(std::move(v));
  return all;
}

double param(const std::optional<double>& value, double fallback) {
  return value.value_or(fallback);
}

void run_validate(const RunConfig& config, KdiReport& report) {
  const auto net = load_network(required(config.network_path, "--network", config.command));
  report.violations = rule_violations(net);
  report.level_summaries = check_level_conservation(net);
  report.stressed_nodes =
      stressed_nodes(net, param(config.parameters.threshold, kDefaultStressThreshold));
}

void run_max_flow(const RunConfig& config, KdiReport& report) {
  const auto net = load_network(required(config.network_path, "--network", config.command));
  report.max_flow = max_flow(net);
}

KdiScore score_metrics(const MetricLoad& metrics, double micro_weight) {
  const auto micro = try_score(&micro_kdi, metrics.records);
  const auto macro = try_score(&macro_kdi, metrics.records);
  if (!micro && !macro) {
    throw Error(ErrorCode::NoMicroMetrics, "metrics contain no OrgMicro or RegionMacro records");
  }
  return kdi_score(micro, macro, micro_weight);
}

void run_kdi(const RunConfig& config, KdiReport& report) {
  const auto metrics =
      load_metric_file(required(config.metrics_path, "--metrics", config.command));
  report.warnings = metrics.warnings;
  report.kdi = score_metrics(metrics, param(config.parameters.micro_weight, kDefaultMicroWeight));
}

void run_onboard(const RunConfig& config, KdiReport& report) {
  const auto& p = config.parameters;
  const auto net = operating_point(
      load_network(required(config.network_path, "--network", config.command)));
  const auto metrics =
      load_metric_file(required(config.metrics_path, "--metrics", config.command));
  report.warnings = metrics.warnings;
  if (!p.level) config_error("simulate-onboard requires --level", "pass --level N");

  const auto profile = load([&] { return profile_for(net, metrics.records); },
                            "node-scoped metrics must name nodes of the network");
  const auto plan = select_overload_set(profile, net, param(p.quota, kDefaultQuota),
                                        param(p.capacity_factor, kDefaultCapacityFactor));
  const auto grown = onboard(net, plan, p.new_nodes.value_or(1), *p.level);
  report.overload_plan = plan;
  report.network = grown;
  report.violations = check_two_tier(grown, plan);
  report.superfamilies = detect_superfamilies(profile, net);
  report.perturbation = absorb_perturbation(grown, plan, param(p.magnitude, 0.0));
}

DamageOutcome damage_for(const RunConfig& config, const FlowNetwork& net) {
  const auto& p = config.parameters;
  if (!p.attack_entry) config_error("an attack needs --attack-entry", "pass --attack-entry NODE");
  if (!p.magnitude) config_error("an attack needs --magnitude", "pass --magnitude F");
  return divert_damage(net, *p.attack_entry, *p.magnitude, p.protected_clearance.value_or(0));
}

void run_damage(const RunConfig& config, KdiReport& report) {
  const auto net = load_network(required(config.network_path, "--network", config.command));
  report.damage = damage_for(config, net);
}

void add_dispersion(const Scenario& scenario, const RunConfig& config, KdiReport& report) {
  std::map<std::string, DispersionTimeline> timelines;
  std::map<std::string, RegionSummary> regions;
  for (const auto& region : scenario.regions) {
    if (timelines.contains(region.name)) {
      throw RunError(RunErrorKind::Schema, "duplicate region name '" + region.name + "'",
                     "region names must be unique");
    }
    timelines[region.name] = simulate_phases(region, scenario.phases);
    regions[region.name] =
        RegionSummary{classify_interest_sets(region), try_score(&macro_kdi, region.macro_records)};
  }
  report.timeline = std::move(timelines);
  report.regions = std::move(regions);
  if (config.parameters.objective) {
    report.selected_region = select_region(scenario.regions, *config.parameters.objective);
  }
}

void run_dispersion(const RunConfig& config, KdiReport& report) {
  const auto scenario =
      load_scenario(required(config.scenario_path, "--scenario", config.command));
  add_dispersion(scenario, config, report);
}

void run_full_report(const RunConfig& config, KdiReport& report) {
  const auto& p = config.parameters;
  const auto net = load_network(required(config.network_path, "--network", config.command));
  const auto metrics =
      load_metric_file(required(config.metrics_path, "--metrics", config.command));
  report.warnings = metrics.warnings;

  report.violations = rule_violations(net);
  report.level_summaries = check_level_conservation(net);
  report.stressed_nodes = stressed_nodes(net, param(p.threshold, kDefaultStressThreshold));
  report.max_flow = max_flow(net);
  report.kdi = score_metrics(metrics, param(p.micro_weight, kDefaultMicroWeight));

  const auto profile = load([&] { return profile_for(net, metrics.records); },
                            "node-scoped metrics must name nodes of the network");
  report.superfamilies = detect_superfamilies(profile, net);
  report.overload_plan = select_overload_set(profile, operating_point(net),
                                             param(p.quota, kDefaultQuota),
                                             param(p.capacity_factor, kDefaultCapacityFactor));
  if (p.attack_entry) report.damage = damage_for(config, net);
  if (config.scenario_path) add_dispersion(load_scenario(*config.scenario_path), config, report);
}

// --- serialization -------------------------------------------------------

json number_or_null(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

json to_json(const Violation& v) {
  return {{"rule", std::string(to_string(v.rule))},
          {"subject", v.subject},
          {"detail", v.detail},
          {"magnitude", v.magnitude}};
}

json to_json(std::vector<Violation> violations) {
  std::sort(violations.begin(), violations.end(), [](const Violation& a, const Violation& b) {
    const auto ra = to_string(a.rule);
    const auto rb = to_string(b.rule);
    if (ra != rb) return ra < rb;
    return a.subject < b.subject;
  });
  json out = json::array();
  for (const auto& v : violations) out.push_back(to_json(v));
  return out;
}

json to_json(const LevelFlowSummary& s) {
  json through = json::object();
  for (const auto& [id, value] : s.throughflow) through[id] = value;
  return {{"level", s.level},
          {"throughflow", through},
          {"k", number_or_null(s.k)},
          {"violations", to_json(s.violations)}};
}

json to_json(const MaxFlowResult& r) {
  json flows = json::array();
  for (const auto& [key, value] : r.flows) {
    flows.push_back({{"from", key.first}, {"to", key.second}, {"flow", value}});
  }
  json cut = json::array();
  for (const auto& [from, to] : r.min_cut) cut.push_back({{"from", from}, {"to", to}});
  return {{"value", r.value}, {"flows", flows}, {"min_cut", cut}};
}

json to_json(const OverloadPlan& plan) {
  json members = json::array();
  for (const auto& m : plan.overloaded) {
    members.push_back({{"id", m.id}, {"level", m.level}, {"reliability", m.reliability}});
  }
  json tiers = json::array();
  for (const auto& [level, t] : plan.tier_constants) {
    tiers.push_back({{"level", level}, {"k_reliable", t.k_reliable}, {"k_pseudo", t.k_pseudo}});
  }
  return {{"capacity_factor", plan.capacity_factor},
          {"overloaded", members},
          {"tier_constants", tiers}};
}

json to_json(const PerturbationReport& r) {
  json absorbers = json::object();
  for (const auto& [id, amount] : r.absorbers) absorbers[id] = amount;
  return {{"injected", r.injected},
          {"absorbed", r.absorbed},
          {"residual", r.residual},
          {"absorbers", absorbers}};
}

json to_json(const DamageOutcome& d) {
  return {{"attack_magnitude", d.attack_magnitude},
          {"diverted_to_pseudo", d.diverted_to_pseudo},
          {"reached_protected", d.reached_protected},
          {"protected_clearance", d.protected_clearance},
          {"exposed", d.exposed}};
}

json to_json(const SuperFamily& f) {
  return {{"level", f.level}, {"members", f.members}, {"score_threshold", f.score_threshold}};
}

json to_json(const KdiScore& k) {
  return {{"micro", number_or_null(k.micro)},
          {"macro", number_or_null(k.macro)},
          {"composite", number_or_null(k.composite)}};
}

json to_json(const RunConfig& c) {
  const auto& p = c.parameters;
  auto opt_text = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
  auto opt_int = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  json parameters = {
      {"threshold", param(p.threshold, kDefaultStressThreshold)},
      {"quota", param(p.quota, kDefaultQuota)},
      {"capacity_factor", param(p.capacity_factor, kDefaultCapacityFactor)},
      {"micro_weight", param(p.micro_weight, kDefaultMicroWeight)},
      {"seed", p.seed.value_or(0)},
      {"level", opt_int(p.level)},
      {"new_nodes", p.new_nodes.value_or(1)},
      {"magnitude", number_or_null(p.magnitude)},
      {"attack_entry", opt_text(p.attack_entry)},
      {"protected_clearance", p.protected_clearance.value_or(0)},
      {"objective", opt_text(p.objective)},
  };
  return {{"command", std::string(to_string(c.command))},
          {"network_path", opt_text(c.network_path)},
          {"metrics_path", opt_text(c.metrics_path)},
          {"scenario_path", opt_text(c.scenario_path)},
          {"parameters", parameters}};
}

template <typename T>
json optional_json(const std::optional<T>& value) {
  return value ? to_json(*value) : json(nullptr);
}

template <typename T>
json list_json(const std::optional<std::vector<T>>& values) {
  if (!values) return nullptr;
  json out = json::array();
  for (const auto& v : *values) out.push_back(to_json(v));
  return out;
}

void check_parameters(const RunParameters& p) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (p.threshold && !(*p.threshold > 0.0 && *p.threshold <= 1.0)) {
    config_error("--threshold must lie in (0, 1]", "try --threshold 0.9");
  }
  if (p.quota && !(*p.quota > 0.0 && *p.quota <= 1.0)) {
    config_error("--quota must lie in (0, 1]", "try --quota 0.2");
  }
  if (p.capacity_factor && !(*p.capacity_factor > 1.0)) {
    config_error("--capacity-factor must exceed 1", "try --capacity-factor 1.5");
  }
  if (p.micro_weight && !in_unit(*p.micro_weight)) {
    config_error("--micro-weight must lie in [0, 1]", "try --micro-weight 0.5");
  }
  if (p.new_nodes && *p.new_nodes < 1) {
    config_error("--new-nodes must be at least 1", "try --new-nodes 1");
  }
  if (p.magnitude && !(*p.magnitude >= 0.0)) {
    config_error("--magnitude must be non-negative", "try --magnitude 0");
  }
}

}  // namespace

KdiReport run(const RunConfig& config) {
  check_parameters(config.parameters);
  KdiReport report;
  report.config_echo = config;
  try {
    switch (config.command) {
      case Command::Validate: run_validate(config, report); break;
      case Command::MaxFlow: run_max_flow(config, report); break;
      case Command::Kdi: run_kdi(config, report); break;
      case Command::SimulateOnboard: run_onboard(config, report); break;
      case Command::SimulateDamage: run_damage(config, report); break;
      case Command::SimulateDispersion: run_dispersion(config, report); break;
      case Command::Report: run_full_report(config, report); break;
    }
  } catch (const Error& e) {
    throw RunError(RunErrorKind::Domain, describe(e),
                   "the inputs are well-formed but the requested analysis does not apply");
  }
  return report;
}

json report_to_json(const KdiReport& r) {
  json timeline = nullptr;
  if (r.timeline) {
    timeline = json::object();
    for (const auto& [region, t] : *r.timeline) {
      json phases = json::array();
      for (const auto& [phase, reach] : t.reach) {
        phases.push_back({{"phase", std::string(to_string(phase))}, {"reach", reach}});
      }
      timeline[region] = phases;
    }
  }
  json regions = nullptr;
  if (r.regions) {
    regions = json::object();
    for (const auto& [name, summary] : *r.regions) {
      json sets = json::array();
      for (const auto& s : summary.interest_sets) {
        sets.push_back({{"tag", s.tag}, {"members", s.members}});
      }
      regions[name] = {{"interest_sets", sets}, {"macro_kdi", number_or_null(summary.macro_kdi)}};
    }
  }
  json selection = nullptr;
  if (r.selected_region) {
    selection = {{"objective", *r.config_echo.parameters.objective}, {"region", *r.selected_region}};
  }

  return {
      {"kdi", optional_json(r.kdi)},
      {"violations", r.violations ? to_json(*r.violations) : json(nullptr)},
      {"level_summaries", list_json(r.level_summaries)},
      {"superfamilies", list_json(r.superfamilies)},
      {"stressed_nodes", r.stressed_nodes ? json(*r.stressed_nodes) : json(nullptr)},
      {"perturbation", optional_json(r.perturbation)},
      {"damage", optional_json(r.damage)},
      {"timeline", timeline},
      {"regions", regions},
      {"region_selection", selection},
      {"max_flow", optional_json(r.max_flow)},
      {"overload_plan", optional_json(r.overload_plan)},
      {"network", r.network ? network_to_json(*r.network) : json(nullptr)},
      {"warnings", r.warnings},
      {"tool_version", r.tool_version},
      {"config_echo", to_json(r.config_echo)},
  };
}

std::string emit_report(const KdiReport& report) { return canonical_json(report_to_json(report)); }

std::string emit_error(const RunError& error) {
  return canonical_json({{"code", std::string(to_string(error.kind()))},
                         {"message", error.what()},
                         {"hint", error.hint()}});
}

}  // namespace kdiflow
