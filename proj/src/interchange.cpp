#include "kdiflow/interchange.hpp"

#include <cmath>
#include <initializer_list>

namespace kdiflow {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }

void only_fields(const json& obj, std::initializer_list<std::string_view> allowed,
                 const std::string& where) {
  if (!obj.is_object()) schema(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto name : allowed) known = known || key == name;
    if (!known) schema(where + ": unknown field '" + key + "'");
  }
}

const json& field(const json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) schema(where + ": missing field '" + name + "'");
  return *it;
}

std::string text(const json& obj, const char* name, const std::string& where) {
  const json& v = field(obj, name, where);
  if (!v.is_string()) schema(where + ": '" + name + "' must be a string");
  return v.get<std::string>();
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) schema(where + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema(where + " must be finite");
  return d;
}

long long integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) schema(where + " must be an integer");
  return v.get<long long>();
}

const json& array(const json& obj, const char* name, const std::string& where) {
  const json& v = field(obj, name, where);
  if (!v.is_array()) schema(where + ": '" + name + "' must be an array");
  return v;
}

json parse_text(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    schema(std::string(what) + " is not valid JSON: " + e.what());
  }
}

}  // namespace

FlowNetwork network_from_json(const json& doc) {
  only_fields(doc, {"nodes", "edges", "source", "sink"}, "network");
  std::vector<Node> nodes;
  for (const auto& item : array(doc, "nodes", "network")) {
    const std::string where = "node #" + std::to_string(nodes.size());
    only_fields(item, {"id", "label", "level", "kind", "clearance", "reliability"}, where);
    Node n;
    n.id = text(item, "id", where);
    n.label = text(item, "label", where);
    n.level = static_cast<int>(integer(field(item, "level", where), where + " level"));
    const auto kind = parse_node_kind(text(item, "kind", where));
    if (!kind) schema(where + ": kind must be Source, Sink, Regular or Pseudo");
    n.kind = *kind;
    n.clearance = static_cast<int>(integer(field(item, "clearance", where), where + " clearance"));
    if (auto r = item.find("reliability"); r != item.end() && !r->is_null()) {
      n.reliability = number(*r, where + " reliability");
    }
    nodes.push_back(std::move(n));
  }
  std::vector<Edge> edges;
  for (const auto& item : array(doc, "edges", "network")) {
    const std::string where = "edge #" + std::to_string(edges.size());
    only_fields(item, {"from", "to", "capacity", "flow"}, where);
    Edge e;
    e.from = text(item, "from", where);
    e.to = text(item, "to", where);
    e.capacity = number(field(item, "capacity", where), where + " capacity");
    if (auto f = item.find("flow"); f != item.end()) e.flow = number(*f, where + " flow");
    edges.push_back(std::move(e));
  }
  return FlowNetwork::build(std::move(nodes), std::move(edges), text(doc, "source", "network"),
                            text(doc, "sink", "network"));
}

FlowNetwork parse_network(std::string_view text) {
  return network_from_json(parse_text(text, "network"));
}

json network_to_json(const FlowNetwork& net) {
  json nodes = json::array();
  for (const auto& n : net.nodes()) {
    json item = {{"id", n.id},
                 {"label", n.label},
                 {"level", n.level},
                 {"kind", std::string(to_string(n.kind))},
                 {"clearance", n.clearance}};
    if (n.reliability) item["reliability"] = *n.reliability;
    nodes.push_back(std::move(item));
  }
  json edges = json::array();
  for (const auto& e : net.edges()) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"capacity", e.capacity}, {"flow", e.flow}});
  }
  return {{"nodes", nodes}, {"edges", edges}, {"source", net.source()}, {"sink", net.sink()}};
}

Scenario scenario_from_json(const json& doc) {
  only_fields(doc, {"regions", "phases"}, "scenario");
  Scenario scenario;
  for (const auto& item : array(doc, "regions", "scenario")) {
    const std::string where = "region #" + std::to_string(scenario.regions.size());
    only_fields(item, {"name", "population", "interests", "channels", "macro_metrics_csv"}, where);
    Region r;
    r.name = text(item, "name", where);
    const long long population = integer(field(item, "population", where), where + " population");
    if (population < 1) schema(where + ": population must be at least 1");
    r.population = static_cast<std::uint64_t>(population);
    const json& interests = field(item, "interests", where);
    if (!interests.is_object()) schema(where + ": interests must be an object");
    for (const auto& [tag, fraction] : interests.items()) {
      r.interests[tag] = number(fraction, where + " interest '" + tag + "'");
    }
    for (const auto& ch : array(item, "channels", where)) {
      only_fields(ch, {"name", "influence"}, where + " channel");
      r.channels.push_back(
          {text(ch, "name", where + " channel"),
           number(field(ch, "influence", where + " channel"), where + " channel influence")});
    }
    if (auto csv = item.find("macro_metrics_csv"); csv != item.end()) {
      if (!csv->is_string()) schema(where + ": macro_metrics_csv must be a string");
      r.macro_records = load_metrics(csv->get<std::string>()).records;
    }
    try {
      r.validate();
    } catch (const Error& e) {
      schema(where + ": " + e.what());
    }
    scenario.regions.push_back(std::move(r));
  }

  const auto defaults = canonical_phases();
  for (const auto& item : array(doc, "phases", "scenario")) {
    const std::string where = "phase #" + std::to_string(scenario.phases.size());
    only_fields(item, {"id", "channels"}, where);
    const auto id = parse_phase_id(text(item, "id", where));
    if (!id) schema(where + ": unknown phase id");
    Phase p{*id, {}, defaults[static_cast<std::size_t>(*id)].duration_label};
    for (const auto& name : array(item, "channels", where)) {
      if (!name.is_string()) schema(where + ": channel names must be strings");
      p.active_channels.push_back(name.get<std::string>());
    }
    scenario.phases.push_back(std::move(p));
  }
  return scenario;
}

Scenario parse_scenario(std::string_view text) {
  return scenario_from_json(parse_text(text, "scenario"));
}

}  // namespace kdiflow
