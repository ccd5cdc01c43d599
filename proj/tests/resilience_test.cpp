#include <algorithm>
#include <random>

#include "doctest.h"
#include "kdiflow/resilience.hpp"
#include "support.hpp"

using namespace kdiflow;
using namespace kdiflow::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::SchemaError;
}

// a, b, c at level 1, each carrying 4 units from s to t.
FlowNetwork trio() {
  return build_network({node("s", 0, NodeKind::Source), node("a", 1), node("b", 1), node("c", 1),
                        node("t", 2, NodeKind::Sink)},
                       {edge("s", "a", 10, 4), edge("s", "b", 10, 4), edge("s", "c", 10, 4),
                        edge("a", "t", 10, 4), edge("b", "t", 10, 4), edge("c", "t", 10, 4)},
                       "s", "t");
}

ReliabilityProfile trio_profile() { return ReliabilityProfile{{{"a", 0.9}, {"b", 0.5}, {"c", 0.4}}}; }

std::vector<NodeId> ids(const OverloadPlan& plan) {
  std::vector<NodeId> out;
  for (const auto& m : plan.overloaded) out.push_back(m.id);
  return out;
}

// One level of scored nodes, named n0, n1, ... in the given order.
std::pair<FlowNetwork, ReliabilityProfile> scored_level(const std::vector<double>& scores) {
  std::vector<Node> nodes{node("s", 0, NodeKind::Source), node("t", 2, NodeKind::Sink)};
  std::vector<Edge> edges;
  ReliabilityProfile profile;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::string id = "n" + std::to_string(i);
    nodes.push_back(node(id, 1));
    edges.push_back(edge("s", id, 1));
    edges.push_back(edge(id, "t", 1));
    profile.scores[id] = scores[i];
  }
  return {build_network(nodes, edges, "s", "t"), profile};
}

std::vector<NodeId> members(const std::vector<SuperFamily>& families) {
  std::vector<NodeId> out;
  for (const auto& f : families) out.insert(out.end(), f.members.begin(), f.members.end());
  std::sort(out.begin(), out.end());
  return out;
}

// e enters at level 1 and can reach the protected node c or the pseudo node p.
FlowNetwork damage_fixture(double pseudo_inbound = 5.0) {
  return build_network({node("s", 0, NodeKind::Source), node("e", 1), node("p", 1, NodeKind::Pseudo, 0),
                        node("c", 2, NodeKind::Regular, 3), node("t", 3, NodeKind::Sink)},
                       {edge("s", "e", 10), edge("e", "p", pseudo_inbound), edge("e", "c", 10),
                        edge("c", "t", 10)},
                       "s", "t");
}

// The diversion subgraph on its own: attacker -> e -> p -> absorber.
double diversion_oracle(double magnitude, double pseudo_inbound) {
  const auto sub = build_network(
      {node("A", 0, NodeKind::Source), node("e", 1), node("p", 2), node("Z", 3, NodeKind::Sink)},
      {edge("A", "e", magnitude), edge("e", "p", pseudo_inbound), edge("p", "Z", pseudo_inbound)},
      "A", "Z");
  return brute_force_min_cut(sub);
}

}  // namespace

TEST_CASE("select_overload_set") {
  const auto net = trio();
  const auto plan = select_overload_set(trio_profile(), net, 0.34);
  CHECK(ids(plan) == std::vector<NodeId>{"a"});
  CHECK(plan.capacity_factor == 1.5);
  CHECK(plan.tier_constants.at(1).k_reliable == 4.0);
  CHECK(plan.tier_constants.at(1).k_pseudo == 2.0);

  CHECK(ids(select_overload_set(trio_profile(), net, 1.0)) ==
        std::vector<NodeId>{"a", "b", "c"});
  CHECK(ids(select_overload_set(trio_profile(), net, 0.67)) == std::vector<NodeId>{"a", "b"});

  CHECK(code_of([&] { select_overload_set(trio_profile(), net, 0.0); }) == ErrorCode::InvalidQuota);
  CHECK(code_of([&] { select_overload_set(trio_profile(), net, 1.2); }) == ErrorCode::InvalidQuota);
  CHECK(code_of([&] { select_overload_set(ReliabilityProfile{{{"a", 1}}}, net, 0.5); }) ==
        ErrorCode::MissingReliability);
  const auto bare = build_network({node("s", 0, NodeKind::Source), node("t", 1, NodeKind::Sink)},
                                  {}, "s", "t");
  CHECK(code_of([&] { select_overload_set({}, bare, 0.5); }) == ErrorCode::EmptyNetwork);
}

TEST_CASE("select_overload_set breaks ties by id and ignores input order") {
  ReliabilityProfile flat{{{"a", 0.7}, {"b", 0.7}, {"c", 0.7}}};
  CHECK(ids(select_overload_set(flat, trio(), 0.34)) == std::vector<NodeId>{"a"});

  const auto base = trio();
  std::vector<Node> nodes(base.nodes().begin(), base.nodes().end());
  std::vector<Edge> edges(base.edges().begin(), base.edges().end());
  std::mt19937 rng(1);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::shuffle(edges.begin(), edges.end(), rng);
    const auto shuffled = build_network(nodes, edges, "s", "t");
    CHECK(ids(select_overload_set(trio_profile(), shuffled, 0.67)) ==
          std::vector<NodeId>{"a", "b"});
  }
}

TEST_CASE("onboard one pseudo node under a single sponsor") {
  const auto net = trio();
  const auto plan = select_overload_set(trio_profile(), net, 0.34);
  const auto grown = onboard(net, plan, 1, 1);
  const Node& p = grown.node("pseudo-1");
  CHECK(p.kind == NodeKind::Pseudo);
  CHECK(grown.find_edge("a", "pseudo-1")->capacity == 2.0);
  CHECK(grown.find_edge("b", "pseudo-1") == nullptr);
  CHECK(grown.find_edge("s", "a")->capacity == 15.0);
  CHECK(grown.find_edge("s", "b")->capacity == 10.0);
  CHECK(check_two_tier(grown, plan).empty());
  CHECK(max_flow(grown).value >= max_flow(net).value);
}

TEST_CASE("onboard three pseudo nodes under two sponsors") {
  const auto net = trio();
  const auto plan = select_overload_set(trio_profile(), net, 0.67);
  const auto grown = onboard(net, plan, 3, 1);
  for (const char* id : {"pseudo-1", "pseudo-2", "pseudo-3"}) {
    CHECK(grown.find_edge("a", id) != nullptr);
    CHECK(grown.find_edge("b", id) != nullptr);
    CHECK(grown.find_edge("c", id) == nullptr);
  }
  CHECK(code_of([&] { onboard(net, plan, 1, 2); }) == ErrorCode::NoSponsorsAtLevel);
  CHECK(code_of([&] { onboard(net, plan, 0, 1); }) == ErrorCode::OutOfRange);
}

TEST_CASE("check_two_tier flags an overfed pseudo node") {
  const auto plan = select_overload_set(trio_profile(), trio(), 0.34);
  auto grown = onboard(trio(), plan, 1, 1);
  EdgeFlows flows;
  for (const auto& e : grown.edges()) flows[{e.from, e.to}] = e.flow;
  flows[{"a", "pseudo-1"}] = 3.0;
  const auto violations = check_two_tier(grown.with_flows(flows), plan);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].subject == std::vector<NodeId>{"pseudo-1"});
  CHECK(violations[0].magnitude == doctest::Approx(1.0));
}

TEST_CASE("onboarding never lowers the max-flow value") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomNetworkOptions opt;
  opt.min_nodes = 4;
  for (int trial = 0; trial < 60; ++trial) {
    auto net = random_network(rng, opt);
    net = net.with_flows(max_flow(net).flows);
    ReliabilityProfile profile;
    for (const auto& n : net.nodes()) profile.scores[n.id] = unit(rng);
    const auto plan = select_overload_set(profile, net, 0.5);
    const auto grown = onboard(net, plan, 2, 1);
    CHECK(max_flow(grown).value >= max_flow(net).value - 1e-9);
  }
}

TEST_CASE("absorb_perturbation fills the most reliable spare first") {
  // a: 7 of 10 used (spare 3); b: 8 of 10 used (spare 2).
  const auto net = build_network(
      {node("s", 0, NodeKind::Source), node("a", 1), node("b", 1), node("t", 2, NodeKind::Sink)},
      {edge("s", "a", 10, 7), edge("s", "b", 10, 8), edge("a", "t", 10, 7), edge("b", "t", 10, 8)},
      "s", "t");
  OverloadPlan plan;
  plan.overloaded = {{"a", 1, 0.9}, {"b", 1, 0.5}};

  const auto four = absorb_perturbation(net, plan, 4);
  CHECK(four.absorbed == 4.0);
  CHECK(four.residual == 0.0);
  CHECK(four.absorbers.at("a") == 3.0);
  CHECK(four.absorbers.at("b") == 1.0);

  const auto ten = absorb_perturbation(net, plan, 10);
  CHECK(ten.absorbed == 5.0);
  CHECK(ten.residual == 5.0);

  const auto none = absorb_perturbation(net, plan, 0);
  CHECK(none.absorbed == 0.0);
  CHECK(none.residual == 0.0);

  CHECK(code_of([&] { absorb_perturbation(net, plan, -1); }) == ErrorCode::NegativeMagnitude);
}

TEST_CASE("absorb_perturbation accounting on random plans") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    std::vector<Node> nodes{node("s", 0, NodeKind::Source), node("t", 2, NodeKind::Sink)};
    std::vector<Edge> edges;
    OverloadPlan plan;
    std::vector<std::pair<double, std::string>> ranked;
    std::map<std::string, double> spare;
    for (int i = 0; i < n; ++i) {
      const std::string id = "o" + std::to_string(i);
      const double cap = 10.0 * unit(rng);
      const double used = cap * unit(rng);
      nodes.push_back(node(id, 1));
      edges.push_back(edge("s", id, cap, used));
      edges.push_back(edge(id, "t", cap, used));
      const double r = unit(rng);
      plan.overloaded.push_back({id, 1, r});
      ranked.emplace_back(-r, id);
      spare[id] = cap - used;
    }
    const auto net = build_network(nodes, edges, "s", "t");
    const double magnitude = 30.0 * unit(rng);
    const auto report = absorb_perturbation(net, plan, magnitude);

    CHECK(report.absorbed + report.residual == report.injected);
    CHECK(report.injected == magnitude);
    CHECK(report.absorbed >= 0.0);
    CHECK(report.residual >= 0.0);

    std::sort(ranked.begin(), ranked.end());
    std::vector<double> spares;
    for (const auto& [neg, id] : ranked) spares.push_back(spare[id]);
    const auto fills = greedy_fill(spares, magnitude);
    double expected = 0.0;
    for (std::size_t i = 0; i < fills.size(); ++i) {
      expected += fills[i];
      const auto it = report.absorbers.find(ranked[i].second);
      const double got = it == report.absorbers.end() ? 0.0 : it->second;
      CHECK(got == doctest::Approx(fills[i]).epsilon(1e-12));
      CHECK(got <= spare[ranked[i].second] + 1e-12);
    }
    CHECK(report.absorbed == doctest::Approx(std::min(magnitude, expected)).epsilon(1e-12));
  }
}

TEST_CASE("detect_superfamilies picks out the high outlier") {
  // median 0.51; deviations 0.01, 0.01, 0.03, 0.44 give MAD 0.02;
  // z(0.95) = 0.6745 * 0.44 / 0.02 = 14.839, z(0.52) = 0.337.
  const auto [net, profile] = scored_level({0.50, 0.52, 0.48, 0.95});
  const auto families = detect_superfamilies(profile, net);
  REQUIRE(families.size() == 1);
  CHECK(families[0].level == 1);
  CHECK(families[0].members == std::vector<NodeId>{"n3"});
  CHECK(families[0].score_threshold == doctest::Approx(0.51 + 3.5 * 0.02 / 0.6745));
  for (const auto& id : families[0].members) {
    CHECK(*profile.score(id) > families[0].score_threshold);
  }
}

TEST_CASE("detect_superfamilies on flat and small levels") {
  {
    const auto [net, profile] = scored_level({0.6, 0.6, 0.6, 0.6});
    CHECK(detect_superfamilies(profile, net).empty());
  }
  {
    const auto [net, profile] = scored_level({0.1, 0.99});
    CHECK(detect_superfamilies(profile, net).empty());
  }
  {
    const auto [net, profile] = scored_level({0.5, 0.5, 0.5, 0.95});
    CHECK(members(detect_superfamilies(profile, net)) == std::vector<NodeId>{"n3"});
  }
  {
    const auto [net, profile] = scored_level({0.5, 0.5, 0.5, 0.7});
    CHECK(detect_superfamilies(profile, net).empty());
  }
}

TEST_CASE("superfamily membership is stable under reordering and median insertion") {
  std::mt19937 rng(2718);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(3, 9);
  int with_family = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> scores;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) scores.push_back(0.4 + 0.1 * unit(rng));
    if (trial % 2 == 0) scores.push_back(0.7 + 0.3 * unit(rng));
    const auto [net, profile] = scored_level(scores);
    const auto base = members(detect_superfamilies(profile, net));
    with_family += !base.empty();

    // Same scores under a different naming order.
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> permuted;
    for (std::size_t i : order) permuted.push_back(scores[i]);
    const auto [pnet, pprofile] = scored_level(permuted);
    std::vector<NodeId> mapped;
    for (const auto& id : members(detect_superfamilies(pprofile, pnet))) {
      mapped.push_back("n" + std::to_string(order[std::stoul(id.substr(1))]));
    }
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == base);

    auto sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double median =
        sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    auto grown_scores = scores;
    grown_scores.push_back(median);
    const auto [gnet, gprofile] = scored_level(grown_scores);
    const auto grown = members(detect_superfamilies(gprofile, gnet));
    for (const auto& id : base) {
      CHECK(std::find(grown.begin(), grown.end(), id) != grown.end());
    }
  }
  CHECK(with_family > 0);
}

TEST_CASE("divert_damage against the diversion subgraph") {
  const auto net = damage_fixture();
  const std::vector<double> magnitudes{0, 3, 5, 8};
  const std::vector<double> expected{0, 3, 5, 5};
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    const auto outcome = divert_damage(net, "e", magnitudes[i], 2);
    CHECK(diversion_oracle(magnitudes[i], 5) == expected[i]);
    CHECK(outcome.diverted_to_pseudo == expected[i]);
    CHECK(outcome.attack_magnitude == magnitudes[i]);
    CHECK(outcome.diverted_to_pseudo + outcome.reached_protected == outcome.attack_magnitude);
  }
  const auto heavy = divert_damage(net, "e", 8, 2);
  CHECK(heavy.reached_protected == 3.0);
  CHECK(heavy.exposed == std::vector<NodeId>{"c"});
  CHECK(divert_damage(net, "e", 3, 2).exposed.empty());
}

TEST_CASE("divert_damage preconditions") {
  CHECK(code_of([] { divert_damage(damage_fixture(), "ghost", 1, 0); }) ==
        ErrorCode::UnknownNode);
  CHECK(code_of([] { divert_damage(damage_fixture(), "e", -1, 0); }) ==
        ErrorCode::NegativeMagnitude);
  CHECK(code_of([] { divert_damage(diamond(), "a", 1, 0); }) == ErrorCode::NoPseudoNodes);
}

TEST_CASE("diversion grows with pseudo inbound capacity") {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomNetworkOptions opt;
  opt.min_nodes = 4;
  for (int trial = 0; trial < 80; ++trial) {
    const auto net = random_network(rng, opt);
    const auto sponsors = net.nodes_at_level(1);
    const double magnitude = 20.0 * unit(rng);
    double previous = -1.0;
    for (double cap : {0.0, 1.0, 2.5, 6.0, 50.0}) {
      const auto grown = add_pseudo_node(net, 1, sponsors, cap, cap, "p");
      const auto outcome = divert_damage(grown, "s", magnitude, 0);
      CHECK(outcome.diverted_to_pseudo + outcome.reached_protected == magnitude);
      CHECK(outcome.diverted_to_pseudo <= magnitude);
      CHECK(outcome.diverted_to_pseudo >= previous);
      previous = outcome.diverted_to_pseudo;
    }
  }
}
