#include "residual_graph.hpp"

#include <algorithm>
#include <queue>

namespace kdiflow::detail {

std::size_t ResidualGraph::add_arc(std::size_t from, std::size_t to, double capacity) {
  const std::size_t forward = arcs_.size();
  arcs_.push_back(Arc{to, forward + 1, capacity, capacity, false});
  arcs_.push_back(Arc{from, forward, 0.0, 0.0, true});
  adjacency_[from].push_back(forward);
  adjacency_[to].push_back(forward + 1);
  ordered_ = false;
  return forward;
}

void ResidualGraph::order_adjacency() {
  for (auto& arcs : adjacency_) {
    std::stable_sort(arcs.begin(), arcs.end(), [this](std::size_t a, std::size_t b) {
      if (arcs_[a].to != arcs_[b].to) return arcs_[a].to < arcs_[b].to;
      return !arcs_[a].reverse && arcs_[b].reverse;
    });
  }
  ordered_ = true;
}

double ResidualGraph::augment(std::size_t source, std::size_t target, double limit) {
  if (!ordered_) order_adjacency();
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  double total = 0.0;
  std::vector<std::size_t> via(adjacency_.size());

  while (limit - total > kResidualEpsilon) {
    std::fill(via.begin(), via.end(), none);
    std::vector<bool> seen(adjacency_.size(), false);
    std::queue<std::size_t> frontier;
    frontier.push(source);
    seen[source] = true;
    while (!frontier.empty() && !seen[target]) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t a : adjacency_[u]) {
        const Arc& arc = arcs_[a];
        if (seen[arc.to] || arc.residual <= kResidualEpsilon) continue;
        seen[arc.to] = true;
        via[arc.to] = a;
        frontier.push(arc.to);
      }
    }
    if (!seen[target]) break;

    double bottleneck = limit - total;
    for (std::size_t v = target; v != source; v = arcs_[arcs_[via[v]].pair].to) {
      bottleneck = std::min(bottleneck, arcs_[via[v]].residual);
    }
    for (std::size_t v = target; v != source; v = arcs_[arcs_[via[v]].pair].to) {
      Arc& arc = arcs_[via[v]];
      arc.residual -= bottleneck;
      arcs_[arc.pair].residual += bottleneck;
    }
    total += bottleneck;
  }
  return total;
}

std::vector<bool> ResidualGraph::reachable_from(std::size_t origin) const {
  std::vector<bool> seen(adjacency_.size(), false);
  std::vector<std::size_t> stack{origin};
  seen[origin] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t a : adjacency_[u]) {
      const Arc& arc = arcs_[a];
      if (!seen[arc.to] && arc.residual > kResidualEpsilon) {
        seen[arc.to] = true;
        stack.push_back(arc.to);
      }
    }
  }
  return seen;
}

}  // namespace kdiflow::detail
