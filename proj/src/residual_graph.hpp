#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace kdiflow::detail {

// Residual network for shortest-augmenting-path max-flow. Vertices are dense
// indices; callers map node ids onto them in canonical order so that the
// breadth-first search breaks ties by id.
class ResidualGraph {
 public:
  explicit ResidualGraph(std::size_t vertex_count) : adjacency_(vertex_count) {}

  std::size_t vertex_count() const noexcept { return adjacency_.size(); }

  // Returns the id of the forward arc; its paired reverse arc starts empty.
  std::size_t add_arc(std::size_t from, std::size_t to, double capacity);

  // Pushes up to `limit` units from `source` to `target`; returns the amount.
  double augment(std::size_t source, std::size_t target,
                 double limit = std::numeric_limits<double>::infinity());

  double flow(std::size_t arc) const noexcept {
    return arcs_[arc].capacity - arcs_[arc].residual;
  }
  double residual(std::size_t arc) const noexcept { return arcs_[arc].residual; }

  // Vertices reachable from `origin` through arcs with positive residual.
  std::vector<bool> reachable_from(std::size_t origin) const;

 private:
  struct Arc {
    std::size_t to;
    std::size_t pair;
    double capacity;
    double residual;
    bool reverse;
  };

  void order_adjacency();

  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Arc> arcs_;
  bool ordered_ = false;
};

inline constexpr double kResidualEpsilon = 1e-12;

}  // namespace kdiflow::detail
