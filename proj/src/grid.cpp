#include "filmnet/grid.hpp"

#include <string>

#include "filmnet/errors.hpp"

namespace filmnet {

GraphGrid::GraphGrid(MetricGraph graph, std::size_t cells_per_edge)
    : GraphGrid(graph, std::vector<std::size_t>(graph.edge_count(), cells_per_edge)) {}

GraphGrid::GraphGrid(MetricGraph graph, std::vector<std::size_t> cells)
    : graph_(std::move(graph)), cells_(std::move(cells)) {
  if (cells_.size() != graph_.edge_count())
    throw GraphError("cell counts given for " + std::to_string(cells_.size()) + " edges, graph has " +
                     std::to_string(graph_.edge_count()));
  std::size_t total = graph_.vertex_count();
  for (std::size_t e = 0; e < cells_.size(); ++e) {
    if (cells_[e] < 3)
      throw GraphError("edge '" + graph_.edge_ids()[e] + "' needs at least 3 cells, got " +
                       std::to_string(cells_[e]));
    spacing_.push_back(graph_.edge(e).length / static_cast<double>(cells_[e]));
    offset_.push_back(total);
    total += cells_[e] - 1;
  }

  measure_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
  for (std::size_t e = 0; e < cells_.size(); ++e) {
    const Edge& edge = graph_.edge(e);
    const double h = spacing_[e];
    for (std::size_t k = 0; k < cells_[e]; ++k) {
      const std::size_t l = node(e, k);
      const std::size_t r = node(e, k + 1);
      faces_.push_back({l, r, e, h, edge.weight});
      // Each face contributes half of its cell to either neighbour.
      measure_[static_cast<Eigen::Index>(l)] += 0.5 * edge.weight * h;
      measure_[static_cast<Eigen::Index>(r)] += 0.5 * edge.weight * h;
    }
  }
}

std::size_t GraphGrid::node(std::size_t edge, std::size_t k) const {
  const std::size_t n = cells_.at(edge);
  if (k == 0) return graph_.edge(edge).tail;
  if (k == n) return graph_.edge(edge).head;
  if (k > n) throw std::out_of_range("node index past edge end");
  return offset_[edge] + k - 1;
}

std::vector<double> GraphGrid::edge_values(const Eigen::VectorXd& u, std::size_t edge) const {
  std::vector<double> out(cells_.at(edge) + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = u[static_cast<Eigen::Index>(node(edge, k))];
  return out;
}

double weighted_sum(const GraphGrid& grid, const Eigen::VectorXd& v) {
  return grid.measure().dot(v);
}

double weighted_dot(const GraphGrid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (grid.measure().array() * a.array() * b.array()).sum();
}

}  // namespace filmnet
