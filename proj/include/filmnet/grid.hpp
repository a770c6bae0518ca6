#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "filmnet/graph.hpp"

namespace filmnet {

/// A face joins two neighbouring grid nodes on one edge. `left` is the node
/// nearer the edge tail.
struct Face {
  std::size_t left = 0;
  std::size_t right = 0;
  std::size_t edge = 0;
  double spacing = 0.0;  // Δx_j
  double weight = 1.0;   // d_j
};

/// Node-centred grid on a metric graph. Each edge j carries N_j uniform
/// cells of width ℓ_j/N_j; the N_j - 1 interior nodes are private to the
/// edge and both end nodes are the shared vertex unknowns.
///
/// Global layout: vertex unknowns 0..|V|-1, then the interior nodes of each
/// edge in edge order, running tail to head.
class GraphGrid {
 public:
  GraphGrid(MetricGraph graph, std::vector<std::size_t> cells);
  GraphGrid(MetricGraph graph, std::size_t cells_per_edge);

  const MetricGraph& graph() const noexcept { return graph_; }
  std::size_t size() const noexcept { return measure_.size(); }

  std::size_t cells(std::size_t edge) const { return cells_.at(edge); }
  const std::vector<std::size_t>& cells() const noexcept { return cells_; }
  double spacing(std::size_t edge) const { return spacing_.at(edge); }

  /// Global index of node k ∈ [0, N_j] on edge j (k = 0 is the tail vertex).
  std::size_t node(std::size_t edge, std::size_t k) const;
  std::size_t vertex_node(std::size_t vertex) const { return vertex; }

  /// Measure-weighted control volume of each unknown (d_j Δx_j for interior
  /// nodes, Σ d_j Δx_j / 2 over incident edges for vertices).
  const Eigen::VectorXd& measure() const noexcept { return measure_; }
  double total_measure() const { return measure_.sum(); }

  const std::vector<Face>& faces() const noexcept { return faces_; }

  /// Values of u along one edge, tail to head (N_j + 1 entries).
  std::vector<double> edge_values(const Eigen::VectorXd& u, std::size_t edge) const;

 private:
  MetricGraph graph_;
  std::vector<std::size_t> cells_;
  std::vector<double> spacing_;
  std::vector<std::size_t> offset_;
  Eigen::VectorXd measure_;
  std::vector<Face> faces_;
};

/// Measure-weighted inner product and sums.
double weighted_sum(const GraphGrid& grid, const Eigen::VectorXd& v);
double weighted_dot(const GraphGrid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace filmnet
