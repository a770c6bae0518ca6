#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "filmnet/config.hpp"
#include "filmnet/grid.hpp"

namespace filmnet {

/// Value of a profile at edge-local s ∈ [0, 1]. `seed` is the effective
/// seed for random profiles (already mixed with the edge index).
double evaluate_profile(const InitialProfile& profile, double s, std::uint64_t seed);

/// Samples at the N_j + 1 nodes of one edge, tail to head.
std::vector<double> initial_profile(const InitialProfile& profile, const GraphGrid& grid, std::size_t edge,
                                    std::uint64_t run_seed = 0);

/// Assembles the global initial vector. Shared vertex values are the mean of
/// the incident edge end values; a spread above 1e-12 throws ConfigError, as
/// does any negative sample.
Eigen::VectorXd build_initial_state(const RunSpec& spec, const GraphGrid& grid);

}  // namespace filmnet
