#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qcomm/linalg.hpp"

namespace qcomm {

/// Result of pairing two equally sized sets: a[i] is paired with
/// b[assignment[i]].
struct Matching {
    std::vector<std::size_t> assignment;
    double max_distance = 0.0;
    double total_distance = 0.0;
};

/// Minimum-total-cost perfect matching on an n x n row-major cost matrix
/// (Hungarian algorithm). When every row's cheapest column is distinct the
/// row minima already form an optimal assignment and are returned directly.
Matching min_cost_matching(std::span<const double> cost, std::size_t n);

/// Optimal pairing by |a - b|.
Matching match_points(std::span<const Complex> a, std::span<const Complex> b);

/// Optimal pairing by Frobenius distance.
Matching match_matrices(std::span<const CMatrix> a, std::span<const CMatrix> b);

}  // namespace qcomm
