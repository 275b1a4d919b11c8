#include "qcomm/matching.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "qcomm/error.hpp"

namespace qcomm {

namespace {

Matching finish(std::span<const double> cost, std::size_t n, std::vector<std::size_t> assignment) {
    Matching m;
    m.assignment = std::move(assignment);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = cost[i * n + m.assignment[i]];
        m.total_distance += c;
        m.max_distance = std::max(m.max_distance, c);
    }
    return m;
}

}  // namespace

Matching min_cost_matching(std::span<const double> cost, std::size_t n) {
    if (cost.size() != n * n) throw Error(ErrorCode::DimensionMismatch, "cost matrix is not n x n");
    if (n == 0) return {};

    std::vector<std::size_t> argmin(n);
    std::vector<bool> taken(n, false);
    bool bijective = true;
    for (std::size_t i = 0; i < n && bijective; ++i) {
        const auto row = cost.subspan(i * n, n);
        argmin[i] = static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
        if (taken[argmin[i]]) bijective = false;
        taken[argmin[i]] = true;
    }
    if (bijective) return finish(cost, n, std::move(argmin));

    // Hungarian algorithm with potentials, 1-based internally.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
    return finish(cost, n, std::move(assignment));
}

Matching match_points(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, fmt::format("cannot match {} points to {}", a.size(), b.size()));
    }
    const std::size_t n = a.size();
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = std::abs(a[i] - b[j]);
    return min_cost_matching(cost, n);
}

Matching match_matrices(std::span<const CMatrix> a, std::span<const CMatrix> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("cannot match {} matrices to {}", a.size(), b.size()));
    }
    const std::size_t n = a.size();
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = frobenius(a[i] - b[j]);
    return min_cost_matching(cost, n);
}

}  // namespace qcomm
