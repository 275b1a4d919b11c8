#include "qcomm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "qcomm/error.hpp"

namespace qcomm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t saturating_product(std::span<const std::size_t> counts) {
    std::uint64_t total = 1;
    for (const auto c : counts) {
        if (c != 0 && total > std::numeric_limits<std::uint64_t>::max() / c) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        total *= c;
    }
    return total;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
// handled by exactly one thread; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct RootData {
    std::vector<RootCluster> clusters;
    std::optional<Warning> warning;
};

RootData find_distinct_roots(const Polynomial& g, double uncertainty, std::size_t index, const SolveOptions& opts) {
    const ClusterTolerance def = default_cluster_tolerance(g);
    const double abs_tol = opts.cluster_tol_abs.value_or(def.abs);
    const double rel_tol = opts.cluster_tol_rel.value_or(def.rel);
    const std::vector<Complex> rs = roots(g, uncertainty);

    RootData out;
    out.clusters = cluster_roots(g, rs, abs_tol, rel_tol);
    const std::size_t merged = cluster_roots(rs, abs_tol * 100.0, rel_tol * 100.0).size();
    const std::size_t split = cluster_roots(rs, abs_tol / 100.0, rel_tol / 100.0).size();
    if (merged != out.clusters.size() || split != out.clusters.size()) {
        out.warning = Warning{WarningKind::NearTolerance,
                              fmt::format("g{}: {} distinct roots at the cluster tolerance, {} when merged (x100), "
                                          "{} when split (/100)",
                                          index + 1, out.clusters.size(), merged, split),
                              index};
    }
    return out;
}

std::vector<RootData> all_distinct_roots(const MatrixPolyEquation& eq, std::span<const Polynomial> polys,
                                         const SolveOptions& opts, unsigned workers) {
    const auto u = eq.coefficient_uncertainty();
    const double uncertainty = *std::max_element(u.begin(), u.end());
    std::vector<RootData> out(polys.size());
    parallel_for(polys.size(), workers,
                 [&](std::size_t i) { out[i] = find_distinct_roots(polys[i], uncertainty, i, opts); });
    return out;
}

// Mixed-radix digits of a linear enumeration index.
std::vector<std::size_t> tuple_at(std::uint64_t index, std::span<const std::size_t> counts, EnumerationOrder order) {
    const std::size_t d = counts.size();
    std::vector<std::size_t> digits(d);
    if (order == EnumerationOrder::Lexicographic) {
        for (std::size_t i = d; i-- > 0;) {
            digits[i] = static_cast<std::size_t>(index % counts[i]);
            index /= counts[i];
        }
    } else {
        for (std::size_t i = 0; i < d; ++i) {
            digits[i] = static_cast<std::size_t>(index % counts[i]);
            index /= counts[i];
        }
    }
    return digits;
}

}  // namespace

std::string_view to_string(WarningKind k) noexcept {
    switch (k) {
        case WarningKind::NearTolerance: return "near-tolerance";
        case WarningKind::ResidualFailure: return "residual-failure";
        case WarningKind::CommutatorFailure: return "commutator-failure";
        case WarningKind::IllConditioned: return "ill-conditioned";
        case WarningKind::Truncated: return "truncated";
    }
    return "unknown";
}

MatrixPolyEquation::MatrixPolyEquation(QContext ctx, std::vector<Coefficient> coeffs, double member_tol)
    : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(ErrorCode::InvalidArgument, "equation degree must be at least 1");
    const std::size_t d = ctx_.dim();
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(d) *
                         ctx_.decomposition().cond_T;
    matrices_.reserve(coeffs_.size());
    coords_.reserve(coeffs_.size());
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        std::visit(Overloaded{
                       [&](const CMatrix& a) {
                           if (a.rows() != d || a.cols() != d) {
                               throw Error(ErrorCode::DimensionMismatch,
                                           fmt::format("A{} is {}x{}, expected {}x{}", k + 1, a.rows(), a.cols(), d,
                                                       d));
                           }
                           if (!is_member(ctx_, a, member_tol)) {
                               throw Error(ErrorCode::NotMember,
                                           fmt::format("A{} does not commute with Q (||AQ-QA||_F = {:.3e})", k + 1,
                                                       commutator_residual(ctx_.q(), a)));
                           }
                           matrices_.push_back(a);
                           coords_.push_back(diag_coords(ctx_, a, member_tol).values);
                           uncertainty_.push_back(noise * (1.0 + frobenius(a)));
                       },
                       [&](const Polynomial& p) {
                           matrices_.push_back(from_repr_poly(ctx_, p));
                           coords_.push_back(eval_at_eigenvalues(ctx_, p));
                           uncertainty_.push_back(noise * (1.0 + frobenius(matrices_.back())));
                       },
                       [&](const DiagValues& v) {
                           if (v.values.size() != d) {
                               throw Error(ErrorCode::DimensionMismatch,
                                           fmt::format("A{} has {} diagonal coordinates, expected {}", k + 1,
                                                       v.values.size(), d));
                           }
                           matrices_.push_back(from_diag_coords(ctx_, v.values));
                           coords_.push_back(v.values);
                           uncertainty_.push_back(0.0);
                       },
                   },
                   coeffs_[k]);
        max_norm_ = std::max(max_norm_, frobenius(matrices_.back()));
    }
}

std::vector<Polynomial> build_scalar_polys(const MatrixPolyEquation& eq) {
    const std::size_t d = eq.context().dim();
    const std::size_t n = eq.degree();
    const auto coords = eq.coefficient_coords();
    std::vector<Polynomial> out;
    out.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<Complex> c(n + 1);
        c[n] = 1.0;
        for (std::size_t k = 0; k < n; ++k) c[n - 1 - k] = coords[k][i];
        out.emplace_back(std::move(c));
    }
    return out;
}

Verification verify_solution(const MatrixPolyEquation& eq, const CMatrix& x) {
    const QContext& ctx = eq.context();
    if (x.rows() != ctx.dim() || x.cols() != ctx.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("candidate is {}x{}, expected {}x{}", x.rows(), x.cols(), ctx.dim(), ctx.dim()));
    }
    const auto a = eq.coefficient_matrices();
    CMatrix r = x + a[0];
    for (std::size_t k = 1; k < a.size(); ++k) {
        r = r * x;
        r += a[k];
    }
    Verification v;
    const double nx = frobenius(x);
    v.residual = frobenius(r);
    v.relative_residual =
        v.residual / (std::pow(1.0 + nx, static_cast<double>(eq.degree())) * (1.0 + eq.max_coefficient_norm()));
    v.commutator_residual = commutator_residual(ctx.q(), x);
    v.commutator_relative = v.commutator_residual / ((1.0 + nx) * (1.0 + frobenius(ctx.q())));
    return v;
}

unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QCOMM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min<long>(v, 1024));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SolutionCount count_solutions(const MatrixPolyEquation& eq, const SolveOptions& opts) {
    const auto polys = build_scalar_polys(eq);
    const auto data = all_distinct_roots(eq, polys, opts, resolve_thread_count(opts.threads));
    SolutionCount out;
    for (const auto& r : data) out.counts.push_back(r.clusters.size());
    out.total = saturating_product(out.counts);
    return out;
}

SolutionSet solve(const MatrixPolyEquation& eq, const SolveOptions& opts) {
    const unsigned workers = resolve_thread_count(opts.threads);
    const QContext& ctx = eq.context();
    const std::size_t d = ctx.dim();

    SolutionSet out;
    out.scalar_polys = build_scalar_polys(eq);
    auto data = all_distinct_roots(eq, out.scalar_polys, opts, workers);
    for (auto& r : data) {
        out.counts.push_back(r.clusters.size());
        if (r.warning) out.warnings.push_back(std::move(*r.warning));
        out.distinct_roots.push_back(std::move(r.clusters));
    }
    out.total = saturating_product(out.counts);

    if (const double cond = ctx.decomposition().cond_T; !(cond <= 1e8)) {
        out.warnings.push_back(
            {WarningKind::IllConditioned, fmt::format("cond(T) = {:.3e}; solutions may be inaccurate", cond), {}});
    }

    std::uint64_t produce = out.total;
    if (out.total > opts.enumeration_cap) {
        if (!opts.truncate) {
            throw Error(ErrorCode::EnumerationCapExceeded,
                        fmt::format("{} solutions exceed the enumeration cap of {}", out.total, opts.enumeration_cap));
        }
        produce = opts.enumeration_cap;
        out.truncated = true;
        out.warnings.push_back({WarningKind::Truncated,
                                fmt::format("enumerated {} of {} solutions", produce, out.total), {}});
    }

    out.solutions.resize(static_cast<std::size_t>(produce));
    const std::size_t chunk = 64;
    const std::size_t chunks = (out.solutions.size() + chunk - 1) / chunk;
    parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t end = std::min(out.solutions.size(), (c + 1) * chunk);
        for (std::size_t s = c * chunk; s < end; ++s) {
            Solution& sol = out.solutions[s];
            sol.root_indices = tuple_at(s, out.counts, opts.order);
            sol.u.resize(d);
            for (std::size_t i = 0; i < d; ++i) sol.u[i] = out.distinct_roots[i][sol.root_indices[i]].representative;
            sol.x = from_diag_coords(ctx, sol.u);
            sol.check = verify_solution(eq, sol.x);
            sol.accepted = sol.check.relative_residual <= opts.residual_tol &&
                           sol.check.commutator_relative <= opts.commutator_tol;
        }
    });

    for (std::size_t s = 0; s < out.solutions.size(); ++s) {
        const auto& v = out.solutions[s].check;
        if (!(v.relative_residual <= opts.residual_tol)) {
            out.warnings.push_back({WarningKind::ResidualFailure,
                                    fmt::format("solution {}: relative residual {:.3e} exceeds {:.3e}", s + 1,
                                                v.relative_residual, opts.residual_tol),
                                    s});
        }
        if (!(v.commutator_relative <= opts.commutator_tol)) {
            out.warnings.push_back({WarningKind::CommutatorFailure,
                                    fmt::format("solution {}: relative commutator {:.3e} exceeds {:.3e}", s + 1,
                                                v.commutator_relative, opts.commutator_tol),
                                    s});
        }
    }
    return out;
}

}  // namespace qcomm
