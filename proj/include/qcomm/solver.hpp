#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qcomm/algebra.hpp"
#include "qcomm/linalg.hpp"
#include "qcomm/poly.hpp"

namespace qcomm {

/// Coefficient given directly in diagonal coordinates (f(lambda_1), ..., f(lambda_d)).
struct DiagValues {
    std::vector<Complex> values;
};

/// A coefficient A_k as a matrix, a representation polynomial, or diagonal coordinates.
using Coefficient = std::variant<CMatrix, Polynomial, DiagValues>;

/// X^n + A_1 X^{n-1} + ... + A_n = 0 with every A_k in C(Q).
class MatrixPolyEquation {
public:
    /// Throws InvalidArgument for n = 0, DimensionMismatch for wrongly sized
    /// coefficients and NotMember for matrix coefficients outside C(Q).
    MatrixPolyEquation(QContext ctx, std::vector<Coefficient> coeffs, double member_tol = kDefaultMemberTol);

    const QContext& context() const noexcept { return ctx_; }
    std::size_t degree() const noexcept { return coeffs_.size(); }
    std::span<const Coefficient> coefficients() const noexcept { return coeffs_; }

    /// A_1..A_n as matrices, whatever form they were supplied in.
    std::span<const CMatrix> coefficient_matrices() const noexcept { return matrices_; }
    /// Diagonal coordinates of A_1..A_n.
    std::span<const std::vector<Complex>> coefficient_coords() const noexcept { return coords_; }
    /// max_k ||A_k||_F
    double max_coefficient_norm() const noexcept { return max_norm_; }
    /// Error bound on the diagonal coordinates of A_1..A_n: zero for values
    /// supplied directly, of order eps * d * cond(T) * ||A_k|| otherwise.
    std::span<const double> coefficient_uncertainty() const noexcept { return uncertainty_; }

private:
    QContext ctx_;
    std::vector<Coefficient> coeffs_;
    std::vector<CMatrix> matrices_;
    std::vector<std::vector<Complex>> coords_;
    std::vector<double> uncertainty_;
    double max_norm_ = 0.0;
};

/// g_i(x) = x^n + f_1(lambda_i) x^{n-1} + ... + f_n(lambda_i), i = 1..d.
std::vector<Polynomial> build_scalar_polys(const MatrixPolyEquation& eq);

enum class EnumerationOrder {
    Lexicographic,    // last root index varies fastest
    Colexicographic,  // first root index varies fastest
};

struct SolveOptions {
    std::optional<double> cluster_tol_abs;  // default 1e-8 * scale(g_i)
    std::optional<double> cluster_tol_rel;  // default 1e-8
    double residual_tol = 1e-8;
    double commutator_tol = 1e-8;
    std::uint64_t enumeration_cap = 1'000'000;
    bool truncate = false;  // enumerate the first cap solutions instead of failing
    EnumerationOrder order = EnumerationOrder::Lexicographic;
    unsigned threads = 0;   // 0: QCOMM_THREADS or hardware concurrency
};

enum class WarningKind {
    NearTolerance,      // a root count changes when the cluster tolerance moves by 100x
    ResidualFailure,    // a solution's residual exceeds the acceptance tolerance
    CommutatorFailure,  // a solution does not commute with Q within tolerance
    IllConditioned,     // cond(T) is large enough that results may be inaccurate
    Truncated,          // enumeration stopped at the cap
};

std::string_view to_string(WarningKind k) noexcept;

struct Warning {
    WarningKind kind;
    std::string message;
    std::optional<std::size_t> index;  // g_i index (0-based) or solution index, when applicable
};

struct Verification {
    double residual = 0.0;             // ||X^n + sum A_k X^{n-k}||_F
    double relative_residual = 0.0;    // residual / ((1+||X||)^n (1+max||A_k||))
    double commutator_residual = 0.0;  // ||XQ - QX||_F
    double commutator_relative = 0.0;  // commutator / ((1+||X||)(1+||Q||))
};

/// Residuals of a candidate X, evaluated by the Horner scheme
/// ((X + A_1) X + A_2) X + ... + A_n. Throws DimensionMismatch.
Verification verify_solution(const MatrixPolyEquation& eq, const CMatrix& x);

struct Solution {
    std::vector<std::size_t> root_indices;  // index into distinct_roots[i] for each i
    std::vector<Complex> u;                 // chosen root of each g_i
    CMatrix x;
    Verification check;
    bool accepted = false;
};

struct SolutionSet {
    std::vector<Polynomial> scalar_polys;
    std::vector<std::vector<RootCluster>> distinct_roots;
    std::vector<std::size_t> counts;
    std::uint64_t total = 0;  // prod counts, saturating at UINT64_MAX
    std::vector<Solution> solutions;
    std::vector<Warning> warnings;
    bool truncated = false;
};

struct SolutionCount {
    std::vector<std::size_t> counts;
    std::uint64_t total = 0;
};

/// Root-finding and clustering only; no matrices are formed.
SolutionCount count_solutions(const MatrixPolyEquation& eq, const SolveOptions& opts = {});

/// Full solution set. Throws EnumerationCapExceeded when total exceeds the cap
/// and truncation was not requested.
SolutionSet solve(const MatrixPolyEquation& eq, const SolveOptions& opts = {});

/// Worker count used for a given request: explicit value, else QCOMM_THREADS,
/// else hardware concurrency; never below 1.
unsigned resolve_thread_count(unsigned requested);

}  // namespace qcomm
