#include "qcomm/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qcomm/error.hpp"

namespace qcomm {

namespace {

void require_dim(const QContext& ctx, const CMatrix& a, const char* op) {
    if (a.rows() != ctx.dim() || a.cols() != ctx.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("{}: matrix is {}x{}, context dimension is {}", op, a.rows(), a.cols(), ctx.dim()));
    }
}

double diagonalization_residual(const CMatrix& q, std::span<const Complex> eigenvalues, const CMatrix& t_inv,
                                const CMatrix& t) {
    CMatrix d = t_inv * q * t;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) d(i, i) -= eigenvalues[i];
    return frobenius(d);
}

// T scaled column-wise by u, times T^{-1}.
CMatrix conjugate_diagonal(const CMatrix& t, std::span<const Complex> u, const CMatrix& t_inv) {
    CMatrix scaled = t;
    for (std::size_t r = 0; r < t.rows(); ++r)
        for (std::size_t c = 0; c < t.cols(); ++c) scaled(r, c) *= u[c];
    return scaled * t_inv;
}

}  // namespace

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::Generic: return "generic";
        case Provenance::WeightedCirculant: return "weighted-circulant";
        case Provenance::Circulant: return "circulant";
        case Provenance::Companion: return "companion";
    }
    return "unknown";
}

QContext::QContext(CMatrix q, EigenDecomposition dec, Provenance provenance, double distinct_tol)
    : q_(std::move(q)), dec_(std::move(dec)), provenance_(provenance), distinct_tol_(distinct_tol) {
    verification_residual_ = diagonalization_residual(q_, dec_.eigenvalues, dec_.T_inv, dec_.T);
}

QContext QContext::from_closed_form(CMatrix q, std::vector<Complex> eigenvalues, CMatrix t, CMatrix t_inv,
                                    Provenance provenance, double distinct_tol) {
    const std::size_t d = q.rows();
    if (!q.is_square() || eigenvalues.size() != d || t.rows() != d || t.cols() != d || t_inv.rows() != d ||
        t_inv.cols() != d) {
        throw Error(ErrorCode::DimensionMismatch, "closed-form context: inconsistent dimensions");
    }
    EigenDecomposition dec;
    dec.eigenvalues = std::move(eigenvalues);
    dec.min_gap = min_pairwise_gap(dec.eigenvalues);
    dec.cond_T = norm1(t) * norm1(t_inv);
    dec.T = std::move(t);
    dec.T_inv = std::move(t_inv);
    if (!check_distinct(dec, distinct_tol)) {
        throw Error(ErrorCode::NotDistinctEigenvalues,
                    fmt::format("eigenvalue gap {:.3e} is below the distinctness threshold", dec.min_gap));
    }
    return QContext(std::move(q), std::move(dec), provenance, distinct_tol);
}

QContext make_context(const CMatrix& q, double distinct_tol) {
    if (!q.is_square() || q.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, fmt::format("Q must be square, got {}x{}", q.rows(), q.cols()));
    }
    EigenDecomposition dec = eig(q);
    if (!check_distinct(dec, distinct_tol)) {
        throw Error(ErrorCode::NotDistinctEigenvalues,
                    fmt::format("eigenvalue gap {:.3e} is below the distinctness threshold {:.3e}", dec.min_gap,
                                distinct_tol));
    }
    if (dec.T_inv.empty()) {
        throw Error(ErrorCode::NumericalFailure, "eigenvector matrix is numerically singular");
    }
    const CMatrix lhs = q * dec.T;
    const CMatrix rhs = dec.T * CMatrix::diagonal(dec.eigenvalues);
    const double bound = 1e-8 * (1.0 + frobenius(q)) * dec.cond_T;
    if (const double res = frobenius(lhs - rhs); !(res <= bound)) {
        throw Error(ErrorCode::NumericalFailure,
                    fmt::format("eigenvector residual {:.3e} exceeds {:.3e}", res, bound));
    }
    return QContext(q, std::move(dec), Provenance::Generic, distinct_tol);
}

double commutator_residual(const CMatrix& q, const CMatrix& a) { return frobenius(a * q - q * a); }

bool is_member(const QContext& ctx, const CMatrix& a, double tol) {
    require_dim(ctx, a, "is_member");
    const double scale = (1.0 + frobenius(a)) * (1.0 + frobenius(ctx.q()));
    return commutator_residual(ctx.q(), a) <= tol * scale;
}

DiagCoords diag_coords(const QContext& ctx, const CMatrix& a, double tol) {
    if (!is_member(ctx, a, tol)) {
        throw Error(ErrorCode::NotMember, fmt::format("matrix does not commute with Q (||AQ-QA||_F = {:.3e})",
                                                      commutator_residual(ctx.q(), a)));
    }
    const CMatrix m = ctx.T_inv() * a * ctx.T();
    DiagCoords out;
    out.values = m.diagonal_entries();
    double off = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (r != c) off += std::norm(m(r, c));
    out.off_diagonal_mass = std::sqrt(off);
    return out;
}

CMatrix from_diag_coords(const QContext& ctx, std::span<const Complex> u) {
    if (u.size() != ctx.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("{} diagonal coordinates for dimension {}", u.size(), ctx.dim()));
    }
    return conjugate_diagonal(ctx.T(), u, ctx.T_inv());
}

std::vector<Complex> eval_at_eigenvalues(const QContext& ctx, const Polynomial& p) {
    std::vector<Complex> out;
    out.reserve(ctx.dim());
    for (const auto& l : ctx.eigenvalues()) out.push_back(p(l));
    return out;
}

ReprPoly repr_poly_report(const QContext& ctx, const CMatrix& a, double tol) {
    const DiagCoords coords = diag_coords(ctx, a, tol);
    const double bound = tol * ctx.decomposition().cond_T * (1.0 + frobenius(a));
    if (coords.off_diagonal_mass > bound) {
        throw Error(ErrorCode::NotMember, fmt::format("T^-1 A T has off-diagonal mass {:.3e} above {:.3e}",
                                                      coords.off_diagonal_mass, bound));
    }
    ReprPoly out;
    out.off_diagonal_mass = coords.off_diagonal_mass;
    out.vandermonde_cond = vandermonde_condition(ctx.eigenvalues());
    out.ill_conditioned = !(out.vandermonde_cond <= kIllConditioned);

    std::vector<Complex> coeffs = vandermonde_solve(ctx.eigenvalues(), coords.values);
    CMatrix rebuilt(ctx.dim(), ctx.dim());
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        rebuilt = rebuilt * ctx.q();
        for (std::size_t i = 0; i < ctx.dim(); ++i) rebuilt(i, i) += coeffs[j];
    }
    out.reconstruction_residual = frobenius(rebuilt - a);
    out.poly = Polynomial(std::move(coeffs));
    return out;
}

Polynomial repr_poly(const QContext& ctx, const CMatrix& a, double tol) {
    return repr_poly_report(ctx, a, tol).poly;
}

CMatrix from_repr_poly(const QContext& ctx, const Polynomial& p) {
    const std::size_t d = ctx.dim();
    if (p.degree() >= static_cast<int>(d)) return from_diag_coords(ctx, eval_at_eigenvalues(ctx, p));
    CMatrix out(d, d);
    const auto c = p.coeffs();
    for (std::size_t j = c.size(); j-- > 0;) {
        out = out * ctx.q();
        for (std::size_t i = 0; i < d; ++i) out(i, i) += c[j];
    }
    return out;
}

std::vector<Complex> vandermonde_solve(std::span<const Complex> nodes, std::span<const Complex> values) {
    const std::size_t n = nodes.size();
    if (values.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, fmt::format("{} values for {} nodes", values.size(), n));
    }
    double scale = 1.0;
    for (const auto& x : nodes) scale = std::max(scale, std::abs(x));
    if (min_pairwise_gap(nodes) <= 1e-12 * scale) {
        CMatrix v(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            Complex pw = 1.0;
            for (std::size_t j = 0; j < n; ++j, pw *= nodes[i]) v(i, j) = pw;
        }
        return LuFactorization(v).solve(values);
    }

    // Newton divided differences, then conversion to the monomial basis.
    std::vector<Complex> c(values.begin(), values.end());
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t i = n - 1; i > k; --i) c[i] = (c[i] - c[i - 1]) / (nodes[i] - nodes[i - k - 1]);
    for (std::size_t k = n - 1; k-- > 0;)
        for (std::size_t i = k; i + 1 < n; ++i) c[i] -= nodes[k] * c[i + 1];
    return c;
}

double vandermonde_condition(std::span<const Complex> nodes) {
    const std::size_t n = nodes.size();
    CMatrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex pw = 1.0;
        for (std::size_t j = 0; j < n; ++j, pw *= nodes[i]) v(i, j) = pw;
    }
    try {
        return norm1(v) * norm1(inverse(v));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
        return std::numeric_limits<double>::infinity();
    }
}

AlgebraElement::AlgebraElement(const QContext& ctx, std::vector<Complex> coords)
    : ctx_(&ctx), coords_(std::move(coords)) {
    if (coords_.size() != ctx.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "algebra element has the wrong number of coordinates");
    }
}

AlgebraElement AlgebraElement::from_matrix(const QContext& ctx, const CMatrix& a) {
    return AlgebraElement(ctx, diag_coords(ctx, a).values);
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
    return *this;
}

AlgebraElement& AlgebraElement::operator*=(const AlgebraElement& other) {
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] *= other.coords_[i];
    return *this;
}

AlgebraElement operator+(AlgebraElement lhs, const AlgebraElement& rhs) { return lhs += rhs; }
AlgebraElement operator*(AlgebraElement lhs, const AlgebraElement& rhs) { return lhs *= rhs; }

}  // namespace qcomm
