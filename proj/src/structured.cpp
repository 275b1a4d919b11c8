#include "qcomm/structured.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qcomm/error.hpp"

namespace qcomm {

namespace {

// w^e for w = exp(2 pi i / d), with e reduced mod d first so large exponents
// cost no accuracy.
Complex root_of_unity(std::size_t e, std::size_t d) {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e % d) / static_cast<double>(d));
}

std::vector<Complex> root_table(std::size_t d) {
    std::vector<Complex> w(d);
    for (std::size_t e = 0; e < d; ++e) w[e] = root_of_unity(e, d);
    return w;
}

// In-place forward transform x_i <- sum_j x_j w^{-ij}, d a power of two.
void fft_forward(std::vector<Complex>& x) {
    const std::size_t n = x.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    const std::vector<Complex> w = root_table(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex tw = std::conj(w[k * stride]);
                const Complex u = x[start + k];
                const Complex v = x[start + k + len / 2] * tw;
                x[start + k] = u + v;
                x[start + k + len / 2] = u - v;
            }
        }
    }
}

double diag_residual(const CMatrix& t_inv, const CMatrix& q, const CMatrix& t, std::span<const Complex> eigs) {
    CMatrix m = t_inv * q * t;
    for (std::size_t i = 0; i < eigs.size(); ++i) m(i, i) -= eigs[i];
    return frobenius(m);
}

}  // namespace

WeightedCirculantSpec::WeightedCirculantSpec(std::vector<Complex> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw Error(ErrorCode::InvalidArgument, "weighted circulant needs at least one weight");
    product_ = 1.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] == Complex{}) throw Error(ErrorCode::ZeroWeight, fmt::format("weight k{} is zero", i + 1));
        product_ *= weights_[i];
    }
    const double d = static_cast<double>(weights_.size());
    double arg = std::arg(product_);
    if (arg <= -std::numbers::pi) arg = std::numbers::pi;
    lambda_ = std::polar(std::pow(std::abs(product_), 1.0 / d), arg / d);
}

CMatrix weighted_circulant_matrix(const WeightedCirculantSpec& spec) {
    const std::size_t d = spec.dim();
    const auto k = spec.weights();
    CMatrix q(d, d);
    for (std::size_t i = 0; i + 1 < d; ++i) q(i, i + 1) = k[i];
    q(d - 1, 0) = k[d - 1];
    return q;
}

CMatrix dft_matrix(std::size_t d) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "DFT size must be positive");
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    CMatrix f(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) f(r, c) = s * root_of_unity(r * c, d);
    return f;
}

std::vector<Complex> weighted_circulant_scaling(const WeightedCirculantSpec& spec) {
    const std::size_t d = spec.dim();
    const auto k = spec.weights();
    std::vector<Complex> out(d);
    Complex entry = spec.product() / k[d - 1];
    for (std::size_t i = 0; i < d; ++i) {
        out[i] = entry;
        if (i + 1 < d) entry *= spec.lambda() / k[i];
    }
    return out;
}

QContext weighted_circulant_context(const WeightedCirculantSpec& spec, double distinct_tol) {
    const std::size_t d = spec.dim();
    const CMatrix q = weighted_circulant_matrix(spec);
    const std::vector<Complex> scale = weighted_circulant_scaling(spec);
    const CMatrix f = dft_matrix(d);
    const CMatrix f_inv = f.conj_transpose();

    CMatrix t = f_inv;
    CMatrix t_inv = f;
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            t(r, c) *= scale[r];
            t_inv(r, c) /= scale[c];
        }

    std::vector<Complex> eigs(d);
    for (std::size_t i = 0; i < d; ++i) eigs[i] = spec.lambda() * root_of_unity(d - i, d);

    const double res = diag_residual(t_inv, q, t, eigs);
    const double bound = 1e-10 * (1.0 + std::abs(spec.lambda()));
    if (!(res <= bound)) {
        throw Error(ErrorCode::NumericalFailure,
                    fmt::format("weighted circulant diagonalization residual {:.3e} exceeds {:.3e}", res, bound));
    }
    return QContext::from_closed_form(q, std::move(eigs), std::move(t), std::move(t_inv),
                                      Provenance::WeightedCirculant, distinct_tol);
}

CMatrix circulant_matrix(std::span<const Complex> first_row) {
    const std::size_t d = first_row.size();
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "circulant needs at least one coefficient");
    CMatrix m(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) m(r, c) = first_row[(c + d - r) % d];
    return m;
}

QContext circulant_context(std::span<const Complex> first_row, double distinct_tol) {
    const std::size_t d = first_row.size();
    const CMatrix q = circulant_matrix(first_row);
    const CMatrix f = dft_matrix(d);
    std::vector<Complex> eigs = circulant_diag_coords(first_row);

    double mag = 0.0;
    for (const auto& c : first_row) mag = std::max(mag, std::abs(c));
    const CMatrix f_inv = f.conj_transpose();
    const double res = diag_residual(f, q, f_inv, eigs);
    const double bound = 1e-10 * (1.0 + mag) * static_cast<double>(d);
    if (!(res <= bound)) {
        throw Error(ErrorCode::NumericalFailure,
                    fmt::format("circulant diagonalization residual {:.3e} exceeds {:.3e}", res, bound));
    }
    return QContext::from_closed_form(q, std::move(eigs), f_inv, f, Provenance::Circulant, distinct_tol);
}

Complex circulant_scalar_coeffs(std::span<const Complex> a, std::size_t i) {
    const std::size_t d = a.size();
    if (i < 1 || i > d) throw Error(ErrorCode::InvalidArgument, fmt::format("index {} outside 1..{}", i, d));
    Complex sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t e = ((i - 1) * j) % d;
        sum += a[j] * root_of_unity(d - e, d);
    }
    return sum;
}

std::vector<Complex> circulant_diag_coords_direct(std::span<const Complex> a) {
    const std::size_t d = a.size();
    const std::vector<Complex> w = root_table(d);
    std::vector<Complex> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        Complex sum = 0.0;
        for (std::size_t j = 0; j < d; ++j) sum += a[j] * w[(d - (i * j) % d) % d];
        out[i] = sum;
    }
    return out;
}

std::vector<Complex> circulant_diag_coords(std::span<const Complex> a) {
    if (a.size() < 2 || !std::has_single_bit(a.size())) return circulant_diag_coords_direct(a);
    std::vector<Complex> x(a.begin(), a.end());
    fft_forward(x);
    return x;
}

CMatrix companion_matrix(const Polynomial& p) {
    if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "companion matrix of the zero polynomial");
    if (p.degree() < 1) throw Error(ErrorCode::DegreeZero, "companion matrix of a constant");
    const auto d = static_cast<std::size_t>(p.degree());
    const Complex lead = p.leading();
    CMatrix m(d, d);
    for (std::size_t i = 0; i + 1 < d; ++i) m(i, i + 1) = 1.0;
    for (std::size_t j = 0; j < d; ++j) m(d - 1, j) = -p.coeff(j) / lead;
    return m;
}

CMatrix vandermonde_matrix(std::span<const Complex> nodes) {
    const std::size_t d = nodes.size();
    CMatrix v(d, d);
    for (std::size_t c = 0; c < d; ++c) {
        Complex pw = 1.0;
        for (std::size_t r = 0; r < d; ++r, pw *= nodes[c]) v(r, c) = pw;
    }
    return v;
}

QContext companion_context(std::span<const Complex> lambdas, double distinct_tol) {
    const std::size_t d = lambdas.size();
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "companion context needs at least one eigenvalue");
    double max_abs = 0.0;
    for (const auto& l : lambdas) max_abs = std::max(max_abs, std::abs(l));
    const double gap = min_pairwise_gap(lambdas);
    if (!(gap > distinct_tol * std::max(1.0, max_abs))) {
        throw Error(ErrorCode::NotDistinctEigenvalues,
                    fmt::format("eigenvalue gap {:.3e} is below the distinctness threshold", gap));
    }

    const CMatrix pi = companion_matrix(Polynomial::from_roots(lambdas));
    CMatrix t = vandermonde_matrix(lambdas);
    CMatrix t_inv;
    try {
        t_inv = inverse(t);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
        throw Error(ErrorCode::NumericalFailure, "Vandermonde matrix of the eigenvalues is numerically singular");
    }

    std::vector<Complex> eigs(lambdas.begin(), lambdas.end());
    const double res = diag_residual(t_inv, pi, t, eigs);
    const double bound = 1e-9 * (1.0 + std::pow(max_abs, static_cast<double>(d)));
    if (!(res <= bound)) {
        throw Error(ErrorCode::NumericalFailure,
                    fmt::format("companion diagonalization residual {:.3e} exceeds {:.3e}", res, bound));
    }
    return QContext::from_closed_form(pi, std::move(eigs), std::move(t), std::move(t_inv), Provenance::Companion,
                                      distinct_tol);
}

}  // namespace qcomm
