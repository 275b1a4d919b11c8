#pragma once

#include <span>
#include <vector>

#include "qcomm/algebra.hpp"
#include "qcomm/linalg.hpp"
#include "qcomm/poly.hpp"

namespace qcomm {

/// Weights k_1..k_d of a weighted circulant, with their product and the
/// principal d-th root of that product.
class WeightedCirculantSpec {
public:
    /// Throws ZeroWeight if any weight is zero, InvalidArgument if empty.
    explicit WeightedCirculantSpec(std::vector<Complex> weights);

    std::span<const Complex> weights() const noexcept { return weights_; }
    std::size_t dim() const noexcept { return weights_.size(); }
    Complex product() const noexcept { return product_; }
    /// Principal d-th root of product(), argument in (-pi/d, pi/d].
    Complex lambda() const noexcept { return lambda_; }

private:
    std::vector<Complex> weights_;
    Complex product_;
    Complex lambda_;
};

/// Superdiagonal k_1..k_{d-1}, corner Q[d-1][0] = k_d. For d = 1 this is [[k_1]].
CMatrix weighted_circulant_matrix(const WeightedCirculantSpec& spec);

/// F[r][c] = w^{rc} / sqrt(d), w = exp(2 pi i / d).
CMatrix dft_matrix(std::size_t d);

/// Diagonal of the scaling Lambda with Lambda^{-1} Q Lambda = lambda C_d.
std::vector<Complex> weighted_circulant_scaling(const WeightedCirculantSpec& spec);

/// Closed-form context: T = Lambda F^{-1}, T^{-1} = F Lambda^{-1}, eigenvalue i
/// (0-based) equal to lambda w^{d-i}. Throws NumericalFailure if the closed
/// form fails its own verification.
QContext weighted_circulant_context(const WeightedCirculantSpec& spec, double distinct_tol = kDefaultDistinctTol);

/// circ(c)[r][col] = c[(col - r) mod d], i.e. sum_j c_j C_d^j.
CMatrix circulant_matrix(std::span<const Complex> first_row);

/// Context of the circulant with the given first row, built from T = F^{-1}.
/// The eigenvalue in slot i is circulant_scalar_coeffs(first_row, i + 1).
QContext circulant_context(std::span<const Complex> first_row, double distinct_tol = kDefaultDistinctTol);

/// sum_j a_j w^{-(i-1) j} for 1 <= i <= d, which equals f(w^{d-i+1}) for
/// f(x) = sum_j a_j x^j. Throws InvalidArgument for i out of range.
Complex circulant_scalar_coeffs(std::span<const Complex> a, std::size_t i);

/// All d values circulant_scalar_coeffs(a, 1..d). Uses a radix-2 FFT when d is
/// a power of two and the direct sum otherwise.
std::vector<Complex> circulant_diag_coords(std::span<const Complex> a);

/// Same values by the direct O(d^2) sum regardless of d.
std::vector<Complex> circulant_diag_coords_direct(std::span<const Complex> a);

/// Superdiagonal ones, last row -a_0 .. -a_{d-1} for the monic p of degree d.
/// Throws DegreeZero / ZeroPolynomial for degree < 1.
CMatrix companion_matrix(const Polynomial& p);

/// V[r][c] = nodes[c]^r
CMatrix vandermonde_matrix(std::span<const Complex> nodes);

/// Context of the companion matrix of prod (x - lambda_i), with the Vandermonde
/// matrix of the lambdas as T and eigenvalues kept in input order.
QContext companion_context(std::span<const Complex> lambdas, double distinct_tol = kDefaultDistinctTol);

}  // namespace qcomm
