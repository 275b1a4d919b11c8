#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "qcomm/linalg.hpp"

namespace qcomm {

/// Dense univariate complex polynomial, coefficients in ascending degree.
/// Trailing exact zeros are trimmed, so the zero polynomial has no
/// coefficients and degree -1.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Complex> coeffs);
    Polynomial(std::initializer_list<Complex> coeffs);

    /// Monic polynomial prod (x - r_j), expanded one linear factor at a time.
    static Polynomial from_roots(std::span<const Complex> roots);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    std::span<const Complex> coeffs() const noexcept { return coeffs_; }
    Complex coeff(std::size_t j) const noexcept { return j < coeffs_.size() ? coeffs_[j] : Complex{}; }
    Complex leading() const noexcept { return coeffs_.empty() ? Complex{} : coeffs_.back(); }

    Complex operator()(Complex z) const noexcept;
    Polynomial derivative() const;

    /// max(1, max_j |c_j| / |leading|); 1 for the zero polynomial.
    double scale() const noexcept;

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(Complex scalar);

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void trim();
    std::vector<Complex> coeffs_;
};

Polynomial operator+(Polynomial lhs, const Polynomial& rhs);
Polynomial operator-(Polynomial lhs, const Polynomial& rhs);
Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
Polynomial operator*(Complex scalar, Polynomial p);

/// Horner evaluation.
Complex eval(const Polynomial& p, Complex z) noexcept;

/// All roots counted with multiplicity, in lex order.
///
/// Eigenvalues of the companion matrix followed by a guarded Newton polish.
/// Groups of computed roots whose centroid is numerically a root of p and of
/// its first m-1 derivatives (m = group size) are replaced by that centroid,
/// so a multiple root comes back as m identical values instead of a ring of
/// radius eps^(1/m). coeff_uncertainty is an absolute error bound on each
/// coefficient; it widens that test for polynomials built from computed data.
///
/// Throws ZeroPolynomial for p == 0 and DegreeZero for nonzero constants.
std::vector<Complex> roots(const Polynomial& p, double coeff_uncertainty = 0.0);

struct RootCluster {
    Complex representative;
    std::size_t multiplicity = 0;
    double member_residual = 0.0;  // max |p(r)| over members, 0 when p is not supplied
};

/// Single-linkage clustering: r1 and r2 are linked iff
/// |r1 - r2| <= tol_abs + tol_rel * max(|r1|, |r2|).
/// Representatives are member means; output is in lex order of representative.
std::vector<RootCluster> cluster_roots(std::span<const Complex> rs, double tol_abs, double tol_rel);
std::vector<RootCluster> cluster_roots(const Polynomial& p, std::span<const Complex> rs, double tol_abs,
                                       double tol_rel);

struct ClusterTolerance {
    double abs = 0.0;
    double rel = 0.0;
};

/// tol_abs = 1e-8 * scale(p), tol_rel = 1e-8.
ClusterTolerance default_cluster_tolerance(const Polynomial& p);

}  // namespace qcomm
