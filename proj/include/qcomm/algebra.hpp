#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "qcomm/linalg.hpp"
#include "qcomm/poly.hpp"

namespace qcomm {

/// Where a context's diagonalizer came from.
enum class Provenance { Generic, WeightedCirculant, Circulant, Companion };

std::string_view to_string(Provenance p) noexcept;

inline constexpr double kDefaultDistinctTol = 1e-8;
inline constexpr double kDefaultMemberTol = 1e-8;

/// A matrix Q with d distinct eigenvalues together with a diagonalizer T,
/// T^{-1} Q T = diag(eigenvalues). Immutable once built.
class QContext {
public:
    /// Wraps a diagonalization known in closed form. Checks distinctness and
    /// records the verification residual, but does not re-derive T.
    static QContext from_closed_form(CMatrix q, std::vector<Complex> eigenvalues, CMatrix t, CMatrix t_inv,
                                     Provenance provenance, double distinct_tol = kDefaultDistinctTol);

    const CMatrix& q() const noexcept { return q_; }
    const EigenDecomposition& decomposition() const noexcept { return dec_; }
    std::span<const Complex> eigenvalues() const noexcept { return dec_.eigenvalues; }
    const CMatrix& T() const noexcept { return dec_.T; }
    const CMatrix& T_inv() const noexcept { return dec_.T_inv; }
    std::size_t dim() const noexcept { return q_.rows(); }
    double distinct_tol() const noexcept { return distinct_tol_; }
    Provenance provenance() const noexcept { return provenance_; }

    /// ||T^{-1} Q T - diag(eigenvalues)||_F
    double verification_residual() const noexcept { return verification_residual_; }

private:
    friend QContext make_context(const CMatrix& q, double distinct_tol);
    QContext(CMatrix q, EigenDecomposition dec, Provenance provenance, double distinct_tol);

    CMatrix q_;
    EigenDecomposition dec_;
    Provenance provenance_ = Provenance::Generic;
    double distinct_tol_ = kDefaultDistinctTol;
    double verification_residual_ = 0.0;
};

/// Diagonalizes Q with the general eigensolver. Throws NotDistinctEigenvalues
/// when the eigenvalue gap test fails and NumericalFailure when the computed
/// eigenvectors do not diagonalize Q.
QContext make_context(const CMatrix& q, double distinct_tol = kDefaultDistinctTol);

/// ||AQ - QA||_F
double commutator_residual(const CMatrix& q, const CMatrix& a);

/// ||AQ - QA||_F <= tol (1 + ||A||_F)(1 + ||Q||_F)
bool is_member(const QContext& ctx, const CMatrix& a, double tol = kDefaultMemberTol);

struct DiagCoords {
    std::vector<Complex> values;    // diagonal of T^{-1} A T, in eigenvalue order
    double off_diagonal_mass = 0.0; // Frobenius norm of the rest of T^{-1} A T
};

/// Diagonal of T^{-1} A T. Throws NotMember only when A fails is_member;
/// smaller off-diagonal residue is reported, not rejected.
DiagCoords diag_coords(const QContext& ctx, const CMatrix& a, double tol = kDefaultMemberTol);

/// T diag(u) T^{-1}
CMatrix from_diag_coords(const QContext& ctx, std::span<const Complex> u);

/// p(lambda_1), ..., p(lambda_d)
std::vector<Complex> eval_at_eigenvalues(const QContext& ctx, const Polynomial& p);

struct ReprPoly {
    Polynomial poly;                   // degree <= d - 1
    double reconstruction_residual = 0.0;  // ||sum a_j Q^j - A||_F
    double off_diagonal_mass = 0.0;
    double vandermonde_cond = 0.0;
    bool ill_conditioned = false;      // vandermonde_cond above kIllConditioned
};

inline constexpr double kIllConditioned = 1e10;

/// Representation polynomial of A with its diagnostics. Throws NotMember if A
/// fails is_member or if the off-diagonal mass of T^{-1} A T exceeds
/// tol * cond_T * (1 + ||A||_F).
ReprPoly repr_poly_report(const QContext& ctx, const CMatrix& a, double tol = kDefaultMemberTol);

Polynomial repr_poly(const QContext& ctx, const CMatrix& a, double tol = kDefaultMemberTol);

/// sum_j p_j Q^j. Polynomials of degree >= d are evaluated at the eigenvalues
/// and mapped through from_diag_coords instead of forming high powers of Q.
CMatrix from_repr_poly(const QContext& ctx, const Polynomial& p);

/// Coefficients a with sum_j a_j x_i^j = y_i (Bjorck-Pereyra). Falls back to
/// pivoted LU on the explicit Vandermonde matrix when two nodes nearly coincide.
std::vector<Complex> vandermonde_solve(std::span<const Complex> nodes, std::span<const Complex> values);

/// ||V||_1 ||V^{-1}||_1 for V[i][j] = x_i^j; +inf when V is singular.
double vandermonde_condition(std::span<const Complex> nodes);

/// An element of C(Q) held in diagonal coordinates, where the algebra's
/// product is elementwise. The context must outlive the element.
class AlgebraElement {
public:
    AlgebraElement(const QContext& ctx, std::vector<Complex> coords);
    static AlgebraElement from_matrix(const QContext& ctx, const CMatrix& a);

    std::span<const Complex> coords() const noexcept { return coords_; }
    CMatrix matrix() const { return from_diag_coords(*ctx_, coords_); }
    Polynomial repr() const { return Polynomial(vandermonde_solve(ctx_->eigenvalues(), coords_)); }

    AlgebraElement& operator+=(const AlgebraElement& other);
    AlgebraElement& operator*=(const AlgebraElement& other);

private:
    const QContext* ctx_;
    std::vector<Complex> coords_;
};

AlgebraElement operator+(AlgebraElement lhs, const AlgebraElement& rhs);
AlgebraElement operator*(AlgebraElement lhs, const AlgebraElement& rhs);

}  // namespace qcomm
