#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qcomm {

using Complex = std::complex<double>;

/// Dense row-major complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const Complex> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return entries_.empty(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const Complex> entries() const noexcept { return entries_; }
    std::vector<Complex> column(std::size_t c) const;
    std::vector<Complex> diagonal_entries() const;

    bool all_finite() const noexcept;
    CMatrix conj_transpose() const;

    CMatrix& operator+=(const CMatrix& other);
    CMatrix& operator-=(const CMatrix& other);
    CMatrix& operator*=(Complex scalar);

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

CMatrix operator+(CMatrix lhs, const CMatrix& rhs);
CMatrix operator-(CMatrix lhs, const CMatrix& rhs);
CMatrix operator-(CMatrix m);
CMatrix operator*(Complex scalar, CMatrix m);
CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);

CMatrix matmul(const CMatrix& a, const CMatrix& b);

/// Frobenius norm.
double frobenius(const CMatrix& a);
/// Maximum absolute column sum.
double norm1(const CMatrix& a);
/// Maximum absolute row sum.
double norm_inf(const CMatrix& a);

/// LU factorization with partial pivoting. A pivot is treated as zero when
/// its magnitude is at most n * eps * (largest absolute row sum of A).
class LuFactorization {
public:
    explicit LuFactorization(const CMatrix& a);

    CMatrix solve(const CMatrix& b) const;
    std::vector<Complex> solve(std::span<const Complex> b) const;
    std::size_t size() const noexcept { return lu_.rows(); }

private:
    CMatrix lu_;
    std::vector<std::size_t> perm_;
};

/// Solves A X = B. Throws SingularMatrix / DimensionMismatch.
CMatrix solve(const CMatrix& a, const CMatrix& b);
CMatrix inverse(const CMatrix& a);

struct EigenDecomposition {
    std::vector<Complex> eigenvalues;
    CMatrix T;      // columns are unit-norm eigenvectors
    CMatrix T_inv;  // empty when T is numerically singular
    double cond_T = 0.0;   // ||T||_1 ||T_inv||_1, +inf when T_inv is empty
    double min_gap = 0.0;  // +inf when there is a single eigenvalue
};

/// Eigenvalues of a square matrix, ordered by lex_order.
/// Balancing, Householder Hessenberg reduction, then shifted complex QR.
std::vector<Complex> eigenvalues(const CMatrix& a);

/// Full eigendecomposition. Eigenvectors come from inverse iteration and are
/// normalized so that the first non-negligible component is real positive.
EigenDecomposition eig(const CMatrix& q);

/// True iff the minimum eigenvalue gap exceeds tol * max(1, max |lambda|).
bool check_distinct(const EigenDecomposition& dec, double tol);

double min_pairwise_gap(std::span<const Complex> values);

/// Permutation ordering values by real part, then imaginary part. Real parts
/// within tol * max(1, |z|) of the first member of a run count as equal, so
/// rounding noise in the real part does not decide the order.
std::vector<std::size_t> lex_order(std::span<const Complex> values, double tol = 1e-9);

void sort_lex(std::vector<Complex>& values, double tol = 1e-9);

}  // namespace qcomm
