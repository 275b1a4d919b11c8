#include "qcomm/linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "qcomm/error.hpp"

namespace qcomm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("{}: shapes {}x{} and {}x{} differ", op, a.rows(), a.cols(),
                                b.rows(), b.cols()));
    }
}

void require_square(const CMatrix& a, const char* op) {
    if (!a.is_square()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("{}: matrix is {}x{}, expected square", op, a.rows(), a.cols()));
    }
}

// Parlett-Reinsch balancing with radix 2; exact in floating point.
void balance(CMatrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    bool converged = false;
    int sweeps = 0;
    while (!converged && sweeps++ < 100) {
        converged = true;
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c >= g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                converged = false;
                for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

void reduce_to_hessenberg(CMatrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<Complex> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm = std::hypot(xnorm, std::abs(a(i, k)));
        if (xnorm == 0.0) continue;
        const Complex x0 = a(k + 1, k);
        const Complex phase = std::abs(x0) == 0.0 ? Complex{1.0} : x0 / std::abs(x0);
        const Complex alpha = -phase * xnorm;

        for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
        v[k + 1] -= alpha;
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm = std::hypot(vnorm, std::abs(v[i]));
        if (vnorm == 0.0) continue;
        for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;

        // A <- (I - 2vv^H) A
        for (std::size_t j = k; j < n; ++j) {
            Complex dot = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * a(i, j);
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= 2.0 * v[i] * dot;
        }
        // A <- A (I - 2vv^H)
        for (std::size_t i = 0; i < n; ++i) {
            Complex dot = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= 2.0 * dot * std::conj(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

struct Givens {
    double c = 1.0;
    Complex s = 0.0;
};

// Rotation G = [c s; -conj(s) c] with G [a; b] = [r; 0].
Givens make_givens(Complex a, Complex b) {
    const double abs_b = std::abs(b);
    if (abs_b == 0.0) return {1.0, 0.0};
    const double abs_a = std::abs(a);
    if (abs_a == 0.0) return {0.0, std::conj(b) / abs_b};
    const double norm = std::hypot(abs_a, abs_b);
    const Complex alpha = a / abs_a;
    return {abs_a / norm, alpha * std::conj(b) / norm};
}

Complex wilkinson_shift(Complex a, Complex b, Complex c, Complex d) {
    const Complex t = 0.5 * (a - d);
    const Complex disc = std::sqrt(t * t + b * c);
    const Complex plus = t + disc;
    const Complex minus = t - disc;
    const Complex denom = std::abs(plus) >= std::abs(minus) ? plus : minus;
    if (std::abs(denom) == 0.0) return d;
    return d - b * c / denom;
}

// One explicitly shifted QR step on the active block [lo, hi] of H.
void qr_step(CMatrix& h, std::size_t lo, std::size_t hi, Complex mu, std::vector<Givens>& rot) {
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    rot.assign(hi - lo, {});
    for (std::size_t k = lo; k < hi; ++k) {
        const Givens g = make_givens(h(k, k), h(k + 1, k));
        rot[k - lo] = g;
        for (std::size_t j = k; j <= hi; ++j) {
            const Complex top = h(k, j);
            const Complex bot = h(k + 1, j);
            h(k, j) = g.c * top + g.s * bot;
            h(k + 1, j) = -std::conj(g.s) * top + g.c * bot;
        }
        h(k + 1, k) = 0.0;
    }
    for (std::size_t k = lo; k < hi; ++k) {
        const Givens& g = rot[k - lo];
        for (std::size_t i = lo; i <= k + 1; ++i) {
            const Complex left = h(i, k);
            const Complex right = h(i, k + 1);
            h(i, k) = g.c * left + std::conj(g.s) * right;
            h(i, k + 1) = -g.s * left + g.c * right;
        }
    }
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
}

std::vector<Complex> hessenberg_eigenvalues(CMatrix h) {
    const std::size_t n = h.rows();
    std::vector<Complex> values(n);
    if (n == 0) return values;
    const double hnorm = std::max(frobenius(h), std::numeric_limits<double>::min());
    const std::size_t max_total = 100 * std::max<std::size_t>(n, 4);
    std::vector<Givens> rot;

    std::size_t hi = n - 1;
    std::size_t iter = 0;
    std::size_t total = 0;
    while (hi > 0) {
        std::size_t lo = hi;
        while (lo > 0) {
            double s = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
            if (s == 0.0) s = hnorm;
            if (std::abs(h(lo, lo - 1)) <= kEps * s) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            values[hi] = h(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        if (++total > max_total) {
            throw Error(ErrorCode::NumericalFailure,
                        fmt::format("eigenvalue iteration did not converge after {} steps", total));
        }
        ++iter;
        Complex mu;
        if (iter % 10 == 0) {
            // exceptional shift to break cycles
            mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1).real()) + 0.75 * std::abs(h(hi, hi - 1));
        } else {
            mu = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
        }
        qr_step(h, lo, hi, mu, rot);
    }
    values[0] = h(0, 0);
    return values;
}

// Deterministic start vector for inverse iteration.
std::vector<Complex> start_vector(std::size_t n, unsigned salt) {
    std::vector<Complex> v(n);
    std::uint64_t state = 0x9E3779B97F4A7C15ull ^ (salt * 0xBF58476D1CE4E5B9ull);
    auto next = [&state] {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state >> 11) / static_cast<double>(1ull << 53);
    };
    for (auto& x : v) x = Complex{0.5 + next(), next() - 0.5};
    return v;
}

double vector_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

// LU of (Q - lambda I) where tiny pivots are replaced instead of rejected.
struct PerturbedLu {
    CMatrix lu;
    std::vector<std::size_t> perm;

    PerturbedLu(const CMatrix& q, Complex lambda, double floor) : lu(q), perm(q.rows()) {
        const std::size_t n = q.rows();
        for (std::size_t i = 0; i < n; ++i) lu(i, i) -= lambda;
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
                std::swap(perm[k], perm[p]);
            }
            if (std::abs(lu(k, k)) < floor) lu(k, k) = floor;
            for (std::size_t i = k + 1; i < n; ++i) {
                lu(i, k) /= lu(k, k);
                for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
            }
        }
    }

    std::vector<Complex> solve(std::span<const Complex> b) const {
        const std::size_t n = lu.rows();
        std::vector<Complex> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
            x[i] /= lu(i, i);
        }
        return x;
    }
};

double eigen_residual(const CMatrix& q, Complex lambda, std::span<const Complex> v) {
    const std::size_t n = q.rows();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc = -lambda * v[i];
        for (std::size_t j = 0; j < n; ++j) acc += q(i, j) * v[j];
        s += std::norm(acc);
    }
    return std::sqrt(s);
}

std::vector<Complex> inverse_iteration(const CMatrix& q, Complex lambda, double qnorm) {
    const std::size_t n = q.rows();
    const double floor = std::max(kEps * qnorm, std::numeric_limits<double>::min());
    const PerturbedLu lu(q, lambda, floor);
    const double target = 10.0 * static_cast<double>(n) * kEps * std::max(qnorm, 1.0);

    std::vector<Complex> best;
    double best_res = kInf;
    for (unsigned attempt = 0; attempt < 3 && best_res > target; ++attempt) {
        std::vector<Complex> v = start_vector(n, attempt);
        for (int it = 0; it < 4; ++it) {
            v = lu.solve(v);
            const double nv = vector_norm(v);
            if (!(nv > 0.0) || !std::isfinite(nv)) break;
            for (auto& x : v) x /= nv;
            const double res = eigen_residual(q, lambda, v);
            if (res < best_res) {
                best_res = res;
                best = v;
            }
            if (it >= 1 && res <= target) break;
        }
    }
    if (best.empty()) {
        throw Error(ErrorCode::NumericalFailure, "inverse iteration produced no eigenvector");
    }
    return best;
}

void fix_phase(std::vector<Complex>& v) {
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double mag = std::abs(v[k]);
        if (mag > 1e-10) {
            const Complex rot = std::conj(v[k]) / mag;
            for (auto& y : v) y *= rot;
            v[k] = mag;
            return;
        }
    }
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("{} entries do not fill a {}x{} matrix", entries_.size(), rows, cols));
    }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> values) {
    CMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

std::vector<Complex> CMatrix::column(std::size_t c) const {
    std::vector<Complex> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

std::vector<Complex> CMatrix::diagonal_entries() const {
    std::vector<Complex> out(std::min(rows_, cols_));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(i, i);
    return out;
}

bool CMatrix::all_finite() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

CMatrix CMatrix::conj_transpose() const {
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
    require_same_shape(*this, other, "add");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
    require_same_shape(*this, other, "subtract");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(Complex scalar) {
    for (auto& x : entries_) x *= scalar;
    return *this;
}

CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }
CMatrix operator-(CMatrix m) { return m *= -1.0; }
CMatrix operator*(Complex scalar, CMatrix m) { return m *= scalar; }
CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs) { return matmul(lhs, rhs); }

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("matmul: {}x{} times {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
    }
    CMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

double frobenius(const CMatrix& a) {
    double s = 0.0;
    for (const auto& x : a.entries()) s += std::norm(x);
    return std::sqrt(s);
}

double norm1(const CMatrix& a) {
    double best = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) s += std::abs(a(r, c));
        best = std::max(best, s);
    }
    return best;
}

double norm_inf(const CMatrix& a) {
    double best = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) s += std::abs(a(r, c));
        best = std::max(best, s);
    }
    return best;
}

LuFactorization::LuFactorization(const CMatrix& a) : lu_(a), perm_(a.rows()) {
    require_square(a, "lu");
    const std::size_t n = a.rows();
    const double threshold = static_cast<double>(n) * kEps * norm_inf(a);
    std::iota(perm_.begin(), perm_.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
        if (std::abs(lu_(p, k)) <= threshold) {
            throw Error(ErrorCode::SingularMatrix,
                        fmt::format("pivot {} of {} below singularity threshold {:.3e}", k, n, threshold));
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            std::swap(perm_[k], perm_[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            lu_(i, k) /= lu_(k, k);
            const Complex f = lu_(i, k);
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

std::vector<Complex> LuFactorization::solve(std::span<const Complex> b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw Error(ErrorCode::DimensionMismatch, "lu solve: rhs length");
    std::vector<Complex> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
        x[i] /= lu_(i, i);
    }
    return x;
}

CMatrix LuFactorization::solve(const CMatrix& b) const {
    if (b.rows() != lu_.rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("solve: rhs has {} rows, expected {}", b.rows(), lu_.rows()));
    }
    CMatrix x(b.rows(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        const auto col = solve(std::span<const Complex>(b.column(c)));
        for (std::size_t r = 0; r < b.rows(); ++r) x(r, c) = col[r];
    }
    return x;
}

CMatrix solve(const CMatrix& a, const CMatrix& b) {
    require_square(a, "solve");
    if (b.rows() != a.rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("solve: rhs has {} rows, expected {}", b.rows(), a.rows()));
    }
    return LuFactorization(a).solve(b);
}

CMatrix inverse(const CMatrix& a) {
    require_square(a, "inverse");
    return LuFactorization(a).solve(CMatrix::identity(a.rows()));
}

std::vector<Complex> eigenvalues(const CMatrix& a) {
    require_square(a, "eigenvalues");
    if (!a.all_finite()) throw Error(ErrorCode::NumericalFailure, "matrix has non-finite entries");
    CMatrix h = a;
    balance(h);
    reduce_to_hessenberg(h);
    auto values = hessenberg_eigenvalues(std::move(h));
    sort_lex(values);
    return values;
}

EigenDecomposition eig(const CMatrix& q) {
    EigenDecomposition dec;
    dec.eigenvalues = eigenvalues(q);
    dec.min_gap = min_pairwise_gap(dec.eigenvalues);

    const std::size_t n = q.rows();
    const double qnorm = frobenius(q);
    dec.T = CMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        auto v = inverse_iteration(q, dec.eigenvalues[c], qnorm);
        fix_phase(v);
        for (std::size_t r = 0; r < n; ++r) dec.T(r, c) = v[r];
    }
    try {
        dec.T_inv = inverse(dec.T);
        dec.cond_T = norm1(dec.T) * norm1(dec.T_inv);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
        dec.T_inv = CMatrix();
        dec.cond_T = kInf;
    }
    return dec;
}

bool check_distinct(const EigenDecomposition& dec, double tol) {
    double scale = 1.0;
    for (const auto& l : dec.eigenvalues) scale = std::max(scale, std::abs(l));
    return dec.min_gap > tol * scale;
}

double min_pairwise_gap(std::span<const Complex> values) {
    double gap = kInf;
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            gap = std::min(gap, std::abs(values[i] - values[j]));
    return gap;
}

std::vector<std::size_t> lex_order(std::span<const Complex> values, double tol) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return values[a].real() < values[b].real();
    });
    std::size_t start = 0;
    while (start < idx.size()) {
        const Complex head = values[idx[start]];
        const double window = tol * std::max(1.0, std::abs(head));
        std::size_t end = start + 1;
        while (end < idx.size() && values[idx[end]].real() - head.real() <= window) ++end;
        std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                         idx.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) { return values[a].imag() < values[b].imag(); });
        start = end;
    }
    return idx;
}

void sort_lex(std::vector<Complex>& values, double tol) {
    const auto idx = lex_order(values, tol);
    std::vector<Complex> sorted;
    sorted.reserve(values.size());
    for (auto i : idx) sorted.push_back(values[i]);
    values = std::move(sorted);
}

}  // namespace qcomm
