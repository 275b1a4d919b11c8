#include "qcomm/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qcomm/error.hpp"

namespace qcomm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Taylor coefficients t_j = p^(j)(c) / j! by repeated synthetic division.
std::vector<Complex> taylor_shift(std::span<const Complex> a, Complex c) {
    std::vector<Complex> t(a.begin(), a.end());
    const std::size_t n = t.size();
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t k = n - 1; k > j; --k) t[k - 1] += c * t[k];
    return t;
}

// Same recurrence on magnitudes: bounds the rounding error of each t_j.
std::vector<double> taylor_shift_abs(std::span<const Complex> a, double c) {
    std::vector<double> t(a.size());
    std::transform(a.begin(), a.end(), t.begin(), [](Complex z) { return std::abs(z); });
    const std::size_t n = t.size();
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t k = n - 1; k > j; --k) t[k - 1] += c * t[k];
    return t;
}

bool is_numerical_multiple_root(const Polynomial& p, Complex c, std::size_t m, double uncertainty) {
    const auto t = taylor_shift(p.coeffs(), c);
    const auto b = taylor_shift_abs(p.coeffs(), std::abs(c));
    const auto ones = taylor_shift_abs(std::vector<Complex>(p.coeffs().size(), 1.0), std::abs(c));
    const double k = 16.0 * static_cast<double>(p.degree() + 1);
    for (std::size_t j = 0; j < m && j < t.size(); ++j)
        if (std::abs(t[j]) > k * kEps * b[j] + uncertainty * ones[j]) return false;
    return true;
}

Complex lex_mean(std::span<const Complex> values, std::span<const std::size_t> members) {
    std::vector<Complex> pts;
    pts.reserve(members.size());
    for (auto i : members) pts.push_back(values[i]);
    sort_lex(pts);
    Complex sum{};
    for (const auto& z : pts) sum += z;
    return sum / static_cast<double>(pts.size());
}

// Connected components under the link predicate, each listed in input order.
template <typename Linked>
std::vector<std::vector<std::size_t>> components(std::span<const std::size_t> members, Linked linked) {
    const std::size_t m = members.size();
    std::vector<std::size_t> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (linked(members[i], members[j])) parent[find(i)] = find(j);

    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> slot(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = find(i);
        if (slot[r] == m) {
            slot[r] = out.size();
            out.emplace_back();
        }
        out[slot[r]].push_back(members[i]);
    }
    return out;
}

// Collects groups of computed roots that form a numerical multiple root.
void find_multiple_roots(const Polynomial& p, double uncertainty, std::span<const Complex> rs,
                         std::span<const std::size_t> members, double window,
                         std::vector<std::vector<std::size_t>>& found) {
    auto groups = components(members, [&](std::size_t a, std::size_t b) {
        const double scale = std::max({1.0, std::abs(rs[a]), std::abs(rs[b])});
        return std::abs(rs[a] - rs[b]) <= window * scale;
    });
    for (auto& group : groups) {
        if (group.size() < 2) continue;
        if (is_numerical_multiple_root(p, lex_mean(rs, group), group.size(), uncertainty)) {
            found.push_back(std::move(group));
        } else if (window > 1e-12) {
            find_multiple_roots(p, uncertainty, rs, group, window / 10.0, found);
        }
    }
}

Complex newton_polish(const Polynomial& p, Complex z) {
    const auto a = p.coeffs();
    for (int it = 0; it < 3; ++it) {
        Complex val = a.back();
        Complex der{};
        for (std::size_t k = a.size() - 1; k-- > 0;) {
            der = der * z + val;
            val = val * z + a[k];
        }
        if (val == Complex{} || der == Complex{}) break;
        const Complex next = z - val / der;
        if (!(std::abs(p(next)) < std::abs(val))) break;
        z = next;
    }
    return z;
}

std::vector<RootCluster> cluster_roots_impl(std::span<const Complex> rs, double tol_abs, double tol_rel,
                                            const Polynomial* p) {
    if (tol_abs < 0.0 || tol_rel < 0.0) throw Error(ErrorCode::InvalidArgument, "negative cluster tolerance");
    std::vector<std::size_t> all(rs.size());
    std::iota(all.begin(), all.end(), 0);
    const auto groups = components(all, [&](std::size_t a, std::size_t b) {
        return std::abs(rs[a] - rs[b]) <= tol_abs + tol_rel * std::max(std::abs(rs[a]), std::abs(rs[b]));
    });

    std::vector<RootCluster> clusters;
    std::vector<Complex> reps;
    clusters.reserve(groups.size());
    reps.reserve(groups.size());
    for (const auto& g : groups) {
        RootCluster c{lex_mean(rs, g), g.size(), 0.0};
        if (p != nullptr)
            for (auto i : g) c.member_residual = std::max(c.member_residual, std::abs((*p)(rs[i])));
        reps.push_back(c.representative);
        clusters.push_back(c);
    }
    std::vector<RootCluster> sorted;
    sorted.reserve(clusters.size());
    for (auto i : lex_order(reps)) sorted.push_back(clusters[i]);
    return sorted;
}

}  // namespace

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial::Polynomial(std::initializer_list<Complex> coeffs) : coeffs_(coeffs) { trim(); }

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == Complex{}) coeffs_.pop_back();
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots) {
    std::vector<Complex> c{1.0};
    for (const auto& r : roots) {
        c.push_back(0.0);
        for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
        c[0] = -r * c[0];
    }
    return Polynomial(std::move(c));
}

Complex Polynomial::operator()(Complex z) const noexcept { return eval(*this, z); }

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t j = 1; j < coeffs_.size(); ++j) d[j - 1] = static_cast<double>(j) * coeffs_[j];
    return Polynomial(std::move(d));
}

double Polynomial::scale() const noexcept {
    if (coeffs_.empty()) return 1.0;
    const double lead = std::abs(coeffs_.back());
    double s = 1.0;
    for (const auto& c : coeffs_) s = std::max(s, std::abs(c) / lead);
    return s;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) coeffs_[j] += other.coeffs_[j];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) coeffs_[j] -= other.coeffs_[j];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(Complex scalar) {
    for (auto& c : coeffs_) c *= scalar;
    trim();
    return *this;
}

Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
Polynomial operator*(Complex scalar, Polynomial p) { return p *= scalar; }

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
    if (lhs.is_zero() || rhs.is_zero()) return {};
    std::vector<Complex> c(lhs.coeffs().size() + rhs.coeffs().size() - 1);
    for (std::size_t i = 0; i < lhs.coeffs().size(); ++i)
        for (std::size_t j = 0; j < rhs.coeffs().size(); ++j) c[i + j] += lhs.coeffs()[i] * rhs.coeffs()[j];
    return Polynomial(std::move(c));
}

Complex eval(const Polynomial& p, Complex z) noexcept {
    const auto a = p.coeffs();
    Complex acc{};
    for (std::size_t k = a.size(); k-- > 0;) acc = acc * z + a[k];
    return acc;
}

std::vector<Complex> roots(const Polynomial& p, double coeff_uncertainty) {
    if (coeff_uncertainty < 0.0) throw Error(ErrorCode::InvalidArgument, "negative coefficient uncertainty");
    if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "roots of the zero polynomial");
    if (p.degree() == 0) throw Error(ErrorCode::DegreeZero, "roots of a nonzero constant");

    const auto a = p.coeffs();
    std::size_t zeros = 0;
    while (a[zeros] == Complex{}) ++zeros;
    const Polynomial reduced(std::vector<Complex>(a.begin() + static_cast<std::ptrdiff_t>(zeros), a.end()));
    const std::size_t m = static_cast<std::size_t>(reduced.degree());

    std::vector<Complex> rs(zeros, Complex{});
    if (m == 1) {
        rs.push_back(-reduced.coeff(0) / reduced.coeff(1));
    } else if (m > 1) {
        // Frobenius companion form: ones on the subdiagonal, last column -c_j / c_m.
        CMatrix companion(m, m);
        const Complex lead = reduced.leading();
        for (std::size_t i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
        for (std::size_t i = 0; i < m; ++i) companion(i, m - 1) = -reduced.coeff(i) / lead;
        for (const auto& z : eigenvalues(companion)) rs.push_back(z);

        std::vector<std::size_t> members(m);
        std::iota(members.begin(), members.end(), zeros);
        std::vector<std::vector<std::size_t>> multiples;
        find_multiple_roots(p, coeff_uncertainty, rs, members, 1e-2, multiples);

        std::vector<bool> grouped(rs.size(), false);
        for (const auto& group : multiples) {
            // an m-fold root is a simple root of the (m-1)-th derivative
            Polynomial deriv = reduced;
            for (std::size_t k = 1; k < group.size(); ++k) deriv = deriv.derivative();
            const Complex c = newton_polish(deriv, lex_mean(rs, group));
            for (auto i : group) {
                rs[i] = c;
                grouped[i] = true;
            }
        }
        for (std::size_t i = zeros; i < rs.size(); ++i)
            if (!grouped[i]) rs[i] = newton_polish(reduced, rs[i]);
    }
    sort_lex(rs);
    return rs;
}

std::vector<RootCluster> cluster_roots(std::span<const Complex> rs, double tol_abs, double tol_rel) {
    return cluster_roots_impl(rs, tol_abs, tol_rel, nullptr);
}

std::vector<RootCluster> cluster_roots(const Polynomial& p, std::span<const Complex> rs, double tol_abs,
                                       double tol_rel) {
    return cluster_roots_impl(rs, tol_abs, tol_rel, &p);
}

ClusterTolerance default_cluster_tolerance(const Polynomial& p) { return {1e-8 * p.scale(), 1e-8}; }

}  // namespace qcomm
