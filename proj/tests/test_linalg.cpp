#include <doctest.h>

#include <numbers>

#include "qcomm/error.hpp"
#include "qcomm/linalg.hpp"
#include "qcomm/matching.hpp"
#include "support/oracles.hpp"

using namespace qcomm;
using qcomm::testing::max_abs_diff;
using qcomm::testing::Rng;

namespace {

const Complex kOmega3 = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

// Unitary DFT matrix written out directly from its entry formula.
CMatrix dft(std::size_t d) {
    CMatrix f(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            f(r, c) = std::polar(1.0 / std::sqrt(double(d)), 2.0 * std::numbers::pi * double(r * c) / double(d));
    return f;
}

}  // namespace

TEST_CASE("matmul: identity, diagonal product and naive oracle") {
    Rng rng(1);
    const CMatrix a = rng.matrix(4, 4, 3.0);
    CHECK(matmul(CMatrix::identity(4), a) == a);

    const std::vector<Complex> u{1.0, Complex{0, 2}, -3.0};
    const std::vector<Complex> l{Complex{2, 1}, 5.0, Complex{0, -1}};
    const CMatrix prod = CMatrix::diagonal(u) * CMatrix::diagonal(l);
    for (std::size_t i = 0; i < 3; ++i) CHECK(prod(i, i) == u[i] * l[i]);
    CHECK(prod(0, 1) == Complex{});

    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(1, 5));
        const auto m = static_cast<std::size_t>(rng.integer(1, 5));
        const auto k = static_cast<std::size_t>(rng.integer(1, 5));
        const CMatrix x = rng.matrix(n, k, 2.0);
        const CMatrix y = rng.matrix(k, m, 2.0);
        CHECK(max_abs_diff(matmul(x, y), qcomm::testing::naive_matmul(x, y)) < 1e-14);
    }
    CHECK(code_of([] { (void)matmul(CMatrix(2, 3), CMatrix(2, 3)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("solve and inverse") {
    Rng rng(2);
    const CMatrix b = rng.matrix(3, 2, 1.0);
    CHECK(max_abs_diff(solve(CMatrix::identity(3), b), b) == 0.0);

    const std::vector<Complex> d{1.0, 2.0, 4.0};
    const std::vector<Complex> dinv{1.0, 0.5, 0.25};
    CHECK(max_abs_diff(solve(CMatrix::diagonal(d), CMatrix::identity(3)), CMatrix::diagonal(dinv)) == 0.0);
    CHECK(max_abs_diff(inverse(CMatrix::diagonal(d)), CMatrix::diagonal(dinv)) == 0.0);
    CHECK(inverse(CMatrix::identity(5)) == CMatrix::identity(5));

    for (std::size_t n : {1u, 2u, 4u, 8u, 16u}) {
        const CMatrix f = dft(n);
        CHECK(max_abs_diff(inverse(f), f.conj_transpose()) < 1e-12);
    }

    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(1, 8));
        const CMatrix a = qcomm::testing::well_conditioned(rng, n);
        const CMatrix x0 = rng.matrix(n, 3, 2.0);
        const CMatrix x = solve(a, matmul(a, x0));
        CHECK(frobenius(x - x0) <= 1e-10 * frobenius(x0));

        const CMatrix ai = inverse(a);
        const double cond = norm1(a) * norm1(ai);
        CHECK(frobenius(matmul(a, ai) - CMatrix::identity(n)) <= 1e-8 * cond);
    }
}

TEST_CASE("solve: singular and mismatched inputs") {
    const CMatrix singular{{1.0, 2.0}, {2.0, 4.0}};
    CHECK(code_of([&] { (void)solve(singular, CMatrix::identity(2)); }) == ErrorCode::SingularMatrix);
    CHECK(code_of([] { (void)inverse(CMatrix(3, 3)); }) == ErrorCode::SingularMatrix);
    CHECK(code_of([] { (void)solve(CMatrix(2, 3), CMatrix(2, 1)); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([] { (void)solve(CMatrix::identity(2), CMatrix(3, 1)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("frobenius") {
    CHECK(frobenius(CMatrix(3, 3)) == 0.0);
    CHECK(frobenius(CMatrix::identity(5)) == doctest::Approx(std::sqrt(5.0)));
    Rng rng(3);
    const CMatrix a = rng.matrix(4, 3, 2.0);
    double s = 0.0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 3; ++c) s += std::norm(a(r, c));
    CHECK(frobenius(a) == doctest::Approx(std::sqrt(s)).epsilon(1e-14));
}

TEST_CASE("eig: diagonal input is sorted and T is a scaled permutation") {
    const std::vector<Complex> d{3.0, 1.0, 2.0};
    const auto dec = eig(CMatrix::diagonal(d));
    REQUIRE(dec.eigenvalues.size() == 3);
    CHECK(std::abs(dec.eigenvalues[0] - 1.0) < 1e-15);
    CHECK(std::abs(dec.eigenvalues[1] - 2.0) < 1e-15);
    CHECK(std::abs(dec.eigenvalues[2] - 3.0) < 1e-15);
    // eigenvalue 1 lives in coordinate 1, 2 in coordinate 2, 3 in coordinate 0
    CHECK(std::abs(dec.T(1, 0) - 1.0) < 1e-14);
    CHECK(std::abs(dec.T(2, 1) - 1.0) < 1e-14);
    CHECK(std::abs(dec.T(0, 2) - 1.0) < 1e-14);
    CHECK(dec.min_gap == doctest::Approx(1.0));
}

TEST_CASE("eig: weighted circulant with corner 8 has eigenvalues 2, 2w, 2w^2") {
    const CMatrix q{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {8.0, 0.0, 0.0}};
    const auto dec = eig(q);
    REQUIRE(dec.eigenvalues.size() == 3);
    CHECK(std::abs(dec.eigenvalues[0] - 2.0 * kOmega3 * kOmega3) < 1e-13);
    CHECK(std::abs(dec.eigenvalues[1] - 2.0 * kOmega3) < 1e-13);
    CHECK(std::abs(dec.eigenvalues[2] - 2.0) < 1e-13);
    CHECK(check_distinct(dec, 1e-8));

    const CMatrix lhs = matmul(q, dec.T);
    const CMatrix rhs = matmul(dec.T, CMatrix::diagonal(dec.eigenvalues));
    CHECK(frobenius(lhs - rhs) < 1e-13);
}

TEST_CASE("eig: companion matrix of (x-1)(x-2)(x-3)") {
    const CMatrix pi{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {6.0, -11.0, 6.0}};
    const auto dec = eig(pi);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(dec.eigenvalues[i] - double(i + 1)) < 1e-12);
    // first non-negligible component of every eigenvector is real positive
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(dec.T(0, c).real() > 0.0);
        CHECK(dec.T(0, c).imag() == 0.0);
    }
}

TEST_CASE("eig: reconstruction, Eigen oracle and similarity invariance on random matrices") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = static_cast<std::size_t>(rng.integer(1, 8));
        const auto planted = qcomm::testing::planted_q(rng, d, 2.0, 0.2);
        const auto dec = eig(planted.q);
        REQUIRE(!dec.T_inv.empty());

        const CMatrix rebuilt = dec.T * CMatrix::diagonal(dec.eigenvalues) * dec.T_inv;
        CHECK(frobenius(rebuilt - planted.q) <= 1e-8 * (1.0 + frobenius(planted.q)) * dec.cond_T);
        CHECK(frobenius(dec.T * dec.T_inv - CMatrix::identity(d)) <= 1e-12 * dec.cond_T * double(d));

        CHECK(match_points(dec.eigenvalues, qcomm::testing::eigen_eigenvalues(planted.q)).max_distance < 1e-9);

        const CMatrix s = qcomm::testing::well_conditioned(rng, d);
        const auto similar = eigenvalues(s * planted.q * inverse(s));
        REQUIRE(similar.size() == d);
        for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(similar[i] - dec.eigenvalues[i]) < 1e-8);
    }
}

TEST_CASE("eig: general random matrices match Eigen") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = static_cast<std::size_t>(rng.integer(1, 12));
        const CMatrix a = rng.matrix(d, d, 5.0);
        const auto mine = eigenvalues(a);
        const auto ref = qcomm::testing::eigen_eigenvalues(a);
        CHECK(match_points(mine, ref).max_distance < 1e-8 * (1.0 + frobenius(a)));
    }
}

TEST_CASE("eig: repeated eigenvalue yields a singular T and fails check_distinct") {
    const std::vector<Complex> d{1.0, 1.0, 2.0};
    const auto dec = eig(CMatrix::diagonal(d));
    CHECK_FALSE(check_distinct(dec, 1e-8));
    CHECK(dec.min_gap < 1e-12);
}

TEST_CASE("check_distinct thresholds") {
    EigenDecomposition dec;
    dec.eigenvalues = {1.0, 2.0, 3.0};
    dec.min_gap = min_pairwise_gap(dec.eigenvalues);
    CHECK(check_distinct(dec, 1e-8));

    dec.eigenvalues = {1.0, 1.0 + 1e-12, 3.0};
    dec.min_gap = min_pairwise_gap(dec.eigenvalues);
    CHECK_FALSE(check_distinct(dec, 1e-8));

    dec.eigenvalues = {2.0, 2.0 * kOmega3, 2.0 * kOmega3 * kOmega3};
    dec.min_gap = min_pairwise_gap(dec.eigenvalues);
    CHECK(check_distinct(dec, 1e-8));
}

TEST_CASE("lex_order treats rounding noise in the real part as a tie") {
    const std::vector<Complex> v{Complex{-1.0 + 1e-15, 1.0}, Complex{-1.0, -1.0}, Complex{2.0, 0.0},
                                 Complex{-3.0, 5.0}};
    const auto idx = lex_order(v);
    CHECK(idx == std::vector<std::size_t>{3, 1, 0, 2});
}
