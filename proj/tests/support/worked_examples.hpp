#pragma once

// Fixtures for the two worked examples: the weighted circulant with corner 8
// and the companion matrix of (x-1)(x-2)(x-3). Both use the scalar data
// f1 -> (-5, 2, -3), f2 -> (4, 1, 2) at the eigenvalues in context order.
// w = exp(2 pi i / 3) is evaluated at full double precision.

#include <numbers>
#include <vector>

#include "qcomm/linalg.hpp"
#include "qcomm/poly.hpp"

namespace qcomm::testing {

inline const Complex kW = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
inline const Complex kW2 = kW * kW;

inline const std::vector<Complex> kF1Values{-5.0, 2.0, -3.0};
inline const std::vector<Complex> kF2Values{4.0, 1.0, 2.0};

// x^2 - 5x + 4, x^2 + 2x + 1, x^2 - 3x + 2
inline std::vector<Polynomial> expected_scalar_polys() {
    return {Polynomial{4.0, -5.0, 1.0}, Polynomial{1.0, 2.0, 1.0}, Polynomial{2.0, -3.0, 1.0}};
}

inline CMatrix circulant_example_q() { return CMatrix{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {8.0, 0.0, 0.0}}; }

// Eigenvalues in the closed-form order 2, 2w^2, 2w.
inline std::vector<Complex> circulant_example_eigenvalues() { return {2.0, 2.0 * kW2, 2.0 * kW}; }

// The four printed solutions, for root choices (1,-1,1), (1,-1,2), (4,-1,1), (4,-1,2).
inline std::vector<CMatrix> circulant_example_solutions() {
    const Complex w = kW;
    const Complex w2 = kW2;
    CMatrix s1{{2.0, -2.0 * w, -w2}, {-8.0 * w2, 2.0, -2.0 * w}, {-16.0 * w, -8.0 * w2, 2.0}};
    s1 *= 1.0 / 6.0;
    CMatrix s2{{8.0, 4.0 + 6.0 * w2, -1.0 - 3.0 * w2},
               {-8.0 - 24.0 * w2, 8.0, 4.0 + 6.0 * w2},
               {32.0 + 48.0 * w2, -8.0 - 24.0 * w2, 8.0}};
    s2 *= 1.0 / 12.0;
    CMatrix s3{{16.0, 10.0 + 4.0 * w2, 3.0 - 2.0 * w2},
               {24.0 - 16.0 * w2, 16.0, 10.0 + 4.0 * w2},
               {80.0 + 32.0 * w2, 24.0 - 16.0 * w2, 16.0}};
    s3 *= 1.0 / 12.0;
    CMatrix s4{{20.0, 10.0 + 6.0 * w2, 2.0 - 3.0 * w2},
               {16.0 - 24.0 * w2, 20.0, 10.0 + 6.0 * w2},
               {80.0 + 48.0 * w2, 16.0 - 24.0 * w2, 20.0}};
    s4 *= 1.0 / 12.0;
    return {s1, s2, s3, s4};
}

inline CMatrix companion_example_q() { return CMatrix{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {6.0, -11.0, 6.0}}; }

inline std::vector<CMatrix> companion_example_solutions() {
    CMatrix s1{{7.0, -8.0, 2.0}, {12.0, -15.0, 4.0}, {24.0, -32.0, 9.0}};
    CMatrix s2{{16.0, -19.0, 5.0}, {30.0, -39.0, 11.0}, {66.0, -91.0, 27.0}};
    s2 *= 0.5;
    CMatrix s3{{32.0, -31.0, 7.0}, {42.0, -45.0, 11.0}, {66.0, -79.0, 21.0}};
    s3 *= 0.5;
    CMatrix s4{{17.0, -17.0, 4.0}, {24.0, -27.0, 7.0}, {42.0, -53.0, 15.0}};
    return {s1, s2, s3, s4};
}

}  // namespace qcomm::testing
