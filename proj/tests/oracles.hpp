#pragma once

// Test-only oracles, independent of the library paths they check.

#include <twistor/all.hpp>

namespace oracles {

using namespace twistor;

// Product of two round 2-spheres of curvatures K1, K2 inside dim 4:
// R = K1 * (g1 ^ g1)/... restricted to the first block plus the same for the
// second, with g1 = diag(1,1,0,0), g2 = diag(0,0,1,1).
inline CurvatureTensor product_spheres_oracle(double K1, double K2) {
    BilinearStructure base = standard_pseudo(2, 0, true);
    Matrix g1 = Matrix::Zero(4, 4), g2 = Matrix::Zero(4, 4);
    g1(0, 0) = g1(1, 1) = 1.0;
    g2(2, 2) = g2(3, 3) = 1.0;
    Tensor4 R(4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int e = 0; e < 4; ++e)
                    R(a, b, c, e) = K1 * (g1(a, c) * g1(b, e) - g1(a, e) * g1(b, c)) +
                                    K2 * (g2(a, c) * g2(b, e) - g2(a, e) * g2(b, c));
    return CurvatureTensor{base, R};
}

// Complex-arithmetic evaluation of the 4i projection:
// Re[(Id - iJ) o R((Id + iJ)., (Id + iJ).) o (Id + iJ)] / 8, computed as the
// pullback of the complexified tensor through (Id + iJ) on all four covariant
// slots (the post-composition by (Id - iJ) turns into (Id + iJ) on the last
// slot after lowering with G).
inline Tensor4 four_i_component_complex(const CurvatureTensor& R, const ComplexStructure& j) {
    using C = std::complex<double>;
    const int d = R.base.dim();
    Eigen::MatrixXcd M(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) M(a, b) = C(a == b ? 1.0 : 0.0, j.J(a, b));
    Tensor4c F = complexify(R.R).pullback(M);
    Tensor4 out = real_part(F);
    out *= 1.0 / 8.0;
    return out;
}

// Brute-force first-Bianchi residual.
inline double bianchi_residual(const CurvatureTensor& R) {
    const int d = R.base.dim();
    double worst = 0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    worst = std::max(worst, std::abs(R.R(a, b, c, e) + R.R(b, c, a, e) +
                                                     R.R(c, a, b, e)));
    return worst;
}

// Scalar re-implementation of the symplectic E(r) formula for spot checks.
inline double E_of_r_entry(const Matrix& omega, const Matrix& r, int n, int a, int b, int c,
                           int e) {
    return -1.0 / (2.0 * (n + 1)) *
           (2.0 * omega(a, b) * r(c, e) + omega(a, c) * r(b, e) - omega(b, c) * r(a, e) +
            r(b, c) * omega(a, e) - r(a, c) * omega(b, e));
}

} // namespace oracles
