#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twistor/curvature.hpp"
#include "twistor/spaces.hpp"
#include "twistor/twistor.hpp"
#include "twistor/types.hpp"

namespace twistor {

enum class Fixture {
    flat,
    sphere,
    hyperbolic,
    product_spheres,
    fubini_study_cp2,
    pseudo_sphere_22,
};

inline const char* fixture_name(Fixture f) {
    switch (f) {
        case Fixture::flat: return "flat";
        case Fixture::sphere: return "sphere";
        case Fixture::hyperbolic: return "hyperbolic";
        case Fixture::product_spheres: return "product_spheres";
        case Fixture::fubini_study_cp2: return "fubini_study_cp2";
        default: return "pseudo_sphere_22";
    }
}

// Coordinate-chart metric evaluator.  Space forms use the conformally flat
// chart g = eta / (1 + K <x,x>_eta / 4)^2 with K = +-1/radius^2; the product
// uses one such 2-dimensional factor per sphere; CP^2 uses the Fubini-Study
// potential scale * log(1 + |z|^2) in the affine chart, with real coordinates
// ordered (x1, y1, x2, y2) so the chart volume is the complex orientation.
struct ChartMetric {
    int dim = 4;
    int p = 2, q = 0;
    Fixture fixture = Fixture::sphere;
    double radius = 1.0;
    double radius2 = 1.0; // second factor of product_spheres
    double scale = 1.0;   // Fubini-Study potential scale
    double fd_step = 1e-3;
    bool richardson = true;
};

inline ChartMetric make_chart(Fixture f, int dim = 4, double radius = 1.0, double radius2 = 1.0,
                              double scale = 1.0) {
    ChartMetric c;
    c.fixture = f;
    c.dim = dim;
    c.radius = radius;
    c.radius2 = radius2;
    c.scale = scale;
    switch (f) {
        case Fixture::flat:
        case Fixture::sphere:
        case Fixture::hyperbolic:
            if (dim % 2 != 0 || dim < 2) throw DimensionError("make_chart: dim must be even");
            c.p = dim / 2;
            c.q = 0;
            break;
        case Fixture::product_spheres:
        case Fixture::fubini_study_cp2:
            if (dim != 4) throw DimensionError("make_chart: fixture requires dim 4");
            c.p = 2;
            c.q = 0;
            break;
        case Fixture::pseudo_sphere_22:
            if (dim != 4) throw DimensionError("make_chart: fixture requires dim 4");
            c.p = 1;
            c.q = 1;
            break;
    }
    if (radius <= 0 || radius2 <= 0 || scale <= 0)
        throw PreconditionError("make_chart: radius/scale must be positive");
    return c;
}

namespace detail {

inline Matrix space_form_metric(const Vector& x, const Matrix& eta, double K) {
    double q = x.dot(eta * x);
    double f = 1.0 + 0.25 * K * q;
    if (std::abs(f) < 0.05)
        throw PreconditionError("chart domain: point too close to the conformal boundary");
    return eta / (f * f);
}

inline Matrix fubini_study_metric(const Vector& x, double scale) {
    using C = std::complex<double>;
    C z1(x[0], x[1]), z2(x[2], x[3]);
    double f = 1.0 + std::norm(z1) + std::norm(z2);
    C z[2] = {z1, z2};
    // h_{i jbar} = scale * (f delta_ij - zbar_i z_j) / f^2
    C h[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            h[i][j] = scale * ((i == j ? C(f) : C(0)) - std::conj(z[i]) * z[j]) / (f * f);
    // complex frame of the real coordinate vectors (x1, y1, x2, y2)
    C frame[4][2] = {{C(1, 0), C(0, 0)},
                     {C(0, 1), C(0, 0)},
                     {C(0, 0), C(1, 0)},
                     {C(0, 0), C(0, 1)}};
    Matrix G(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            C acc(0);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    acc += h[i][j] * frame[a][i] * std::conj(frame[b][j]);
            G(a, b) = 2.0 * acc.real();
        }
    return G;
}

} // namespace detail

inline Matrix metric_at(const ChartMetric& chart, const Vector& x) {
    if (x.size() != chart.dim) throw DimensionError("metric_at: point dimension mismatch");
    const int d = chart.dim;
    switch (chart.fixture) {
        case Fixture::flat: {
            BilinearStructure b = standard_pseudo(chart.p, chart.q, false);
            return b.form;
        }
        case Fixture::sphere:
            return detail::space_form_metric(x, Matrix::Identity(d, d),
                                             1.0 / (chart.radius * chart.radius));
        case Fixture::hyperbolic:
            return detail::space_form_metric(x, Matrix::Identity(d, d),
                                             -1.0 / (chart.radius * chart.radius));
        case Fixture::product_spheres: {
            Matrix G = Matrix::Zero(4, 4);
            Vector x1 = x.head(2), x2 = x.tail(2);
            G.topLeftCorner(2, 2) = detail::space_form_metric(
                x1, Matrix::Identity(2, 2), 1.0 / (chart.radius * chart.radius));
            G.bottomRightCorner(2, 2) = detail::space_form_metric(
                x2, Matrix::Identity(2, 2), 1.0 / (chart.radius2 * chart.radius2));
            return G;
        }
        case Fixture::fubini_study_cp2:
            return detail::fubini_study_metric(x, chart.scale);
        case Fixture::pseudo_sphere_22: {
            BilinearStructure b = standard_pseudo(1, 1, false);
            return detail::space_form_metric(x, b.form, 1.0 / (chart.radius * chart.radius));
        }
    }
    throw Error("metric_at: unreachable");
}

namespace detail {

// 4th-order central difference of a matrix-valued function along axis b.
template <typename Fn>
inline Matrix central4(const Fn& f, const Vector& x, int b, double h) {
    Vector e = Vector::Unit(x.size(), b);
    return (-f(x + 2.0 * h * e) + 8.0 * f(x + h * e) - 8.0 * f(x - h * e) + f(x - 2.0 * h * e)) /
           (12.0 * h);
}

} // namespace detail

// Christoffel symbols Gamma[a](b, c) = Gamma^a_{bc} from 4th-order central
// differences of the metric at step h (Richardson handled by the caller).
inline std::vector<Matrix> christoffel_at_step(const ChartMetric& chart, const Vector& x, double h) {
    const int d = chart.dim;
    Matrix ginv = metric_at(chart, x).inverse();
    std::vector<Matrix> dg(static_cast<std::size_t>(d));
    auto f = [&](const Vector& y) { return metric_at(chart, y); };
    for (int b = 0; b < d; ++b) dg[static_cast<std::size_t>(b)] = detail::central4(f, x, b, h);
    std::vector<Matrix> gamma(static_cast<std::size_t>(d), Matrix::Zero(d, d));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) {
                double s = 0;
                for (int e = 0; e < d; ++e)
                    s += ginv(a, e) * (dg[static_cast<std::size_t>(b)](e, c) +
                                       dg[static_cast<std::size_t>(c)](e, b) -
                                       dg[static_cast<std::size_t>(e)](b, c));
                gamma[static_cast<std::size_t>(a)](b, c) = 0.5 * s;
            }
    return gamma;
}

inline std::vector<Matrix> christoffel_at(const ChartMetric& chart, const Vector& x) {
    if (chart.fd_step < 1e-6 || chart.fd_step > 1e-1)
        throw PreconditionError("christoffel_at: fd_step outside [1e-6, 1e-1]");
    std::vector<Matrix> g1 = christoffel_at_step(chart, x, chart.fd_step);
    if (!chart.richardson) return g1;
    std::vector<Matrix> g2 = christoffel_at_step(chart, x, 0.5 * chart.fd_step);
    for (std::size_t a = 0; a < g1.size(); ++a)
        g1[a] = (16.0 * g2[a] - g1[a]) / 15.0;
    return g1;
}

namespace detail {

// Coordinate curvature at one step h, already in the sign convention of
// CurvatureTensor (unit sphere -> +1): R4 = -g(R_std(., .) ., .).
inline Tensor4 coordinate_curvature_step(const ChartMetric& chart, const Vector& x, double h) {
    const int d = chart.dim;
    std::vector<Matrix> gamma = christoffel_at_step(chart, x, h);
    // dGamma[m][a](b,c) = d_m Gamma^a_{bc}
    std::vector<std::vector<Matrix>> dgamma(static_cast<std::size_t>(d));
    for (int m = 0; m < d; ++m) {
        Vector e = Vector::Unit(d, m);
        std::vector<Matrix> gp1 = christoffel_at_step(chart, x + h * e, h);
        std::vector<Matrix> gp2 = christoffel_at_step(chart, x + 2.0 * h * e, h);
        std::vector<Matrix> gm1 = christoffel_at_step(chart, x - h * e, h);
        std::vector<Matrix> gm2 = christoffel_at_step(chart, x - 2.0 * h * e, h);
        dgamma[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a)
            dgamma[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)] =
                (-gp2[static_cast<std::size_t>(a)] + 8.0 * gp1[static_cast<std::size_t>(a)] -
                 8.0 * gm1[static_cast<std::size_t>(a)] + gm2[static_cast<std::size_t>(a)]) /
                (12.0 * h);
    }
    Matrix g = metric_at(chart, x);
    Tensor4 R(d);
    for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu)
            for (int sg = 0; sg < d; ++sg) {
                for (int rho = 0; rho < d; ++rho) {
                    double up = dgamma[static_cast<std::size_t>(mu)][static_cast<std::size_t>(rho)](nu, sg) -
                                dgamma[static_cast<std::size_t>(nu)][static_cast<std::size_t>(rho)](mu, sg);
                    for (int lam = 0; lam < d; ++lam)
                        up += gamma[static_cast<std::size_t>(rho)](mu, lam) *
                                  gamma[static_cast<std::size_t>(lam)](nu, sg) -
                              gamma[static_cast<std::size_t>(rho)](nu, lam) *
                                  gamma[static_cast<std::size_t>(lam)](mu, sg);
                    for (int t = 0; t < d; ++t) R(mu, nu, sg, t) -= g(t, rho) * up;
                }
            }
    return R;
}

} // namespace detail

// Curvature tensor at a chart point, expressed against the standard structure
// through an orientation-preserving pseudo-orthonormal frame, then snapped to
// the curvature space.  The pre-snap residual must clear the FD gate.
inline CurvatureTensor curvature_at(const ChartMetric& chart, const Vector& x,
                                    bool oriented = false, const ToleranceProfile& tol = {}) {
    if (x.size() != chart.dim) throw DimensionError("curvature_at: point dimension mismatch");
    if (chart.fd_step < 1e-6 || chart.fd_step > 1e-1)
        throw PreconditionError("curvature_at: fd_step outside [1e-6, 1e-1]");
    Tensor4 Rc = detail::coordinate_curvature_step(chart, x, chart.fd_step);
    if (chart.richardson) {
        Tensor4 Rh = detail::coordinate_curvature_step(chart, x, 0.5 * chart.fd_step);
        Rh *= 16.0;
        Rh -= Rc;
        Rc = Rh;
        Rc *= 1.0 / 15.0;
    }
    BilinearStructure base = standard_pseudo(chart.p, chart.q, oriented);
    Matrix xi = pseudo_orthonormal_frame(base, metric_at(chart, x), /*positive_det=*/true);
    Tensor4 Rstd = Rc.pullback(xi);
    const CurvatureSpace& cs = curvature_space(base);
    double residual = cs.residual(Rstd);
    if (residual > tol.fd_gate)
        throw NumericalError("curvature_at: FD constraint residual " + std::to_string(residual) +
                             " exceeds gate (bad step or domain boundary)");
    return CurvatureTensor{base, cs.project(Rstd)};
}

// Exact constant-curvature tensor: R = K (G_ac G_bd - G_ad G_bc),
// scal = 2n(2n-1) K.
inline CurvatureTensor constant_curvature_oracle(double K, const BilinearStructure& base) {
    if (base.kind != Kind::pseudo_riemannian)
        throw PreconditionError("constant_curvature_oracle: pseudo kind only");
    const int d = base.dim();
    const Matrix& G = base.form;
    Tensor4 R(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    R(a, b, c, e) = K * (G(a, c) * G(b, e) - G(a, e) * G(b, c));
    return CurvatureTensor{base, R};
}

// ---------------------------------------------------------------------------
// Symplectic pointwise fixtures: E(r) plus Weyl seeds R(S, j)
// ---------------------------------------------------------------------------

struct SymplecticPointFixture {
    int n = 2;
    Matrix r; // Ricci-type part; zero matrix for none
    std::vector<std::pair<Matrix, ComplexStructure>> weyl_seeds;
};

inline SymplecticPointFixture make_symplectic_fixture(int n, std::uint64_t seed, int weyl_seeds,
                                                      bool with_ricci_part) {
    BilinearStructure base = standard_symplectic(n);
    SymplecticPointFixture fx;
    fx.n = n;
    fx.r = Matrix::Zero(2 * n, 2 * n);
    if (with_ricci_part) {
        Rng rng(derive_seed(seed, 0xA11CE));
        Matrix raw(2 * n, 2 * n);
        for (int i = 0; i < 2 * n; ++i)
            for (int j = 0; j < 2 * n; ++j) raw(i, j) = rng.uniform(-1.0, 1.0);
        fx.r = 0.5 * (raw + raw.transpose());
    }
    for (int k = 0; k < weyl_seeds; ++k) {
        ComplexStructure jk = sample_fiber_point(base, derive_seed(seed, 0xBEEF + k), k);
        Matrix S = random_v3_form(jk, derive_seed(seed, 0xC0FFEE + k));
        fx.weyl_seeds.emplace_back(S, jk);
    }
    return fx;
}

inline CurvatureTensor symplectic_fixture_curvature(const SymplecticPointFixture& fx,
                                                    const ToleranceProfile& tol = {}) {
    BilinearStructure base = standard_symplectic(fx.n);
    CurvatureTensor R = build_E_of_r(fx.r, base, tol);
    for (const auto& [S, j] : fx.weyl_seeds) {
        if (v3_membership_residual(S, j) > tol.membership)
            throw PreconditionError("symplectic_fixture_curvature: seed fails membership");
        R.R += R_of_S(S, j, tol).R;
    }
    return R;
}

} // namespace twistor
