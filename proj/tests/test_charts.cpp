#include <catch2/catch_amalgamated.hpp>

#include <twistor/all.hpp>

#include "oracles.hpp"

using namespace twistor;

namespace {

Vector generic_point(int d, double scale = 0.15) {
    Vector x(d);
    for (int i = 0; i < d; ++i) x[i] = scale * (0.3 + 0.17 * i) * (i % 2 == 0 ? 1.0 : -1.0);
    return x;
}

double entrywise_diff(const Tensor4& a, const Tensor4& b) {
    Tensor4 d = a;
    d -= b;
    return d.max_abs();
}

} // namespace

TEST_CASE("christoffel symbols") {
    // flat: Gamma = 0
    ChartMetric flat = make_chart(Fixture::flat, 4);
    auto gamma = christoffel_at(flat, generic_point(4));
    double worst = 0;
    for (const auto& g : gamma) worst = std::max(worst, g.cwiseAbs().maxCoeff());
    CHECK(worst <= 1e-12);

    // sphere, dim-2 sanity slice: conformal factor has a critical point at the
    // chart origin, so Gamma(0) = 0
    ChartMetric s2 = make_chart(Fixture::sphere, 2);
    auto g0 = christoffel_at(s2, Vector::Zero(2));
    for (const auto& g : g0) CHECK(g.cwiseAbs().maxCoeff() <= 1e-12);

    // symmetry in the lower indices at a generic point
    ChartMetric s4 = make_chart(Fixture::sphere, 4);
    auto gs = christoffel_at(s4, generic_point(4));
    for (const auto& g : gs) CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-11);

    CHECK_THROWS_AS(
        [&] {
            ChartMetric bad = s4;
            bad.fd_step = 1e-9;
            christoffel_at(bad, Vector::Zero(4));
        }(),
        PreconditionError);
}

TEST_CASE("FD curvature matches the space-form oracles") {
    BilinearStructure b40 = standard_pseudo(2, 0);
    CurvatureTensor cc1 = constant_curvature_oracle(1.0, b40);

    ChartMetric sphere = make_chart(Fixture::sphere, 4);
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        Vector x(4);
        for (int i = 0; i < 4; ++i) x[i] = rng.uniform(-0.4, 0.4);
        CurvatureTensor R = curvature_at(sphere, x);
        CHECK(entrywise_diff(R.R, cc1.R) <= 1e-6);
    }

    ChartMetric flat = make_chart(Fixture::flat, 4);
    CHECK(curvature_at(flat, generic_point(4)).norm() <= 1e-8);

    ChartMetric hyp = make_chart(Fixture::hyperbolic, 4);
    CurvatureTensor ccm1 = constant_curvature_oracle(-1.0, b40);
    CHECK(entrywise_diff(curvature_at(hyp, generic_point(4)).R, ccm1.R) <= 1e-6);

    // radius scaling: K = 1/r^2
    ChartMetric sphere2 = make_chart(Fixture::sphere, 4, 2.0);
    CurvatureTensor cc025 = constant_curvature_oracle(0.25, b40);
    CHECK(entrywise_diff(curvature_at(sphere2, generic_point(4)).R, cc025.R) <= 1e-6);

    // (2,2) space form
    ChartMetric ps = make_chart(Fixture::pseudo_sphere_22, 4);
    BilinearStructure b22 = standard_pseudo(1, 1);
    CurvatureTensor cc22 = constant_curvature_oracle(1.0, b22);
    CHECK(entrywise_diff(curvature_at(ps, generic_point(4, 0.1)).R, cc22.R) <= 1e-6);
}

TEST_CASE("chart independence of invariants") {
    ChartMetric sphere = make_chart(Fixture::sphere, 4);
    CurvatureTensor Ra = curvature_at(sphere, generic_point(4, 0.1));
    CurvatureTensor Rb = curvature_at(sphere, generic_point(4, 0.45));
    PseudoDecomposition da = decompose_pseudo(Ra);
    PseudoDecomposition db = decompose_pseudo(Rb);
    CHECK(std::abs(da.scal - db.scal) <= 1e-6);
    CHECK(std::abs(da.C_part.norm() - db.C_part.norm()) <= 1e-6);
    PinchingReport pa = pinching_report(Ra, 200, 1);
    PinchingReport pb = pinching_report(Rb, 200, 1);
    CHECK(std::abs(pa.min - pb.min) <= 1e-6);
    CHECK(std::abs(pa.max - pb.max) <= 1e-6);
}

TEST_CASE("product of spheres") {
    ChartMetric prod = make_chart(Fixture::product_spheres, 4, 1.0, 1.0);
    CurvatureTensor R = curvature_at(prod, generic_point(4));
    // matches the block oracle
    CHECK(entrywise_diff(R.R, oracles::product_spheres_oracle(1.0, 1.0).R) <= 1e-6);
    // Einstein with Ric = g at unit radii
    CHECK((ricci(R) - R.base.form).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(scalar_curvature(R) == Catch::Approx(4.0).epsilon(1e-6));
    // mixed planes flat
    CHECK(std::abs(sectional_curvature(R, Vector::Unit(4, 0), Vector::Unit(4, 3))) <= 1e-6);
    // unequal radii: the frame may permute the blocks, so compare invariants
    ChartMetric prod2 = make_chart(Fixture::product_spheres, 4, 1.0, 2.0);
    CurvatureTensor R2 = curvature_at(prod2, generic_point(4));
    CurvatureTensor want = oracles::product_spheres_oracle(1.0, 0.25);
    CHECK(scalar_curvature(R2) == Catch::Approx(2.5).epsilon(1e-6));
    CHECK(R2.norm() == Catch::Approx(want.norm()).epsilon(1e-6));
    PinchingReport pr = pinching_report(R2, 200, 4);
    CHECK(pr.min == Catch::Approx(0.0).margin(1e-6));
    CHECK(pr.max == Catch::Approx(1.0).epsilon(1e-6));
    Eigen::SelfAdjointEigenSolver<Matrix> es(ricci(R2));
    Vector ev = es.eigenvalues();
    CHECK(ev[0] == Catch::Approx(0.25).epsilon(1e-6));
    CHECK(ev[1] == Catch::Approx(0.25).epsilon(1e-6));
    CHECK(ev[2] == Catch::Approx(1.0).epsilon(1e-6));
    CHECK(ev[3] == Catch::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fubini-study is Einstein and self-dual") {
    ChartMetric fs = make_chart(Fixture::fubini_study_cp2, 4);
    CurvatureTensor R = curvature_at(fs, generic_point(4), /*oriented=*/true);
    PseudoDecomposition dec = decompose_pseudo(R);
    CHECK(dec.E_part.norm() <= 1e-5 * std::max(1.0, R.norm()));
    CHECK(dec.C_part.norm() > 1e-2);
    auto [cpos, cneg] = sd_asd_split(dec.C_part);
    CHECK(cneg.norm() <= 1e-5 * dec.C_part.norm());
    CHECK(cpos.norm() >= 0.9 * dec.C_part.norm());
    // with flipped orientation the halves swap roles
    auto [fpos, fneg] = sd_asd_split(dec.C_part, /*flip_orientation=*/true);
    CHECK(fpos.norm() <= 1e-5 * dec.C_part.norm());

    // Einstein constant is positive (Ric = c g with c > 0)
    Matrix ric = ricci(R);
    double c = ric(0, 0) / R.base.form(0, 0);
    CHECK(c > 0);
    CHECK((ric - c * R.base.form).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("FD gate rejects boundary points") {
    ChartMetric hyp = make_chart(Fixture::hyperbolic, 4);
    Vector near_boundary(4);
    near_boundary << 1.99, 0, 0, 0; // |x| close to 2r where the chart factor blows up
    CHECK_THROWS(curvature_at(hyp, near_boundary));
}

TEST_CASE("symplectic point fixtures") {
    ToleranceProfile tol;
    // empty seeds: pure E(r), Ricci type
    SymplecticPointFixture fx = make_symplectic_fixture(2, 11, 0, true);
    CurvatureTensor R = symplectic_fixture_curvature(fx);
    CHECK(is_ricci_type(R).value);

    // r = 0, one seed: pure Weyl, Ricci flat
    SymplecticPointFixture fw = make_symplectic_fixture(2, 12, 1, false);
    CurvatureTensor W = symplectic_fixture_curvature(fw);
    CHECK(ricci(W).norm() <= 1e-9 * std::max(1.0, W.norm()));
    CHECK_FALSE(is_ricci_type(W).value);

    // both: decomposition recovers the two parts
    SymplecticPointFixture fb = make_symplectic_fixture(2, 13, 2, true);
    CurvatureTensor B = symplectic_fixture_curvature(fb);
    SymplecticDecomposition dec = decompose_symplectic(B);
    CurvatureTensor ricci_part = build_E_of_r(fb.r, standard_symplectic(2));
    Tensor4 dE = dec.E_part.R;
    dE -= ricci_part.R;
    CHECK(dE.norm() <= 1e-9 * std::max(1.0, B.norm()));
    Tensor4 weyl_sum(4);
    for (const auto& [S, j] : fb.weyl_seeds) weyl_sum += R_of_S(S, j).R;
    Tensor4 dW = dec.W_part.R;
    dW -= weyl_sum;
    CHECK(dW.norm() <= 1e-9 * std::max(1.0, B.norm()));

    // curvature invariants hold for the mixture
    CHECK(curvature_space(standard_symplectic(2)).residual(B.R) <= 1e-10);
    CHECK(oracles::bianchi_residual(B) <= 1e-10);
}
