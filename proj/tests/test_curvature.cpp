#include <catch2/catch_amalgamated.hpp>

#include <twistor/all.hpp>

#include "oracles.hpp"

using namespace twistor;

namespace {

Matrix random_symmetric(int d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return 0.5 * (m + m.transpose());
}

} // namespace

TEST_CASE("curvature space dimensions match the classical counts") {
    // pseudo: d^2 (d^2 - 1) / 12;  symplectic: d (d-1) (d+1) (d+2) / 8
    for (int d : {4, 6, 8}) {
        CHECK(curvature_space(Kind::pseudo_riemannian, d).dim() == d * d * (d * d - 1) / 12);
        CHECK(curvature_space(Kind::symplectic, d).dim() == d * (d - 1) * (d + 1) * (d + 2) / 8);
    }
    CHECK_THROWS_AS(curvature_space(Kind::pseudo_riemannian, 12), DimensionError);
}

TEST_CASE("projector is idempotent and self-adjoint") {
    for (Kind kind : {Kind::pseudo_riemannian, Kind::symplectic}) {
        for (int d : {4, 6, 8}) {
            const CurvatureSpace& cs = curvature_space(kind, d);
            Rng rng(17);
            for (int trial = 0; trial < 3; ++trial) {
                Tensor4 x(d), y(d);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        for (int c = 0; c < d; ++c)
                            for (int e = 0; e < d; ++e) {
                                x(a, b, c, e) = rng.uniform(-1.0, 1.0);
                                y(a, b, c, e) = rng.uniform(-1.0, 1.0);
                            }
                Tensor4 px = cs.project(x);
                Tensor4 ppx = cs.project(px);
                ppx -= px;
                CHECK(ppx.norm() <= 1e-10 * std::max(1.0, px.norm()));
                // <Px, y> = <x, Py>
                double lhs = Tensor4::dot(px, y);
                double rhs = Tensor4::dot(x, cs.project(y));
                CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
            }
            // projector fixes valid curvature tensors and kills nothing in them
            CurvatureTensor R = random_curvature(kind == Kind::pseudo_riemannian
                                                     ? standard_pseudo(d / 2, 0)
                                                     : standard_symplectic(d / 2),
                                                 5);
            Tensor4 snapped = cs.project(R.R);
            snapped -= R.R;
            CHECK(snapped.norm() <= 1e-10);
        }
    }
    // zero maps to zero
    const CurvatureSpace& cs4 = curvature_space(Kind::pseudo_riemannian, 4);
    CHECK(cs4.project(Tensor4(4)).norm() == 0.0);
}

TEST_CASE("projected random arrays satisfy all invariants") {
    for (Kind kind : {Kind::pseudo_riemannian, Kind::symplectic}) {
        BilinearStructure base =
            kind == Kind::pseudo_riemannian ? standard_pseudo(2, 0) : standard_symplectic(2);
        CurvatureTensor R = random_curvature(base, 1234);
        CHECK(R.norm() == Catch::Approx(1.0)); // normalized
        double anti_ab = 0, cd_sym = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    for (int e = 0; e < 4; ++e) {
                        anti_ab = std::max(anti_ab, std::abs(R.R(a, b, c, e) + R.R(b, a, c, e)));
                        double flip = kind == Kind::pseudo_riemannian ? -R.R(a, b, e, c)
                                                                      : R.R(a, b, e, c);
                        cd_sym = std::max(cd_sym, std::abs(R.R(a, b, c, e) - flip));
                    }
        CHECK(anti_ab <= 1e-10);
        CHECK(cd_sym <= 1e-10);
        CHECK(oracles::bianchi_residual(R) <= 1e-10);

        CurvatureTensor R2 = random_curvature(base, 999);
        Tensor4 diff = R.R;
        diff -= R2.R;
        CHECK(diff.norm() > 1e-6); // distinct seeds give distinct tensors
    }
}

TEST_CASE("kulkarni-nomizu products") {
    BilinearStructure base = standard_pseudo(2, 0);
    // h = k = G/2 gives the constant-curvature tensor with K = 1/2
    CurvatureTensor kn = kulkarni_nomizu(Matrix(0.5 * base.form), Matrix(0.5 * base.form), base);
    CurvatureTensor cc = constant_curvature_oracle(0.5, base);
    Tensor4 diff = kn.R;
    diff -= cc.R;
    CHECK(diff.norm() <= 1e-12);
    CHECK(scalar_curvature(kn) == Catch::Approx(4 * 3 * 0.5)); // scal = 2n(2n-1) K at K = 1/2

    // k = 0 -> 0
    CHECK(kulkarni_nomizu(random_symmetric(4, 1), Matrix(Matrix::Zero(4, 4)), base).norm() == 0.0);

    // Bianchi holds exactly for 100 random symmetric pairs (dims 4 and 6)
    for (int d : {4, 6}) {
        BilinearStructure b = standard_pseudo(d / 2, 0);
        double worst = 0;
        for (std::uint64_t s = 0; s < 50; ++s) {
            CurvatureTensor R =
                kulkarni_nomizu(random_symmetric(d, 2 * s), random_symmetric(d, 2 * s + 1), b);
            worst = std::max(worst, oracles::bianchi_residual(R));
        }
        CHECK(worst <= 1e-12);
    }

    CHECK_THROWS_AS(kulkarni_nomizu(Matrix(Matrix::Identity(4, 4)),
                                    Matrix(standard_j0(base).J), base),
                    PreconditionError);
    CHECK_THROWS_AS(
        kulkarni_nomizu(Matrix(Matrix::Identity(4, 4)), Matrix(Matrix::Identity(4, 4)),
                        standard_symplectic(2)),
        PreconditionError);
}

TEST_CASE("endomorphism_of") {
    BilinearStructure base = standard_pseudo(2, 0);
    CurvatureTensor zero{base, Tensor4(4)};
    Vector e1 = Vector::Unit(4, 0), e2 = Vector::Unit(4, 1);
    CHECK(endomorphism_of(zero, e1, e2).norm() == 0.0);

    // constant curvature: R(e1, e2) = K (e2 (e1 . )^flat - e1 (e2 . )^flat)
    CurvatureTensor cc = constant_curvature_oracle(2.0, base);
    Matrix M = endomorphism_of(cc, e1, e2);
    Matrix want = 2.0 * (e2 * (base.form * e1).transpose() - e1 * (base.form * e2).transpose());
    CHECK((M - want).norm() <= 1e-12);

    // antisymmetry in the argument pair for random tensors
    CurvatureTensor R = random_curvature(base, 7);
    Rng rng(8);
    Vector X(4), Y(4);
    for (int i = 0; i < 4; ++i) {
        X[i] = rng.uniform(-1.0, 1.0);
        Y[i] = rng.uniform(-1.0, 1.0);
    }
    CHECK((endomorphism_of(R, X, Y) + endomorphism_of(R, Y, X)).norm() <= 1e-12);
    // defining relation G(M Z, T) = R(X, Y, Z, T)
    Matrix MM = endomorphism_of(R, X, Y);
    for (int c = 0; c < 4; ++c)
        for (int e = 0; e < 4; ++e) {
            double want_ce = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) want_ce += X[a] * Y[b] * R.R(a, b, c, e);
            double got = (MM * Vector::Unit(4, c)).dot(base.form * Vector::Unit(4, e));
            CHECK(std::abs(got - want_ce) <= 1e-12);
        }
}

TEST_CASE("ricci and scalar curvature") {
    BilinearStructure base = standard_pseudo(2, 0);
    CurvatureTensor zero{base, Tensor4(4)};
    CHECK(ricci(zero).norm() == 0.0);

    // unit S^4: Ric = 3 g, scal = 12
    CurvatureTensor s4 = constant_curvature_oracle(1.0, base);
    CHECK((ricci(s4) - 3.0 * base.form).norm() <= 1e-12);
    CHECK(scalar_curvature(s4) == Catch::Approx(12.0));

    // unit S^2 x S^2: Ric = g, scal = 4
    CurvatureTensor prod = oracles::product_spheres_oracle(1.0, 1.0);
    CHECK((ricci(prod) - prod.base.form).norm() <= 1e-12);
    CHECK(scalar_curvature(prod) == Catch::Approx(4.0));

    // symplectic: Ric(E(r)) = r, and the result is symmetric
    BilinearStructure sb = standard_symplectic(3);
    Matrix r = random_symmetric(6, 21);
    CurvatureTensor Er = build_E_of_r(r, sb);
    Matrix ric = ricci(Er);
    CHECK((ric - ric.transpose()).norm() <= 1e-10);
    CHECK((ric - r).norm() <= 1e-10);

    CHECK_THROWS_AS(scalar_curvature(Er), PreconditionError);
}

TEST_CASE("build_E_of_r spot check against a scalar implementation") {
    BilinearStructure sb = standard_symplectic(2);
    Matrix r = Matrix::Identity(4, 4);
    CurvatureTensor E = build_E_of_r(r, sb);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            CHECK(E.R(a, b, 0, 1) ==
                  Catch::Approx(oracles::E_of_r_entry(sb.form, r, 2, a, b, 0, 1)).epsilon(1e-12));
    CHECK(build_E_of_r(Matrix(Matrix::Zero(4, 4)), sb).norm() == 0.0);
    CHECK(oracles::bianchi_residual(E) <= 1e-12);
    CHECK_THROWS_AS(build_E_of_r(Matrix(standard_j0(sb).J), sb), PreconditionError);
}

TEST_CASE("pseudo decomposition") {
    BilinearStructure base = standard_pseudo(2, 0);
    // unit S^4: S != 0, E = C = 0
    CurvatureTensor s4 = constant_curvature_oracle(1.0, base);
    PseudoDecomposition d4 = decompose_pseudo(s4);
    CHECK(d4.scal == Catch::Approx(12.0));
    CHECK(d4.S_part.norm() > 1.0);
    CHECK(d4.E_part.norm() <= 1e-10);
    CHECK(d4.C_part.norm() <= 1e-10);

    // unit S^2 x S^2: Einstein (E = 0) but C != 0
    CurvatureTensor prod = oracles::product_spheres_oracle(1.0, 1.0);
    PseudoDecomposition dp = decompose_pseudo(prod);
    CHECK(dp.scal == Catch::Approx(4.0));
    CHECK(dp.E_part.norm() <= 1e-10);
    CHECK(dp.C_part.norm() > 0.1);

    // zero -> all parts zero
    PseudoDecomposition dz = decompose_pseudo(CurvatureTensor{base, Tensor4(4)});
    CHECK(dz.S_part.norm() == 0.0);
    CHECK(dz.E_part.norm() == 0.0);
    CHECK(dz.C_part.norm() == 0.0);

    // reconstruction, Ricci-flat Weyl part, orthogonality, E reproduces
    // Ric-hat; 200 random curvatures across dims 4/6/8
    for (int d : {4, 6, 8}) {
        BilinearStructure b = d == 6 ? standard_pseudo(2, 1) : standard_pseudo(d / 2, 0);
        for (std::uint64_t s = 0; s < (d == 8 ? 40u : 80u); ++s) {
            CurvatureTensor R = random_curvature(b, 100 + s);
            PseudoDecomposition dec = decompose_pseudo(R);
            Tensor4 sum = dec.S_part.R;
            sum += dec.E_part.R;
            sum += dec.C_part.R;
            sum -= R.R;
            CHECK(sum.norm() <= 1e-9);
            CHECK(ricci(dec.C_part).norm() <= 1e-9);
            CHECK(std::abs(scalar_curvature(dec.E_part)) <= 1e-9);
            CHECK((ricci(dec.E_part) - dec.traceless_ricci).norm() <= 1e-9);
            CHECK(std::abs(Tensor4::dot(dec.S_part.R, dec.E_part.R)) <= 1e-8);
            CHECK(std::abs(Tensor4::dot(dec.S_part.R, dec.C_part.R)) <= 1e-8);
            CHECK(std::abs(Tensor4::dot(dec.E_part.R, dec.C_part.R)) <= 1e-8);
        }
    }
    CHECK_THROWS_AS(decompose_pseudo(CurvatureTensor{standard_symplectic(2), Tensor4(4)}),
                    PreconditionError);
}

TEST_CASE("symplectic decomposition and Ricci type") {
    BilinearStructure sb = standard_symplectic(2);
    // R = E(r) -> W = 0
    Matrix r = random_symmetric(4, 3);
    CurvatureTensor Er = build_E_of_r(r, sb);
    SymplecticDecomposition dec = decompose_symplectic(Er);
    CHECK(dec.W_part.norm() <= 1e-9 * std::max(1.0, Er.norm()));
    CHECK(is_ricci_type(Er).value);

    // zero -> (0, 0)
    SymplecticDecomposition dz = decompose_symplectic(CurvatureTensor{sb, Tensor4(4)});
    CHECK(dz.E_part.norm() == 0.0);
    CHECK(dz.W_part.norm() == 0.0);
    CHECK(is_ricci_type(CurvatureTensor{sb, Tensor4(4)}).value);

    // reconstruction + Ricci flatness of W for 200 random tensors, dims 4/6/8
    for (int n : {2, 3, 4}) {
        BilinearStructure b = standard_symplectic(n);
        for (std::uint64_t s = 0; s < (n == 4 ? 40u : 80u); ++s) {
            CurvatureTensor R = random_curvature(b, 300 + s);
            SymplecticDecomposition dd = decompose_symplectic(R);
            Tensor4 sum = dd.E_part.R;
            sum += dd.W_part.R;
            sum -= R.R;
            CHECK(sum.norm() <= 1e-9);
            CHECK(ricci(dd.W_part).norm() <= 1e-9);
        }
    }
}

TEST_CASE("hodge star") {
    BilinearStructure b40 = standard_pseudo(2, 0, true);
    Matrix star = hodge_star(b40);
    // *(e1^e2) = e3^e4 in signature (4,0)
    Vector e12 = Vector::Unit(6, 0); // pair order: 01,02,03,12,13,23
    CHECK((star * e12 - Vector::Unit(6, 5)).norm() <= 1e-14);
    CHECK((star * star - Matrix::Identity(6, 6)).norm() <= 1e-12);

    BilinearStructure b22 = standard_pseudo(1, 1, true);
    Matrix star22 = hodge_star(b22);
    // (2,2): eps1 eps2 = -1, so *(e1^e2) = -e3^e4
    CHECK((star22 * e12 + Vector::Unit(6, 5)).norm() <= 1e-14);
    CHECK((star22 * star22 - Matrix::Identity(6, 6)).norm() <= 1e-12);

    // orientation flip negates the star
    CHECK((hodge_star(b40, true) + star).norm() == 0.0);

    CHECK_THROWS_AS(hodge_star(standard_pseudo(2, 0, false)), PreconditionError);
    CHECK_THROWS_AS(hodge_star(standard_pseudo(3, 0, true)), PreconditionError);
}

TEST_CASE("sd/asd split") {
    BilinearStructure b = standard_pseudo(2, 0, true);
    // zero input splits into zeros
    CurvatureTensor zero{b, Tensor4(4)};
    auto [zp, zm] = sd_asd_split(zero);
    CHECK(zp.norm() == 0.0);
    CHECK(zm.norm() == 0.0);

    // Weyl part of S^2 x S^2: C = C+ + C-, both halves nonzero, and the halves
    // are supported on the right eigenspaces of *
    CurvatureTensor prod = oracles::product_spheres_oracle(1.0, 1.0);
    prod.base.oriented = true;
    PseudoDecomposition dec = decompose_pseudo(prod);
    auto [cp, cm] = sd_asd_split(dec.C_part);
    Tensor4 sum = cp.R;
    sum += cm.R;
    sum -= dec.C_part.R;
    CHECK(sum.norm() <= 1e-10);
    CHECK(cp.norm() > 0.01);
    CHECK(cm.norm() > 0.01);
    // halves are again curvature tensors
    CHECK(curvature_space(b).residual(cp.R) <= 1e-10);
    CHECK(curvature_space(b).residual(cm.R) <= 1e-10);

    // non-Ricci-flat input rejected
    CHECK_THROWS_AS(sd_asd_split(prod), PreconditionError);
}

TEST_CASE("sectional curvature and pinching") {
    BilinearStructure b = standard_pseudo(2, 0);
    CurvatureTensor s4 = constant_curvature_oracle(1.0, b);
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Vector X(4), Y(4);
        for (int i = 0; i < 4; ++i) {
            X[i] = rng.uniform(-1.0, 1.0);
            Y[i] = rng.uniform(-1.0, 1.0);
        }
        CHECK(sectional_curvature(s4, X, Y) == Catch::Approx(1.0).epsilon(1e-9));
    }
    CurvatureTensor flat{b, Tensor4(4)};
    CHECK(sectional_curvature(flat, Vector::Unit(4, 0), Vector::Unit(4, 1)) == 0.0);

    // product: mixed planes are flat, sphere planes have K = 1
    CurvatureTensor prod = oracles::product_spheres_oracle(1.0, 1.0);
    CHECK(sectional_curvature(prod, Vector::Unit(4, 0), Vector::Unit(4, 2)) ==
          Catch::Approx(0.0).margin(1e-12));
    CHECK(sectional_curvature(prod, Vector::Unit(4, 0), Vector::Unit(4, 1)) ==
          Catch::Approx(1.0));
    PinchingReport rep = pinching_report(prod, 500, 99);
    CHECK(rep.min == Catch::Approx(0.0).margin(1e-6));
    CHECK(rep.max == Catch::Approx(1.0).epsilon(1e-6));

    // degenerate plane rejected
    CHECK_THROWS_AS(sectional_curvature(s4, Vector::Unit(4, 0), Vector::Unit(4, 0)),
                    PreconditionError);
}

TEST_CASE("decomposition is equivariant") {
    for (Kind kind : {Kind::pseudo_riemannian, Kind::symplectic}) {
        BilinearStructure b =
            kind == Kind::pseudo_riemannian ? standard_pseudo(2, 1) : standard_symplectic(2);
        CurvatureTensor R = random_curvature(b, 50);
        for (std::uint64_t s = 0; s < 10; ++s) {
            Matrix h = random_group_element(b, 60 + s);
            CurvatureTensor hR = group_action(h, R);
            if (kind == Kind::pseudo_riemannian) {
                PseudoDecomposition lhs = decompose_pseudo(hR);
                PseudoDecomposition rhs = decompose_pseudo(R);
                Tensor4 dS = lhs.S_part.R;
                dS -= group_action(h, rhs.S_part).R;
                Tensor4 dE = lhs.E_part.R;
                dE -= group_action(h, rhs.E_part).R;
                Tensor4 dC = lhs.C_part.R;
                dC -= group_action(h, rhs.C_part).R;
                CHECK(dS.norm() <= 1e-8);
                CHECK(dE.norm() <= 1e-8);
                CHECK(dC.norm() <= 1e-8);
            } else {
                SymplecticDecomposition lhs = decompose_symplectic(hR);
                SymplecticDecomposition rhs = decompose_symplectic(R);
                Tensor4 dE = lhs.E_part.R;
                dE -= group_action(h, rhs.E_part).R;
                Tensor4 dW = lhs.W_part.R;
                dW -= group_action(h, rhs.W_part).R;
                CHECK(dE.norm() <= 1e-8);
                CHECK(dW.norm() <= 1e-8);
            }
        }
    }
}
