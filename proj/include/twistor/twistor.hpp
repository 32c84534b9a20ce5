#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twistor/curvature.hpp"
#include "twistor/parallel.hpp"
#include "twistor/spaces.hpp"
#include "twistor/tensor4.hpp"
#include "twistor/types.hpp"

namespace twistor {

// ---------------------------------------------------------------------------
// The two trace forms Omega_1, Omega_2 at a fibre point
// ---------------------------------------------------------------------------

// Omega_1(X, Y) = Tr(R(X, Y) o j), returned as an antisymmetric matrix.
inline Matrix omega1(const CurvatureTensor& R, const ComplexStructure& j) {
    const int d = R.base.dim();
    if (j.base.dim() != d || j.base.kind != R.base.kind)
        throw PreconditionError("omega1: base mismatch");
    // Tr(M J) with G(M Z, T) = R(X,Y,Z,T) contracts the (Z,T) slots with
    // W = J G^{-T}.
    Matrix W = j.J * R.base.form.inverse().transpose();
    Matrix out = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            double s = 0;
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) s += R.R(a, b, c, e) * W(c, e);
            out(a, b) = s;
        }
    return out;
}

// Omega_2(X, Y) = Omega_1(jX, jY) - Omega_1(X, Y); vanishing for all j is the
// type-(1,1) compatibility condition.  Always satisfies
// Omega_2(jX, jY) = -Omega_2(X, Y).
inline Matrix omega2(const CurvatureTensor& R, const ComplexStructure& j) {
    Matrix o1 = omega1(R, j);
    return j.J.transpose() * o1 * j.J - o1;
}

inline double type11_check(const CurvatureTensor& R, const ComplexStructure& j) {
    return omega2(R, j).norm() / std::max(R.norm(), 1e-300);
}

// ---------------------------------------------------------------------------
// The canonical 2-form at a fibre point
// ---------------------------------------------------------------------------

// Gram matrix of the canonical 2-form on the basis (standard V basis followed
// by a Frobenius-orthonormal vertical basis at j):
//   horizontal x horizontal  -2 Tr(R(X, Y) o j)
//   horizontal x vertical    0
//   vertical x vertical      -Tr(j [S_a, S_b])
struct TwoFormAtJ {
    ComplexStructure at;
    std::vector<VerticalVector> vertical;
    Matrix gram;

    int horizontal_dim() const { return at.base.dim(); }
    int vertical_dim() const { return static_cast<int>(vertical.size()); }
};

inline TwoFormAtJ build_two_form(const CurvatureTensor& R, const ComplexStructure& j) {
    const int d = R.base.dim();
    if (j.base.dim() != d || j.base.kind != R.base.kind)
        throw PreconditionError("build_two_form: base mismatch");
    TwoFormAtJ out;
    out.at = j;
    out.vertical = vertical_basis(j);
    const int vd = out.vertical_dim();
    out.gram = Matrix::Zero(d + vd, d + vd);
    out.gram.topLeftCorner(d, d) = -2.0 * omega1(R, j);
    for (int a = 0; a < vd; ++a)
        for (int b = a + 1; b < vd; ++b) {
            const Matrix& Sa = out.vertical[static_cast<std::size_t>(a)].S;
            const Matrix& Sb = out.vertical[static_cast<std::size_t>(b)].S;
            double v = -(j.J * (Sa * Sb - Sb * Sa)).trace();
            out.gram(d + a, d + b) = v;
            out.gram(d + b, d + a) = -v;
        }
    return out;
}

struct NondegeneracyResult {
    bool nondegenerate = false;
    double det_scale = 0;          // |det gram|^(1/dim)
    double horizontal_sv_ratio = 0; // smallest/largest singular value of -2 Omega_1
};

inline NondegeneracyResult two_form_nondegenerate(const CurvatureTensor& R,
                                                  const ComplexStructure& j,
                                                  double rel_tol = 1e-8) {
    TwoFormAtJ f = build_two_form(R, j);
    const int d = f.horizontal_dim();
    NondegeneracyResult res;
    Eigen::JacobiSVD<Matrix> hsvd(f.gram.topLeftCorner(d, d));
    double hmax = hsvd.singularValues()(0);
    double hmin = hsvd.singularValues()(d - 1);
    res.horizontal_sv_ratio = hmax > 0 ? hmin / hmax : 0.0;
    res.nondegenerate = hmax > 0 && hmin >= rel_tol * hmax;
    if (f.vertical_dim() > 0) {
        Eigen::JacobiSVD<Matrix> vsvd(f.gram.bottomRightCorner(f.vertical_dim(), f.vertical_dim()));
        double vmax = vsvd.singularValues()(0);
        double vmin = vsvd.singularValues()(f.vertical_dim() - 1);
        if (!(vmax > 0) || vmin < rel_tol * vmax)
            throw Error("two_form_nondegenerate: vertical block unexpectedly degenerate");
    }
    double det = std::abs(f.gram.determinant());
    res.det_scale = det > 0 ? std::pow(det, 1.0 / f.gram.rows()) : 0.0;
    return res;
}

// omega(Xi, Jpm Xi) > 0 as a quadratic form over the tangent basis at j.
inline bool two_form_positivity(const CurvatureTensor& R, const ComplexStructure& j, int sign,
                                double rel_tol = 1e-8) {
    if (sign != 1 && sign != -1) throw PreconditionError("two_form_positivity: sign must be +-1");
    NondegeneracyResult nd = two_form_nondegenerate(R, j, rel_tol);
    if (!nd.nondegenerate) throw PreconditionError("two_form_positivity: degenerate 2-form");
    TwoFormAtJ f = build_two_form(R, j);
    const int d = f.horizontal_dim();
    const int vd = f.vertical_dim();
    Matrix Jt = Matrix::Zero(d + vd, d + vd);
    Jt.topLeftCorner(d, d) = sign > 0 ? f.at.J : Matrix(-f.at.J);
    for (int b = 0; b < vd; ++b) {
        Matrix JSb = f.at.J * f.vertical[static_cast<std::size_t>(b)].S;
        for (int a = 0; a < vd; ++a) {
            const Matrix& Sa = f.vertical[static_cast<std::size_t>(a)].S;
            Jt(d + a, d + b) = (Sa.array() * JSb.array()).sum(); // Frobenius coords of J.S_b
        }
    }
    Matrix H = f.gram * Jt;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    return es.eigenvalues().minCoeff() > 0;
}

// ---------------------------------------------------------------------------
// The j-action on curvature tensors and the 4i obstruction
// ---------------------------------------------------------------------------

// (j . R)(U, V) = j o R(U,V) - R(jU, V) - R(U, jV) - R(U,V) o j.  On the fully
// covariant array this is minus the sum of the slot actions of J.
inline Tensor4 j_action_apply(const Tensor4& R, const Matrix& J) {
    Tensor4 out = R.contract_slot(0, J);
    out += R.contract_slot(1, J);
    out += R.contract_slot(2, J);
    out += R.contract_slot(3, J);
    out *= -1.0;
    return out;
}

// Dense matrix of the j-action restricted to the curvature subspace, on its
// orthonormal basis.  Eigenvalues lie in {0, +-2i, +-4i}.
inline Matrix j_action_operator(const ComplexStructure& j) {
    const CurvatureSpace& cs = curvature_space(j.base);
    const int k = cs.dim();
    Matrix A(k, k);
    for (int q = 0; q < k; ++q) {
        Tensor4 basis_q = cs.from_coords(Eigen::VectorXd::Unit(k, q));
        A.col(q) = cs.coords(j_action_apply(basis_q, j.J));
    }
    return A;
}

struct FourIComponent {
    CurvatureTensor component;
    double norm = 0;
};

// Projection of R onto the +-4i eigenvalue pair of the j-action, via the real
// polynomial A^2 (A^2 + 4 Id) / 192 (the unique cubic-free interpolant that is
// 1 at lambda^2 = -16 and 0 at lambda^2 in {0, -4}).
inline FourIComponent four_i_component(const CurvatureTensor& R, const ComplexStructure& j) {
    Tensor4 t2 = j_action_apply(j_action_apply(R.R, j.J), j.J);
    Tensor4 t4 = j_action_apply(j_action_apply(t2, j.J), j.J);
    Tensor4 proj = t4 + 4.0 * t2;
    proj *= 1.0 / 192.0;
    FourIComponent out{CurvatureTensor{R.base, proj}, 0.0};
    out.norm = out.component.norm();
    return out;
}

// ---------------------------------------------------------------------------
// Nijenhuis tensor of J+ / J- (torsion-free connections)
// ---------------------------------------------------------------------------

// N(Xi, Xi') for Xi = (X, S), Xi' = (X', S'):
//   vertical x vertical   -> 0
//   mixed                 -> 0 for J+; horizontal part 2(S(jX') - S'(jX)) for J-
//   horizontal x horizontal -> vertical part
//        -[R(jX,jX'),j] +- j[R(jX,X'),j] +- j[R(X,jX'),j] + [R(X,X'),j]
// with the + signs for J+ and - for J-.  Torsion-free: no horizontal part on
// two horizontals.
inline TwistorTangent nijenhuis(const CurvatureTensor& R, const ComplexStructure& j, int sign,
                                const TwistorTangent& Xi1, const TwistorTangent& Xi2) {
    if (sign != 1 && sign != -1) throw PreconditionError("nijenhuis: sign must be +-1");
    if (R.base.dim() != j.base.dim() || R.base.kind != j.base.kind)
        throw PreconditionError("nijenhuis: base mismatch");
    const int d = R.base.dim();
    const Matrix& J = j.J;
    auto bracket = [&J](const Matrix& M) { return Matrix(M * J - J * M); };

    TwistorTangent out;
    out.X = Vector::Zero(d);
    out.S = Matrix::Zero(d, d);

    if (sign < 0) out.X = 2.0 * (Xi1.S * (J * Xi2.X) - Xi2.S * (J * Xi1.X));

    const Vector& X = Xi1.X;
    const Vector& Y = Xi2.X;
    if (X.norm() > 0 && Y.norm() > 0) {
        Vector jX = J * X, jY = J * Y;
        double s = sign;
        out.S = -bracket(endomorphism_of(R, jX, jY)) + s * J * bracket(endomorphism_of(R, jX, Y)) +
                s * J * bracket(endomorphism_of(R, X, jY)) + bracket(endomorphism_of(R, X, Y));
    }
    return out;
}

struct SpanReport {
    int rank = 0;            // rank of the span of full Nijenhuis values
    int horizontal_rank = 0; // rank of the horizontal projections
    int tangent_dim = 0;     // 2n + dim V_j
};

inline SpanReport nijenhuis_span(const CurvatureTensor& R, const ComplexStructure& j, int sign,
                                 int sample_count, std::uint64_t seed, double rank_tol = 1e-8) {
    const int d = R.base.dim();
    std::vector<VerticalVector> vb = vertical_basis(j);
    const int vd = static_cast<int>(vb.size());
    SpanReport rep;
    rep.tangent_dim = d + vd;
    if (sample_count < rep.tangent_dim)
        throw PreconditionError("nijenhuis_span: sample_count below tangent dimension");

    auto random_tangent = [&](Rng& rng) {
        TwistorTangent t;
        t.X = Vector(d);
        for (int i = 0; i < d; ++i) t.X[i] = rng.uniform(-1.0, 1.0);
        t.S = Matrix::Zero(d, d);
        for (int i = 0; i < vd; ++i)
            t.S += rng.uniform(-1.0, 1.0) * vb[static_cast<std::size_t>(i)].S;
        return t;
    };

    Matrix columns(rep.tangent_dim, sample_count);
    for (int i = 0; i < sample_count; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        TwistorTangent a = random_tangent(rng);
        TwistorTangent b = random_tangent(rng);
        TwistorTangent v = nijenhuis(R, j, sign, a, b);
        columns.col(i).head(d) = v.X;
        for (int q = 0; q < vd; ++q)
            columns.col(i)(d + q) = (vb[static_cast<std::size_t>(q)].S.array() * v.S.array()).sum();
    }
    // The cutoff carries a floor at the natural scale of the arguments, so a
    // value matrix that is pure numerical noise (e.g. N^{J+} of an FD tensor
    // with vanishing Weyl obstruction) reports rank 0.
    double scale_floor = std::max(1.0, R.norm());
    auto rank_of = [&](const Matrix& M) {
        if (M.rows() == 0 || M.cols() == 0) return 0;
        Eigen::JacobiSVD<Matrix> svd(M);
        const auto& sv = svd.singularValues();
        double smax = sv.size() ? sv(0) : 0.0;
        if (!(smax > 0)) return 0;
        int r = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) >= rank_tol * std::max(smax, scale_floor)) ++r;
        return r;
    };
    rep.rank = rank_of(columns);
    rep.horizontal_rank = rank_of(columns.topRows(d));
    return rep;
}

inline int nijenhuis_span_dimension(const CurvatureTensor& R, const ComplexStructure& j, int sign,
                                    int sample_count, std::uint64_t seed, double rank_tol = 1e-8) {
    return nijenhuis_span(R, j, sign, sample_count, seed, rank_tol).rank;
}

// ---------------------------------------------------------------------------
// psi_j / R(S, j) / P_j
// ---------------------------------------------------------------------------

// membership in V3^j (pseudo) or V(V, Omega, j) (symplectic): antisymmetric S
// with S(jX, jY) = -S(X, Y)
inline double v3_membership_residual(const Matrix& S, const ComplexStructure& j) {
    double scale = std::max(S.norm(), 1.0);
    double anti = (S + S.transpose()).norm();
    double type = (j.J.transpose() * S * j.J + S).norm();
    return std::max(anti, type) / scale;
}

inline Matrix random_v3_form(const ComplexStructure& j, std::uint64_t seed) {
    const int d = j.base.dim();
    Rng rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Matrix raw(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) raw(a, b) = rng.uniform(-1.0, 1.0);
        Matrix anti = 0.5 * (raw - raw.transpose());
        Matrix S = 0.5 * (anti - j.J.transpose() * anti * j.J);
        double nrm = S.norm();
        if (nrm > 1e-6) return S / nrm;
    }
    throw NumericalError("random_v3_form: degenerate draws");
}

// psi_j(S), pseudo kind: the Weyl-type tensor with
// g(psi(X,Y)Z,W) = 2 g(X,jY) S(Z,jW) + 2 g(Z,jW) S(X,jY) + g(X,jZ) S(Y,jW)
//                + g(Y,jW) S(X,jZ) - g(X,jW) S(Y,jZ) - g(Y,jZ) S(X,jW).
inline CurvatureTensor psi_j(const Matrix& S_form, const ComplexStructure& j,
                             const ToleranceProfile& tol = {}) {
    if (j.base.kind != Kind::pseudo_riemannian) throw PreconditionError("psi_j: pseudo kind only");
    if (v3_membership_residual(S_form, j) > tol.membership)
        throw PreconditionError("psi_j: S is not in V3^j");
    const int d = j.base.dim();
    Matrix P = j.base.form * j.J; // P(a,b) = g(e_a, j e_b)
    Matrix Q = S_form * j.J;      // Q(a,b) = S(e_a, j e_b)
    Tensor4 R(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    R(a, b, c, e) = 2.0 * P(a, b) * Q(c, e) + 2.0 * P(c, e) * Q(a, b) +
                                    P(a, c) * Q(b, e) + P(b, e) * Q(a, c) - P(a, e) * Q(b, c) -
                                    P(b, c) * Q(a, e);
    return CurvatureTensor{j.base, R};
}

// R(S, j), symplectic kind:
// Omega(R(X,Y)Z,T) = c(n) [ -2 Omega(Z,jT) S(X,jY) + Omega(X,jZ) S(Y,jT)
//                  + Omega(X,jT) S(Y,jZ) - Omega(Y,jT) S(X,jZ) - Omega(Y,jZ) S(X,jT) ]
// with c(n) = -(n-1)/(n+1).  The bracket alone has Omega_2 = +8(n+1) S(., j.);
// the factor normalises it to the defining identity Omega_2 = -8(n-1) S(., j.),
// which the recovery map S_from_R and the projector P_j rely on.
inline CurvatureTensor R_of_S(const Matrix& S_form, const ComplexStructure& j,
                              const ToleranceProfile& tol = {}) {
    if (j.base.kind != Kind::symplectic) throw PreconditionError("R_of_S: symplectic kind only");
    if (v3_membership_residual(S_form, j) > tol.membership)
        throw PreconditionError("R_of_S: S is not in V(V, Omega, j)");
    const int d = j.base.dim();
    const int n = j.base.n;
    Matrix P = j.base.form * j.J; // Omega(e_a, j e_b), symmetric
    Matrix Q = S_form * j.J;      // S(e_a, j e_b)
    const double cn = -static_cast<double>(n - 1) / (n + 1);
    Tensor4 R(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    R(a, b, c, e) =
                        cn * (-2.0 * P(c, e) * Q(a, b) + P(a, c) * Q(b, e) + P(a, e) * Q(b, c) -
                              P(b, e) * Q(a, c) - P(b, c) * Q(a, e));
    return CurvatureTensor{j.base, R};
}

// S^{R,j}(X, Y) = Omega_2(X, jY) / (8(n+1)) (pseudo) or / (8(n-1)) (symplectic).
inline Matrix S_from_R(const CurvatureTensor& R, const ComplexStructure& j) {
    const int n = R.base.n;
    double denom;
    if (R.base.kind == Kind::pseudo_riemannian) {
        denom = 8.0 * (n + 1);
    } else {
        if (n <= 1) throw DimensionError("S_from_R: symplectic kind requires n > 1");
        denom = 8.0 * (n - 1);
    }
    denom *= 1.0 + detail::mutation_epsilon();
    return Matrix(omega2(R, j) * j.J) / denom;
}

// P_j(R) = psi_j(S^{R,j}) (pseudo) or R(S^{R,j}, j) (symplectic).
// Idempotent, image inside the Weyl tensors, equivariant.
inline CurvatureTensor projector_Pj(const CurvatureTensor& R, const ComplexStructure& j) {
    Matrix S = S_from_R(R, j);
    // S may be numerically tiny; both builders accept any V3 member and 0.
    if (R.base.kind == Kind::pseudo_riemannian) return psi_j(S, j);
    return R_of_S(S, j);
}

// Closed form of the vertical part of N^{J-} on two horizontal lifts for a
// Ricci-type symplectic curvature E(r):
//   (-1/(n+1)) [ j, -om(X,.) BY - om(BY,.) X + om(Y,.) BX + om(BX,.) Y ]
// with B = rho - j rho j and rho the Ricci endomorphism, omega(rho X, Y) =
// Ric(X, Y).  The coefficient is -2/(n+1) when B carries the conventional 1/2
// of the j-invariant projection; either way the defining property is exact
// equality with the direct Nijenhuis computation.
inline VerticalVector ricci_type_vertical_image(const Matrix& rho, const ComplexStructure& j,
                                                const Vector& X, const Vector& Y) {
    if (j.base.kind != Kind::symplectic)
        throw PreconditionError("ricci_type_vertical_image: symplectic kind only");
    const Matrix& W = j.base.form;
    const Matrix& J = j.J;
    Matrix B = rho - J * rho * J;
    Vector BX = B * X, BY = B * Y;
    auto rank1 = [&](const Vector& v, const Vector& covec_of) {
        // matrix of Z -> omega(covec_of, Z) * v
        return Matrix(v * (W.transpose() * covec_of).transpose());
    };
    Matrix M = -rank1(BY, X) - rank1(X, BY) + rank1(BX, Y) + rank1(Y, BX);
    Matrix V = (-1.0 / (j.base.n + 1)) * (J * M - M * J);
    return VerticalVector{j, V};
}

// ---------------------------------------------------------------------------
// Verdicts: closed-form criterion vs. fibre-sampled computation
// ---------------------------------------------------------------------------

enum class Question { Jplus_integrable, Jminus_integrable, type11_compatible, two_form_symplectic };

inline const char* question_name(Question q) {
    switch (q) {
        case Question::Jplus_integrable: return "Jplus_integrable";
        case Question::Jminus_integrable: return "Jminus_integrable";
        case Question::type11_compatible: return "type11_compatible";
        default: return "two_form_symplectic";
    }
}

struct Verdict {
    Question question = Question::Jplus_integrable;
    bool closed_form_defined = true;
    bool closed_form_answer = false;
    std::string reason;
    bool sampled_answer = false;
    double worst_residual = 0;
    int sample_count = 0;

    bool agree() const { return !closed_form_defined || closed_form_answer == sampled_answer; }
};

struct VerdictConfig {
    int fiber_samples = 64;
    std::uint64_t seed = 1;
    bool flip_orientation = false;
    int threads = 1;
    double spread = 1.0;
    ToleranceProfile tol{};
};

namespace detail {

struct ClosedFormCompat {
    bool satisfied = false;
    std::string reason;
    double residual = 0;
};

// The shared closed-form criterion behind type-(1,1) compatibility and J+
// integrability: C = 0 (pseudo; SD/ASD by signature in oriented dimension 4)
// or Ricci type (symplectic).
inline ClosedFormCompat closed_form_compat(const CurvatureTensor& R, bool flip_orientation,
                                           const ToleranceProfile& tol) {
    ClosedFormCompat out;
    double scale = std::max(R.norm(), 1.0);
    if (R.base.kind == Kind::symplectic) {
        SymplecticDecomposition dec = decompose_symplectic(R);
        out.residual = dec.W_part.norm() / scale;
        out.satisfied = out.residual <= tol.verdict_pass;
        out.reason = "curvature of Ricci type (W = 0)";
        return out;
    }
    PseudoDecomposition dec = decompose_pseudo(R);
    if (!R.base.oriented || R.base.dim() > 4) {
        out.residual = dec.C_part.norm() / scale;
        out.satisfied = out.residual <= tol.verdict_pass;
        out.reason = "Weyl component vanishes (C = 0)";
        return out;
    }
    auto [plus, minus] = sd_asd_split(dec.C_part, flip_orientation, tol);
    double eps12 = R.base.form(0, 0) * R.base.form(1, 1);
    if (eps12 > 0) {
        out.residual = minus.norm() / scale;
        out.satisfied = out.residual <= tol.verdict_pass;
        out.reason = "Weyl component self-dual (signature (4,0)/(0,4))";
    } else {
        out.residual = plus.norm() / scale;
        out.satisfied = out.residual <= tol.verdict_pass;
        out.reason = "Weyl component anti-self-dual (signature (2,2))";
    }
    return out;
}

template <typename Fn>
inline double max_over_fiber(const CurvatureTensor& R, const VerdictConfig& cfg, Fn per_j) {
    std::vector<double> vals(static_cast<std::size_t>(cfg.fiber_samples), 0.0);
    parallel_for(cfg.fiber_samples, cfg.threads, [&](int i) {
        ComplexStructure js =
            sample_fiber_point(R.base, cfg.seed, i, cfg.flip_orientation, cfg.spread);
        vals[static_cast<std::size_t>(i)] = per_j(js);
    });
    double worst = 0;
    for (double v : vals) worst = std::max(worst, v);
    return worst;
}

} // namespace detail

// Type-(1,1) compatibility of the canonical 2-form with J+- (both have the
// same criterion): closed form per kind, sampled max ||Omega_2|| / ||R|| over
// the fibre.
inline Verdict type11_verdict(const CurvatureTensor& R, const VerdictConfig& cfg = {}) {
    Verdict v;
    v.question = Question::type11_compatible;
    detail::ClosedFormCompat cf = detail::closed_form_compat(R, cfg.flip_orientation, cfg.tol);
    v.closed_form_answer = cf.satisfied;
    v.reason = cf.reason;
    v.sample_count = cfg.fiber_samples;
    v.worst_residual = detail::max_over_fiber(
        R, cfg, [&](const ComplexStructure& js) { return type11_check(R, js); });
    v.sampled_answer = v.worst_residual <= cfg.tol.verdict_pass;
    return v;
}

// J+ integrability: closed form as above; sampled via the 4i obstruction.
// J- : never integrable; the sampled path reports the Nijenhuis span and must
// find at least the horizontal space.
inline Verdict integrability_verdict(const CurvatureTensor& R, int sign,
                                     const VerdictConfig& cfg = {}) {
    Verdict v;
    if (sign > 0) {
        v.question = Question::Jplus_integrable;
        detail::ClosedFormCompat cf = detail::closed_form_compat(R, cfg.flip_orientation, cfg.tol);
        v.closed_form_answer = cf.satisfied;
        v.reason = cf.reason;
        v.sample_count = cfg.fiber_samples;
        double scale = std::max(R.norm(), 1.0);
        v.worst_residual = detail::max_over_fiber(R, cfg, [&](const ComplexStructure& js) {
            return four_i_component(R, js).norm / scale;
        });
        v.sampled_answer = v.worst_residual <= cfg.tol.verdict_pass;
        return v;
    }
    v.question = Question::Jminus_integrable;
    v.closed_form_answer = false;
    v.reason = "J- is never integrable";
    ComplexStructure js = sample_fiber_point(R.base, cfg.seed, 0, cfg.flip_orientation, cfg.spread);
    int samples = std::max(cfg.fiber_samples, 4 * (R.base.dim() + R.base.dim() * R.base.dim()));
    SpanReport span = nijenhuis_span(R, js, -1, samples, cfg.seed, cfg.tol.rank);
    v.sample_count = samples;
    v.worst_residual = static_cast<double>(span.horizontal_rank);
    v.sampled_answer = !(span.horizontal_rank >= R.base.dim()); // rank >= 2n => not integrable
    return v;
}

// Nondegeneracy of the canonical 2-form.  A closed-form criterion exists for
// constant curvature (pseudo) and Ricci type (symplectic); otherwise only the
// sampled answer is defined.
inline Verdict two_form_symplectic_verdict(const CurvatureTensor& R, const VerdictConfig& cfg = {}) {
    Verdict v;
    v.question = Question::two_form_symplectic;
    v.sample_count = cfg.fiber_samples;
    std::vector<double> ratios(static_cast<std::size_t>(cfg.fiber_samples), 0.0);
    parallel_for(cfg.fiber_samples, cfg.threads, [&](int i) {
        ComplexStructure js =
            sample_fiber_point(R.base, cfg.seed, i, cfg.flip_orientation, cfg.spread);
        ratios[static_cast<std::size_t>(i)] = two_form_nondegenerate(R, js).horizontal_sv_ratio;
    });
    double worst = ratios.empty() ? 0.0 : ratios[0];
    for (double r : ratios) worst = std::min(worst, r);
    v.worst_residual = worst;
    v.sampled_answer = worst >= 1e-8;

    if (R.base.kind == Kind::symplectic) {
        SymplecticDecomposition dec = decompose_symplectic(R);
        double scale = std::max(R.norm(), 1.0);
        if (dec.W_part.norm() / scale <= cfg.tol.verdict_pass) {
            // Ricci type: nondegenerate iff Tr(rho j) Id + (rho j + j rho) has
            // trivial kernel at every j; evaluated on the sampled fibre points.
            // omega(rho X, Y) = Ric(X, Y)  =>  rho = -Omega^{-1} Ric
            Matrix rho = -R.base.form.partialPivLu().solve(dec.ricci);
            double worst_kernel = 1.0;
            for (int i = 0; i < cfg.fiber_samples; ++i) {
                ComplexStructure js =
                    sample_fiber_point(R.base, cfg.seed, i, cfg.flip_orientation, cfg.spread);
                Matrix op = (rho * js.J).trace() * Matrix::Identity(R.base.dim(), R.base.dim()) +
                            rho * js.J + js.J * rho;
                Eigen::JacobiSVD<Matrix> svd(op);
                double smax = svd.singularValues()(0);
                double smin = svd.singularValues()(R.base.dim() - 1);
                worst_kernel = std::min(worst_kernel, smax > 0 ? smin / smax : 0.0);
            }
            v.closed_form_defined = true;
            v.closed_form_answer = worst_kernel >= 1e-8;
            v.reason = "Ricci type: Tr(rho j) Id + (rho j + j rho) has trivial kernel";
        } else {
            v.closed_form_defined = false;
            v.reason = "no closed-form criterion for non-Ricci-type symplectic curvature";
        }
        return v;
    }
    PseudoDecomposition dec = decompose_pseudo(R);
    double scale = std::max(R.norm(), 1.0);
    if ((dec.E_part.norm() + dec.C_part.norm()) / scale <= cfg.tol.verdict_pass) {
        v.closed_form_defined = true;
        v.closed_form_answer = std::abs(dec.scal) / scale > cfg.tol.verdict_pass;
        v.reason = "constant curvature: symplectic iff scal != 0";
    } else {
        v.closed_form_defined = false;
        v.reason = "no closed-form criterion beyond the constant-curvature case";
    }
    return v;
}

} // namespace twistor
