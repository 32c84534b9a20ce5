#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "twistor/rng.hpp"
#include "twistor/types.hpp"

namespace twistor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// The model space (V, g~0) or (V, Omega0).  `form` is always the standard
// matrix in the standard basis; frames map concrete tangent spaces onto it.
struct BilinearStructure {
    Kind kind = Kind::pseudo_riemannian;
    int n = 0;     // half-dimension, dim V = 2n
    int p = 0;     // signature halves (pseudo only), p + q = n
    int q = 0;
    bool oriented = false;
    Matrix form; // 2n x 2n

    int dim() const { return 2 * n; }
};

// g~0 = blockdiag(I_{p,q}, I_{p,q}) with I_{p,q} = diag(I_p, -I_q);
// signature (2p, 2q).
inline BilinearStructure standard_pseudo(int p, int q, bool oriented = false) {
    if (p < 0 || q < 0 || p + q < 2)
        throw DimensionError("standard_pseudo: requires p,q >= 0 and p+q >= 2 (dim >= 4)");
    BilinearStructure b;
    b.kind = Kind::pseudo_riemannian;
    b.n = p + q;
    b.p = p;
    b.q = q;
    b.oriented = oriented;
    Vector diag(2 * b.n);
    for (int h = 0; h < 2; ++h) {
        for (int i = 0; i < p; ++i) diag[h * b.n + i] = 1.0;
        for (int i = 0; i < q; ++i) diag[h * b.n + p + i] = -1.0;
    }
    b.form = diag.asDiagonal();
    return b;
}

// Omega0 = [[0, I_n], [-I_n, 0]].
inline BilinearStructure standard_symplectic(int n) {
    if (n < 2) throw DimensionError("standard_symplectic: requires n >= 2 (dim >= 4)");
    BilinearStructure b;
    b.kind = Kind::symplectic;
    b.n = n;
    b.oriented = false;
    b.form = Matrix::Zero(2 * n, 2 * n);
    b.form.block(0, n, n, n) = Matrix::Identity(n, n);
    b.form.block(n, 0, n, n) = -Matrix::Identity(n, n);
    return b;
}

inline BilinearStructure standard_structure(Kind kind, int p_or_n, int q = 0, bool oriented = false) {
    return kind == Kind::pseudo_riemannian ? standard_pseudo(p_or_n, q, oriented)
                                           : standard_symplectic(p_or_n);
}

struct ComplexStructure {
    BilinearStructure base;
    Matrix J;
};

// j~0 = [[0, -I_n], [I_n, 0]]; compatible with both standard forms.
inline ComplexStructure standard_j0(const BilinearStructure& base) {
    const int n = base.n;
    Matrix J = Matrix::Zero(2 * n, 2 * n);
    J.block(0, n, n, n) = -Matrix::Identity(n, n);
    J.block(n, 0, n, n) = Matrix::Identity(n, n);
    return ComplexStructure{base, J};
}

// Endomorphism S with Sj + jS = 0 and S^T G + G S = 0; a tangent to the fibre.
struct VerticalVector {
    ComplexStructure at;
    Matrix S;
};

// Tangent vector to the twistor space at j: horizontal part X (a vector of V,
// the horizontal space being identified with V through the projection) and
// vertical part S.
struct TwistorTangent {
    Vector X;
    Matrix S;
};

namespace detail {

// Adapted-basis determinant sign: greedily extend {v_k, j v_k} pairs, picking
// the next seed vector with the largest |g(w,w)| after orthogonalisation
// against the previous pairs.  The sign of det[v1, jv1, ..., vn, jvn] only
// depends on the connected component of j.
inline int adapted_basis_sign(const Matrix& G, const Matrix& J, double pivot_tol,
                              const std::vector<int>& candidate_order, Rng* fallback_rng) {
    const int d = static_cast<int>(G.rows());
    const int n = d / 2;
    std::vector<Vector> accepted; // u_1, Ju_1, u_2, Ju_2, ... normalised to |g| = 1
    std::vector<double> signs;    // g(u_i, u_i) = signs[i] in {+1, -1}

    auto orthogonalise = [&](Vector v) {
        for (std::size_t i = 0; i < accepted.size(); ++i)
            v -= signs[i] * (accepted[i].dot(G * v)) * accepted[i];
        return v;
    };

    std::vector<Vector> candidates;
    for (int c : candidate_order) candidates.push_back(Vector::Unit(d, c));

    while (static_cast<int>(accepted.size()) < d) {
        int best = -1;
        double best_q = 0;
        Vector best_w;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            Vector w = orthogonalise(candidates[c]);
            double qn = w.dot(G * w);
            if (std::abs(qn) > std::abs(best_q)) {
                best = static_cast<int>(c);
                best_q = qn;
                best_w = w;
            }
        }
        if (best < 0 || std::abs(best_q) < pivot_tol) {
            if (!fallback_rng) throw NumericalError("adapted_basis_sign: no usable pivot");
            Vector r(d);
            for (int i = 0; i < d; ++i) r[i] = fallback_rng->uniform(-1.0, 1.0);
            candidates.push_back(r);
            continue;
        }
        Vector u = best_w / std::sqrt(std::abs(best_q));
        double s = best_q > 0 ? 1.0 : -1.0;
        Vector ju = J * u; // g(ju, ju) = g(u, u), g(u, ju) = 0

        accepted.push_back(u);
        signs.push_back(s);
        accepted.push_back(ju);
        signs.push_back(s);
        candidates.erase(candidates.begin() + best);
    }

    Matrix B(d, d);
    for (int i = 0; i < d; ++i) B.col(i) = accepted[static_cast<std::size_t>(i)];
    (void)n;
    return B.determinant() > 0 ? 1 : -1;
}

} // namespace detail

// Sign of the orientation class of j relative to j~0 (+1 on the component of
// j~0).  `shuffle_seed`, when set, permutes the greedy seed order; the result
// is invariant under that choice.
inline int orientation_class(const ComplexStructure& j,
                             std::optional<std::uint64_t> shuffle_seed = std::nullopt,
                             double pivot_tol = 1e-8) {
    const BilinearStructure& base = j.base;
    if (base.kind == Kind::symplectic)
        throw PreconditionError(
            "orientation_class: unsupported for symplectic kind (positivity fixes the component)");
    const int d = base.dim();
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    Rng fallback(shuffle_seed ? *shuffle_seed : 0x0f1e2d3c4b5a6978ull);
    if (shuffle_seed) {
        for (int i = d - 1; i > 0; --i)
            std::swap(order[static_cast<std::size_t>(i)],
                      order[fallback.below(static_cast<std::uint64_t>(i + 1))]);
    }
    int sj = detail::adapted_basis_sign(base.form, j.J, pivot_tol, order, &fallback);

    std::vector<int> ref_order(static_cast<std::size_t>(d));
    std::iota(ref_order.begin(), ref_order.end(), 0);
    Rng ref_rng(0x0f1e2d3c4b5a6978ull);
    int s0 = detail::adapted_basis_sign(base.form, standard_j0(base).J, pivot_tol, ref_order, &ref_rng);
    return sj * s0;
}

struct CompatibilityReport {
    bool is_complex = false;    // J^2 = -Id
    bool is_compatible = false; // J^T G J = G
    bool is_positive = false;   // symplectic kind: G(X, JX) > 0
    int orientation = 0;        // pseudo oriented kind: class in {-1, +1}; 0 if n/a
    double complex_residual = 0;
    double compat_residual = 0;
    bool ok = false;
};

inline CompatibilityReport compatibility_check(const Matrix& J, const BilinearStructure& base,
                                               const ToleranceProfile& tol = {}) {
    const int d = base.dim();
    if (J.rows() != d || J.cols() != d)
        throw DimensionError("compatibility_check: dimension mismatch");
    CompatibilityReport r;
    r.complex_residual = (J * J + Matrix::Identity(d, d)).norm();
    r.is_complex = r.complex_residual <= tol.exact * std::max(1.0, J.squaredNorm());
    r.compat_residual = (J.transpose() * base.form * J - base.form).norm();
    r.is_compatible = r.compat_residual <= tol.exact * std::max(1.0, J.squaredNorm());

    bool ok = r.is_complex && r.is_compatible;
    if (base.kind == Kind::symplectic) {
        if (ok) {
            Matrix H = base.form * J;
            H = 0.5 * (H + H.transpose());
            Eigen::SelfAdjointEigenSolver<Matrix> es(H);
            r.is_positive = es.eigenvalues().minCoeff() > 0;
        }
        ok = ok && r.is_positive;
    } else if (base.oriented) {
        if (ok) r.orientation = orientation_class(ComplexStructure{base, J});
        ok = ok && r.orientation == 1;
    }
    r.ok = ok;
    return r;
}

// A = exp(xi) with xi a random element of the Lie algebra of Gl(V, g~0):
// xi = G^{-1} K, K skew (pseudo) or symmetric (symplectic), entries in
// [-spread, spread].  exp lands in the identity component, so det A = +1 and
// the oriented fibre is preserved automatically.
inline Matrix random_algebra_element(const BilinearStructure& base, std::uint64_t seed,
                                     double spread = 1.0) {
    const int d = base.dim();
    Rng rng(seed);
    Matrix K(d, d);
    if (base.kind == Kind::pseudo_riemannian) {
        K.setZero();
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                double v = rng.uniform(-spread, spread);
                K(i, j) = v;
                K(j, i) = -v;
            }
    } else {
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double v = rng.uniform(-spread, spread);
                K(i, j) = v;
                K(j, i) = v;
            }
    }
    return base.form.partialPivLu().solve(K);
}

inline Matrix random_group_element(const BilinearStructure& base, std::uint64_t seed,
                                   double spread = 1.0) {
    Matrix xi = random_algebra_element(base, seed, spread);
    return xi.exp();
}

inline ComplexStructure conjugate_j(const Matrix& A, const ComplexStructure& j) {
    Eigen::PartialPivLU<Matrix> lu(A);
    if (!(lu.rcond() > 1e-14)) throw PreconditionError("conjugate_j: A is not invertible");
    return ComplexStructure{j.base, A * j.J * lu.inverse()};
}

// Frobenius-orthonormal basis of the vertical space at j: the joint kernel of
// S -> SJ + JS and S -> S^T G + G S, computed numerically.
inline std::vector<VerticalVector> vertical_basis(const ComplexStructure& j) {
    const int d = j.base.dim();
    const int m = d * d;
    const Matrix& J = j.J;
    const Matrix& G = j.base.form;
    Matrix C(2 * m, m);
    C.setZero();
    auto col = [d](int r, int c) { return r * d + c; };
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            int row1 = col(r, c);
            int row2 = m + col(r, c);
            for (int k = 0; k < d; ++k) {
                C(row1, col(r, k)) += J(k, c); // (S J)(r,c)
                C(row1, col(k, c)) += J(r, k); // (J S)(r,c)
                C(row2, col(k, r)) += G(k, c); // (S^T G)(r,c)
                C(row2, col(k, c)) += G(r, k); // (G S)(r,c)
            }
        }
    Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-8 * std::max(smax, 1.0)) ++rank;
    int k = m - rank;
    std::vector<VerticalVector> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd v = svd.matrixV().col(rank + i);
        Matrix S(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) S(r, c) = v[col(r, c)];
        out.push_back(VerticalVector{j, S});
    }
    return out;
}

// Frame xi with xi^T Gx xi equal to the standard form of `target`.
// Pseudo: signature-aware Gram-Schmidt, pivoting on the largest |g(w,w)|.
// Symplectic: Darboux pairing.  With `positive_det`, a column is flipped if
// needed so that det xi > 0 (legal: the standard forms are invariant).
inline Matrix pseudo_orthonormal_frame(const BilinearStructure& target, const Matrix& Gx,
                                       bool positive_det = false, double pivot_rel_tol = 1e-8) {
    const int d = target.dim();
    if (Gx.rows() != d || Gx.cols() != d)
        throw DimensionError("pseudo_orthonormal_frame: dimension mismatch");
    const double scale = std::max(Gx.cwiseAbs().maxCoeff(), 1e-300);
    const double pivot_tol = pivot_rel_tol * scale;

    Matrix xi(d, d);
    if (target.kind == Kind::pseudo_riemannian) {
        if ((Gx - Gx.transpose()).norm() > 1e-10 * scale)
            throw PreconditionError("pseudo_orthonormal_frame: Gx not symmetric");
        std::vector<Vector> pos, neg;
        std::vector<Vector> accepted;
        std::vector<double> signs;
        std::vector<Vector> candidates;
        for (int c = 0; c < d; ++c) candidates.push_back(Vector::Unit(d, c));
        Rng fallback(0x5eed5eed5eed5eedull);
        while (static_cast<int>(accepted.size()) < d) {
            int best = -1;
            double best_q = 0;
            Vector best_w;
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                Vector w = candidates[c];
                for (std::size_t i = 0; i < accepted.size(); ++i)
                    w -= signs[i] * (accepted[i].dot(Gx * w)) * accepted[i];
                double qn = w.dot(Gx * w);
                if (std::abs(qn) > std::abs(best_q)) {
                    best = static_cast<int>(c);
                    best_q = qn;
                    best_w = w;
                }
            }
            if (best < 0 || std::abs(best_q) < pivot_tol) {
                if (candidates.size() > static_cast<std::size_t>(8 * d))
                    throw NumericalError("pseudo_orthonormal_frame: near-degenerate input (pivot "
                                         "below tolerance)");
                Vector r(d);
                for (int i = 0; i < d; ++i) r[i] = fallback.uniform(-1.0, 1.0);
                candidates.push_back(r);
                continue;
            }
            Vector u = best_w / std::sqrt(std::abs(best_q));
            double s = best_q > 0 ? 1.0 : -1.0;
            accepted.push_back(u);
            signs.push_back(s);
            (s > 0 ? pos : neg).push_back(u);
            candidates.erase(candidates.begin() + best);
        }
        if (static_cast<int>(pos.size()) != 2 * target.p || static_cast<int>(neg.size()) != 2 * target.q)
            throw DimensionError("pseudo_orthonormal_frame: signature mismatch");
        // column order matching diag(I_p, -I_q, I_p, -I_q)
        int c = 0;
        for (int i = 0; i < target.p; ++i) xi.col(c++) = pos[static_cast<std::size_t>(i)];
        for (int i = 0; i < target.q; ++i) xi.col(c++) = neg[static_cast<std::size_t>(i)];
        for (int i = 0; i < target.p; ++i) xi.col(c++) = pos[static_cast<std::size_t>(target.p + i)];
        for (int i = 0; i < target.q; ++i) xi.col(c++) = neg[static_cast<std::size_t>(target.q + i)];
    } else {
        if ((Gx + Gx.transpose()).norm() > 1e-10 * scale)
            throw PreconditionError("pseudo_orthonormal_frame: Gx not antisymmetric");
        const int n = target.n;
        std::vector<Vector> us, vs;
        std::vector<Vector> candidates;
        for (int c = 0; c < d; ++c) candidates.push_back(Vector::Unit(d, c));
        auto omega = [&](const Vector& a, const Vector& b) { return a.dot(Gx * b); };
        for (int pair = 0; pair < n; ++pair) {
            // largest available pairing Omega(u, v)
            int bu = -1, bv = -1;
            double best = 0;
            for (std::size_t i = 0; i < candidates.size(); ++i)
                for (std::size_t jx = 0; jx < candidates.size(); ++jx) {
                    if (i == jx) continue;
                    double w = std::abs(omega(candidates[i], candidates[jx]));
                    if (w > best) {
                        best = w;
                        bu = static_cast<int>(i);
                        bv = static_cast<int>(jx);
                    }
                }
            if (bu < 0 || best < pivot_tol)
                throw NumericalError("pseudo_orthonormal_frame: near-degenerate symplectic input");
            Vector u = candidates[static_cast<std::size_t>(bu)];
            Vector v = candidates[static_cast<std::size_t>(bv)] / omega(u, candidates[static_cast<std::size_t>(bv)]);
            std::vector<Vector> rest;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (static_cast<int>(i) == bu || static_cast<int>(i) == bv) continue;
                Vector cnd = candidates[i];
                cnd = cnd + omega(v, cnd) * u - omega(u, cnd) * v;
                rest.push_back(cnd);
            }
            candidates = std::move(rest);
            us.push_back(u);
            vs.push_back(v);
        }
        for (int i = 0; i < n; ++i) {
            xi.col(i) = us[static_cast<std::size_t>(i)];
            xi.col(n + i) = vs[static_cast<std::size_t>(i)];
        }
    }
    if (positive_det && xi.determinant() < 0) xi.col(d - 1) *= -1.0;
    return xi;
}

// Fibre sampling.  Conjugation by exp(xi) covers only the identity component,
// so component representatives are mixed in where the fibre has several:
//  - oriented pseudo: det +1 reflections (identity, and space*time flip when
//    the signature is indefinite); with flip_orientation, det -1 ones;
//  - non-oriented pseudo: all reflection classes;
//  - symplectic: the fibre is connected.
inline std::vector<Matrix> component_representatives(const BilinearStructure& base,
                                                     bool flip_orientation = false) {
    const int d = base.dim();
    std::vector<Matrix> reps;
    Matrix id = Matrix::Identity(d, d);
    if (base.kind == Kind::symplectic) {
        reps.push_back(id);
        return reps;
    }
    Matrix rs = id; // flips one spacelike axis (or timelike when p == 0)
    rs(0, 0) = -1.0;
    Matrix rt = id;
    bool indefinite = base.p > 0 && base.q > 0;
    if (indefinite) rt(base.p, base.p) = -1.0; // first timelike axis
    if (!base.oriented) {
        reps.push_back(id);
        reps.push_back(rs);
        if (indefinite) {
            reps.push_back(rt);
            reps.push_back(rs * rt);
        }
    } else if (!flip_orientation) {
        reps.push_back(id);
        if (indefinite) reps.push_back(rs * rt);
    } else {
        reps.push_back(rs);
        if (indefinite) reps.push_back(rt);
    }
    return reps;
}

inline ComplexStructure sample_fiber_point(const BilinearStructure& base, std::uint64_t seed,
                                           int index, bool flip_orientation = false,
                                           double spread = 1.0) {
    std::vector<Matrix> reps = component_representatives(base, flip_orientation);
    Matrix E = random_group_element(base, derive_seed(seed, static_cast<std::uint64_t>(index)), spread);
    const Matrix& D = reps[static_cast<std::size_t>(index) % reps.size()];
    return conjugate_j(E * D, standard_j0(base));
}

} // namespace twistor
