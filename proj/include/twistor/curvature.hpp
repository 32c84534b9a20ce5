#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twistor/rng.hpp"
#include "twistor/spaces.hpp"
#include "twistor/tensor4.hpp"
#include "twistor/types.hpp"

namespace twistor {

// Fully covariant components R[a][b][c][d] = G(R(e_a, e_b) e_c, e_d) in the
// standard basis.  Sign convention: the unit round sphere has sectional
// curvature +1, i.e. R = K (G_ac G_bd - G_ad G_bc) for constant curvature K,
// and Ric(X, Z) = Tr[Y -> R(X, Y) Z] is then +(2n-1) K G.  The finite
// difference engine in charts.hpp is calibrated to the same convention.
struct CurvatureTensor {
    BilinearStructure base;
    Tensor4 R;

    double norm() const { return R.norm(); }
};

// ---------------------------------------------------------------------------
// Curvature space: kernel of the symmetry + Bianchi constraints, built
// numerically so one code path serves both kinds.  Cached per (kind, dim).
// ---------------------------------------------------------------------------

class CurvatureSpace {
  public:
    static CurvatureSpace build(Kind kind, int d) {
        if (d < 2 || d % 2 != 0) throw DimensionError("CurvatureSpace: dim must be even and >= 2");
        if (d > 10) throw DimensionError("CurvatureSpace: dim > 10 refused (cost guard)");
        CurvatureSpace cs;
        cs.kind_ = kind;
        cs.d_ = d;

        const bool sym_cd = kind == Kind::symplectic;
        std::vector<std::pair<int, int>> ab, cd;
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) ab.emplace_back(a, b);
        for (int c = 0; c < d; ++c)
            for (int e = sym_cd ? c : c + 1; e < d; ++e) cd.emplace_back(c, e);
        const int m = static_cast<int>(ab.size() * cd.size());

        // value of the normalised pair-symmetric basis element at (i,j,k,l)
        auto elem_value = [&](int eab, int ecd, int i, int j, int k, int l) -> double {
            auto [a, b] = ab[static_cast<std::size_t>(eab)];
            auto [c, e] = cd[static_cast<std::size_t>(ecd)];
            double s1 = (i == a && j == b) ? 1.0 : (i == b && j == a) ? -1.0 : 0.0;
            if (s1 == 0.0) return 0.0;
            double s2;
            if (c == e) {
                s2 = (k == c && l == c) ? 1.0 : 0.0;
            } else {
                double fwd = (k == c && l == e) ? 1.0 : 0.0;
                double bwd = (k == e && l == c) ? (sym_cd ? 1.0 : -1.0) : 0.0;
                s2 = fwd + bwd;
            }
            if (s2 == 0.0) return 0.0;
            double nrm = (c == e) ? std::sqrt(2.0) : 2.0;
            return s1 * s2 / nrm;
        };

        // first Bianchi rows: cyclic sum over (a,b,c), one row per a<b<c and d
        std::vector<std::array<int, 4>> rows;
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b)
                for (int c = b + 1; c < d; ++c)
                    for (int t = 0; t < d; ++t) rows.push_back({a, b, c, t});

        Matrix kernel;
        if (rows.empty()) {
            kernel = Matrix::Identity(m, m);
        } else {
            Matrix C(static_cast<Eigen::Index>(rows.size()), m);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                auto [a, b, c, t] = rows[r];
                for (int eab = 0; eab < static_cast<int>(ab.size()); ++eab)
                    for (int ecd = 0; ecd < static_cast<int>(cd.size()); ++ecd) {
                        int col = eab * static_cast<int>(cd.size()) + ecd;
                        C(static_cast<Eigen::Index>(r), col) =
                            elem_value(eab, ecd, a, b, c, t) + elem_value(eab, ecd, b, c, a, t) +
                            elem_value(eab, ecd, c, a, b, t);
                    }
            }
            // Rank-revealing elimination; SVD null spaces degrade on the heavily
            // degenerate spectrum of this constraint matrix at larger dims.
            Eigen::FullPivLU<Matrix> lu(C);
            lu.setThreshold(1e-10);
            Matrix raw = lu.kernel();
            Eigen::HouseholderQR<Matrix> qr(raw);
            kernel = qr.householderQ() * Matrix::Identity(m, raw.cols());
            double viol = (C * kernel).cwiseAbs().maxCoeff();
            if (viol > 1e-8)
                throw NumericalError("CurvatureSpace: kernel construction failed, violation " +
                                     std::to_string(viol));
        }

        // expand to the full d^4 space; columns stay orthonormal
        const int k = static_cast<int>(kernel.cols());
        cs.basis_ = Matrix::Zero(static_cast<Eigen::Index>(d) * d * d * d, k);
        for (int eab = 0; eab < static_cast<int>(ab.size()); ++eab)
            for (int ecd = 0; ecd < static_cast<int>(cd.size()); ++ecd) {
                int col = eab * static_cast<int>(cd.size()) + ecd;
                auto [a, b] = ab[static_cast<std::size_t>(eab)];
                auto [c, e] = cd[static_cast<std::size_t>(ecd)];
                double nrm = (c == e) ? std::sqrt(2.0) : 2.0;
                auto put = [&](int i, int j, int kk, int l, double v) {
                    Eigen::Index flat = ((static_cast<Eigen::Index>(i) * d + j) * d + kk) * d + l;
                    for (int q = 0; q < k; ++q) cs.basis_(flat, q) += v / nrm * kernel(col, q);
                };
                if (c == e) {
                    put(a, b, c, c, 1.0);
                    put(b, a, c, c, -1.0);
                } else {
                    double s = sym_cd ? 1.0 : -1.0;
                    put(a, b, c, e, 1.0);
                    put(b, a, c, e, -1.0);
                    put(a, b, e, c, s);
                    put(b, a, e, c, -s);
                }
            }
        return cs;
    }

    Kind kind() const { return kind_; }
    int space_dim() const { return d_; }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Matrix& basis() const { return basis_; }

    Eigen::VectorXd coords(const Tensor4& t) const { return basis_.transpose() * t.as_vector(); }

    Tensor4 from_coords(const Eigen::VectorXd& c) const {
        Tensor4 t(d_);
        t.as_vector() = basis_ * c;
        return t;
    }

    Tensor4 project(const Tensor4& t) const { return from_coords(coords(t)); }

    // distance to the constraint subspace, relative to max(|t|, 1)
    double residual(const Tensor4& t) const {
        Tensor4 p = project(t);
        p -= t;
        return p.norm() / std::max(t.norm(), 1.0);
    }

  private:
    Kind kind_ = Kind::pseudo_riemannian;
    int d_ = 0;
    Matrix basis_;
};

// Shared, lazily built instances (construction is the only expensive step).
inline const CurvatureSpace& curvature_space(Kind kind, int d) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<CurvatureSpace>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(static_cast<int>(kind), d);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<CurvatureSpace>(CurvatureSpace::build(kind, d))).first;
    return *it->second;
}

inline const CurvatureSpace& curvature_space(const BilinearStructure& base) {
    return curvature_space(base.kind, base.dim());
}

// ---------------------------------------------------------------------------
// Basic operations
// ---------------------------------------------------------------------------

inline CurvatureTensor random_curvature(const BilinearStructure& base, std::uint64_t seed) {
    const CurvatureSpace& cs = curvature_space(base);
    Rng rng(seed);
    const int d = base.dim();
    for (int attempt = 0; attempt < 64; ++attempt) {
        Tensor4 raw(d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                    for (int e = 0; e < d; ++e) raw(a, b, c, e) = rng.uniform(-1.0, 1.0);
        Tensor4 snapped = cs.project(raw);
        double nrm = snapped.norm();
        if (nrm >= 1e-3) {
            snapped *= 1.0 / nrm;
            return CurvatureTensor{base, snapped};
        }
    }
    throw NumericalError("random_curvature: repeated degenerate draws");
}

// Endomorphism M with G(M Z, T) = R(X, Y, Z, T).
inline Matrix endomorphism_of(const CurvatureTensor& R, const Vector& X, const Vector& Y) {
    const int d = R.base.dim();
    if (X.size() != d || Y.size() != d) throw DimensionError("endomorphism_of: bad vector size");
    Matrix slice = Matrix::Zero(d, d); // slice(c,e) = R(X,Y,e_c,e_e)
    for (int a = 0; a < d; ++a) {
        if (X[a] == 0.0) continue;
        for (int b = 0; b < d; ++b) {
            if (Y[b] == 0.0) continue;
            double w = X[a] * Y[b];
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) slice(c, e) += w * R.R(a, b, c, e);
        }
    }
    // M^T G = slice  =>  G^T M = slice^T
    return R.base.form.transpose().partialPivLu().solve(slice.transpose());
}

// Kulkarni-Nomizu style product (pseudo kind): an exact-symmetry generator.
inline CurvatureTensor kulkarni_nomizu(const Matrix& h, const Matrix& k,
                                       const BilinearStructure& base,
                                       const ToleranceProfile& tol = {}) {
    if (base.kind != Kind::pseudo_riemannian)
        throw PreconditionError("kulkarni_nomizu: pseudo kind only");
    const int d = base.dim();
    if (h.rows() != d || k.rows() != d || h.cols() != d || k.cols() != d)
        throw DimensionError("kulkarni_nomizu: dimension mismatch");
    double hscale = std::max(h.norm(), 1.0), kscale = std::max(k.norm(), 1.0);
    if ((h - h.transpose()).norm() > tol.membership * hscale ||
        (k - k.transpose()).norm() > tol.membership * kscale)
        throw PreconditionError("kulkarni_nomizu: inputs must be symmetric");
    Tensor4 R(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    R(a, b, c, e) = h(a, c) * k(b, e) + h(b, e) * k(a, c) - h(a, e) * k(b, c) -
                                    h(b, c) * k(a, e);
    return CurvatureTensor{base, R};
}

// Ricci trace, following the per-kind convention:
// pseudo      Ric(X, Z) = Tr[Y -> R(X, Y) Z]
// symplectic  Ric(X, Y) = Tr[Z -> R(X, Z) Y]
inline Matrix ricci(const CurvatureTensor& R) {
    const int d = R.base.dim();
    Matrix ginv = R.base.form.inverse();
    Matrix out = Matrix::Zero(d, d);
    if (R.base.kind == Kind::pseudo_riemannian) {
        for (int a = 0; a < d; ++a)
            for (int c = 0; c < d; ++c) {
                double s = 0;
                for (int b = 0; b < d; ++b)
                    for (int e = 0; e < d; ++e) s += ginv(b, e) * R.R(a, b, c, e);
                out(a, c) = s;
            }
    } else {
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double s = 0;
                for (int c = 0; c < d; ++c)
                    for (int e = 0; e < d; ++e) s -= ginv(c, e) * R.R(a, c, b, e);
                out(a, b) = s;
            }
    }
    return out;
}

inline double scalar_curvature(const CurvatureTensor& R) {
    if (R.base.kind != Kind::pseudo_riemannian)
        throw PreconditionError("scalar_curvature: pseudo kind only");
    return (R.base.form.inverse() * ricci(R)).trace();
}

// ---------------------------------------------------------------------------
// Decompositions
// ---------------------------------------------------------------------------

struct PseudoDecomposition {
    CurvatureTensor S_part, E_part, C_part;
    double scal = 0;
    Matrix ricci;
    Matrix traceless_ricci;
};

inline PseudoDecomposition decompose_pseudo(const CurvatureTensor& R) {
    if (R.base.kind != Kind::pseudo_riemannian)
        throw PreconditionError("decompose_pseudo: pseudo kind only");
    const int d = R.base.dim();
    if (d < 4) throw DimensionError("decompose_pseudo: requires dim >= 4");
    const Matrix& G = R.base.form;
    PseudoDecomposition out;
    out.ricci = ricci(R);
    out.scal = (G.inverse() * out.ricci).trace();
    out.traceless_ricci = out.ricci - (out.scal / d) * G;

    Tensor4 S(d), E(d);
    const double cs = out.scal / (static_cast<double>(d) * (d - 1));
    const double ce = 1.0 / (d - 2);
    const Matrix& rh = out.traceless_ricci;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    S(a, b, c, e) = cs * (G(a, c) * G(b, e) - G(a, e) * G(b, c));
                    E(a, b, c, e) = ce * (G(a, c) * rh(b, e) - G(a, e) * rh(b, c) +
                                          G(b, e) * rh(a, c) - G(b, c) * rh(a, e));
                }
    out.S_part = CurvatureTensor{R.base, S};
    out.E_part = CurvatureTensor{R.base, E};
    Tensor4 C = R.R;
    C -= S;
    C -= E;
    out.C_part = CurvatureTensor{R.base, C};
    return out;
}

// E(r): the unique curvature with Ricci trace r built from Omega alone.
inline CurvatureTensor build_E_of_r(const Matrix& r, const BilinearStructure& base,
                                    const ToleranceProfile& tol = {}) {
    if (base.kind != Kind::symplectic) throw PreconditionError("build_E_of_r: symplectic kind only");
    const int d = base.dim();
    if (r.rows() != d || r.cols() != d) throw DimensionError("build_E_of_r: dimension mismatch");
    if ((r - r.transpose()).norm() > tol.membership * std::max(r.norm(), 1.0))
        throw PreconditionError("build_E_of_r: r must be symmetric");
    const Matrix& W = base.form;
    const double c0 = -1.0 / (2.0 * (base.n + 1));
    Tensor4 E(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    E(a, b, c, e) = c0 * (2.0 * W(a, b) * r(c, e) + W(a, c) * r(b, e) -
                                          W(b, c) * r(a, e) + r(b, c) * W(a, e) -
                                          r(a, c) * W(b, e));
    return CurvatureTensor{base, E};
}

struct SymplecticDecomposition {
    CurvatureTensor E_part, W_part;
    Matrix ricci;
};

inline SymplecticDecomposition decompose_symplectic(const CurvatureTensor& R) {
    if (R.base.kind != Kind::symplectic)
        throw PreconditionError("decompose_symplectic: symplectic kind only");
    if (R.base.dim() < 4) throw DimensionError("decompose_symplectic: requires dim >= 4");
    SymplecticDecomposition out;
    out.ricci = ricci(R);
    out.E_part = build_E_of_r(out.ricci, R.base);
    Tensor4 W = R.R;
    W -= out.E_part.R;
    out.W_part = CurvatureTensor{R.base, W};
    return out;
}

struct RicciTypeResult {
    bool value = false;
    double residual = 0;
};

inline RicciTypeResult is_ricci_type(const CurvatureTensor& R, double tol = 1e-8) {
    SymplecticDecomposition dec = decompose_symplectic(R);
    double rn = R.norm();
    double res = dec.W_part.norm() / std::max(rn, 1e-300);
    if (rn == 0.0) return {true, 0.0};
    return {res <= tol, res};
}

// ---------------------------------------------------------------------------
// Dimension-4 Hodge machinery (oriented pseudo kind)
// ---------------------------------------------------------------------------

namespace detail {

inline const std::array<std::pair<int, int>, 6>& two_form_pairs() {
    static const std::array<std::pair<int, int>, 6> p = {
        {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
    return p;
}

inline int pair_index(int a, int b) {
    const auto& P = two_form_pairs();
    for (int i = 0; i < 6; ++i)
        if (P[static_cast<std::size_t>(i)].first == a && P[static_cast<std::size_t>(i)].second == b)
            return i;
    throw Error("pair_index: bad pair");
}

inline int perm_sign4(const std::array<int, 4>& pm) {
    int sign = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (pm[static_cast<std::size_t>(i)] > pm[static_cast<std::size_t>(j)]) sign = -sign;
    return sign;
}

} // namespace detail

// Hodge star on 2-vectors in the standard oriented basis, as a 6x6 matrix on
// the pairs (01,02,03,12,13,23).  Signs follow the signature of G; *o* = Id
// holds for the even signatures (4,0), (2,2), (0,4).
inline Matrix hodge_star(const BilinearStructure& base, bool flip_orientation = false) {
    if (base.kind != Kind::pseudo_riemannian || base.dim() != 4 || !base.oriented)
        throw PreconditionError("hodge_star: requires oriented pseudo kind in dimension 4");
    const auto& P = detail::two_form_pairs();
    Vector eta = base.form.diagonal();
    Matrix star = Matrix::Zero(6, 6);
    for (int i = 0; i < 6; ++i) {
        auto [a, b] = P[static_cast<std::size_t>(i)];
        std::array<bool, 4> used = {false, false, false, false};
        used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = true;
        int c = -1, e = -1;
        for (int t = 0; t < 4; ++t)
            if (!used[static_cast<std::size_t>(t)]) (c < 0 ? c : e) = t;
        int sgn = detail::perm_sign4({a, b, c, e});
        star(detail::pair_index(c, e), i) = sgn * eta[c] * eta[e];
    }
    if (flip_orientation) star = -star;
    return star;
}

namespace detail {

// curvature tensor <-> operator on 2-vectors (diagonal standard G only)
inline Matrix curvature_as_two_form_operator(const CurvatureTensor& R) {
    const auto& P = two_form_pairs();
    Vector eta = R.base.form.diagonal();
    Matrix op(6, 6);
    for (int col = 0; col < 6; ++col) {
        auto [a, b] = P[static_cast<std::size_t>(col)];
        for (int row = 0; row < 6; ++row) {
            auto [c, e] = P[static_cast<std::size_t>(row)];
            op(row, col) = R.R(a, b, c, e) * eta[c] * eta[e];
        }
    }
    return op;
}

inline Tensor4 two_form_operator_as_curvature(const Matrix& op, const BilinearStructure& base) {
    const auto& P = two_form_pairs();
    Vector eta = base.form.diagonal();
    Tensor4 R(4);
    for (int col = 0; col < 6; ++col) {
        auto [a, b] = P[static_cast<std::size_t>(col)];
        for (int row = 0; row < 6; ++row) {
            auto [c, e] = P[static_cast<std::size_t>(row)];
            double v = op(row, col) * eta[c] * eta[e];
            R(a, b, c, e) = v;
            R(b, a, c, e) = -v;
            R(a, b, e, c) = -v;
            R(b, a, e, c) = v;
        }
    }
    return R;
}

} // namespace detail

// Split a Weyl-type (totally trace-free) tensor into its self-dual and
// anti-self-dual halves: C = C+ + C-, with C+ supported on the +1 eigenspace
// of * and C- on the -1 eigenspace.
inline std::pair<CurvatureTensor, CurvatureTensor> sd_asd_split(const CurvatureTensor& C,
                                                                bool flip_orientation = false,
                                                                const ToleranceProfile& tol = {}) {
    if (C.base.kind != Kind::pseudo_riemannian || C.base.dim() != 4 || !C.base.oriented)
        throw PreconditionError("sd_asd_split: requires oriented pseudo kind in dimension 4");
    Matrix ric = ricci(C);
    if (ric.norm() > tol.membership * std::max(C.norm(), 1.0))
        throw PreconditionError("sd_asd_split: input is not Ricci-flat");
    Matrix star = hodge_star(C.base, flip_orientation);
    Matrix op = detail::curvature_as_two_form_operator(C);
    Matrix pp = 0.5 * (Matrix::Identity(6, 6) + star);
    Matrix pm = 0.5 * (Matrix::Identity(6, 6) - star);
    CurvatureTensor plus{C.base, detail::two_form_operator_as_curvature(pp * op * pp, C.base)};
    CurvatureTensor minus{C.base, detail::two_form_operator_as_curvature(pm * op * pm, C.base)};
    return {plus, minus};
}

// ---------------------------------------------------------------------------
// Sectional curvature
// ---------------------------------------------------------------------------

// K(X, Y) = R(X, Y, X, Y) / (g(X,X) g(Y,Y) - g(X,Y)^2); with the sign
// convention above the unit sphere gives +1 on every plane.
inline double sectional_curvature(const CurvatureTensor& R, const Vector& X, const Vector& Y,
                                  double degenerate_tol = 1e-8) {
    if (R.base.kind != Kind::pseudo_riemannian)
        throw PreconditionError("sectional_curvature: pseudo kind only");
    const Matrix& G = R.base.form;
    double gxx = X.dot(G * X), gyy = Y.dot(G * Y), gxy = X.dot(G * Y);
    double denom = gxx * gyy - gxy * gxy;
    double scale = std::max(1e-300, X.squaredNorm() * Y.squaredNorm());
    if (std::abs(denom) < degenerate_tol * scale)
        throw PreconditionError("sectional_curvature: degenerate plane");
    double num = 0;
    const int d = R.base.dim();
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) num += R.R(a, b, c, e) * X[a] * Y[b] * X[c] * Y[e];
    return num / denom;
}

struct PinchingReport {
    double min = 0;
    double max = 0;
    double ratio = 0; // min / max when max != 0
    int samples = 0;
};

// Aggregates over the coordinate planes plus `samples` random planes.
inline PinchingReport pinching_report(const CurvatureTensor& R, int samples, std::uint64_t seed,
                                      double degenerate_tol = 1e-8) {
    PinchingReport rep;
    const int d = R.base.dim();
    bool first = true;
    auto record = [&](const Vector& X, const Vector& Y) {
        double k;
        try {
            k = sectional_curvature(R, X, Y, degenerate_tol);
        } catch (const PreconditionError&) {
            return;
        }
        if (first || k < rep.min) rep.min = k;
        if (first || k > rep.max) rep.max = k;
        first = false;
        ++rep.samples;
    };
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) record(Vector::Unit(d, a), Vector::Unit(d, b));
    for (int i = 0; i < samples; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        Vector X(d), Y(d);
        for (int a = 0; a < d; ++a) X[a] = rng.uniform(-1.0, 1.0);
        for (int a = 0; a < d; ++a) Y[a] = rng.uniform(-1.0, 1.0);
        record(X, Y);
    }
    rep.ratio = rep.max != 0.0 ? rep.min / rep.max : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Group action on curvature tensors: (h.R)(X,Y,Z,T) = R(h^{-1}., ...).
// ---------------------------------------------------------------------------

inline CurvatureTensor group_action(const Matrix& h, const CurvatureTensor& R) {
    Eigen::PartialPivLU<Matrix> lu(h);
    if (!(lu.rcond() > 1e-14)) throw PreconditionError("group_action: h is not invertible");
    Matrix hinv = lu.inverse();
    return CurvatureTensor{R.base, R.R.pullback(hinv)};
}

} // namespace twistor
