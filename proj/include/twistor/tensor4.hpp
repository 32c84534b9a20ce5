#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "twistor/types.hpp"

namespace twistor {

// Dense rank-4 array T[a][b][c][d] over a 2n-dimensional space, row-major.
// Small dimensions only (2n <= 10), so plain loops are fine everywhere.
template <typename ScalarT>
class Tensor4T {
  public:
    using Scalar = ScalarT;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Tensor4T() : d_(0) {}
    explicit Tensor4T(int d) : d_(d), v_(static_cast<std::size_t>(d) * d * d * d, Scalar(0)) {}

    int dim() const { return d_; }
    std::size_t size() const { return v_.size(); }

    Scalar& operator()(int a, int b, int c, int e) { return v_[idx(a, b, c, e)]; }
    const Scalar& operator()(int a, int b, int c, int e) const { return v_[idx(a, b, c, e)]; }

    Scalar* data() { return v_.data(); }
    const Scalar* data() const { return v_.data(); }

    double norm() const {
        double s = 0;
        for (const Scalar& x : v_) s += std::norm(std::complex<double>(x));
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0;
        for (const Scalar& x : v_) m = std::max(m, std::abs(std::complex<double>(x)));
        return m;
    }

    Tensor4T& operator+=(const Tensor4T& o) {
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    Tensor4T& operator-=(const Tensor4T& o) {
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Tensor4T& operator*=(Scalar s) {
        for (Scalar& x : v_) x *= s;
        return *this;
    }

    friend Tensor4T operator+(Tensor4T a, const Tensor4T& b) { return a += b; }
    friend Tensor4T operator-(Tensor4T a, const Tensor4T& b) { return a -= b; }
    friend Tensor4T operator*(Tensor4T a, Scalar s) { return a *= s; }
    friend Tensor4T operator*(Scalar s, Tensor4T a) { return a *= s; }

    static double dot(const Tensor4T& a, const Tensor4T& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.v_.size(); ++i)
            s += static_cast<double>(a.v_[i] * b.v_[i]);
        return s;
    }

    // out[.. a ..] = sum_e in[.. e ..] * M(e, a), with `slot` in {0,1,2,3}.
    Tensor4T contract_slot(int slot, const Mat& M) const {
        Tensor4T out(d_);
        const int d = d_;
        for (int i0 = 0; i0 < d; ++i0)
            for (int i1 = 0; i1 < d; ++i1)
                for (int i2 = 0; i2 < d; ++i2)
                    for (int a = 0; a < d; ++a) {
                        Scalar acc(0);
                        for (int e = 0; e < d; ++e) {
                            switch (slot) {
                                case 0: acc += v_[idx(e, i0, i1, i2)] * M(e, a); break;
                                case 1: acc += v_[idx(i0, e, i1, i2)] * M(e, a); break;
                                case 2: acc += v_[idx(i0, i1, e, i2)] * M(e, a); break;
                                default: acc += v_[idx(i0, i1, i2, e)] * M(e, a); break;
                            }
                        }
                        switch (slot) {
                            case 0: out.v_[idx(a, i0, i1, i2)] = acc; break;
                            case 1: out.v_[idx(i0, a, i1, i2)] = acc; break;
                            case 2: out.v_[idx(i0, i1, a, i2)] = acc; break;
                            default: out.v_[idx(i0, i1, i2, a)] = acc; break;
                        }
                    }
        return out;
    }

    // T'(X,Y,Z,W) = T(MX, MY, MZ, MW): contract every covariant slot with M.
    Tensor4T pullback(const Mat& M) const {
        Tensor4T out = contract_slot(0, M);
        out = out.contract_slot(1, M);
        out = out.contract_slot(2, M);
        out = out.contract_slot(3, M);
        return out;
    }

    Eigen::Map<const Eigen::VectorXd> as_vector() const
        requires std::is_same_v<Scalar, double>
    {
        return Eigen::Map<const Eigen::VectorXd>(v_.data(), static_cast<Eigen::Index>(v_.size()));
    }
    Eigen::Map<Eigen::VectorXd> as_vector()
        requires std::is_same_v<Scalar, double>
    {
        return Eigen::Map<Eigen::VectorXd>(v_.data(), static_cast<Eigen::Index>(v_.size()));
    }

  private:
    std::size_t idx(int a, int b, int c, int e) const {
        return ((static_cast<std::size_t>(a) * d_ + b) * d_ + c) * d_ + e;
    }

    int d_;
    std::vector<Scalar> v_;
};

using Tensor4 = Tensor4T<double>;
using Tensor4c = Tensor4T<std::complex<double>>;

inline Tensor4c complexify(const Tensor4& t) {
    Tensor4c out(t.dim());
    for (int a = 0; a < t.dim(); ++a)
        for (int b = 0; b < t.dim(); ++b)
            for (int c = 0; c < t.dim(); ++c)
                for (int e = 0; e < t.dim(); ++e) out(a, b, c, e) = t(a, b, c, e);
    return out;
}

inline Tensor4 real_part(const Tensor4c& t) {
    Tensor4 out(t.dim());
    for (int a = 0; a < t.dim(); ++a)
        for (int b = 0; b < t.dim(); ++b)
            for (int c = 0; c < t.dim(); ++c)
                for (int e = 0; e < t.dim(); ++e) out(a, b, c, e) = t(a, b, c, e).real();
    return out;
}

} // namespace twistor
