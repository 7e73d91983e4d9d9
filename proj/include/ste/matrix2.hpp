// matrix2.hpp: closed-form helpers for 2x2 complex matrices

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

namespace ste {

using cd = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr cd I_unit{0.0, 1.0};

// exp(M) for an arbitrary 2x2 complex matrix.
// Writing M = s*1 + N with tr N = 0 gives N^2 = q*1, q = -det N, so
// exp(M) = e^s (cosh(r) 1 + sinh(r)/r N) with r = sqrt(q).
inline Mat2 expm2(const Mat2& m) {
    const cd s = 0.5 * m.trace();
    const Mat2 n = m - s * Mat2::Identity();
    const cd q = -n.determinant();
    const cd r = std::sqrt(q);
    cd c;
    cd sinc;
    if (std::abs(r) < 1e-4) {
        // cosh(r) = sum q^k/(2k)!, sinh(r)/r = sum q^k/(2k+1)!
        c = 1.0 + q / 2.0 + q * q / 24.0 + q * q * q / 720.0;
        sinc = 1.0 + q / 6.0 + q * q / 120.0 + q * q * q / 5040.0;
    } else {
        c = std::cosh(r);
        sinc = std::sinh(r) / r;
    }
    return std::exp(s) * (c * Mat2::Identity() + sinc * n);
}

inline Mat2 hermitian_part(const Mat2& m) { return 0.5 * (m + m.adjoint()); }

inline double hermiticity_defect(const Mat2& m) { return (m - m.adjoint()).norm(); }

// Eigen-decomposition of a Hermitian 2x2 matrix; eigenvalues ascending.
struct Eigh2 {
    Eigen::Vector2d values;
    Mat2 vectors;
};

inline Eigh2 eigh2(const Mat2& m) {
    Eigen::SelfAdjointEigenSolver<Mat2> solver(hermitian_part(m));
    return {solver.eigenvalues(), solver.eigenvectors()};
}

template <class F>
Mat2 apply_spectral(const Mat2& m, F&& f) {
    const Eigh2 e = eigh2(m);
    Eigen::Vector2cd d;
    d << f(e.values(0)), f(e.values(1));
    return e.vectors * d.asDiagonal() * e.vectors.adjoint();
}

// Principal square root of a positive semidefinite matrix; tiny negative
// eigenvalues from round-off are clipped to zero.
inline Mat2 sqrtm_psd(const Mat2& m) {
    return apply_spectral(m, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

// Matrix log with eigenvalues clipped at `floor`.
inline Mat2 logm_pd(const Mat2& m, double floor = 1e-14) {
    return apply_spectral(m, [floor](double x) { return std::log(std::max(x, floor)); });
}

inline double spectral_norm(const Mat2& m) {
    Eigen::JacobiSVD<Mat2> svd(m);
    return svd.singularValues()(0);
}

// Column-major vectorization: vec(A X B) = (B^T kron A) vec(X).
inline Vec4 vec(const Mat2& m) {
    Vec4 v;
    v << m(0, 0), m(1, 0), m(0, 1), m(1, 1);
    return v;
}

inline Mat2 unvec(const Vec4& v) {
    Mat2 m;
    m << v(0), v(2), v(1), v(3);
    return m;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
}

}  // namespace ste
