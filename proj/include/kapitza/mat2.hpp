#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace kapitza {

/// Column vector (y, y') of a second-order scalar equation.
struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    [[nodiscard]] double norm_sq() const { return x1 * x1 + x2 * x2; }
    [[nodiscard]] double norm() const { return std::hypot(x1, x2); }

    Vec2& operator+=(const Vec2& o) {
        x1 += o.x1;
        x2 += o.x2;
        return *this;
    }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Vec2 operator*(double s, const Vec2& v) { return {s * v.x1, s * v.x2}; }
    friend double dot(const Vec2& a, const Vec2& b) { return a.x1 * b.x1 + a.x2 * b.x2; }
};

/// Dense real 2x2 matrix, row-major: [[a11, a12], [a21, a22]].
struct Mat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a21 = 0.0;
    double a22 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() { return {}; }
    static constexpr Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    [[nodiscard]] double trace() const { return a11 + a22; }
    [[nodiscard]] double det() const { return a11 * a22 - a12 * a21; }
    [[nodiscard]] Mat2 transpose() const { return {a11, a21, a12, a22}; }
    [[nodiscard]] double max_abs() const {
        return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
    }
    [[nodiscard]] double frobenius() const {
        return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
    }

    /// Closed-form inverse; throws when |det| <= 1e-14.
    [[nodiscard]] Mat2 inverse() const {
        const double d = det();
        if (!(std::abs(d) > 1e-14)) {
            throw std::domain_error("Mat2::inverse: matrix is numerically singular");
        }
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    Mat2& operator+=(const Mat2& o) {
        a11 += o.a11;
        a12 += o.a12;
        a21 += o.a21;
        a22 += o.a22;
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        a11 -= o.a11;
        a12 -= o.a12;
        a21 -= o.a21;
        a22 -= o.a22;
        return *this;
    }
    Mat2& operator*=(double s) {
        a11 *= s;
        a12 *= s;
        a21 *= s;
        a22 *= s;
        return *this;
    }

    friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
    friend Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
    friend Mat2 operator-(const Mat2& a) { return {-a.a11, -a.a12, -a.a21, -a.a22}; }
    friend Mat2 operator*(double s, Mat2 a) { return a *= s; }
    friend Mat2 operator*(Mat2 a, double s) { return a *= s; }
    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
                a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
    }
    friend Vec2 operator*(const Mat2& a, const Vec2& v) {
        return {a.a11 * v.x1 + a.a12 * v.x2, a.a21 * v.x1 + a.a22 * v.x2};
    }
};

/// Eigenvalues of a symmetric matrix given by its (11, 12, 22) entries, as (min, max).
/// The smaller one is recovered from det/max to avoid cancellation for ill-conditioned input.
[[nodiscard]] inline std::pair<double, double> symmetric_eigenvalues(double s11, double s12,
                                                                      double s22) {
    const double mean = 0.5 * (s11 + s22);
    const double radius = std::hypot(0.5 * (s11 - s22), s12);
    const double hi = mean + radius;
    const double lo_direct = mean - radius;
    if (mean > 0.0 && hi > 0.0) {
        return {(s11 * s22 - s12 * s12) / hi, hi};
    }
    return {lo_direct, hi};
}

/// Eigenvalues of the symmetric part (M + M^T)/2.
[[nodiscard]] inline std::pair<double, double> symmetric_eigenvalues(const Mat2& m) {
    return symmetric_eigenvalues(m.a11, 0.5 * (m.a12 + m.a21), m.a22);
}

/// Spectral (operator 2-) norm from the eigenvalues of the Gram matrix M^T M.
[[nodiscard]] inline double spectral_norm(const Mat2& m) {
    // sigma_max = (sqrt((a+d)^2 + (b-c)^2) + sqrt((a-d)^2 + (b+c)^2)) / 2
    const double p = std::hypot(m.a11 + m.a22, m.a12 - m.a21);
    const double q = std::hypot(m.a11 - m.a22, m.a12 + m.a21);
    return 0.5 * (p + q);
}

/// Both eigenvalues of a general real 2x2 matrix.
[[nodiscard]] inline std::pair<std::complex<double>, std::complex<double>> eigenvalues(
    const Mat2& m) {
    const double half_tr = 0.5 * m.trace();
    const double half_gap = 0.5 * (m.a11 - m.a22);
    const double disc = half_gap * half_gap + m.a12 * m.a21;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        return {{half_tr + r, 0.0}, {half_tr - r, 0.0}};
    }
    const double r = std::sqrt(-disc);
    return {{half_tr, r}, {half_tr, -r}};
}

[[nodiscard]] inline double spectral_radius(const Mat2& m) {
    const auto [l1, l2] = eigenvalues(m);
    return std::max(std::abs(l1), std::abs(l2));
}

[[nodiscard]] inline bool is_finite(const Mat2& m) {
    return std::isfinite(m.a11) && std::isfinite(m.a12) && std::isfinite(m.a21) &&
           std::isfinite(m.a22);
}

}  // namespace kapitza
