#include "kapitza/floquet_lyapunov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "kapitza/periodic_signal.hpp"

namespace kapitza {

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

Vec3 solve3(Mat3 a, Vec3 b) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (!(std::abs(a[pivot][col]) > 0.0)) {
            throw std::domain_error("Lyapunov solve: singular linear system");
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    Vec3 x{};
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

// Solves op(X) = rhs for symmetric X, where op maps symmetric matrices to symmetric matrices.
template <class Op>
Mat2 solve_symmetric(Op&& op, const Mat2& rhs) {
    const std::array<Mat2, 3> basis = {Mat2{1, 0, 0, 0}, Mat2{0, 1, 1, 0}, Mat2{0, 0, 0, 1}};
    Mat3 a{};
    for (int j = 0; j < 3; ++j) {
        const Mat2 img = op(basis[static_cast<std::size_t>(j)]);
        a[0][j] = img.a11;
        a[1][j] = 0.5 * (img.a12 + img.a21);
        a[2][j] = img.a22;
    }
    const Vec3 x = solve3(a, {rhs.a11, 0.5 * (rhs.a12 + rhs.a21), rhs.a22});
    return {x[0], x[1], x[1], x[2]};
}

Mat2 symmetrized(const Mat2& m) {
    const double off = 0.5 * (m.a12 + m.a21);
    return {m.a11, off, off, m.a22};
}

// D^{-1} M D with D = diag(1, s).
Mat2 to_balanced(const Mat2& m, double s) { return {m.a11, m.a12 * s, m.a21 / s, m.a22}; }

// D^{-1} S D^{-1}: symmetric form in balanced coordinates back to original coordinates.
Mat2 form_to_original(const Mat2& w, double s) {
    return {w.a11, w.a12 / s, w.a21 / s, w.a22 / (s * s)};
}

double balancing_scale(const Mat2& e) {
    if (e.a12 == 0.0 || e.a21 == 0.0) return 1.0;
    const double s = std::sqrt(std::abs(e.a21 / e.a12));
    if (!std::isfinite(s)) return 1.0;
    return std::clamp(s, 1e-12, 1e12);
}

}  // namespace

Matrizant::Matrizant(double period, std::vector<Mat2> deviation)
    : period_(period), deviation_(std::move(deviation)) {
    if (deviation_.size() < 2) throw std::invalid_argument("Matrizant: need at least one step");
}

Matrizant matrizant(const MatrixFunction& A, double period, int n_steps) {
    if (n_steps < 64 || n_steps % 2 != 0) {
        throw std::invalid_argument("matrizant: n_steps must be even and >= 64");
    }
    if (!(period > 0.0)) throw std::invalid_argument("matrizant: period must be positive");
    const double h = period / n_steps;
    std::vector<Mat2> z(static_cast<std::size_t>(n_steps) + 1, Mat2::zero());
    // Z' = A (I + Z) = A + A Z
    auto rhs = [&](double t, const Mat2& dev) {
        const Mat2 a = A(t);
        return a + a * dev;
    };
    Mat2 cur = Mat2::zero();
    for (int i = 0; i < n_steps; ++i) {
        const double t = period * static_cast<double>(i) / n_steps;
        const Mat2 k1 = rhs(t, cur);
        const Mat2 k2 = rhs(t + 0.5 * h, cur + (0.5 * h) * k1);
        const Mat2 k3 = rhs(t + 0.5 * h, cur + (0.5 * h) * k2);
        const Mat2 k4 = rhs(t + h, cur + h * k3);
        cur += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        z[static_cast<std::size_t>(i) + 1] = cur;
    }
    return Matrizant(period, std::move(z));
}

double spectral_radius_excess(const Mat2& e) {
    // Eigenvalues of I + E are 1 + p +- sqrt(disc), p = tr(E)/2.
    const double p = 0.5 * e.trace();
    const double half_gap = 0.5 * (e.a11 - e.a22);
    const double disc = half_gap * half_gap + e.a12 * e.a21;
    if (disc < 0.0) {
        // |1 + p + i q|^2 - 1 = 2p + p^2 + q^2 with q^2 = -disc
        const double x = 2.0 * p + p * p - disc;
        return std::expm1(0.5 * std::log1p(x));
    }
    const double r = std::sqrt(disc);
    const double l1 = p + r;
    const double l2 = p - r;
    return std::max(std::abs(1.0 + l1), std::abs(1.0 + l2)) - 1.0;
}

double spectral_radius_monodromy(const Matrizant& m) {
    return 1.0 + spectral_radius_excess(m.monodromy_deviation());
}

Mat2 solve_constant_lyapunov(const Mat2& u) {
    if (!(u.trace() < 0.0 && u.det() > 0.0)) {
        throw std::invalid_argument("solve_constant_lyapunov: matrix is not Hurwitz");
    }
    const Mat2 ut = u.transpose();
    return symmetrized(solve_symmetric([&](const Mat2& x) { return x * u + ut * x; },
                                       -1.0 * Mat2::identity()));
}

Mat2 solve_discrete_lyapunov(const Mat2& m, const Mat2& q) {
    const Mat2 mt = m.transpose();
    return symmetrized(solve_symmetric([&](const Mat2& x) { return x - mt * x * m; }, q));
}

Mat2 solve_discrete_lyapunov_deviation(const Mat2& e, const Mat2& q) {
    const Mat2 et = e.transpose();
    return symmetrized(solve_symmetric(
        [&](const Mat2& x) { return et * x + x * e + et * x * e; }, -1.0 * q));
}

StepProfile::StepProfile(double period, std::vector<double> values)
    : period_(period), values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("StepProfile: no values");
    step_ = period_ / static_cast<double>(values_.size());
    cumulative_.resize(values_.size() + 1, 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        cumulative_[i + 1] = cumulative_[i] + values_[i] * step_;
    }
}

std::size_t StepProfile::index(double t, double& remainder, double& periods) const {
    periods = std::floor(t / period_);
    remainder = t - periods * period_;
    if (remainder < 0.0) remainder = 0.0;
    auto i = static_cast<std::size_t>(remainder / step_);
    return std::min(i, values_.size() - 1);
}

double StepProfile::value(double t) const {
    double r = 0.0;
    double k = 0.0;
    return values_[index(t, r, k)];
}

double StepProfile::integral(double t) const {
    double r = 0.0;
    double k = 0.0;
    const std::size_t i = index(t, r, k);
    return k * cumulative_.back() + cumulative_[i] + (r - static_cast<double>(i) * step_) * values_[i];
}

PeriodicLyapunovSolution::PeriodicLyapunovSolution(double period, double scale,
                                                   std::vector<Mat2> balanced,
                                                   double periodicity_gap_abs,
                                                   double periodicity_gap_rel)
    : period_(period),
      scale_(scale),
      balanced_(std::move(balanced)),
      gap_abs_(periodicity_gap_abs),
      gap_rel_(periodicity_gap_rel) {
    if (balanced_.size() < 3) throw std::invalid_argument("PeriodicLyapunovSolution: too few nodes");
    norms_.reserve(balanced_.size());
    min_eigs_.reserve(balanced_.size());
    h_min_ = std::numeric_limits<double>::infinity();
    h_max_ = 0.0;
    for (const Mat2& w : balanced_) {
        const Mat2 h = form_to_original(w, scale_);
        const auto [lo, hi] = symmetric_eigenvalues(h.a11, h.a12, h.a22);
        norms_.push_back(std::max(std::abs(lo), std::abs(hi)));
        min_eigs_.push_back(lo);
        h_min_ = std::min(h_min_, lo);
        h_max_ = std::max(h_max_, norms_.back());
    }
}

Mat2 PeriodicLyapunovSolution::at_node(int i) const {
    return form_to_original(balanced_[static_cast<std::size_t>(i)], scale_);
}

std::size_t PeriodicLyapunovSolution::step_index(double t) const {
    double r = std::fmod(t, period_);
    if (r < 0.0) r += period_;
    auto i = static_cast<std::size_t>(r / step());
    return std::min(i, static_cast<std::size_t>(steps() - 1));
}

Mat2 PeriodicLyapunovSolution::at(double t) const {
    double r = std::fmod(t, period_);
    if (r < 0.0) r += period_;
    const std::size_t i = step_index(t);
    const double frac = std::clamp(r / step() - static_cast<double>(i), 0.0, 1.0);
    const Mat2 w = (1.0 - frac) * balanced_[i] + frac * balanced_[i + 1];
    return form_to_original(w, scale_);
}

double PeriodicLyapunovSolution::norm_upper(double t) const {
    const std::size_t i = step_index(t);
    return std::max(norms_[i], norms_[i + 1]);
}

double PeriodicLyapunovSolution::min_eig_lower(double t) const {
    const std::size_t i = step_index(t);
    return std::min(min_eigs_[i], min_eigs_[i + 1]);
}

double PeriodicLyapunovSolution::quadratic_form_at_node(int i, const Vec2& v) const {
    const Vec2 w{v.x1, v.x2 / scale_};
    return dot(balanced_[static_cast<std::size_t>(i)] * w, w);
}

double PeriodicLyapunovSolution::quadratic_form(double t, const Vec2& v) const {
    double r = std::fmod(t, period_);
    if (r < 0.0) r += period_;
    const std::size_t i = step_index(t);
    const double frac = std::clamp(r / step() - static_cast<double>(i), 0.0, 1.0);
    const Mat2 hw = (1.0 - frac) * balanced_[i] + frac * balanced_[i + 1];
    const Vec2 w{v.x1, v.x2 / scale_};
    return dot(hw * w, w);
}

std::vector<double> PeriodicLyapunovSolution::step_norm_upper() const {
    std::vector<double> out(static_cast<std::size_t>(steps()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(norms_[i], norms_[i + 1]);
    return out;
}

PeriodicLyapunovSolution solve_periodic_lyapunov(const Matrizant& y) {
    const Mat2& e = y.monodromy_deviation();
    const double excess = spectral_radius_excess(e);
    if (!(excess < -1e-9)) {
        throw NotAsymptoticallyStable(
            "periodic Lyapunov problem: monodromy spectral radius " +
                std::to_string(1.0 + excess) + " is not below 1 - 1e-9",
            1.0 + excess);
    }
    const double s = balancing_scale(e);
    const int n = y.steps();
    const auto count = static_cast<std::size_t>(n) + 1;

    // Balanced matrizant Y_w = D^{-1} Y D and integrand Y_w^T diag(1, s^2) Y_w.
    std::vector<Mat2> yw(count);
    std::vector<Mat2> integrand(count);
    for (int i = 0; i <= n; ++i) {
        const Mat2 m = to_balanced(y.at(i), s);
        yw[static_cast<std::size_t>(i)] = m;
        const Mat2 cm{m.a11, m.a12, s * s * m.a21, s * s * m.a22};
        integrand[static_cast<std::size_t>(i)] = symmetrized(m.transpose() * cm);
    }
    const std::vector<Mat2> q_cum = cumulative_integral<Mat2>(integrand, y.step());
    const Mat2 x0 = solve_discrete_lyapunov_deviation(to_balanced(e, s), q_cum.back());

    std::vector<Mat2> hw(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Mat2 inv = yw[i].inverse();
        hw[i] = symmetrized(inv.transpose() * (x0 - q_cum[i]) * inv);
    }
    hw[0] = x0;
    const Mat2 gap = form_to_original(hw.back() - hw.front(), s);
    const Mat2 h0 = form_to_original(x0, s);
    const double gap_abs = spectral_norm(gap);
    const double gap_rel = gap_abs / spectral_norm(h0);
    PeriodicLyapunovSolution sol(y.period(), s, std::move(hw), gap_abs, gap_rel);
    if (!(sol.h_min() > 0.0)) {
        throw std::runtime_error("periodic Lyapunov problem: solution is not positive definite");
    }
    return sol;
}

PeriodicLyapunovSolution solve_periodic_lyapunov(const MatrixFunction& A, double period,
                                                 int n_steps) {
    return solve_periodic_lyapunov(matrizant(A, period, n_steps));
}

LyapunovResidual bvp_residual(const PeriodicLyapunovSolution& sol, const MatrixFunction& A) {
    const int n = sol.steps();
    const double s = sol.scale();
    const double h = sol.step();
    auto node = [&](int i) -> const Mat2& { return sol.balanced_at_node(((i % n) + n) % n); };
    const Mat2 cw = Mat2::diag(1.0, s * s);
    double worst = 0.0;
    double norm_scale = 0.0;
    for (int i = 0; i < n; ++i) {
        const Mat2 dh = (1.0 / (12.0 * h)) *
                        (node(i - 2) - 8.0 * node(i - 1) + 8.0 * node(i + 1) - node(i + 2));
        const Mat2 a = A(sol.time(i));
        const Mat2 aw = to_balanced(a, s);
        const Mat2& hw = node(i);
        const Mat2 rw = dh + hw * aw + aw.transpose() * hw + cw;
        worst = std::max(worst, spectral_norm(form_to_original(rw, s)));
        const double term = spectral_norm(form_to_original(dh, s)) +
                            2.0 * sol.norm_at_node(i) * spectral_norm(a) + 1.0;
        norm_scale = std::max(norm_scale, term);
    }
    return {worst, worst / norm_scale};
}

KreinEnvelope::KreinEnvelope(const PeriodicLyapunovSolution& sol)
    : sol_(&sol), inverse_norm_([&sol] {
          std::vector<double> v = sol.step_norm_upper();
          for (double& x : v) x = 1.0 / x;
          return StepProfile(sol.period(), std::move(v));
      }()) {}

double KreinEnvelope::operator()(double y0_norm_sq, double t) const {
    if (y0_norm_sq == 0.0) return 0.0;
    const double prefactor = sol_->norm_at_node(0) / sol_->min_eig_lower(t);
    return prefactor * y0_norm_sq * std::exp(-inverse_norm_.integral(t));
}

double krein_envelope(const PeriodicLyapunovSolution& sol, double y0_norm_sq, double t) {
    return KreinEnvelope(sol)(y0_norm_sq, t);
}

}  // namespace kapitza
