#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace kapitza {

struct Harmonic {
    int k = 1;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

/// T-periodic, zero-mean trigonometric series
///   s(t) = sum_k cos_k cos(2 pi k t / T) + sin_k sin(2 pi k t / T),  k >= 1.
/// There is no constant term, so the mean over one period is zero by construction.
class PeriodicSignal {
public:
    PeriodicSignal() = default;  // s == 0 with period 2 pi
    PeriodicSignal(double period, std::vector<Harmonic> harmonics);

    static PeriodicSignal sine(double amplitude = 1.0, double period = 2.0 * std::numbers::pi);

    [[nodiscard]] double period() const { return period_; }
    [[nodiscard]] const std::vector<Harmonic>& harmonics() const { return harmonics_; }
    [[nodiscard]] bool is_zero() const;

    [[nodiscard]] double operator()(double t) const { return eval(t); }
    [[nodiscard]] double eval(double t) const;
    [[nodiscard]] double derivative(double t) const;

    [[nodiscard]] PeriodicSignal scaled(double factor) const;

private:
    double period_ = 2.0 * std::numbers::pi;
    std::vector<Harmonic> harmonics_;
};

/// Bounded periodic function with an optional constant offset (not zero-mean in general).
/// Used for coefficient perturbations.
struct OffsetSignal {
    double offset = 0.0;
    PeriodicSignal oscillation;

    [[nodiscard]] double eval(double t) const { return offset + oscillation.eval(t); }
    [[nodiscard]] double period() const { return oscillation.period(); }
    [[nodiscard]] OffsetSignal scaled(double factor) const {
        return {offset * factor, oscillation.scaled(factor)};
    }
};

/// Uniform partition of [0, T] into an even number N >= 16 of intervals.
class QuadratureGrid {
public:
    explicit QuadratureGrid(double period, int n_intervals = 2048);

    [[nodiscard]] double period() const { return period_; }
    [[nodiscard]] int size() const { return n_; }
    [[nodiscard]] double step() const { return period_ / n_; }
    [[nodiscard]] double node(int i) const { return period_ * static_cast<double>(i) / n_; }
    [[nodiscard]] QuadratureGrid refined() const { return QuadratureGrid(period_, 2 * n_); }

private:
    double period_;
    int n_;
};

/// Composite Simpson rule over equally spaced samples (odd count >= 3).
template <class V>
[[nodiscard]] V simpson(std::span<const V> samples, double h) {
    const std::size_t n = samples.size();
    if (n < 3 || n % 2 == 0) {
        throw std::invalid_argument("simpson: need an odd number (>= 3) of samples");
    }
    V total = samples[0] + samples[n - 1];
    for (std::size_t i = 1; i < n - 1; ++i) total += (i % 2 == 1 ? 4.0 : 2.0) * samples[i];
    return (h / 3.0) * total;
}

/// Running integrals I_i = int_{x_0}^{x_i} over equally spaced samples (even interval count).
/// Even nodes accumulate Simpson panels; odd nodes add the three-point rule
/// int_{x_0}^{x_1} ~ h (5 f_0 + 8 f_1 - f_2) / 12 on the current panel.
template <class V>
[[nodiscard]] std::vector<V> cumulative_integral(std::span<const V> samples, double h) {
    const std::size_t n = samples.size();
    if (n < 3 || n % 2 == 0) {
        throw std::invalid_argument("cumulative_integral: need an odd number (>= 3) of samples");
    }
    std::vector<V> out(n, samples[0] - samples[0]);
    for (std::size_t i = 0; i + 2 < n; i += 2) {
        const V& f0 = samples[i];
        const V& f1 = samples[i + 1];
        const V& f2 = samples[i + 2];
        V half = 5.0 * f0;
        half += 8.0 * f1;
        half += -1.0 * f2;
        out[i + 1] = out[i] + (h / 12.0) * half;
        V panel = f0 + f2;
        panel += 4.0 * f1;
        out[i + 2] = out[i] + (h / 3.0) * panel;
    }
    return out;
}

/// Simpson quadrature of f over [a, b] with spacing no coarser than grid.step().
template <class F>
[[nodiscard]] auto integrate(F&& f, double a, double b, const QuadratureGrid& grid)
    -> decltype(f(a)) {
    using V = decltype(f(a));
    if (b < a) throw std::invalid_argument("integrate: require a <= b");
    if (b == a) return f(a) - f(a);
    const double periods = (b - a) / grid.period();
    long long n = static_cast<long long>(std::ceil(periods * grid.size() - 1e-9));
    n = std::max<long long>(n, 2);
    if (n % 2 != 0) ++n;
    const double h = (b - a) / static_cast<double>(n);
    std::vector<V> values;
    values.reserve(static_cast<std::size_t>(n + 1));
    for (long long i = 0; i <= n; ++i) values.push_back(f(a + h * static_cast<double>(i)));
    return simpson<V>(values, h);
}

[[nodiscard]] double integrate(const PeriodicSignal& s, double a, double b,
                               const QuadratureGrid& grid);

/// Mean-zero antiderivative: B' = s, B periodic, (1/T) int_0^T B = 0. Exact for the series.
[[nodiscard]] PeriodicSignal zero_mean_antiderivative(const PeriodicSignal& s);

/// max |s| over grid nodes and interval midpoints, with the sampled peaks refined locally.
[[nodiscard]] double sup_norm(const PeriodicSignal& s, const QuadratureGrid& grid);
[[nodiscard]] double sup_norm(const OffsetSignal& s, const QuadratureGrid& grid);

/// Samples at grid nodes 0..N inclusive.
[[nodiscard]] std::vector<double> sample(const PeriodicSignal& s, const QuadratureGrid& grid);

// JSON: {"period": T, "harmonics": [{"k":1,"cos":0.0,"sin":1.0}, ...]}
void to_json(nlohmann::json& j, const PeriodicSignal& s);
void from_json(const nlohmann::json& j, PeriodicSignal& s);
// Same layout plus an optional "offset" member.
void to_json(nlohmann::json& j, const OffsetSignal& s);
void from_json(const nlohmann::json& j, OffsetSignal& s);

}  // namespace kapitza
