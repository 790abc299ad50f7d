#include "kapitza/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kapitza {

AveragingTransform build_transform(const LinearizedSystem& lin, const QuadratureGrid& grid) {
    if (std::abs(lin.period() - grid.period()) > 1e-12 * grid.period()) {
        throw std::invalid_argument("build_transform: grid period differs from signal period");
    }
    // b = -int phi_hat (mean-zero), a = int b (mean-zero).
    PeriodicSignal b = zero_mean_antiderivative(lin.phi_hat).scaled(-1.0);
    PeriodicSignal a = zero_mean_antiderivative(b);
    AveragingTransform tr{a, b, grid, sample(a, grid), sample(b, grid)};
    return tr;
}

double mean_phi_a(const LinearizedSystem& lin, const AveragingTransform& tr) {
    const double T = tr.grid.period();
    const double integral = integrate(
        [&](double t) { return lin.phi_hat.eval(t) * tr.a_fn.eval(t); }, 0.0, T, tr.grid);
    return integral / T;
}

Mat2 build_u1(const LinearizedSystem& lin, const AveragingTransform& tr) {
    return {0.0, 1.0, -lin.beta_hat - mean_phi_a(lin, tr), -lin.alpha};
}

BogolyubovResult bogolyubov_condition(const LinearizedSystem& lin, const QuadratureGrid& grid) {
    const double T = grid.period();
    const PeriodicSignal primitive = zero_mean_antiderivative(lin.phi_hat);
    const double base = primitive.eval(0.0);
    const double lhs = integrate(
                           [&](double tau) {
                               const double inner = primitive.eval(tau) - base;
                               return inner * inner;
                           },
                           0.0, T, grid) /
                       T;
    const double moment =
        integrate([&](double tau) { return tau * lin.phi_hat.eval(tau); }, 0.0, T, grid) / T;
    BogolyubovResult r;
    r.lhs = lhs;
    r.rhs = moment * moment - lin.beta_hat;
    r.holds = r.lhs > r.rhs;
    return r;
}

TransformedSystem::TransformedSystem(LinearizedSystem lin, AveragingTransform tr)
    : lin_(std::move(lin)), tr_(std::move(tr)) {
    mean_phi_a_ = kapitza::mean_phi_a(lin_, tr_);
    u1_ = {0.0, 1.0, -lin_.beta_hat - mean_phi_a_, -lin_.alpha};
}

Mat2 TransformedSystem::u2(double t, double mu) const {
    const double a = tr_.a_fn.eval(t);
    const double b = tr_.b_fn.eval(t);
    const double ph = lin_.phi_hat.eval(t);
    return {0.0, -mu * a,
            -lin_.alpha * b - mu * lin_.beta_hat * a - ph * a + mean_phi_a_,
            (mu * a - 1.0) * b};
}

Mat2 TransformedSystem::u3(double t, double mu) const {
    const double a = tr_.a_fn.eval(t);
    const double b = tr_.b_fn.eval(t);
    const double denom = 1.0 + mu * a;
    if (!(denom > 0.0)) {
        throw std::domain_error("U3: change of variables degenerates (1 + mu a(t) <= 0)");
    }
    return {0.0, a * a / denom, 0.0, -a * a * b / denom};
}

Mat2 TransformedSystem::generator(double t, double mu) const {
    return mu * (u1_ + u2(t, mu) + (mu * mu) * u3(t, mu));
}

double TransformedSystem::max_admissible_mu() const {
    double most_negative = 0.0;
    for (double a : tr_.a_samples) most_negative = std::min(most_negative, a);
    if (most_negative == 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / most_negative;
}

SampledU2U3 build_u2_u3(const TransformedSystem& sys, double mu) {
    const auto& grid = sys.transform().grid;
    SampledU2U3 out;
    out.mu = mu;
    const auto n = static_cast<std::size_t>(grid.size()) + 1;
    out.times.reserve(n);
    out.u2.reserve(n);
    out.u3.reserve(n);
    for (int i = 0; i <= grid.size(); ++i) {
        const double t = grid.node(i);
        out.times.push_back(t);
        out.u2.push_back(sys.u2(t, mu));
        out.u3.push_back(sys.u3(t, mu));
    }
    return out;
}

}  // namespace kapitza
