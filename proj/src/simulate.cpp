#include "kapitza/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace kapitza {

std::string to_string(SystemTag tag) {
    switch (tag) {
        case SystemTag::linear:
            return "linear";
        case SystemTag::perturbed_linear:
            return "perturbed_linear";
        case SystemTag::nonlinear:
            return "nonlinear";
        case SystemTag::perturbed_nonlinear:
            return "perturbed_nonlinear";
        case SystemTag::custom:
            return "custom";
    }
    return "unknown";
}

OdeSystem linear_system(const LinearizedSystem& lin, double mu) {
    return {SystemTag::linear, mu, lin.period(),
            [lin, mu](double t, const Vec2& v) { return lin.matrix(t, mu) * v; }};
}

OdeSystem perturbed_linear_system(const LinearizedSystem& lin, const ScaledPerturbation& p,
                                  double mu) {
    return {SystemTag::perturbed_linear, mu, lin.period(), [lin, p, mu](double t, const Vec2& v) {
                return perturbed_matrix(lin, p, t, mu) * v;
            }};
}

OdeSystem nonlinear_system(const MathieuModel& m, double mu) {
    return {SystemTag::nonlinear, mu, m.period(), [m, mu](double t, const Vec2& v) {
                const double k = m.beta * mu * mu + mu * m.phi.eval(t);
                return Vec2{v.x2, -m.alpha * mu * v.x2 - k * m.f.value(v.x1)};
            }};
}

OdeSystem perturbed_nonlinear_system(const MathieuModel& m, const Perturbation& p, double mu) {
    const Nonlinearity g = shift_to_zero(m);
    return {SystemTag::perturbed_nonlinear, mu, m.period(), [m, p, g, mu](double t, const Vec2& v) {
                const double k = (m.beta + p.d_beta) * mu * mu + mu * (m.phi.eval(t) + p.d_phi.eval(t));
                return Vec2{v.x2, -(m.alpha + p.d_alpha) * mu * v.x2 - k * g.value(v.x1)};
            }};
}

OdeSystem custom_system(double period, StateRhs rhs) {
    return {SystemTag::custom, 0.0, period, std::move(rhs)};
}

Trajectory integrate(const OdeSystem& sys, double y0, double y1, double t_end,
                     const IntegrationOptions& opts) {
    if (opts.steps_per_period < 256) {
        throw std::invalid_argument("integrate: steps_per_period must be >= 256");
    }
    if (opts.stride < 1) throw std::invalid_argument("integrate: stride must be >= 1");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("integrate: t_end must be positive and finite");
    }
    if (!(sys.period > 0.0)) throw std::invalid_argument("integrate: system period must be > 0");
    if (!std::isfinite(y0) || !std::isfinite(y1)) {
        throw std::invalid_argument("integrate: non-finite initial data");
    }

    const double h_nominal = sys.period / opts.steps_per_period;
    const auto n = static_cast<long long>(std::ceil(t_end / h_nominal - 1e-9));
    const double h = t_end / static_cast<double>(n);

    Trajectory tr;
    tr.tag = sys.tag;
    tr.mu = sys.mu;
    const auto reserve = static_cast<std::size_t>(n / opts.stride + 2);
    tr.times.reserve(reserve);
    tr.states.reserve(reserve);
    Vec2 v{y0, y1};
    tr.times.push_back(0.0);
    tr.states.push_back(v);

    for (long long i = 0; i < n; ++i) {
        const double t = h * static_cast<double>(i);
        const Vec2 k1 = sys.rhs(t, v);
        const Vec2 k2 = sys.rhs(t + 0.5 * h, v + (0.5 * h) * k1);
        const Vec2 k3 = sys.rhs(t + 0.5 * h, v + (0.5 * h) * k2);
        const Vec2 k4 = sys.rhs(t + h, v + h * k3);
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t_next = h * static_cast<double>(i + 1);
        if (!std::isfinite(v.x1) || !std::isfinite(v.x2) || v.norm() > opts.divergence_limit) {
            tr.diverged = true;
            tr.diverged_at = t_next;
            break;
        }
        if ((i + 1) % opts.stride == 0 || i + 1 == n) {
            tr.times.push_back(t_next);
            tr.states.push_back(v);
        }
    }
    return tr;
}

double lyapunov_value(const PeriodicLyapunovSolution& sol, const Trajectory& traj,
                      std::size_t index) {
    return sol.quadratic_form(traj.times.at(index), traj.states.at(index));
}

EnvelopeReport verify_envelope(const Trajectory& traj,
                               const std::function<double(double)>& envelope) {
    EnvelopeReport r;
    r.samples = traj.size();
    r.slack = 1e-9 * (1.0 + envelope(0.0));
    r.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        const double env = envelope(t);
        const double sq = traj.states[i].norm_sq();
        const double excess = sq - env;
        if (excess > r.max_excess) {
            r.max_excess = excess;
            r.worst_time = t;
        }
        double ratio = 0.0;
        if (env > 0.0) {
            ratio = sq / env;
        } else if (sq > 0.0) {
            ratio = std::numeric_limits<double>::infinity();
        }
        r.max_ratio = std::max(r.max_ratio, ratio);
    }
    if (traj.size() == 0) r.max_excess = 0.0;
    r.passed = !traj.diverged && r.max_excess <= r.slack;
    return r;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const PeriodicLyapunovSolution* sol,
                          const std::function<double(double)>& envelope,
                          const std::vector<std::string>& comments) {
    for (const auto& c : comments) os << "# " << c << '\n';
    if (traj.diverged) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", traj.diverged_at);
        os << "# diverged at t=" << buf << '\n';
    }
    os << "t,y,y_prime,lyapunov_value,envelope,margin\n";
    char line[256];
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        const Vec2& v = traj.states[i];
        const double lv = sol ? lyapunov_value(*sol, traj, i) : std::nan("");
        const double env = envelope ? envelope(t) : std::nan("");
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, v.x1, v.x2,
                      lv, env, env - v.norm_sq());
        os << line;
    }
}

}  // namespace kapitza
