#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "kapitza/floquet_lyapunov.hpp"
#include "kapitza/mat2.hpp"
#include "kapitza/model.hpp"
#include "kapitza/robustness.hpp"

namespace kapitza {

enum class SystemTag { linear, perturbed_linear, nonlinear, perturbed_nonlinear, custom };

[[nodiscard]] std::string to_string(SystemTag tag);

using StateRhs = std::function<Vec2(double t, const Vec2& v)>;

/// First-order form of a second-order scalar equation with state v = (y, y').
struct OdeSystem {
    SystemTag tag = SystemTag::custom;
    double mu = 0.0;
    double period = 0.0;
    StateRhs rhs;
};

/// v' = A(t, mu) v for the linearized equation.
[[nodiscard]] OdeSystem linear_system(const LinearizedSystem& lin, double mu);
[[nodiscard]] OdeSystem perturbed_linear_system(const LinearizedSystem& lin,
                                                const ScaledPerturbation& p, double mu);
/// Full equation in the original variable y (equilibrium at gamma).
[[nodiscard]] OdeSystem nonlinear_system(const MathieuModel& m, double mu);
/// Perturbed full equation in the shifted variable z = y - gamma (equilibrium at 0).
[[nodiscard]] OdeSystem perturbed_nonlinear_system(const MathieuModel& m, const Perturbation& p,
                                                   double mu);
[[nodiscard]] OdeSystem custom_system(double period, StateRhs rhs);

struct IntegrationOptions {
    int steps_per_period = 4096;
    int stride = 1;  // record every stride-th step (the final state is always recorded)
    double divergence_limit = 1e12;
};

struct Trajectory {
    SystemTag tag = SystemTag::custom;
    double mu = 0.0;
    std::vector<double> times;
    std::vector<Vec2> states;
    bool diverged = false;
    double diverged_at = 0.0;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] const Vec2& final_state() const { return states.back(); }
};

/// Classical fixed-step RK4 with step period / steps_per_period (shortened so t_end is hit).
/// Integration stops at the first state with norm above the divergence limit; that state is
/// not stored.
[[nodiscard]] Trajectory integrate(const OdeSystem& sys, double y0, double y1, double t_end,
                                   const IntegrationOptions& opts = {});

/// <H(t) v(t), v(t)> at the sample index, with H extended periodically.
[[nodiscard]] double lyapunov_value(const PeriodicLyapunovSolution& sol, const Trajectory& traj,
                                    std::size_t index);

struct EnvelopeReport {
    bool passed = false;
    double max_excess = 0.0;  // max over samples of |v|^2 - envelope
    double worst_time = 0.0;
    double max_ratio = 0.0;   // max over samples of |v|^2 / envelope (0 / 0 counts as 0)
    double slack = 0.0;
    std::size_t samples = 0;
};

/// Passes iff max(|v(t)|^2 - envelope(t)) <= 1e-9 (1 + envelope(0)).
[[nodiscard]] EnvelopeReport verify_envelope(const Trajectory& traj,
                                             const std::function<double(double)>& envelope);

/// CSV columns t,y,y_prime,lyapunov_value,envelope,margin (margin = envelope - |v|^2);
/// comment lines are prefixed with '#'.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const PeriodicLyapunovSolution* sol,
                          const std::function<double(double)>& envelope,
                          const std::vector<std::string>& comments = {});

}  // namespace kapitza
