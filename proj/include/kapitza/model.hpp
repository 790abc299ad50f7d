#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "kapitza/mat2.hpp"
#include "kapitza/periodic_signal.hpp"

namespace kapitza {

/// Raised for models that violate the structural assumptions (damping, sign of f'(gamma), ...).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Restoring nonlinearity f(y). Closed set so that remainder bounds have a known provenance:
///   sine:       f(y) = scale * sin(y + phase)    (pendulum: scale 1, phase 0)
///   polynomial: f(y) = c_1 y + c_2 y^2 + ... + c_d y^d
class Nonlinearity {
public:
    enum class Kind { sine, polynomial };

    static Nonlinearity pendulum_sine() { return sine(1.0, 0.0); }
    static Nonlinearity sine(double scale, double phase);
    static Nonlinearity polynomial(std::vector<double> coeffs);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double scale() const { return scale_; }
    [[nodiscard]] double phase() const { return phase_; }
    /// c_1..c_d for the polynomial kind (index 0 holds c_1).
    [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }

    [[nodiscard]] double value(double y) const;
    [[nodiscard]] double derivative(double y) const;

    /// g(z) = f(gamma + z) with the constant term f(gamma) dropped.
    [[nodiscard]] Nonlinearity shifted(double gamma) const;

private:
    Kind kind_ = Kind::sine;
    double scale_ = 1.0;
    double phase_ = 0.0;
    std::vector<double> coeffs_;
};

/// y'' + alpha mu y' + (beta mu^2 + mu phi(t)) f(y) = 0 around the stationary point gamma.
struct MathieuModel {
    double alpha = 0.0;
    double beta = 0.0;
    PeriodicSignal phi;
    Nonlinearity f = Nonlinearity::pendulum_sine();
    double gamma = 0.0;

    /// Throws ModelError unless alpha > 0, beta > 0, |f(gamma)| < 1e-12 and f'(gamma) < 0.
    void validate() const;
    [[nodiscard]] double period() const { return phi.period(); }
};

/// Physical pendulum with a vertically vibrating suspension point.
struct PendulumParams {
    double length = 1.0;     // l [m]
    double gravity = 9.81;   // g [m/s^2]
    double friction = 0.0;   // lambda [1/s]
    double amplitude = 0.1;  // a [m]
    double frequency = 1.0;  // omega [rad/s]

    void validate() const;
};

struct PendulumReduction {
    MathieuModel model;
    double mu = 0.0;
};

/// Fast-time reduction: mu = a/l, beta = g l/(a omega)^2, alpha = lambda l/(a omega),
/// phi(t) = -sin t, f = sin, gamma = pi. Rejects a >= l.
[[nodiscard]] PendulumReduction pendulum_reduce(const PendulumParams& p);

/// y'' + alpha mu y' + (beta_hat mu^2 + mu phi_hat(t)) y = 0.
struct LinearizedSystem {
    double alpha = 0.0;
    double beta_hat = 0.0;
    PeriodicSignal phi_hat;

    [[nodiscard]] double period() const { return phi_hat.period(); }
    /// First-order form v' = A(t, mu) v with v = (y, y').
    [[nodiscard]] Mat2 matrix(double t, double mu) const {
        return {0.0, 1.0, -(beta_hat * mu * mu + mu * phi_hat.eval(t)), -alpha * mu};
    }
};

[[nodiscard]] LinearizedSystem linearize(const MathieuModel& m);

/// Moves the stationary point to the origin: g(z) = f(gamma + z).
[[nodiscard]] Nonlinearity shift_to_zero(const MathieuModel& m);

/// Smallest p (by the stated closed forms) with |g(x) - g'(0) x| <= p x^2, either globally
/// (rho empty) or on |x| <= rho. Throws ModelError when no global constant exists.
[[nodiscard]] double quadratic_remainder_bound(const Nonlinearity& g,
                                               std::optional<double> rho = std::nullopt);

// JSON for model files.
void to_json(nlohmann::json& j, const Nonlinearity& f);
void from_json(const nlohmann::json& j, Nonlinearity& f);
void to_json(nlohmann::json& j, const MathieuModel& m);
void from_json(const nlohmann::json& j, MathieuModel& m);
void to_json(nlohmann::json& j, const PendulumParams& p);
void from_json(const nlohmann::json& j, PendulumParams& p);

/// A model file is either a Mathieu model or {"pendulum": {...physical parameters...}}.
struct ModelInput {
    MathieuModel model;
    std::optional<PendulumParams> pendulum;
    std::optional<double> mu;  // present for pendulum inputs (mu = a / l)
};

[[nodiscard]] ModelInput model_input_from_json(const nlohmann::json& j);

}  // namespace kapitza
