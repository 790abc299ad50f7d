#include "kapitza/model.hpp"

#include <cmath>
#include <numbers>

namespace kapitza {

Nonlinearity Nonlinearity::sine(double scale, double phase) {
    if (!std::isfinite(scale) || !std::isfinite(phase)) {
        throw ModelError("sine nonlinearity: non-finite parameter");
    }
    Nonlinearity f;
    f.kind_ = Kind::sine;
    f.scale_ = scale;
    f.phase_ = phase;
    return f;
}

Nonlinearity Nonlinearity::polynomial(std::vector<double> coeffs) {
    for (double c : coeffs) {
        if (!std::isfinite(c)) throw ModelError("polynomial nonlinearity: non-finite coefficient");
    }
    while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
    Nonlinearity f;
    f.kind_ = Kind::polynomial;
    f.coeffs_ = std::move(coeffs);
    return f;
}

double Nonlinearity::value(double y) const {
    if (kind_ == Kind::sine) return scale_ * std::sin(y + phase_);
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = (acc + *it) * y;
    return acc;
}

double Nonlinearity::derivative(double y) const {
    if (kind_ == Kind::sine) return scale_ * std::cos(y + phase_);
    double acc = 0.0;
    const auto d = static_cast<int>(coeffs_.size());
    for (int j = d; j >= 1; --j) acc = acc * y + j * coeffs_[static_cast<std::size_t>(j - 1)];
    return acc;
}

Nonlinearity Nonlinearity::shifted(double gamma) const {
    if (kind_ == Kind::sine) return sine(scale_, phase_ + gamma);
    // g(z) = sum_j c_j (gamma + z)^j; coefficient of z^m is sum_{j>=m} c_j C(j,m) gamma^(j-m).
    const auto d = coeffs_.size();
    std::vector<double> out(d, 0.0);
    for (std::size_t m = 1; m <= d; ++m) {
        double sum = 0.0;
        double binom = 1.0;  // C(j, m) starting at j = m
        for (std::size_t j = m; j <= d; ++j) {
            sum += coeffs_[j - 1] * binom * std::pow(gamma, static_cast<double>(j - m));
            binom = binom * static_cast<double>(j + 1) / static_cast<double>(j + 1 - m);
        }
        out[m - 1] = sum;
    }
    return polynomial(std::move(out));
}

void MathieuModel::validate() const {
    if (!(alpha > 0.0)) throw ModelError("model: alpha must be > 0 (damping is required)");
    if (!(beta > 0.0)) throw ModelError("model: beta must be > 0");
    if (!(std::abs(f.value(gamma)) < 1e-12)) {
        throw ModelError("model: gamma is not a zero of f (|f(gamma)| >= 1e-12)");
    }
    if (!(f.derivative(gamma) < 0.0)) throw ModelError("model: f'(gamma) must be negative");
}

void PendulumParams::validate() const {
    if (!(length > 0.0)) throw ModelError("pendulum: length must be > 0");
    if (!(gravity > 0.0)) throw ModelError("pendulum: gravity must be > 0");
    if (!(friction >= 0.0)) throw ModelError("pendulum: friction must be >= 0");
    if (!(amplitude > 0.0)) throw ModelError("pendulum: amplitude must be > 0");
    if (!(frequency > 0.0)) throw ModelError("pendulum: frequency must be > 0");
}

PendulumReduction pendulum_reduce(const PendulumParams& p) {
    p.validate();
    if (p.amplitude >= p.length) {
        throw std::domain_error("pendulum: amplitude must be smaller than length (mu = a/l < 1)");
    }
    const double a_omega = p.amplitude * p.frequency;
    PendulumReduction r;
    r.mu = p.amplitude / p.length;
    r.model.beta = p.gravity * p.length / (a_omega * a_omega);
    r.model.alpha = p.friction * p.length / a_omega;
    r.model.phi = PeriodicSignal(2.0 * std::numbers::pi, {Harmonic{1, 0.0, -1.0}});
    r.model.f = Nonlinearity::pendulum_sine();
    r.model.gamma = std::numbers::pi;
    return r;
}

LinearizedSystem linearize(const MathieuModel& m) {
    m.validate();
    const double slope = m.f.derivative(m.gamma);
    return {m.alpha, m.beta * slope, m.phi.scaled(slope)};
}

Nonlinearity shift_to_zero(const MathieuModel& m) {
    if (m.gamma == 0.0) return m.f;
    if (m.f.kind() == Nonlinearity::Kind::sine) {
        // sin(z + k pi) = (-1)^k sin z; folding the phase keeps g(0) exactly zero.
        const double phase = m.f.phase() + m.gamma;
        const double k = std::round(phase / std::numbers::pi);
        if (std::abs(std::sin(phase)) < 1e-12) {
            const double sign = std::fmod(std::abs(k), 2.0) == 0.0 ? 1.0 : -1.0;
            return Nonlinearity::sine(sign * m.f.scale(), 0.0);
        }
    }
    return m.f.shifted(m.gamma);
}

double quadratic_remainder_bound(const Nonlinearity& g, std::optional<double> rho) {
    if (rho && !(*rho >= 0.0)) throw ModelError("remainder bound: rho must be >= 0");
    if (!(g.derivative(0.0) < 0.0)) throw ModelError("remainder bound: need g'(0) < 0");
    if (!(std::abs(g.value(0.0)) < 1e-12)) throw ModelError("remainder bound: need g(0) = 0");

    if (g.kind() == Nonlinearity::Kind::sine) {
        if (!rho) {
            throw ModelError(
                "remainder bound: sine nonlinearity has no global quadratic bound; supply rho");
        }
        // s sin(x + th) - s cos(th) x = s cos(th) (sin x - x) + s sin(th) (cos x - 1);
        // |sin x - x| <= |x|^3 / 6 and |cos x - 1| <= x^2 / 2.
        const double c = std::abs(g.scale() * std::cos(g.phase()));
        const double s = std::abs(g.scale() * std::sin(g.phase()));
        return c * (*rho) / 6.0 + 0.5 * s;
    }

    const auto& c = g.coeffs();
    if (!rho) {
        if (c.size() > 2) {
            throw ModelError(
                "remainder bound: polynomial of degree > 2 has no global quadratic bound; supply rho");
        }
        return c.size() == 2 ? std::abs(c[1]) : 0.0;
    }
    double p = 0.0;
    for (std::size_t j = 2; j <= c.size(); ++j) {
        p += std::abs(c[j - 1]) * std::pow(*rho, static_cast<double>(j - 2));
    }
    return p;
}

void to_json(nlohmann::json& j, const Nonlinearity& f) {
    if (f.kind() == Nonlinearity::Kind::sine) {
        if (f.scale() == 1.0 && f.phase() == 0.0) {
            j = {{"kind", "pendulum_sine"}};
        } else {
            j = {{"kind", "sine"}, {"scale", f.scale()}, {"phase", f.phase()}};
        }
    } else {
        j = {{"kind", "polynomial"}, {"coeffs", f.coeffs()}};
    }
}

void from_json(const nlohmann::json& j, Nonlinearity& f) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "pendulum_sine") {
        f = Nonlinearity::pendulum_sine();
    } else if (kind == "sine") {
        f = Nonlinearity::sine(j.value("scale", 1.0), j.value("phase", 0.0));
    } else if (kind == "polynomial") {
        f = Nonlinearity::polynomial(j.at("coeffs").get<std::vector<double>>());
    } else {
        throw ModelError("unknown nonlinearity kind '" + kind + "'");
    }
}

void to_json(nlohmann::json& j, const MathieuModel& m) {
    j = {{"alpha", m.alpha}, {"beta", m.beta}, {"phi", m.phi}, {"f", m.f}, {"gamma", m.gamma}};
}

void from_json(const nlohmann::json& j, MathieuModel& m) {
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.phi = j.at("phi").get<PeriodicSignal>();
    m.f = j.at("f").get<Nonlinearity>();
    if (j.contains("gamma")) {
        m.gamma = j.at("gamma").get<double>();
    } else {
        m.gamma = m.f.kind() == Nonlinearity::Kind::sine && m.f.phase() == 0.0 ? std::numbers::pi
                                                                                : 0.0;
    }
}

void to_json(nlohmann::json& j, const PendulumParams& p) {
    j = {{"length", p.length},
         {"gravity", p.gravity},
         {"friction", p.friction},
         {"amplitude", p.amplitude},
         {"frequency", p.frequency}};
}

void from_json(const nlohmann::json& j, PendulumParams& p) {
    p.length = j.at("length").get<double>();
    p.gravity = j.at("gravity").get<double>();
    p.friction = j.at("friction").get<double>();
    p.amplitude = j.at("amplitude").get<double>();
    p.frequency = j.at("frequency").get<double>();
}

ModelInput model_input_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ModelError("model file: expected a JSON object");
    ModelInput in;
    if (j.contains("pendulum")) {
        const auto params = j.at("pendulum").get<PendulumParams>();
        const auto red = pendulum_reduce(params);
        in.model = red.model;
        in.mu = red.mu;
        in.pendulum = params;
    } else {
        in.model = j.get<MathieuModel>();
    }
    return in;
}

}  // namespace kapitza
