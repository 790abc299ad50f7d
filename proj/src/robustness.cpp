#include "kapitza/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kapitza {

namespace {

void require_period(const OffsetSignal& s, double period) {
    if (s.oscillation.is_zero()) return;
    if (std::abs(s.period() - period) > 1e-12 * period) {
        throw std::invalid_argument("perturbation: d_phi period differs from the model period");
    }
}

RobustnessBudget make_budget(const PeriodicLyapunovSolution& sol, double mu, BudgetLevel level) {
    if (!(mu > 0.0)) throw std::invalid_argument("budget: mu must be > 0");
    const double denom = (level == BudgetLevel::theorem5 ? 4.0 : 8.0) * sol.h_max();
    RobustnessBudget b;
    b.level = level;
    b.mu = mu;
    b.h_max = sol.h_max();
    b.budget_phi_sup = 1.0 / denom;
    b.budget_coeff = 1.0 / denom;
    return b;
}

}  // namespace

ScaledPerturbation scale_perturbation(const Perturbation& p, double slope) {
    return {p.d_alpha, p.d_beta * slope, p.d_phi.scaled(slope)};
}

ScaledPerturbation scale_perturbation(const Perturbation& p, const MathieuModel& m) {
    return scale_perturbation(p, m.f.derivative(m.gamma));
}

Mat2 perturbed_matrix(const LinearizedSystem& lin, const ScaledPerturbation& p, double t,
                      double mu) {
    const double stiffness = (lin.beta_hat + p.d_beta_hat) * mu * mu +
                             mu * (lin.phi_hat.eval(t) + p.d_phi_hat.eval(t));
    return {0.0, 1.0, -stiffness, -(lin.alpha + p.d_alpha) * mu};
}

double delta_a_norm(const ScaledPerturbation& p, double mu, double t) {
    return mu * std::hypot(p.d_beta_hat * mu + p.d_phi_hat.eval(t), p.d_alpha);
}

std::string to_string(BudgetLevel level) {
    return level == BudgetLevel::theorem5 ? "theorem5" : "theorem6";
}

double RobustnessBudget::phi_usage(const ScaledPerturbation& p, const QuadratureGrid& grid) const {
    require_period(p.d_phi_hat, grid.period());
    return mu * sup_norm(p.d_phi_hat, grid);
}

double RobustnessBudget::coeff_usage(const ScaledPerturbation& p) const {
    return mu * (std::abs(p.d_beta_hat) * mu + std::abs(p.d_alpha));
}

bool RobustnessBudget::admits(const ScaledPerturbation& p, const QuadratureGrid& grid) const {
    return phi_usage(p, grid) < budget_phi_sup && coeff_usage(p) < budget_coeff;
}

RobustnessBudget theorem5_budget(const PeriodicLyapunovSolution& sol, double mu) {
    return make_budget(sol, mu, BudgetLevel::theorem5);
}

RobustnessBudget theorem6_budget(const PeriodicLyapunovSolution& sol, double mu) {
    return make_budget(sol, mu, BudgetLevel::theorem6);
}

double epsilon_fn(const PeriodicLyapunovSolution& sol, const ScaledPerturbation& p, double mu,
                  double t) {
    return 1.0 - 2.0 * spectral_norm(sol.at(t)) * delta_a_norm(p, mu, t);
}

double min_epsilon_on_nodes(const PeriodicLyapunovSolution& sol, const ScaledPerturbation& p,
                            double mu) {
    double m = 1.0;
    for (int i = 0; i <= sol.steps(); ++i) {
        m = std::min(m, 1.0 - 2.0 * sol.norm_at_node(i) * delta_a_norm(p, mu, sol.time(i)));
    }
    return m;
}

double q_of_mu(const MathieuModel& m, const Perturbation& pert, double p, double mu,
               const QuadratureGrid& grid) {
    require_period(pert.d_phi, grid.period());
    const double beta_part = std::abs(m.beta + pert.d_beta) * mu * mu;
    double best = 0.0;
    const double h = grid.step();
    for (int i = 0; i < grid.size(); ++i) {
        for (double t : {grid.node(i), grid.node(i) + 0.5 * h}) {
            const double phi = std::abs(m.phi.eval(t) + pert.d_phi.eval(t));
            best = std::max(best, (beta_part + phi * mu) * p);
        }
    }
    return best;
}

bool AttractionCertificate::contains(const PeriodicLyapunovSolution& sol, const Vec2& v) const {
    if (euclid_radius && v.norm() > *euclid_radius) return false;
    if (unbounded()) return true;
    return sol.quadratic_form_at_node(0, v) <= lyapunov_radius_sq;
}

AttractionCertificate attraction_certificate(const PeriodicLyapunovSolution& sol, double mu,
                                             double q_mu, double p, std::optional<double> rho) {
    if (!(q_mu >= 0.0)) throw std::invalid_argument("attraction certificate: q must be >= 0");
    AttractionCertificate c;
    c.mu = mu;
    c.p = p;
    c.rho = rho;
    c.q_mu = q_mu;
    c.h_min = sol.h_min();
    c.h_max = sol.h_max();
    if (q_mu > 0.0) {
        c.lyapunov_radius_sq =
            std::pow(c.h_min, 3) / (64.0 * std::pow(c.h_max, 4) * q_mu * q_mu);
    }
    if (rho) c.euclid_radius = *rho * c.h_min / (4.0 * c.h_max);
    return c;
}

std::string to_string(EnvelopeVariant v) {
    switch (v) {
        case EnvelopeVariant::linear_thm5:
            return "linear_thm5";
        case EnvelopeVariant::nonlinear_thm7:
            return "nonlinear_thm7";
        case EnvelopeVariant::nonlinear_printed:
            return "nonlinear_printed";
    }
    return "unknown";
}

DecayEnvelope::DecayEnvelope(const PeriodicLyapunovSolution& sol, const ScaledPerturbation& p,
                             double mu, EnvelopeVariant variant)
    : period_(sol.period()),
      prefactor_(variant == EnvelopeVariant::linear_thm5 ? sol.norm_at_node(0) / sol.h_min()
                                                         : 4.0 / sol.h_min()),
      rate_([&] {
          require_period(p.d_phi_hat, sol.period());
          const std::vector<double> norms = sol.step_norm_upper();
          std::vector<double> rates(norms.size());
          const double h = sol.step();
          for (std::size_t i = 0; i < norms.size(); ++i) {
              const double t0 = h * static_cast<double>(i);
              const double da = std::max({delta_a_norm(p, mu, t0), delta_a_norm(p, mu, t0 + 0.5 * h),
                                          delta_a_norm(p, mu, t0 + h)});
              switch (variant) {
                  case EnvelopeVariant::linear_thm5:
                      rates[i] = 1.0 / norms[i] - 2.0 * da;
                      break;
                  case EnvelopeVariant::nonlinear_thm7:
                      // eps / (2 ||H||) = 1 / (2 ||H||) - ||dA||
                      rates[i] = 0.5 / norms[i] - da;
                      break;
                  case EnvelopeVariant::nonlinear_printed:
                      rates[i] = 0.5 / norms[i];
                      break;
              }
          }
          return StepProfile(sol.period(), std::move(rates));
      }()) {}

double DecayEnvelope::mean_rate() const { return rate_.period_integral() / period_; }

double DecayEnvelope::operator()(double initial, double t) const {
    if (initial == 0.0) return 0.0;
    return prefactor_ * initial * std::exp(-rate_.integral(t));
}

double decay_envelope(const PeriodicLyapunovSolution& sol, const ScaledPerturbation& p, double mu,
                      double initial, double t, EnvelopeVariant variant) {
    return DecayEnvelope(sol, p, mu, variant)(initial, t);
}

void to_json(nlohmann::json& j, const Perturbation& p) {
    j = {{"d_alpha", p.d_alpha}, {"d_beta", p.d_beta}, {"d_phi", p.d_phi}};
}

void from_json(const nlohmann::json& j, Perturbation& p) {
    if (!j.is_object()) throw std::invalid_argument("perturbation: expected a JSON object");
    p.d_alpha = j.value("d_alpha", 0.0);
    p.d_beta = j.value("d_beta", 0.0);
    p.d_phi = j.contains("d_phi") ? j.at("d_phi").get<OffsetSignal>() : OffsetSignal{};
    if (!std::isfinite(p.d_alpha) || !std::isfinite(p.d_beta) || !std::isfinite(p.d_phi.offset)) {
        throw std::invalid_argument("perturbation: non-finite value");
    }
}

void to_json(nlohmann::json& j, const RobustnessBudget& b) {
    j = {{"level", to_string(b.level)},
         {"mu", b.mu},
         {"h_max", b.h_max},
         {"budget_phi_sup", b.budget_phi_sup},
         {"budget_coeff", b.budget_coeff},
         {"max_sup_d_phi_hat", b.budget_phi_sup / b.mu}};
}

void to_json(nlohmann::json& j, const AttractionCertificate& c) {
    j = {{"mu", c.mu}, {"p", c.p}, {"q_mu", c.q_mu}, {"h_min", c.h_min}, {"h_max", c.h_max},
         {"unbounded", c.unbounded()}};
    j["rho"] = c.rho ? nlohmann::json(*c.rho) : nlohmann::json(nullptr);
    j["lyapunov_radius_sq"] =
        c.unbounded() ? nlohmann::json(nullptr) : nlohmann::json(c.lyapunov_radius_sq);
    j["euclid_radius"] = c.euclid_radius ? nlohmann::json(*c.euclid_radius) : nlohmann::json(nullptr);
}

}  // namespace kapitza
