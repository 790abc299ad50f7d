#pragma once

#include <limits>
#include <optional>
#include <string>

#include "json.hpp"
#include "kapitza/floquet_lyapunov.hpp"
#include "kapitza/model.hpp"
#include "kapitza/periodic_signal.hpp"

namespace kapitza {

/// Model-level coefficient perturbation: alpha -> alpha + d_alpha, beta -> beta + d_beta,
/// phi(t) -> phi(t) + d_phi(t). d_phi must share the period of phi (sup is taken over one period).
struct Perturbation {
    double d_alpha = 0.0;
    double d_beta = 0.0;
    OffsetSignal d_phi;

    [[nodiscard]] bool is_zero() const {
        return d_alpha == 0.0 && d_beta == 0.0 && d_phi.offset == 0.0 && d_phi.oscillation.is_zero();
    }
};

/// The same perturbation in the linearized scaling, d_beta_hat = d_beta f'(gamma) and
/// d_phi_hat = d_phi f'(gamma).
struct ScaledPerturbation {
    double d_alpha = 0.0;
    double d_beta_hat = 0.0;
    OffsetSignal d_phi_hat;
};

[[nodiscard]] ScaledPerturbation scale_perturbation(const Perturbation& p, double slope);
[[nodiscard]] ScaledPerturbation scale_perturbation(const Perturbation& p, const MathieuModel& m);

/// Coefficient matrix of the perturbed linear system at (t, mu).
[[nodiscard]] Mat2 perturbed_matrix(const LinearizedSystem& lin, const ScaledPerturbation& p,
                                    double t, double mu);

/// ||Delta A(t, mu)|| = mu sqrt((d_beta_hat mu + d_phi_hat(t))^2 + d_alpha^2).
[[nodiscard]] double delta_a_norm(const ScaledPerturbation& p, double mu, double t);

enum class BudgetLevel { theorem5, theorem6 };

[[nodiscard]] std::string to_string(BudgetLevel level);

struct RobustnessBudget {
    BudgetLevel level = BudgetLevel::theorem5;
    double mu = 0.0;
    double h_max = 0.0;
    double budget_phi_sup = 0.0;  // bound on mu sup |d_phi_hat|
    double budget_coeff = 0.0;    // bound on mu (|d_beta_hat| mu + |d_alpha|)

    [[nodiscard]] double phi_usage(const ScaledPerturbation& p, const QuadratureGrid& grid) const;
    [[nodiscard]] double coeff_usage(const ScaledPerturbation& p) const;
    /// Strict inequalities in both conditions.
    [[nodiscard]] bool admits(const ScaledPerturbation& p, const QuadratureGrid& grid) const;
};

/// 1/(4 h_max) budgets.
[[nodiscard]] RobustnessBudget theorem5_budget(const PeriodicLyapunovSolution& sol, double mu);
/// 1/(8 h_max) budgets.
[[nodiscard]] RobustnessBudget theorem6_budget(const PeriodicLyapunovSolution& sol, double mu);

/// eps(t, mu) = 1 - 2 ||H(t)|| ||Delta A(t)||, H interpolated between nodes.
[[nodiscard]] double epsilon_fn(const PeriodicLyapunovSolution& sol, const ScaledPerturbation& p,
                                double mu, double t);
[[nodiscard]] double min_epsilon_on_nodes(const PeriodicLyapunovSolution& sol,
                                          const ScaledPerturbation& p, double mu);

/// q(mu) = sup_t [(|beta + d_beta| mu^2 + |phi(t) + d_phi(t)| mu) p] over one period.
[[nodiscard]] double q_of_mu(const MathieuModel& m, const Perturbation& pert, double p, double mu,
                             const QuadratureGrid& grid);
/// q~(mu) = 2 q(mu) h_max(mu).
[[nodiscard]] inline double q_tilde(double q, double h_max) { return 2.0 * q * h_max; }

struct AttractionCertificate {
    double mu = 0.0;
    double p = 0.0;
    std::optional<double> rho;
    double q_mu = 0.0;
    double h_min = 0.0;
    double h_max = 0.0;
    /// Bound on <H(0) v, v>; +infinity when q = 0.
    double lyapunov_radius_sq = std::numeric_limits<double>::infinity();
    /// Bound on |v|, present only with rho.
    std::optional<double> euclid_radius;

    [[nodiscard]] bool unbounded() const { return !std::isfinite(lyapunov_radius_sq); }
    [[nodiscard]] bool contains(const PeriodicLyapunovSolution& sol, const Vec2& v) const;
};

[[nodiscard]] AttractionCertificate attraction_certificate(const PeriodicLyapunovSolution& sol,
                                                           double mu, double q_mu, double p,
                                                           std::optional<double> rho);

enum class EnvelopeVariant {
    linear_thm5,        // (||H(0)|| / h_min) |v0|^2 exp(-int (1/||H|| - 2 ||dA||))
    nonlinear_thm7,     // (4 / h_min) psi0 exp(-int eps / (2 ||H||))
    nonlinear_printed,  // (4 / h_min) psi0 exp(-int 1 / (2 ||H||)), informational only
};

[[nodiscard]] std::string to_string(EnvelopeVariant v);

/// Decay envelope for ||v(t)||^2. The initial argument is |v(0)|^2 for the linear variant
/// and psi0 = <H(0) v(0), v(0)> for the nonlinear ones. Step-wise rates use the largest
/// ||H|| and ||Delta A|| on each grid step so the exponent is never overstated.
class DecayEnvelope {
public:
    DecayEnvelope(const PeriodicLyapunovSolution& sol, const ScaledPerturbation& p, double mu,
                  EnvelopeVariant variant);

    [[nodiscard]] double prefactor() const { return prefactor_; }
    [[nodiscard]] double rate_integral(double t) const { return rate_.integral(t); }
    /// Average decay rate per unit time over one period.
    [[nodiscard]] double mean_rate() const;
    [[nodiscard]] double operator()(double initial, double t) const;

private:
    double period_;
    double prefactor_;
    StepProfile rate_;
};

[[nodiscard]] double decay_envelope(const PeriodicLyapunovSolution& sol,
                                    const ScaledPerturbation& p, double mu, double initial,
                                    double t, EnvelopeVariant variant);

void to_json(nlohmann::json& j, const Perturbation& p);
void from_json(const nlohmann::json& j, Perturbation& p);
void to_json(nlohmann::json& j, const RobustnessBudget& b);
void to_json(nlohmann::json& j, const AttractionCertificate& c);

}  // namespace kapitza
