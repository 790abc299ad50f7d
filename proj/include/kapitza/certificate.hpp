#pragma once

#include <numbers>
#include <optional>
#include <string>

#include "json.hpp"
#include "kapitza/averaging.hpp"
#include "kapitza/bounds.hpp"
#include "kapitza/floquet_lyapunov.hpp"
#include "kapitza/model.hpp"
#include "kapitza/robustness.hpp"

namespace kapitza {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct AnalysisOptions {
    int grid = 2048;   // quadrature intervals per period
    int steps = 4096;  // RK4 steps per period for matrizants
    double mu_cap = 1.0;
};

/// mu-independent part of the pipeline: averaging, Bogolyubov test, U1, H1, bound chain.
struct Analysis {
    MathieuModel model;
    LinearizedSystem lin;
    QuadratureGrid grid{2.0 * std::numbers::pi};
    AnalysisOptions options;
    BogolyubovResult bogolyubov;
    std::optional<TransformedSystem> system;  // empty only if the transform could not be built
    bool u1_hurwitz = false;
    Mat2 u1;
    std::optional<Mat2> h1;
    std::optional<BoundChain> chain;

    [[nodiscard]] bool stable_by_averaging() const { return chain.has_value(); }
};

[[nodiscard]] Analysis analyze(const MathieuModel& model, const AnalysisOptions& opts = {});

enum class CertificateStatus { certified, out_of_range, perturbation_over_budget, bogolyubov_fails };

[[nodiscard]] std::string to_string(CertificateStatus s);
/// 0 certified, 2 out of range or over budget, 3 Bogolyubov condition fails.
[[nodiscard]] int exit_code(CertificateStatus s);

struct LyapunovSummary {
    double h_min = 0.0;
    double h_max = 0.0;
    double h0_norm = 0.0;
    double bvp_residual_abs = 0.0;
    double bvp_residual_rel = 0.0;
    double periodicity_gap = 0.0;
    double periodicity_gap_rel = 0.0;
    double scale = 1.0;
};

struct PerturbationReport {
    Perturbation perturbation;
    double phi_usage = 0.0;
    double coeff_usage = 0.0;
    bool admissible_thm5 = false;
    bool admissible_thm6 = false;
    double min_epsilon = 1.0;
};

struct EnvelopeParams {
    double linear_prefactor = 0.0;
    double linear_mean_rate = 0.0;
    double nonlinear_prefactor = 0.0;
    double nonlinear_mean_rate = 0.0;
    double printed_mean_rate = 0.0;
};

struct CertifyRequest {
    double mu = 0.0;
    std::optional<Perturbation> perturbation;
    std::optional<double> rho;  // neighbourhood for the remainder bound
};

struct Certificate {
    CertificateStatus status = CertificateStatus::bogolyubov_fails;
    std::optional<PendulumParams> pendulum;
    Analysis const* analysis = nullptr;
    double mu = 0.0;
    std::optional<double> spectral_radius;
    std::optional<LyapunovSummary> lyapunov;
    std::optional<RobustnessBudget> thm5;
    std::optional<RobustnessBudget> thm6;
    std::optional<PerturbationReport> perturbation;
    std::optional<AttractionCertificate> attraction;
    std::optional<double> q_tilde;
    std::optional<EnvelopeParams> envelope;
    std::string note;

    [[nodiscard]] int exit_code() const { return kapitza::exit_code(status); }
};

/// Full per-mu pipeline; `analysis` must outlive the certificate.
[[nodiscard]] Certificate certify(const Analysis& analysis, const CertifyRequest& req);

/// Periodic Lyapunov solution of the unperturbed linearized system at mu.
[[nodiscard]] PeriodicLyapunovSolution lyapunov_at(const Analysis& analysis, double mu);

/// Spectral radius of the monodromy of the linearized system at mu.
[[nodiscard]] double monodromy_spectral_radius(const LinearizedSystem& lin, double mu, int steps);

/// Remainder bound p for the shifted nonlinearity, with rho defaulting to pi/2 for sine.
[[nodiscard]] double remainder_bound_for(const MathieuModel& m, std::optional<double>& rho);

[[nodiscard]] nlohmann::json to_json(const Certificate& c);

}  // namespace kapitza
