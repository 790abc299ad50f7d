#include "kapitza/certificate.hpp"

#include <cmath>
#include <numbers>

namespace kapitza {

Analysis analyze(const MathieuModel& model, const AnalysisOptions& opts) {
    Analysis a;
    a.model = model;
    a.lin = linearize(model);
    a.options = opts;
    a.grid = QuadratureGrid(model.period(), opts.grid);
    a.bogolyubov = bogolyubov_condition(a.lin, a.grid);
    a.system.emplace(a.lin, build_transform(a.lin, a.grid));
    a.u1 = a.system->u1();
    a.u1_hurwitz = u1_is_hurwitz(a.u1);
    if (a.u1_hurwitz) {
        a.h1 = solve_constant_lyapunov(a.u1);
        a.chain = compute_bound_chain(a.lin, a.system->transform(), a.u1, *a.h1,
                                      BoundOptions{opts.mu_cap});
    }
    return a;
}

std::string to_string(CertificateStatus s) {
    switch (s) {
        case CertificateStatus::certified:
            return "certified";
        case CertificateStatus::out_of_range:
            return "out_of_range";
        case CertificateStatus::perturbation_over_budget:
            return "perturbation_over_budget";
        case CertificateStatus::bogolyubov_fails:
            return "bogolyubov_fails";
    }
    return "unknown";
}

int exit_code(CertificateStatus s) {
    switch (s) {
        case CertificateStatus::certified:
            return 0;
        case CertificateStatus::out_of_range:
        case CertificateStatus::perturbation_over_budget:
            return 2;
        case CertificateStatus::bogolyubov_fails:
            return 3;
    }
    return 1;
}

double monodromy_spectral_radius(const LinearizedSystem& lin, double mu, int steps) {
    const auto y = matrizant([&](double t) { return lin.matrix(t, mu); }, lin.period(), steps);
    return spectral_radius_monodromy(y);
}

PeriodicLyapunovSolution lyapunov_at(const Analysis& analysis, double mu) {
    const auto& lin = analysis.lin;
    return solve_periodic_lyapunov([&](double t) { return lin.matrix(t, mu); }, lin.period(),
                                   analysis.options.steps);
}

double remainder_bound_for(const MathieuModel& m, std::optional<double>& rho) {
    const Nonlinearity g = shift_to_zero(m);
    if (!rho && g.kind() == Nonlinearity::Kind::sine) rho = std::numbers::pi / 2.0;
    return quadratic_remainder_bound(g, rho);
}

Certificate certify(const Analysis& analysis, const CertifyRequest& req) {
    if (!(req.mu > 0.0) || !std::isfinite(req.mu)) {
        throw std::invalid_argument("certify: mu must be positive and finite");
    }
    Certificate c;
    c.analysis = &analysis;
    c.mu = req.mu;
    c.spectral_radius = monodromy_spectral_radius(analysis.lin, req.mu, analysis.options.steps);

    if (!analysis.bogolyubov.holds || !analysis.chain) {
        c.status = CertificateStatus::bogolyubov_fails;
        c.note = "averaged matrix U1 is not Hurwitz; no stability range can be certified";
        return c;
    }
    if (req.mu > analysis.chain->mu0) {
        c.status = CertificateStatus::out_of_range;
        c.note = "mu exceeds mu0; spectral radius reported for information only";
        return c;
    }

    const auto sol = lyapunov_at(analysis, req.mu);
    const auto res = bvp_residual(sol, [&](double t) { return analysis.lin.matrix(t, req.mu); });
    LyapunovSummary ls;
    ls.h_min = sol.h_min();
    ls.h_max = sol.h_max();
    ls.h0_norm = sol.norm_at_node(0);
    ls.bvp_residual_abs = res.absolute;
    ls.bvp_residual_rel = res.relative;
    ls.periodicity_gap = sol.periodicity_gap();
    ls.periodicity_gap_rel = sol.periodicity_gap_relative();
    ls.scale = sol.scale();
    c.lyapunov = ls;
    c.thm5 = theorem5_budget(sol, req.mu);
    c.thm6 = theorem6_budget(sol, req.mu);
    c.status = CertificateStatus::certified;

    const Perturbation pert = req.perturbation.value_or(Perturbation{});
    const ScaledPerturbation sp = scale_perturbation(pert, analysis.model);
    if (req.perturbation) {
        PerturbationReport pr;
        pr.perturbation = pert;
        pr.phi_usage = c.thm5->phi_usage(sp, analysis.grid);
        pr.coeff_usage = c.thm5->coeff_usage(sp);
        pr.admissible_thm5 = c.thm5->admits(sp, analysis.grid);
        pr.admissible_thm6 = c.thm6->admits(sp, analysis.grid);
        pr.min_epsilon = min_epsilon_on_nodes(sol, sp, req.mu);
        c.perturbation = pr;
        if (!pr.admissible_thm5) {
            c.status = CertificateStatus::perturbation_over_budget;
            c.note = "perturbation exceeds the linear robustness budget";
        }
    }

    EnvelopeParams ep;
    const DecayEnvelope lin_env(sol, sp, req.mu, EnvelopeVariant::linear_thm5);
    const DecayEnvelope nl_env(sol, sp, req.mu, EnvelopeVariant::nonlinear_thm7);
    const DecayEnvelope printed(sol, sp, req.mu, EnvelopeVariant::nonlinear_printed);
    ep.linear_prefactor = lin_env.prefactor();
    ep.linear_mean_rate = lin_env.mean_rate();
    ep.nonlinear_prefactor = nl_env.prefactor();
    ep.nonlinear_mean_rate = nl_env.mean_rate();
    ep.printed_mean_rate = printed.mean_rate();
    c.envelope = ep;

    const bool thm6_ok = !c.perturbation || c.perturbation->admissible_thm6;
    if (thm6_ok) {
        std::optional<double> rho = req.rho;
        try {
            const double p = remainder_bound_for(analysis.model, rho);
            const double q = q_of_mu(analysis.model, pert, p, req.mu, analysis.grid);
            c.attraction = attraction_certificate(sol, req.mu, q, p, rho);
            c.q_tilde = kapitza::q_tilde(q, sol.h_max());
        } catch (const ModelError& e) {
            c.note = std::string("no attraction certificate: ") + e.what();
        }
    } else if (c.note.empty()) {
        c.note = "perturbation exceeds the nonlinear budget; no attraction certificate";
    }
    return c;
}

nlohmann::json to_json(const Certificate& c) {
    using nlohmann::json;
    const Analysis& a = *c.analysis;
    json j;
    j["schema"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["status"] = to_string(c.status);
    j["model"] = a.model;
    if (c.pendulum) j["pendulum"] = *c.pendulum;
    j["linearized"] = {{"alpha", a.lin.alpha}, {"beta_hat", a.lin.beta_hat}, {"phi_hat", a.lin.phi_hat}};
    j["bogolyubov"] = {{"holds", a.bogolyubov.holds},
                       {"lhs", a.bogolyubov.lhs},
                       {"rhs", a.bogolyubov.rhs}};
    j["u1"] = {{"matrix", {a.u1.a11, a.u1.a12, a.u1.a21, a.u1.a22}}, {"hurwitz", a.u1_hurwitz}};
    j["bound_chain"] = a.chain ? json(*a.chain) : json(nullptr);
    j["mu_requested"] = c.mu;
    j["spectral_radius_at_mu"] = c.spectral_radius ? json(*c.spectral_radius) : json(nullptr);
    j["grid"] = {{"quadrature_intervals", a.options.grid}, {"integrator_steps", a.options.steps}};
    if (c.lyapunov) {
        const auto& l = *c.lyapunov;
        j["lyapunov"] = {{"h_min", l.h_min},
                         {"h_max", l.h_max},
                         {"h0_norm", l.h0_norm},
                         {"bvp_residual", l.bvp_residual_abs},
                         {"bvp_residual_relative", l.bvp_residual_rel},
                         {"periodicity_gap", l.periodicity_gap},
                         {"periodicity_gap_relative", l.periodicity_gap_rel},
                         {"balancing_scale", l.scale}};
    }
    if (c.thm5 && c.thm6) j["budgets"] = {{"theorem5", *c.thm5}, {"theorem6", *c.thm6}};
    if (c.perturbation) {
        const auto& p = *c.perturbation;
        j["perturbation"] = {{"input", p.perturbation},
                             {"phi_usage", p.phi_usage},
                             {"coeff_usage", p.coeff_usage},
                             {"admissible_theorem5", p.admissible_thm5},
                             {"admissible_theorem6", p.admissible_thm6},
                             {"min_epsilon", p.min_epsilon}};
    }
    if (c.attraction) {
        j["attraction"] = *c.attraction;
        j["attraction"]["q_tilde"] = *c.q_tilde;
    }
    if (c.envelope) {
        const auto& e = *c.envelope;
        j["envelope"] = {{"linear", {{"prefactor", e.linear_prefactor}, {"mean_rate", e.linear_mean_rate}}},
                         {"nonlinear", {{"prefactor", e.nonlinear_prefactor}, {"mean_rate", e.nonlinear_mean_rate}}},
                         {"nonlinear_printed_rate", e.printed_mean_rate}};
    }
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

}  // namespace kapitza
