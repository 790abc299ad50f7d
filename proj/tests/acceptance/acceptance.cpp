// Acceptance gate. Usage: acceptance <id>... | all
// Prints one PASS/FAIL line per criterion, preceded by indented detail lines.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kapitza/averaging.hpp"
#include "kapitza/bounds.hpp"
#include "kapitza/certificate.hpp"
#include "kapitza/floquet_lyapunov.hpp"
#include "kapitza/robustness.hpp"
#include "kapitza/simulate.hpp"

using namespace kapitza;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kT = 2 * kPi;

// Tolerances, fixed here so the gate cannot drift.
constexpr double kBogolyubovTol = 1e-9;
constexpr double kResidualTol = 1e-6;
constexpr double kPeriodicityTol = 1e-8;
constexpr double kOracleTol = 1e-6;
constexpr double kExactEnvelopeTol = 1e-8;
constexpr double kRatioTol = 1e-9;
constexpr double kEigSlack = 1e-9;
constexpr double kDecayFactor = 1e-4;
constexpr double kRefinementTol = 1e-6;

class Criterion {
public:
    Criterion(std::string id, std::string title, double time_limit)
        : id_(std::move(id)), title_(std::move(title)), limit_(time_limit),
          start_(std::chrono::steady_clock::now()) {}

    template <class... Args>
    void check(bool ok, const char* format, Args... args) {
        char buf[512];
        if constexpr (sizeof...(Args) == 0) {
            std::snprintf(buf, sizeof buf, "%s", format);
        } else {
            std::snprintf(buf, sizeof buf, format, args...);
        }
        std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", buf);
        ok_ = ok_ && ok;
    }

    template <class... Args>
    void info(const char* format, Args... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, format, args...);
        std::printf("  [info] %s\n", buf);
    }

    bool finish() {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        check(elapsed < limit_, "runtime %.2f s < %.0f s", elapsed, limit_);
        std::printf("%s criterion %s: %s\n", ok_ ? "PASS" : "FAIL", id_.c_str(), title_.c_str());
        std::fflush(stdout);
        return ok_;
    }

private:
    std::string id_;
    std::string title_;
    double limit_;
    std::chrono::steady_clock::time_point start_;
    bool ok_ = true;
};

MathieuModel pendulum(double beta, double alpha) {
    return {alpha, beta, PeriodicSignal(kT, {{1, 0.0, -1.0}}), Nonlinearity::pendulum_sine(), kPi};
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

Vec2 random_unit(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    const double theta = u(rng);
    return {std::cos(theta), std::sin(theta)};
}

// Independent oracle for H(0): int_0^{KT} Y^T Y dt with Y from its own RK4 and
// composite Simpson weights, K chosen so that |Y(KT)|^2 < 1e-14.
Mat2 truncated_integral_h0(const std::function<Mat2(double)>& A, int steps, int& periods_used) {
    const double h = kT / steps;
    Mat2 y = Mat2::identity();
    Mat2 acc = y.transpose() * y;
    long long i = 0;
    periods_used = 0;
    for (int k = 0; k < 20000; ++k) {
        for (int s = 0; s < steps; ++s, ++i) {
            const double t = h * static_cast<double>(i);
            const Mat2 k1 = A(t) * y;
            const Mat2 k2 = A(t + h / 2) * (y + (h / 2) * k1);
            const Mat2 k3 = A(t + h / 2) * (y + (h / 2) * k2);
            const Mat2 k4 = A(t + h) * (y + h * k3);
            y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            acc += ((i + 1) % 2 == 1 ? 4.0 : 2.0) * (y.transpose() * y);
        }
        ++periods_used;
        if (spectral_norm(y.transpose() * y) < 1e-14) break;
    }
    acc -= y.transpose() * y;  // last node has weight 1, not 2
    return (h / 3) * acc;
}

bool criterion_1() {
    Criterion c("1", "Bogolyubov threshold for phi_hat = sin t", 1.0);
    const QuadratureGrid grid(kT);
    for (double beta : {0.1, 0.25, 0.4, 0.6}) {
        const auto r = bogolyubov_condition({0.1, -beta, PeriodicSignal::sine()}, grid);
        c.check(std::abs(r.lhs - 1.5) <= kBogolyubovTol && std::abs(r.rhs - (1 + beta)) <= kBogolyubovTol,
                "beta=%.2f lhs=%.12f rhs=%.12f", beta, r.lhs, r.rhs);
    }
    const auto below = bogolyubov_condition({0.1, -0.499999, PeriodicSignal::sine()}, grid);
    const auto above = bogolyubov_condition({0.1, -0.500001, PeriodicSignal::sine()}, grid);
    c.check(below.holds && !above.holds, "holds(0.499999)=%d holds(0.500001)=%d", below.holds,
            above.holds);
    return c.finish();
}

bool criterion_2() {
    Criterion c("2", "spectral radius < 1 on (0, mu0] for the pendulum family", 10.0);
    for (double beta : {0.1, 0.25, 0.4}) {
        for (double alpha : {0.05, 0.1, 0.5}) {
            const Analysis a = analyze(pendulum(beta, alpha));
            if (!a.chain) {
                c.check(false, "beta=%.2f alpha=%.2f: no bound chain", beta, alpha);
                continue;
            }
            const double mu0 = a.chain->mu0;
            double worst = -1.0;
            for (int j = 0; j < 10; ++j) {
                const double mu = mu0 * std::pow(10.0, -j / 3.0);
                const auto y = matrizant([&](double t) { return a.lin.matrix(t, mu); }, kT, 4096);
                worst = std::max(worst, spectral_radius_excess(y.monodromy_deviation()));
            }
            c.check(worst < 0.0, "beta=%.2f alpha=%.2f mu0=%.6e max(rho-1)=%.3e", beta, alpha, mu0,
                    worst);
        }
    }
    return c.finish();
}

bool criterion_3() {
    Criterion c("3", "periodic Lyapunov solution: residual, periodicity, positivity, oracle", 5.0);
    const Analysis a = analyze(pendulum(0.25, 0.1));
    // Absolute checks where H is of moderate size.
    {
        const double mu = 0.1;
        const auto A = [&](double t) { return a.lin.matrix(t, mu); };
        const auto sol = solve_periodic_lyapunov(A, kT, 4096);
        const auto res = bvp_residual(sol, A);
        c.info("mu=%.3g h_min=%.6e h_max=%.6e", mu, sol.h_min(), sol.h_max());
        c.check(res.absolute <= kResidualTol, "mu=%.3g residual sup=%.3e <= %.0e", mu, res.absolute,
                kResidualTol);
        c.check(sol.periodicity_gap() <= kPeriodicityTol, "mu=%.3g |H(0)-H(T)|=%.3e <= %.0e", mu,
                sol.periodicity_gap(), kPeriodicityTol);
        c.check(sol.h_min() > 0.0, "mu=%.3g min node eigenvalue %.6e > 0", mu, sol.h_min());
        int periods = 0;
        const Mat2 oracle = truncated_integral_h0(A, 4096, periods);
        const double err = spectral_norm(oracle - sol.at_node(0)) / spectral_norm(oracle);
        c.check(err <= kOracleTol, "mu=%.3g truncated integral over %d periods: rel diff %.3e <= %.0e",
                mu, periods, err, kOracleTol);
    }
    // Relative checks at mu0, where ||H|| ~ 1e22 makes absolute tolerances meaningless.
    if (a.chain) {
        const double mu = a.chain->mu0;
        const auto A = [&](double t) { return a.lin.matrix(t, mu); };
        const auto sol = solve_periodic_lyapunov(A, kT, 4096);
        const auto res = bvp_residual(sol, A);
        c.info("mu0=%.6e h_min=%.6e h_max=%.6e", mu, sol.h_min(), sol.h_max());
        c.check(res.relative <= kResidualTol, "mu0 relative residual %.3e <= %.0e", res.relative,
                kResidualTol);
        c.check(sol.periodicity_gap_relative() <= kPeriodicityTol, "mu0 relative periodicity gap %.3e <= %.0e",
                sol.periodicity_gap_relative(), kPeriodicityTol);
        c.check(sol.h_min() > 0.0, "mu0 min node eigenvalue %.6e > 0", sol.h_min());
    } else {
        c.check(false, "no bound chain for the pendulum");
    }
    return c.finish();
}

bool criterion_4() {
    Criterion c("4", "Krein envelope: exact case and pendulum trajectories", 10.0);
    {
        const auto sol = solve_periodic_lyapunov([](double) { return -1.0 * Mat2::identity(); }, kT, 4096);
        const KreinEnvelope env(sol);
        double worst = 0.0;
        for (double t : {0.0, 0.3, 1.0, 2.5, 7.0, 20.0}) {
            worst = std::max(worst, std::abs(env(2.0, t) - 2.0 * std::exp(-2 * t)));
        }
        c.check(worst <= kExactEnvelopeTol, "A = -I: max |envelope - e^{-2t}|y0|^2| = %.3e <= %.0e", worst,
                kExactEnvelopeTol);
    }
    const Analysis a = analyze(pendulum(0.25, 0.1));
    std::mt19937 rng(4);
    std::normal_distribution<double> g;
    IntegrationOptions opts;
    opts.stride = 8;
    std::vector<double> mus = {0.1};
    if (a.chain) mus.insert(mus.begin(), a.chain->mu0 / 2);
    for (double mu : mus) {
        const auto sol = solve_periodic_lyapunov([&](double t) { return a.lin.matrix(t, mu); }, kT, 4096);
        const KreinEnvelope env(sol);
        const auto sys = linear_system(a.lin, mu);
        int failures = 0;
        double max_ratio = 0.0;
        for (int n = 0; n < 100; ++n) {
            const Vec2 v0{g(rng), g(rng)};
            const auto traj = integrate(sys, v0.x1, v0.x2, 20 * kT, opts);
            const auto r = verify_envelope(traj, [&](double t) { return env(v0.norm_sq(), t); });
            if (!r.passed || r.max_ratio > 1 + kRatioTol) ++failures;
            max_ratio = std::max(max_ratio, r.max_ratio);
        }
        c.check(failures == 0, "mu=%.6e: 100 trajectories over 20T, violations=%d, max |y|^2/envelope=%.6f",
                mu, failures, max_ratio);
    }
    return c.finish();
}

Perturbation random_perturbation(std::mt19937& rng, const RobustnessBudget& b, double fraction) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double mu = b.mu;
    const double split = u(rng);
    Perturbation p;
    p.d_alpha = (u(rng) < 0.5 ? -1 : 1) * split * fraction * b.budget_coeff / mu;
    p.d_beta = (u(rng) < 0.5 ? -1 : 1) * (1 - split) * fraction * b.budget_coeff / (mu * mu);
    const double amp = fraction * b.budget_phi_sup / mu;
    if (u(rng) < 0.5) {
        p.d_phi.offset = (u(rng) < 0.5 ? -1 : 1) * amp;
    } else {
        const int k = 1 + static_cast<int>(3 * u(rng));
        const double theta = 2 * kPi * u(rng);
        p.d_phi.oscillation = PeriodicSignal(kT, {{k, amp * std::cos(theta), amp * std::sin(theta)}});
    }
    return p;
}

bool criterion_5() {
    Criterion c("5", "linear robustness budgets", 20.0);
    const MathieuModel m = pendulum(0.25, 0.1);
    const Analysis a = analyze(m);
    if (!a.chain) {
        c.check(false, "no bound chain");
        return c.finish();
    }
    const double mu = a.chain->mu0 / 2;
    const auto sol = lyapunov_at(a, mu);
    const auto budget = theorem5_budget(sol, mu);
    c.info("mu=%.6e h_max=%.6e budget=%.6e", mu, sol.h_max(), budget.budget_phi_sup);
    std::mt19937 rng(55);
    std::normal_distribution<double> g;
    IntegrationOptions opts;
    opts.stride = 8;
    for (double fraction : {0.5, 0.99}) {
        int inadmissible = 0;
        int unstable = 0;
        int envelope_failures = 0;
        double worst_excess = -1.0;
        double max_ratio = 0.0;
        for (int n = 0; n < 25; ++n) {
            const Perturbation p = random_perturbation(rng, budget, fraction);
            const auto sp = scale_perturbation(p, m);
            if (!budget.admits(sp, a.grid)) ++inadmissible;
            const auto y = matrizant([&](double t) { return perturbed_matrix(a.lin, sp, t, mu); }, kT, 4096);
            const double excess = spectral_radius_excess(y.monodromy_deviation());
            worst_excess = std::max(worst_excess, excess);
            if (!(excess < 0.0)) ++unstable;

            const DecayEnvelope env(sol, sp, mu, EnvelopeVariant::linear_thm5);
            const Vec2 v0{g(rng), g(rng)};
            const auto traj = integrate(perturbed_linear_system(a.lin, sp, mu), v0.x1, v0.x2, 20 * kT, opts);
            const auto r = verify_envelope(traj, [&](double t) { return env(v0.norm_sq(), t); });
            if (!r.passed || r.max_ratio > 1 + kRatioTol) ++envelope_failures;
            max_ratio = std::max(max_ratio, r.max_ratio);
        }
        c.check(inadmissible == 0 && unstable == 0,
                "%.2fx budget: 25 perturbations, inadmissible=%d, unstable=%d, max(rho-1)=%.3e", fraction,
                inadmissible, unstable, worst_excess);
        c.check(envelope_failures == 0, "%.2fx budget: 25 trajectories over 20T, envelope violations=%d, max ratio=%.3e",
                fraction, envelope_failures, max_ratio);
    }
    return c.finish();
}

struct AttractionRun {
    int envelope_failures = 0;
    double max_ratio = 0.0;
    int decay_failures = 0;
    double worst_decay = 0.0;
};

AttractionRun run_attraction(Criterion& c) {
    AttractionRun out;
    const MathieuModel m = pendulum(0.25, 0.1);
    const Analysis a = analyze(m);
    if (!a.chain) {
        c.check(false, "no bound chain");
        out.envelope_failures = out.decay_failures = 1;
        return out;
    }
    const double mu = a.chain->mu0 / 2;
    const double rho = 0.5;
    const double p = rho / 6;
    const auto sol = lyapunov_at(a, mu);
    const double q = q_of_mu(m, {}, p, mu, a.grid);
    const auto cert = attraction_certificate(sol, mu, q, p, rho);
    c.info("mu=%.6e q=%.6e Lyapunov radius^2=%.6e Euclidean radius=%.6e", mu, q, cert.lyapunov_radius_sq,
           *cert.euclid_radius);
    const DecayEnvelope env(sol, {}, mu, EnvelopeVariant::nonlinear_thm7);
    c.info("envelope prefactor=%.6e, mean rate=%.6e per unit time, decay over 50T=%.6e", env.prefactor(),
           env.mean_rate(), std::exp(-env.rate_integral(50 * kT)));
    std::mt19937 rng(66);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    IntegrationOptions opts;
    opts.stride = 16;
    const auto sys = perturbed_nonlinear_system(m, {}, mu);
    for (int n = 0; n < 50; ++n) {
        Vec2 v = random_unit(rng);
        // boundary of the intersection of the Lyapunov ellipse and the ball
        double scale = std::min(std::sqrt(cert.lyapunov_radius_sq / sol.quadratic_form_at_node(0, v)),
                                *cert.euclid_radius);
        scale *= n < 25 ? 1.0 - 1e-12 : std::sqrt(u(rng));
        v = scale * v;
        const double psi0 = sol.quadratic_form_at_node(0, v);
        const auto traj = integrate(sys, v.x1, v.x2, 50 * kT, opts);
        const auto r = verify_envelope(traj, [&](double t) { return env(psi0, t); });
        if (!r.passed || r.max_ratio > 1 + kRatioTol) ++out.envelope_failures;
        out.max_ratio = std::max(out.max_ratio, r.max_ratio);
        const double decay = traj.diverged ? INFINITY : traj.final_state().norm() / v.norm();
        if (!(decay < kDecayFactor)) ++out.decay_failures;
        out.worst_decay = std::max(out.worst_decay, decay);
    }
    return out;
}

bool criterion_6a() {
    Criterion c("6a", "nonlinear trajectories stay under the decay envelope", 30.0);
    const auto r = run_attraction(c);
    c.check(r.envelope_failures == 0, "50 trajectories over 50T, violations=%d, max ratio=%.3e",
            r.envelope_failures, r.max_ratio);
    return c.finish();
}

bool criterion_6b() {
    Criterion c("6b", "|v(50T)| < 1e-4 |v(0)| at mu0/2", 30.0);
    const auto r = run_attraction(c);
    c.check(r.decay_failures == 0, "50 trajectories, failures=%d, worst |v(50T)|/|v(0)|=%.6f",
            r.decay_failures, r.worst_decay);
    return c.finish();
}

bool criterion_7() {
    Criterion c("7", "C and script C positivity at mu1 and mu0", 5.0);
    for (double beta : {0.1, 0.25, 0.4}) {
        for (double alpha : {0.05, 0.1, 0.5}) {
            const Analysis a = analyze(pendulum(beta, alpha));
            if (!a.chain || !a.system || !a.h1) {
                c.check(false, "beta=%.2f alpha=%.2f: no bound chain", beta, alpha);
                continue;
            }
            for (double mu : {a.chain->mu1, a.chain->mu0}) {
                const CMatrixField f(*a.system, *a.h1, mu);
                const double ce = f.min_eig_c();
                const double se = f.min_eig_script_c();
                c.check(ce > 0.75 - kEigSlack && se >= 0.5 - kEigSlack,
                        "beta=%.2f alpha=%.2f mu=%.6e min eig C=%.9f script C=%.9f", beta, alpha, mu, ce, se);
            }
        }
    }
    return c.finish();
}

bool criterion_8() {
    Criterion c("8", "grid and step doubling changes results by < 1e-6", 30.0);
    const MathieuModel m = pendulum(0.25, 0.1);
    const Analysis coarse = analyze(m, {2048, 4096, 1.0});
    const Analysis fine = analyze(m, {4096, 8192, 1.0});
    if (!coarse.chain || !fine.chain) {
        c.check(false, "no bound chain");
        return c.finish();
    }
    const double d_mu0 = rel_diff(coarse.chain->mu0, fine.chain->mu0);
    c.check(d_mu0 < kRefinementTol, "mu0 %.15e vs %.15e rel %.3e", coarse.chain->mu0, fine.chain->mu0, d_mu0);
    for (double mu : {coarse.chain->mu0, coarse.chain->mu0 / 2, 0.1}) {
        const auto s1 = lyapunov_at(coarse, mu);
        const auto s2 = lyapunov_at(fine, mu);
        const std::map<std::string, std::pair<double, double>> values = {
            {"h_min", {s1.h_min(), s2.h_min()}},
            {"h_max", {s1.h_max(), s2.h_max()}},
            {"thm5 phi", {theorem5_budget(s1, mu).budget_phi_sup, theorem5_budget(s2, mu).budget_phi_sup}},
            {"thm5 coeff", {theorem5_budget(s1, mu).budget_coeff, theorem5_budget(s2, mu).budget_coeff}},
            {"thm6 phi", {theorem6_budget(s1, mu).budget_phi_sup, theorem6_budget(s2, mu).budget_phi_sup}},
            {"thm6 coeff", {theorem6_budget(s1, mu).budget_coeff, theorem6_budget(s2, mu).budget_coeff}},
        };
        for (const auto& [name, v] : values) {
            const double d = rel_diff(v.first, v.second);
            c.check(d < kRefinementTol, "mu=%.6e %s rel change %.3e", mu, name.c_str(), d);
        }
    }
    return c.finish();
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<bool()>>> all = {
        {"1", criterion_1},   {"2", criterion_2},   {"3", criterion_3},
        {"4", criterion_4},   {"5", criterion_5},   {"6a", criterion_6a},
        {"6b", criterion_6b}, {"7", criterion_7},   {"8", criterion_8},
    };
    std::vector<std::string> ids(argv + 1, argv + argc);
    if (ids.empty() || (ids.size() == 1 && ids[0] == "all")) {
        ids.clear();
        for (const auto& [id, fn] : all) ids.push_back(id);
    }
    bool ok = true;
    for (const auto& id : ids) {
        bool found = false;
        for (const auto& [cid, fn] : all) {
            if (cid == id) {
                ok = fn() && ok;
                found = true;
            }
        }
        if (!found) {
            std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
            return 2;
        }
    }
    return ok ? 0 : 1;
}
