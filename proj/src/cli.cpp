#include "kapitza/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "kapitza/certificate.hpp"
#include "kapitza/simulate.hpp"

namespace kapitza::cli {

namespace {

using nlohmann::json;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string model_file;
    std::optional<double> mu;
    std::string pert_file;
    std::optional<double> rho;
    int grid = 2048;
    int steps = 4096;
    std::string out_file;
    std::string format;
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "': " + e.what());
    }
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void add_common(CLI::App* sub, Common& c, bool with_pert) {
    sub->add_option("--model", c.model_file, "model JSON file")->required();
    sub->add_option("--mu", c.mu, "small parameter (defaults to a/l for pendulum files)");
    if (with_pert) {
        sub->add_option("--pert", c.pert_file, "perturbation JSON file");
        sub->add_option("--rho", c.rho, "neighbourhood radius for the remainder bound");
    }
    sub->add_option("--grid", c.grid, "quadrature intervals per period")->check(CLI::Range(16, 1 << 24));
    sub->add_option("--steps", c.steps, "RK4 steps per period")->check(CLI::Range(256, 1 << 24));
    sub->add_option("--out", c.out_file, "output file (default stdout)");
    sub->add_option("--format", c.format, "json or csv");
}

ModelInput load_model(const Common& c) {
    return model_input_from_json(read_json(c.model_file));
}

double resolve_mu(const Common& c, const ModelInput& in) {
    if (c.mu) return *c.mu;
    if (in.mu) return *in.mu;
    throw InputError("--mu is required for non-pendulum model files");
}

std::optional<Perturbation> load_pert(const Common& c) {
    if (c.pert_file.empty()) return std::nullopt;
    return read_json(c.pert_file).get<Perturbation>();
}

AnalysisOptions options_of(const Common& c) {
    if (c.grid % 2 != 0) throw InputError("--grid must be even");
    if (c.steps % 2 != 0) throw InputError("--steps must be even");
    AnalysisOptions o;
    o.grid = c.grid;
    o.steps = c.steps;
    return o;
}

void require_format(const Common& c, const std::string& allowed) {
    if (!c.format.empty() && c.format != allowed) {
        throw InputError("--format " + c.format + " is not supported here (use " + allowed + ")");
    }
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
    if (c.out_file.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out_file);
    if (!f) throw InputError("cannot write '" + c.out_file + "'");
    f << text;
}

void dump_u(const Analysis& a, double mu, const std::string& path) {
    const auto s = build_u2_u3(*a.system, mu);
    auto flat = [](const Mat2& m) { return std::vector<double>{m.a11, m.a12, m.a21, m.a22}; };
    json j;
    j["mu"] = mu;
    j["u1"] = flat(a.u1);
    j["times"] = s.times;
    j["u2"] = json::array();
    j["u3"] = json::array();
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        j["u2"].push_back(flat(s.u2[i]));
        j["u3"].push_back(flat(s.u3[i]));
    }
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << j.dump(1) << '\n';
}

void dump_h(const Analysis& a, double mu, const std::string& path) {
    const auto& lin = a.lin;
    const auto y = matrizant([&](double t) { return lin.matrix(t, mu); }, lin.period(), a.options.steps);
    const auto sol = solve_periodic_lyapunov(y);
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << "# periodic Lyapunov solution H(t) and matrizant Y(t), mu=" << fmt(mu) << '\n';
    f << "t,h11,h12,h22,y11,y12,y21,y22\n";
    for (int i = 0; i <= sol.steps(); ++i) {
        const Mat2 h = sol.at_node(i);
        const Mat2 yi = y.at(i);
        f << fmt(sol.time(i)) << ',' << fmt(h.a11) << ',' << fmt(h.a12) << ',' << fmt(h.a22) << ','
          << fmt(yi.a11) << ',' << fmt(yi.a12) << ',' << fmt(yi.a21) << ',' << fmt(yi.a22) << '\n';
    }
}

int cmd_certify(const Common& c, const std::string& dump_u_path, const std::string& dump_h_path,
                std::ostream& out, std::ostream& err) {
    require_format(c, "json");
    const ModelInput in = load_model(c);
    const double mu = resolve_mu(c, in);
    const Analysis a = analyze(in.model, options_of(c));
    Certificate cert = certify(a, {mu, load_pert(c), c.rho});
    cert.pendulum = in.pendulum;
    emit(c, to_json(cert).dump(2) + "\n", out);
    if (!dump_u_path.empty()) dump_u(a, mu, dump_u_path);
    if (!dump_h_path.empty()) {
        if (cert.status == CertificateStatus::certified) {
            dump_h(a, mu, dump_h_path);
        } else {
            err << "note: H not dumped (no certificate at this mu)\n";
        }
    }
    if (cert.status != CertificateStatus::certified) err << "not certified: " << cert.note << '\n';
    return cert.exit_code();
}

int cmd_margins(const Common& c, std::ostream& out, std::ostream& err) {
    require_format(c, "json");
    const ModelInput in = load_model(c);
    const double mu = resolve_mu(c, in);
    const Analysis a = analyze(in.model, options_of(c));
    const Certificate cert = certify(a, {mu, std::nullopt, std::nullopt});
    json j;
    j["schema"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["status"] = to_string(cert.status);
    j["mu"] = mu;
    j["mu0"] = a.chain ? json(a.chain->mu0) : json(nullptr);
    if (cert.thm5 && cert.thm6) {
        j["h_max"] = cert.lyapunov->h_max;
        j["h_min"] = cert.lyapunov->h_min;
        j["theorem5"] = *cert.thm5;
        j["theorem6"] = *cert.thm6;
    }
    emit(c, j.dump(2) + "\n", out);
    if (cert.status != CertificateStatus::certified) err << "not certified: " << cert.note << '\n';
    return cert.exit_code();
}

int cmd_simulate(const Common& c, double y0, double y1, double t_end, int stride,
                 std::ostream& out, std::ostream& err) {
    require_format(c, "csv");
    const ModelInput in = load_model(c);
    const double mu = resolve_mu(c, in);
    const Analysis a = analyze(in.model, options_of(c));
    const auto pert = load_pert(c);
    const Certificate cert = certify(a, {mu, pert, c.rho});
    if (cert.status != CertificateStatus::certified) {
        err << "not certified: " << cert.note << '\n';
        return cert.exit_code();
    }
    const auto sol = lyapunov_at(a, mu);
    const Perturbation p = pert.value_or(Perturbation{});
    const OdeSystem sys = perturbed_nonlinear_system(a.model, p, mu);
    IntegrationOptions opts;
    opts.steps_per_period = c.steps;
    opts.stride = stride;
    const Trajectory traj = integrate(sys, y0, y1, t_end, opts);

    const Vec2 v0{y0, y1};
    const double psi0 = sol.quadratic_form_at_node(0, v0);
    std::vector<std::string> comments;
    comments.push_back("kapitza-cert " + std::string(kToolVersion) + " simulate");
    comments.push_back("mu=" + fmt(mu) + " y0=" + fmt(y0) + " y1=" + fmt(y1) +
                       " (deviation from the equilibrium)");
    comments.push_back("psi0=" + fmt(psi0));
    std::function<double(double)> envelope;
    if (cert.attraction) {
        const auto& at = *cert.attraction;
        const bool in_lyap = at.unbounded() || psi0 <= at.lyapunov_radius_sq;
        const bool in_ball = !at.euclid_radius || v0.norm() <= *at.euclid_radius;
        comments.push_back(std::string("inside_lyapunov_set=") + (in_lyap ? "true" : "false") +
                           " inside_euclid_ball=" + (in_ball ? "true" : "false"));
        auto env = std::make_shared<DecayEnvelope>(
            sol, scale_perturbation(p, a.model), mu, EnvelopeVariant::nonlinear_thm7);
        envelope = [env, psi0](double t) { return (*env)(psi0, t); };
        comments.push_back("envelope=nonlinear_thm7");
    } else {
        comments.push_back("no attraction certificate; envelope column is nan");
    }
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, &sol, envelope, comments);
    emit(c, csv.str(), out);
    return 0;
}

int cmd_sweep(const Common& c, const std::string& mu_grid, const std::string& beta_grid,
              std::ostream& out, std::ostream&) {
    if (!c.format.empty() && c.format != "csv" && c.format != "json") {
        throw InputError("--format must be json or csv");
    }
    const ModelInput in = load_model(c);
    const auto mus = parse_grid(mu_grid);
    const auto betas = parse_grid(beta_grid);
    for (double m : mus) {
        if (!(m > 0.0)) throw InputError("mu grid values must be > 0");
    }
    struct Row {
        double beta, mu, radius;
        bool certified;
    };
    std::vector<Row> rows;
    std::vector<std::pair<double, std::optional<double>>> mu0s;
    const AnalysisOptions opts = options_of(c);
    for (double beta : betas) {
        MathieuModel m = in.model;
        m.beta = beta;
        const Analysis a = analyze(m, opts);
        const std::optional<double> mu0 =
            a.chain && a.bogolyubov.holds ? std::optional<double>(a.chain->mu0) : std::nullopt;
        mu0s.emplace_back(beta, mu0);
        for (double mu : mus) {
            rows.push_back({beta, mu, monodromy_spectral_radius(a.lin, mu, opts.steps),
                            mu0 && mu <= *mu0});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
        return x.beta != y.beta ? x.beta < y.beta : x.mu < y.mu;
    });
    std::ostringstream s;
    if (c.format == "json") {
        json j;
        j["schema"] = kSchemaVersion;
        j["tool_version"] = kToolVersion;
        j["rows"] = json::array();
        for (const auto& r : rows) {
            j["rows"].push_back({{"beta", r.beta},
                                 {"mu", r.mu},
                                 {"spectral_radius", r.radius},
                                 {"certified_by_mu0", r.certified}});
        }
        s << j.dump(2) << '\n';
    } else {
        s << "# kapitza-cert " << kToolVersion << " sweep\n";
        for (const auto& [beta, mu0] : mu0s) {
            s << "# beta=" << fmt(beta) << " mu0=" << (mu0 ? fmt(*mu0) : "none") << '\n';
        }
        s << "beta,mu,spectral_radius,certified_by_mu0\n";
        for (const auto& r : rows) {
            s << fmt(r.beta) << ',' << fmt(r.mu) << ',' << fmt(r.radius) << ','
              << (r.certified ? "true" : "false") << '\n';
        }
    }
    emit(c, s.str(), out);
    return 0;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        const std::string tok = item.substr(b, e - b + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw InputError("bad grid value '" + tok + "'");
        }
        if (used != tok.size() || !std::isfinite(v)) throw InputError("bad grid value '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability certificates for Mathieu-type equations with damping", "kapitza-cert"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    Common certify_opts;
    std::string dump_u_path;
    std::string dump_h_path;
    auto* certify_cmd = app.add_subcommand("certify", "full certificate as JSON");
    add_common(certify_cmd, certify_opts, true);
    certify_cmd->add_option("--dump-u", dump_u_path, "write U1/U2/U3 samples as JSON");
    certify_cmd->add_option("--dump-h", dump_h_path, "write H(t) and Y(t) samples as CSV");

    Common margins_opts;
    auto* margins_cmd = app.add_subcommand("margins", "robustness budgets as JSON");
    add_common(margins_cmd, margins_opts, false);

    Common sim_opts;
    double y0 = 0.0;
    double y1 = 0.0;
    double t_end = 0.0;
    int stride = 16;
    auto* sim_cmd = app.add_subcommand("simulate", "trajectory with envelope as CSV");
    add_common(sim_cmd, sim_opts, true);
    sim_cmd->add_option("--y0", y0, "initial deviation y(0) - gamma")->required();
    sim_cmd->add_option("--y1", y1, "initial velocity y'(0)")->required();
    sim_cmd->add_option("--t-end", t_end, "final time")->required();
    sim_cmd->add_option("--stride", stride, "record every stride-th step")->check(CLI::PositiveNumber);

    Common sweep_opts;
    std::string mu_grid;
    std::string beta_grid;
    auto* sweep_cmd = app.add_subcommand("sweep", "stability chart over (beta, mu) as CSV");
    add_common(sweep_cmd, sweep_opts, false);
    sweep_cmd->add_option("--mu-grid", mu_grid, "comma-separated mu values")->required();
    sweep_cmd->add_option("--beta-grid", beta_grid, "comma-separated beta values")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (certify_cmd->parsed()) return cmd_certify(certify_opts, dump_u_path, dump_h_path, out, err);
        if (margins_cmd->parsed()) return cmd_margins(margins_opts, out, err);
        if (sim_cmd->parsed()) return cmd_simulate(sim_opts, y0, y1, t_end, stride, out, err);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, mu_grid, beta_grid, out, err);
    } catch (const NotAsymptoticallyStable& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace kapitza::cli
