#include "kapitza/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kapitza/floquet_lyapunov.hpp"

namespace kapitza {

namespace {

Mat2 sym_product(const Mat2& h, const Mat2& u) { return h * u + u.transpose() * h; }

}  // namespace

BoundChain compute_bound_chain(const LinearizedSystem& lin, const AveragingTransform& tr,
                               const Mat2& u1, const Mat2& h1, const BoundOptions& opts) {
    if (!u1_is_hurwitz(u1)) throw std::invalid_argument("bound chain: U1 is not Hurwitz");
    BoundChain c;
    const double T = tr.grid.period();
    c.period = T;
    c.phi_max = sup_norm(lin.phi_hat, tr.grid);
    c.a_const = std::max(lin.alpha, std::abs(lin.beta_hat));
    c.a_const_literal = std::max(lin.alpha, lin.beta_hat);
    c.mu_bar = c.phi_max > 0.0 ? 1.0 / (c.phi_max * T * T) : opts.mu_cap;
    c.norm_u1 = spectral_norm(u1);
    c.norm_h1 = spectral_norm(h1);

    const double growth = (1.0 + c.a_const + T) * (0.5 + c.phi_max * T);
    c.u2_bound = growth;
    c.u3_bound = 0.5 * c.phi_max * c.phi_max * std::pow(T, 4) * (1.0 + c.phi_max * T);
    c.h2_bound = 2.0 * c.norm_h1 * T * growth;

    c.L1 = c.h2_bound * (c.norm_u1 + growth);
    c.mu1 = std::min(c.mu_bar, 1.0 / (8.0 * c.L1));
    c.L2 = c.norm_h1 * std::pow(T, 4) * c.phi_max * c.phi_max * (1.0 + c.phi_max * T) *
           (1.0 + 2.0 * c.mu1 * T * growth);
    c.mu0 = c.L2 > 0.0 ? std::min(c.mu1, 1.0 / (2.0 * std::sqrt(c.L2))) : c.mu1;
    return c;
}

CMatrixField::CMatrixField(const TransformedSystem& sys, const Mat2& h1, double mu)
    : sys_(&sys), h1_(h1), mu_(mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("C matrix: mu must be > 0");
    const auto& grid = sys.transform().grid;
    const auto n = static_cast<std::size_t>(grid.size()) + 1;
    times_.reserve(n);
    u2_.reserve(n);
    for (int i = 0; i <= grid.size(); ++i) {
        times_.push_back(grid.node(i));
        u2_.push_back(sys.u2(grid.node(i), mu));
    }
    u2_int_ = cumulative_integral<Mat2>(u2_, grid.step());
}

Mat2 CMatrixField::h2_at_node(std::size_t i) const {
    return h1_ * u2_int_[i] + u2_int_[i].transpose() * h1_;
}

double CMatrixField::coupling_norm_at_node(std::size_t i) const {
    return mu_ * spectral_norm(sym_product(h2_at_node(i), sys_->u1() + u2_[i]));
}

Mat2 CMatrixField::c_at_node(std::size_t i) const {
    return Mat2::identity() + mu_ * sym_product(h2_at_node(i), sys_->u1() + u2_[i]);
}

Mat2 CMatrixField::script_h_at_node(std::size_t i) const {
    return (1.0 / mu_) * h1_ - h2_at_node(i);
}

Mat2 CMatrixField::script_c_at_node(std::size_t i) const {
    const Mat2 u3 = sys_->u3(times_[i], mu_);
    return c_at_node(i) - (mu_ * mu_ * mu_) * sym_product(script_h_at_node(i), u3);
}

double CMatrixField::min_eig_c() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times_.size(); ++i) {
        m = std::min(m, symmetric_eigenvalues(c_at_node(i)).first);
    }
    return m;
}

double CMatrixField::min_eig_script_c() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times_.size(); ++i) {
        m = std::min(m, symmetric_eigenvalues(script_c_at_node(i)).first);
    }
    return m;
}

double CMatrixField::max_coupling_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < times_.size(); ++i) m = std::max(m, coupling_norm_at_node(i));
    return m;
}

Mat2 c_matrix(const TransformedSystem& sys, const Mat2& h1, double mu, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("C matrix: t must be >= 0");
    const Mat2 iu2 = integrate([&](double s) { return sys.u2(s, mu); }, 0.0, t, sys.transform().grid);
    const Mat2 h2 = h1 * iu2 + iu2.transpose() * h1;
    return Mat2::identity() + mu * sym_product(h2, sys.u1() + sys.u2(t, mu));
}

PositivityCheck script_c_positivity(const TransformedSystem& sys, const Mat2& h1, double mu) {
    const CMatrixField field(sys, h1, mu);
    PositivityCheck r;
    r.min_eig = field.min_eig_script_c();
    r.ok = r.min_eig >= 0.5 - 1e-9;
    return r;
}

std::optional<double> empirical_stability_boundary(const LinearizedSystem& lin, double mu_start,
                                                   double mu_limit, int n_steps) {
    const double T = lin.period();
    auto unstable = [&](double mu) {
        const auto y = matrizant([&](double t) { return lin.matrix(t, mu); }, T, n_steps);
        return spectral_radius_excess(y.monodromy_deviation()) >= 0.0;
    };
    if (!(mu_start > 0.0) || unstable(mu_start)) return std::nullopt;
    double lo = mu_start;
    double hi = lo;
    bool found = false;
    while (hi < mu_limit) {
        hi = std::min(2.0 * lo, mu_limit);
        if (unstable(hi)) {
            found = true;
            break;
        }
        lo = hi;
    }
    if (!found) return std::nullopt;
    for (int k = 0; k < 60 && hi - lo > 1e-12 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (unstable(mid) ? hi : lo) = mid;
    }
    return hi;
}

void to_json(nlohmann::json& j, const BoundChain& c) {
    j = {{"period", c.period},   {"phi_max", c.phi_max}, {"a_const", c.a_const},
         {"a_const_literal", c.a_const_literal},          {"mu_bar", c.mu_bar},
         {"norm_u1", c.norm_u1}, {"norm_h1", c.norm_h1}, {"u2_bound", c.u2_bound},
         {"u3_bound", c.u3_bound}, {"h2_bound", c.h2_bound}, {"L1", c.L1},
         {"mu1", c.mu1},         {"L2", c.L2},           {"mu0", c.mu0}};
}

}  // namespace kapitza
