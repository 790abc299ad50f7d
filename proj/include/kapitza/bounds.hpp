#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "kapitza/averaging.hpp"
#include "kapitza/mat2.hpp"

namespace kapitza {

struct BoundOptions {
    /// Used for mu_bar when phi_hat == 0 (the formula gives +infinity).
    double mu_cap = 1.0;
};

/// Explicit constants guaranteeing stability of the linearized equation for mu in (0, mu0].
struct BoundChain {
    double period = 0.0;
    double phi_max = 0.0;
    double a_const = 0.0;          // max{alpha, |beta_hat|}, used in every bound
    double a_const_literal = 0.0;  // max{alpha, beta_hat}, reported only
    double mu_bar = 0.0;
    double norm_u1 = 0.0;
    double norm_h1 = 0.0;
    double u2_bound = 0.0;  // (1 + a + T)(1/2 + phi_max T)
    double u3_bound = 0.0;  // phi_max^2 T^4 (1 + phi_max T) / 2
    double h2_bound = 0.0;  // 2 ||H1|| T (1 + a + T)(1/2 + phi_max T)
    double L1 = 0.0;
    double mu1 = 0.0;
    double L2 = 0.0;
    double mu0 = 0.0;
};

/// Evaluates phi_max, a, mu_bar, L1, mu1, L2, mu0 from U1 and H1 (H1 U1 + U1^T H1 = -I).
[[nodiscard]] BoundChain compute_bound_chain(const LinearizedSystem& lin,
                                             const AveragingTransform& tr, const Mat2& u1,
                                             const Mat2& h1, const BoundOptions& opts = {});

/// C(t, mu) = I + mu (H2 (U1 + U2) + (U1 + U2)^T H2),
/// H2(t, mu) = H1 int_0^t U2 + (int_0^t U2)^T H1, and the corrected matrix
/// script C = C - mu^3 (script H U3 + U3^T script H) with script H = H1 / mu - H2.
class CMatrixField {
public:
    CMatrixField(const TransformedSystem& sys, const Mat2& h1, double mu);

    [[nodiscard]] double mu() const { return mu_; }
    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] const std::vector<Mat2>& u2_integral() const { return u2_int_; }

    [[nodiscard]] Mat2 h2_at_node(std::size_t i) const;
    [[nodiscard]] Mat2 c_at_node(std::size_t i) const;
    [[nodiscard]] Mat2 script_h_at_node(std::size_t i) const;
    [[nodiscard]] Mat2 script_c_at_node(std::size_t i) const;
    /// mu ||H2 (U1 + U2) + (U1 + U2)^T H2|| at node i.
    [[nodiscard]] double coupling_norm_at_node(std::size_t i) const;

    [[nodiscard]] double min_eig_c() const;
    [[nodiscard]] double min_eig_script_c() const;
    [[nodiscard]] double max_coupling_norm() const;

private:
    const TransformedSystem* sys_;
    Mat2 h1_;
    double mu_;
    std::vector<double> times_;
    std::vector<Mat2> u2_;
    std::vector<Mat2> u2_int_;
};

/// C(t, mu) at an arbitrary t, integrating U2 over [0, t] directly.
[[nodiscard]] Mat2 c_matrix(const TransformedSystem& sys, const Mat2& h1, double mu, double t);

struct PositivityCheck {
    bool ok = false;
    double min_eig = 0.0;
};

/// Grid check of script C(t, mu) >= I/2 (with 1e-9 slack).
[[nodiscard]] PositivityCheck script_c_positivity(const TransformedSystem& sys, const Mat2& h1,
                                                  double mu);

/// Smallest mu > mu0 at which the monodromy of the linearized system reaches spectral radius 1,
/// by geometric bracketing and bisection. Diagnostic only; empty if none below mu_limit.
[[nodiscard]] std::optional<double> empirical_stability_boundary(const LinearizedSystem& lin,
                                                                 double mu_start, double mu_limit,
                                                                 int n_steps);

void to_json(nlohmann::json& j, const BoundChain& c);

}  // namespace kapitza
