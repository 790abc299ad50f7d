#pragma once

#include <vector>

#include "kapitza/mat2.hpp"
#include "kapitza/model.hpp"
#include "kapitza/periodic_signal.hpp"

namespace kapitza {

/// Periodic coefficients of the change of variables
///   v1 = (1 + mu a(t)) u1,   v2 = mu b(t) u1 + mu u2,
/// with b' = -phi_hat, a' = b, and both a and b of zero mean.
struct AveragingTransform {
    PeriodicSignal a_fn;
    PeriodicSignal b_fn;
    QuadratureGrid grid;
    std::vector<double> a_samples;  // at grid nodes 0..N
    std::vector<double> b_samples;

    /// P(t, mu) with v = P u.
    [[nodiscard]] Mat2 change_of_variables(double t, double mu) const {
        return {1.0 + mu * a_fn.eval(t), 0.0, mu * b_fn.eval(t), mu};
    }
};

[[nodiscard]] AveragingTransform build_transform(const LinearizedSystem& lin,
                                                 const QuadratureGrid& grid);

/// (1/T) int_0^T phi_hat(t) a(t) dt by Simpson on the transform grid.
[[nodiscard]] double mean_phi_a(const LinearizedSystem& lin, const AveragingTransform& tr);

/// Averaged matrix U1 = [[0, 1], [-beta_hat - mean(phi_hat a), -alpha]].
[[nodiscard]] Mat2 build_u1(const LinearizedSystem& lin, const AveragingTransform& tr);

/// Exact 2x2 Routh-Hurwitz test: trace < 0 and det > 0.
[[nodiscard]] inline bool u1_is_hurwitz(const Mat2& u1) { return u1.trace() < 0.0 && u1.det() > 0.0; }

struct BogolyubovResult {
    bool holds = false;
    double lhs = 0.0;  // (1/T) int_0^T (int_0^tau phi_hat)^2 dtau
    double rhs = 0.0;  // ((1/T) int_0^T tau phi_hat dtau)^2 - beta_hat
};

/// Averaged stability inequality for the linearized equation. Evaluated from its own integrals,
/// independently of U1; lhs - rhs equals det U1 analytically.
[[nodiscard]] BogolyubovResult bogolyubov_condition(const LinearizedSystem& lin,
                                                    const QuadratureGrid& grid);

/// Oscillatory part U2 and remainder U3 of u' = mu (U1 + U2 + mu^2 U3) u.
class TransformedSystem {
public:
    TransformedSystem(LinearizedSystem lin, AveragingTransform tr);

    [[nodiscard]] const Mat2& u1() const { return u1_; }
    [[nodiscard]] double mean_phi_a() const { return mean_phi_a_; }
    [[nodiscard]] const LinearizedSystem& linearized() const { return lin_; }
    [[nodiscard]] const AveragingTransform& transform() const { return tr_; }

    [[nodiscard]] Mat2 u2(double t, double mu) const;
    /// Throws std::domain_error when 1 + mu a(t) <= 0.
    [[nodiscard]] Mat2 u3(double t, double mu) const;
    /// Full right-hand side matrix mu U(t, mu).
    [[nodiscard]] Mat2 generator(double t, double mu) const;

    /// Largest mu for which 1 + mu a(t) > 0 on the grid (infinity when a >= 0 everywhere).
    [[nodiscard]] double max_admissible_mu() const;

private:
    LinearizedSystem lin_;
    AveragingTransform tr_;
    Mat2 u1_;
    double mean_phi_a_;
};

struct SampledU2U3 {
    double mu = 0.0;
    std::vector<double> times;
    std::vector<Mat2> u2;
    std::vector<Mat2> u3;
};

/// Samples U2, U3 on the transform grid; throws std::domain_error if 1 + mu a(t) <= 0 at a node.
[[nodiscard]] SampledU2U3 build_u2_u3(const TransformedSystem& sys, double mu);

}  // namespace kapitza
