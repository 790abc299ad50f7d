#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "kapitza/mat2.hpp"

namespace kapitza {

using MatrixFunction = std::function<Mat2(double)>;

/// Raised when a periodic system is not asymptotically stable (monodromy spectral radius >= 1).
class NotAsymptoticallyStable : public std::runtime_error {
public:
    NotAsymptoticallyStable(const std::string& what, double spectral_radius)
        : std::runtime_error(what), spectral_radius_(spectral_radius) {}
    [[nodiscard]] double spectral_radius() const { return spectral_radius_; }

private:
    double spectral_radius_;
};

/// Fundamental matrix Y(t), Y(0) = I, of y' = A(t) y on a uniform grid over [0, T].
/// Stored as deviations Z(t) = Y(t) - I so that near-identity monodromies keep their
/// small entries to full relative precision.
class Matrizant {
public:
    Matrizant(double period, std::vector<Mat2> deviation);

    [[nodiscard]] double period() const { return period_; }
    [[nodiscard]] int steps() const { return static_cast<int>(deviation_.size()) - 1; }
    [[nodiscard]] double step() const { return period_ / steps(); }
    [[nodiscard]] double time(int i) const { return period_ * static_cast<double>(i) / steps(); }

    [[nodiscard]] Mat2 at(int i) const { return Mat2::identity() + deviation_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const Mat2& deviation(int i) const { return deviation_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] Mat2 monodromy() const { return at(steps()); }
    [[nodiscard]] const Mat2& monodromy_deviation() const { return deviation_.back(); }

private:
    double period_;
    std::vector<Mat2> deviation_;
};

/// Classical RK4 with n_steps fixed steps (n_steps even, >= 64).
[[nodiscard]] Matrizant matrizant(const MatrixFunction& A, double period, int n_steps);

/// Largest eigenvalue modulus of I + E, minus one, computed without forming I + E.
[[nodiscard]] double spectral_radius_excess(const Mat2& deviation);
[[nodiscard]] double spectral_radius_monodromy(const Matrizant& m);

/// Symmetric H with H U + U^T H = -I for Hurwitz U; throws std::invalid_argument otherwise.
[[nodiscard]] Mat2 solve_constant_lyapunov(const Mat2& u);

/// Symmetric X with X = M^T X M + Q (Stein equation), solved as a 3x3 linear system.
[[nodiscard]] Mat2 solve_discrete_lyapunov(const Mat2& m, const Mat2& q);
/// Same equation written for M = I + E: E^T X + X E + E^T X E = -Q.
[[nodiscard]] Mat2 solve_discrete_lyapunov_deviation(const Mat2& e, const Mat2& q);

/// Piecewise-constant T-periodic function given by one value per grid step.
class StepProfile {
public:
    StepProfile(double period, std::vector<double> values);
    [[nodiscard]] double value(double t) const;
    /// int_0^t of the periodic extension, t >= 0.
    [[nodiscard]] double integral(double t) const;
    [[nodiscard]] double period_integral() const { return cumulative_.back(); }

private:
    [[nodiscard]] std::size_t index(double t, double& remainder, double& periods) const;
    double period_;
    double step_;
    std::vector<double> values_;
    std::vector<double> cumulative_;
};

/// T-periodic solution of H' + H A + A^T H = -I with H(0) = H(T), sampled on the matrizant grid.
///
/// H(0) solves X = M^T X M + Q with M = Y(T), Q = int_0^T Y^T Y; the remaining nodes follow
/// H(t) = Y(t)^{-T} (H(0) - int_0^t Y^T Y) Y(t)^{-1}. Internally everything is carried in the
/// diagonally balanced coordinates w = diag(1, s)^{-1} v, which keeps the computation well
/// conditioned when the entries of H span many orders of magnitude (small mu).
class PeriodicLyapunovSolution {
public:
    PeriodicLyapunovSolution(double period, double scale, std::vector<Mat2> balanced,
                             double periodicity_gap_abs, double periodicity_gap_rel);

    [[nodiscard]] double period() const { return period_; }
    [[nodiscard]] int steps() const { return static_cast<int>(balanced_.size()) - 1; }
    [[nodiscard]] double step() const { return period_ / steps(); }
    [[nodiscard]] double time(int i) const { return period_ * static_cast<double>(i) / steps(); }
    [[nodiscard]] double scale() const { return scale_; }

    /// H(t_i) in the original coordinates.
    [[nodiscard]] Mat2 at_node(int i) const;
    [[nodiscard]] const Mat2& balanced_at_node(int i) const { return balanced_[static_cast<std::size_t>(i)]; }
    /// Periodic extension, linear interpolation between nodes.
    [[nodiscard]] Mat2 at(double t) const;

    [[nodiscard]] double norm_at_node(int i) const { return norms_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] double min_eig_at_node(int i) const { return min_eigs_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::vector<double>& norms() const { return norms_; }
    [[nodiscard]] const std::vector<double>& min_eigs() const { return min_eigs_; }

    /// Upper bound of ||H|| on the step containing t (max of the adjacent nodes).
    [[nodiscard]] double norm_upper(double t) const;
    /// Lower bound of lambda_min(H) on the step containing t (min of the adjacent nodes).
    [[nodiscard]] double min_eig_lower(double t) const;

    /// <H(t) v, v>, evaluated in balanced coordinates.
    [[nodiscard]] double quadratic_form(double t, const Vec2& v) const;
    [[nodiscard]] double quadratic_form_at_node(int i, const Vec2& v) const;

    [[nodiscard]] double h_min() const { return h_min_; }
    [[nodiscard]] double h_max() const { return h_max_; }
    [[nodiscard]] double periodicity_gap() const { return gap_abs_; }
    [[nodiscard]] double periodicity_gap_relative() const { return gap_rel_; }

    /// Per-step upper bounds of ||H|| (length = steps()).
    [[nodiscard]] std::vector<double> step_norm_upper() const;

private:
    [[nodiscard]] std::size_t step_index(double t) const;
    double period_;
    double scale_;
    std::vector<Mat2> balanced_;
    std::vector<double> norms_;
    std::vector<double> min_eigs_;
    double h_min_ = 0.0;
    double h_max_ = 0.0;
    double gap_abs_ = 0.0;
    double gap_rel_ = 0.0;
};

/// Throws NotAsymptoticallyStable if the spectral radius of Y(T) is >= 1 - 1e-9.
[[nodiscard]] PeriodicLyapunovSolution solve_periodic_lyapunov(const Matrizant& y);
[[nodiscard]] PeriodicLyapunovSolution solve_periodic_lyapunov(const MatrixFunction& A,
                                                               double period, int n_steps);

struct LyapunovResidual {
    double absolute = 0.0;  // max_i ||H' + H A + A^T H + I|| at the nodes
    double relative = 0.0;  // absolute / max_i (||H'|| + 2 ||H|| ||A|| + 1)
};

/// Residual of the Lyapunov differential equation with H' from fourth-order central
/// differences on the periodic grid.
[[nodiscard]] LyapunovResidual bvp_residual(const PeriodicLyapunovSolution& sol,
                                            const MatrixFunction& A);

/// Krein-type bound ||y(t)||^2 <= ||H(0)|| / h_min(t) ||y(0)||^2 exp(-int_0^t ds / ||H(s)||)
/// with C = I; grid values are replaced by conservative step bounds.
[[nodiscard]] double krein_envelope(const PeriodicLyapunovSolution& sol, double y0_norm_sq,
                                    double t);

/// Precomputed form of krein_envelope for evaluation at many times.
class KreinEnvelope {
public:
    explicit KreinEnvelope(const PeriodicLyapunovSolution& sol);
    [[nodiscard]] double operator()(double y0_norm_sq, double t) const;

private:
    const PeriodicLyapunovSolution* sol_;
    StepProfile inverse_norm_;
};

}  // namespace kapitza
