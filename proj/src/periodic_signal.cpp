#include "kapitza/periodic_signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace kapitza {

PeriodicSignal::PeriodicSignal(double period, std::vector<Harmonic> harmonics)
    : period_(period), harmonics_(std::move(harmonics)) {
    if (!(period_ > 0.0) || !std::isfinite(period_)) {
        throw std::invalid_argument("PeriodicSignal: period must be positive and finite");
    }
    std::set<int> seen;
    for (const auto& h : harmonics_) {
        if (h.k < 1) throw std::invalid_argument("PeriodicSignal: harmonic index must be >= 1");
        if (!seen.insert(h.k).second) {
            throw std::invalid_argument("PeriodicSignal: duplicate harmonic index");
        }
        if (!std::isfinite(h.cos_coeff) || !std::isfinite(h.sin_coeff)) {
            throw std::invalid_argument("PeriodicSignal: non-finite coefficient");
        }
    }
    std::sort(harmonics_.begin(), harmonics_.end(),
              [](const Harmonic& a, const Harmonic& b) { return a.k < b.k; });
}

PeriodicSignal PeriodicSignal::sine(double amplitude, double period) {
    return PeriodicSignal(period, {Harmonic{1, 0.0, amplitude}});
}

bool PeriodicSignal::is_zero() const {
    return std::all_of(harmonics_.begin(), harmonics_.end(), [](const Harmonic& h) {
        return h.cos_coeff == 0.0 && h.sin_coeff == 0.0;
    });
}

double PeriodicSignal::eval(double t) const {
    const double w = 2.0 * std::numbers::pi / period_;
    double sum = 0.0;
    for (const auto& h : harmonics_) {
        const double arg = w * h.k * t;
        sum += h.cos_coeff * std::cos(arg) + h.sin_coeff * std::sin(arg);
    }
    return sum;
}

double PeriodicSignal::derivative(double t) const {
    const double w = 2.0 * std::numbers::pi / period_;
    double sum = 0.0;
    for (const auto& h : harmonics_) {
        const double wk = w * h.k;
        sum += wk * (h.sin_coeff * std::cos(wk * t) - h.cos_coeff * std::sin(wk * t));
    }
    return sum;
}

PeriodicSignal PeriodicSignal::scaled(double factor) const {
    std::vector<Harmonic> hs = harmonics_;
    for (auto& h : hs) {
        // + 0.0 turns a signed zero into +0 so serialized output stays stable
        h.cos_coeff = h.cos_coeff * factor + 0.0;
        h.sin_coeff = h.sin_coeff * factor + 0.0;
    }
    return PeriodicSignal(period_, std::move(hs));
}

QuadratureGrid::QuadratureGrid(double period, int n_intervals) : period_(period), n_(n_intervals) {
    if (!(period > 0.0)) throw std::invalid_argument("QuadratureGrid: period must be positive");
    if (n_intervals < 16 || n_intervals % 2 != 0) {
        throw std::invalid_argument("QuadratureGrid: need an even number of intervals >= 16");
    }
}

double integrate(const PeriodicSignal& s, double a, double b, const QuadratureGrid& grid) {
    return integrate([&s](double t) { return s.eval(t); }, a, b, grid);
}

PeriodicSignal zero_mean_antiderivative(const PeriodicSignal& s) {
    // int (c cos wt + d sin wt) = (c/w) sin wt - (d/w) cos wt, already mean-zero.
    const double w = 2.0 * std::numbers::pi / s.period();
    std::vector<Harmonic> out;
    out.reserve(s.harmonics().size());
    for (const auto& h : s.harmonics()) {
        const double wk = w * h.k;
        out.push_back({h.k, -h.sin_coeff / wk, h.cos_coeff / wk});
    }
    return PeriodicSignal(s.period(), std::move(out));
}

namespace {

// Golden-section search for the maximum of |s| on [a, b].
template <class S>
double refine_peak(const S& s, double a, double b) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = std::abs(s.eval(x1));
    double f2 = std::abs(s.eval(x2));
    for (int it = 0; it < 60 && b - a > 1e-13 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = std::abs(s.eval(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = std::abs(s.eval(x1));
        }
    }
    return std::max(f1, f2);
}

// Nodes and midpoints, then local refinement of the sampled peaks that come close to the
// best sample (plain sampling can miss a peak by O(h^2)).
template <class S>
double grid_sup(const S& s, const QuadratureGrid& grid) {
    const int n = 2 * grid.size();
    const double h = 0.5 * grid.step();
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = std::abs(s.eval(h * j));
    const double sampled = *std::max_element(v.begin(), v.end());
    if (sampled == 0.0) return 0.0;
    double best = sampled;
    for (int j = 0; j < n; ++j) {
        const double here = v[static_cast<std::size_t>(j)];
        const double prev = v[static_cast<std::size_t>((j + n - 1) % n)];
        const double next = v[static_cast<std::size_t>((j + 1) % n)];
        if (here >= prev && here >= next && here >= (1.0 - 1e-3) * sampled) {
            best = std::max(best, refine_peak(s, h * (j - 1), h * (j + 1)));
        }
    }
    return best;
}

}  // namespace

double sup_norm(const PeriodicSignal& s, const QuadratureGrid& grid) { return grid_sup(s, grid); }

double sup_norm(const OffsetSignal& s, const QuadratureGrid& grid) { return grid_sup(s, grid); }

std::vector<double> sample(const PeriodicSignal& s, const QuadratureGrid& grid) {
    std::vector<double> out(static_cast<std::size_t>(grid.size()) + 1);
    for (int i = 0; i <= grid.size(); ++i) out[static_cast<std::size_t>(i)] = s.eval(grid.node(i));
    return out;
}

void to_json(nlohmann::json& j, const PeriodicSignal& s) {
    nlohmann::json hs = nlohmann::json::array();
    for (const auto& h : s.harmonics()) {
        hs.push_back({{"k", h.k}, {"cos", h.cos_coeff}, {"sin", h.sin_coeff}});
    }
    j = nlohmann::json{{"period", s.period()}, {"harmonics", hs}};
}

void from_json(const nlohmann::json& j, PeriodicSignal& s) {
    if (!j.is_object()) throw std::invalid_argument("signal: expected a JSON object");
    const double period = j.value("period", 2.0 * std::numbers::pi);
    std::vector<Harmonic> hs;
    if (j.contains("harmonics")) {
        for (const auto& h : j.at("harmonics")) {
            hs.push_back({h.at("k").get<int>(), h.value("cos", 0.0), h.value("sin", 0.0)});
        }
    }
    s = PeriodicSignal(period, std::move(hs));
}

void to_json(nlohmann::json& j, const OffsetSignal& s) {
    to_json(j, s.oscillation);
    j["offset"] = s.offset;
}

void from_json(const nlohmann::json& j, OffsetSignal& s) {
    from_json(j, s.oscillation);
    s.offset = j.value("offset", 0.0);
}

}  // namespace kapitza
