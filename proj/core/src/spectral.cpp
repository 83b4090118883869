#include "suploc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace suploc {

namespace {

void require_interior(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) throw std::domain_error(std::string(what) + " must be in (0,1)");
}

// f_v extended by continuity to t in [0,1]; f_v is bounded at both ends.
double basis_density_ext(double v, double t) {
    const double z = entropy_Z(v);
    if (t <= v) return (1.0 - v) / z / (1.0 - t);
    return v / z / t;
}

}  // namespace

double entropy_Z(double v) {
    require_interior(v, "entropy_Z: v");
    return -v * std::log(v) - (1.0 - v) * std::log(1.0 - v);
}

double basis_density(double v, double t) {
    require_interior(v, "basis_density: v");
    require_interior(t, "basis_density: t");
    return basis_density_ext(v, t);
}

double basis_cdf(double v, double t) {
    require_interior(v, "basis_cdf: v");
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double z = entropy_Z(v);
    if (t <= v) return (1.0 - v) / z * (-std::log1p(-t));
    return ((1.0 - v) * (-std::log1p(-v)) + v * (std::log(t) - std::log(v))) / z;
}

double h_threshold(double v, double t) {
    require_interior(v, "h_threshold: v");
    require_interior(t, "h_threshold: t");
    if (v < t) return t;
    return v / (1.0 - v) * (1.0 - t);
}

double entropy_bound(double t) {
    require_interior(t, "entropy_bound: t");
    return 1.0 / entropy_Z(t);
}

double basis_density_reversible(double v, double t) {
    if (!(v > 0.0 && v <= 0.5)) throw std::domain_error("basis_density_reversible: v must be in (0, 1/2]");
    require_interior(t, "basis_density_reversible: t");
    const double two_z = 2.0 * entropy_Z(v);
    if (t < v) return 1.0 / (two_z * (1.0 - t));
    if (t < 1.0 - v) return v / two_z * (1.0 / t + 1.0 / (1.0 - t));
    return 1.0 / (two_z * t);
}

double reversible_bound(double t) {
    require_interior(t, "reversible_bound: t");
    const double z = entropy_Z(t);
    if (t < 0.5) return 1.0 / (2.0 * (1.0 - t) * z);
    return 1.0 / (2.0 * t * z);
}

double MixtureMeasure::total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.mass;
    return m;
}

void MixtureMeasure::validate(double mass_tol) const {
    for (const auto& a : atoms) {
        if (!(a.v > 0.0 && a.v < 1.0)) throw std::domain_error("MixtureMeasure: atom v must be in (0,1)");
        if (!(a.mass >= 0.0)) throw std::domain_error("MixtureMeasure: atom mass must be >= 0");
    }
    if (total_mass() > 1.0 + mass_tol) throw std::domain_error("MixtureMeasure: total mass exceeds 1");
}

double mixture_density(const MixtureMeasure& mu, double t) {
    require_interior(t, "mixture_density: t");
    double f = 0.0;
    for (const auto& a : mu.atoms) f += a.mass * basis_density_ext(a.v, t);
    return f;
}

double mixture_integral(const MixtureMeasure& mu, double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("mixture_integral: need a <= b");
    double acc = 0.0;
    for (const auto& atom : mu.atoms) acc += atom.mass * (basis_cdf(atom.v, b) - basis_cdf(atom.v, a));
    return acc;
}

void DensityCurve::validate() const {
    if (t_grid.size() != values.size()) throw std::invalid_argument("DensityCurve: grid/value size mismatch");
    if (t_grid.size() < 2) throw std::invalid_argument("DensityCurve: need at least 2 points");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0 && t_grid[i] < 1.0)) throw std::invalid_argument("DensityCurve: t out of (0,1)");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("DensityCurve: t_grid must be strictly increasing");
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw std::invalid_argument("DensityCurve: values must be finite and >= 0");
    }
}

namespace {

void check_sampled_function(const SampledFunction& g) {
    if (g.t.size() != g.g.size() || g.t.size() < 2)
        throw std::invalid_argument("sampled function: size mismatch or too short");
    if (std::abs(g.t.front()) > 1e-12 || std::abs(g.t.back() - 1.0) > 1e-12)
        throw std::invalid_argument("sampled function: must cover [0,1] incl. endpoints");
    for (double x : g.g)
        if (!std::isfinite(x)) throw std::invalid_argument("sampled function: non-finite samples");
}

}  // namespace

double basis_expectation(const SampledFunction& g, double v) {
    check_sampled_function(g);
    require_interior(v, "basis_expectation: v");
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < g.t.size(); ++i) {
        const double fa = g.g[i] * basis_density_ext(v, g.t[i]);
        const double fb = g.g[i + 1] * basis_density_ext(v, g.t[i + 1]);
        integral += 0.5 * (fa + fb) * (g.t[i + 1] - g.t[i]);
    }
    return integral;
}

std::pair<double, double> expectation_bounds(const SampledFunction& g, std::span<const double> v_grid) {
    check_sampled_function(g);
    if (v_grid.empty()) throw std::invalid_argument("expectation_bounds: empty v_grid");

    double lo = std::min(g.g.front(), g.g.back());
    double hi = std::max(g.g.front(), g.g.back());
    for (double v : v_grid) {
        const double integral = basis_expectation(g, v);
        lo = std::min(lo, integral);
        hi = std::max(hi, integral);
    }
    return {lo, hi};
}

ShapeReport check_shape_constraints(const DensityCurve& curve, const ShapeOptions& options) {
    curve.validate();
    const auto& t = curve.t_grid;
    const auto& f = curve.values;
    const std::size_t n = t.size();

    const double h = t[1] - t[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (std::abs((t[i + 1] - t[i]) - h) > 1e-9 * h)
            throw std::invalid_argument("check_shape_constraints: grid must be uniform");

    const bool have_se = !options.std_errors.empty();
    if (have_se && options.std_errors.size() != n)
        throw std::invalid_argument("check_shape_constraints: std_errors size mismatch");
    auto se = [&](std::size_t i) { return have_se ? options.std_errors[i] : 0.0; };

    ShapeReport report;
    auto record = [&](double margin, double& worst) {
        worst = std::max(worst, margin);
        if (margin > 0.0) ++report.violations;
    };

    // Pairwise: f(t_i) <= f(t_j) max(t_j/t_i, (1-t_j)/(1-t_i)).
    const int shift = options.one_bin_shift ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double best_bound = -1.0, best_slack = 0.0;
            for (int dj = -shift; dj <= shift; ++dj) {
                const long long jj = static_cast<long long>(j) + dj;
                if (jj < 0 || jj >= static_cast<long long>(n)) continue;
                const double factor = std::max(t[jj] / t[i], (1.0 - t[jj]) / (1.0 - t[i]));
                const double bound = f[jj] * factor;
                if (bound > best_bound) {
                    best_bound = bound;
                    best_slack = options.se_mult * std::hypot(se(i), factor * se(jj));
                }
            }
            const double tol = options.rel_tol * std::max(std::abs(f[i]), best_bound) + options.abs_tol;
            record(f[i] - best_bound - best_slack - tol, report.pairwise_worst);
        }
    }

    // Discrete one-sided derivative bounds.
    for (std::size_t i = 1; i < n; ++i) {
        const double diff = (f[i] - f[i - 1]) / h;
        const double bound = f[i] / (1.0 - t[i]);
        const double slack = options.se_mult * (std::hypot(se(i), se(i - 1)) / h + se(i) / (1.0 - t[i]));
        const double tol = options.rel_tol * (std::abs(diff) + std::abs(bound)) + options.abs_tol / h;
        record(diff - bound - slack - tol, report.left_deriv_worst);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double diff = (f[i + 1] - f[i]) / h;
        const double bound = -f[i] / t[i];
        const double slack = options.se_mult * (std::hypot(se(i), se(i + 1)) / h + se(i) / t[i]);
        const double tol = options.rel_tol * (std::abs(diff) + std::abs(bound)) + options.abs_tol / h;
        record(bound - diff - slack - tol, report.right_deriv_worst);
    }

    report.pass = (report.violations == 0);
    return report;
}

}  // namespace suploc
