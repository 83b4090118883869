#include "suploc/mixture_inverse.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "suploc/empirics.hpp"

using namespace suploc;

namespace {

std::vector<double> uniform_t_grid(int n) {
    std::vector<double> t(n);
    for (int i = 1; i <= n; ++i) t[i - 1] = static_cast<double>(i) / (n + 1);
    return t;
}

DensityCurve curve_from_mixture(const MixtureMeasure& mu, const std::vector<double>& t_grid) {
    DensityCurve c;
    c.t_grid = t_grid;
    for (double t : t_grid) c.values.push_back(mixture_density(mu, t));
    return c;
}

double l2(const DesignMatrix& A, std::span<const double> w, std::span<const double> b) {
    double acc = 0.0;
    for (int i = 0; i < A.rows(); ++i) {
        double r = -b[i];
        for (int j = 0; j < A.cols(); ++j) r += A.at(i, j) * w[j];
        acc += r * r;
    }
    return std::sqrt(acc);
}

}  // namespace

TEST_CASE("design matrix entries, symmetry, bound") {
    const auto one = build_design(std::vector<double>{0.5}, std::vector<double>{0.5});
    CHECK(one.at(0, 0) == doctest::Approx(1.4426950408889634).epsilon(1e-15));

    const auto t_grid = uniform_t_grid(199);  // symmetric grid
    const auto d = build_design(t_grid, std::vector<double>{0.3, 0.7});
    for (int i = 0; i < d.rows(); ++i) {
        // columns for v and 1-v are reverses of each other
        CHECK(d.at(i, 0) == doctest::Approx(d.at(d.rows() - 1 - i, 1)).epsilon(1e-13));
        for (int j = 0; j < d.cols(); ++j) {
            CHECK(d.at(i, j) > 0.0);
            CHECK(d.at(i, j) <= entropy_bound(d.t_grid[i]) * (1.0 + 1e-12));
        }
    }

    CHECK_THROWS_AS(build_design(std::vector<double>{0.0, 0.5}, std::vector<double>{0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_design(std::vector<double>{0.5}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("column quadrature sums approximate 1") {
    const auto t_grid = uniform_t_grid(999);
    const auto d = build_design(t_grid, std::vector<double>{0.2, 0.5, 0.8});
    const double h = t_grid[1] - t_grid[0];
    for (int j = 0; j < d.cols(); ++j) {
        double acc = 0.0;
        for (int i = 0; i + 1 < d.rows(); ++i) acc += 0.5 * (d.at(i, j) + d.at(i + 1, j)) * h;
        CHECK(acc == doctest::Approx(1.0).epsilon(5e-3));  // edge truncation only
    }
}

TEST_CASE("nnls round trip on well-separated atoms") {
    const auto t_grid = uniform_t_grid(200);
    const auto v_grid = default_v_grid(99);
    const auto design = build_design(t_grid, v_grid);

    std::vector<double> w0(v_grid.size(), 0.0);
    w0[19] = 0.3;   // v = 0.2
    w0[49] = 0.45;  // v = 0.5
    w0[79] = 0.15;  // v = 0.8
    std::vector<double> b(t_grid.size(), 0.0);
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        for (std::size_t j = 0; j < v_grid.size(); ++j) b[i] += design.at(i, j) * w0[j];

    const auto sol = nnls_solve(design, b);
    CHECK(sol.residual_l2 <= 1e-8);
    CHECK(l2(design, sol.weights, b) == doctest::Approx(sol.residual_l2).epsilon(1e-9));
    for (double w : sol.weights) CHECK(w >= 0.0);
}

TEST_CASE("nnls degenerate inputs") {
    const auto design = build_design(uniform_t_grid(50), default_v_grid(19));
    std::vector<double> zero(50, 0.0);
    const auto sol = nnls_solve(design, zero);
    for (double w : sol.weights) CHECK(w == 0.0);
    CHECK(sol.residual_l2 == 0.0);

    std::vector<double> neg(50, 0.1);
    neg[3] = -0.5;
    CHECK_THROWS_AS(nnls_solve(design, neg), std::invalid_argument);
    std::vector<double> short_b(10, 0.1);
    CHECK_THROWS_AS(nnls_solve(design, short_b), std::invalid_argument);
}

TEST_CASE("mass cap is enforced exactly") {
    const auto t_grid = uniform_t_grid(120);
    const auto v_grid = default_v_grid(39);
    const auto design = build_design(t_grid, v_grid);

    // b = 2 * f_{0.5} wants total mass 2; cap it at 1
    std::vector<double> b;
    for (double t : t_grid) b.push_back(2.0 * basis_density(0.5, t));
    NnlsOptions opts;
    opts.mass_cap = 1.0;
    const auto sol = nnls_solve(design, b, opts);
    double mass = 0.0;
    for (double w : sol.weights) {
        CHECK(w >= 0.0);
        mass += w;
    }
    CHECK(mass <= 1.0 + 1e-9);
    CHECK(mass >= 1.0 - 1e-6);  // the cap binds
}

TEST_CASE("fit_mixture recovers a single atom") {
    const auto v_grid = default_v_grid(199);
    MixtureMeasure truth{{{0.5, 1.0}}};
    const auto curve = curve_from_mixture(truth, uniform_t_grid(200));
    const auto fit = fit_mixture(curve, v_grid, 1.0);

    CHECK(fit.report.l2 <= 1e-8);
    CHECK(fit.report.total_mass == doctest::Approx(1.0).epsilon(1e-6));
    // mass concentrates within one grid step of v = 0.5
    const double step = v_grid[1] - v_grid[0];
    double near = 0.0;
    for (const auto& a : fit.measure.atoms)
        if (std::abs(a.v - 0.5) <= step + 1e-12) near += a.mass;
    CHECK(near >= 0.99);
}

TEST_CASE("fit_mixture of the arcsine density") {
    // Beta(1/2,1/2) lies in the closure of the basis class but not on a
    // finite atom set; the fit is close with total mass ~ 1
    std::vector<double> t_grid = uniform_t_grid(200);
    DensityCurve arcsine;
    arcsine.t_grid = t_grid;
    for (double t : t_grid)
        arcsine.values.push_back(1.0 / (std::numbers::pi * std::sqrt(t * (1.0 - t))));

    const auto fit = fit_mixture(arcsine, default_v_grid(199), 1.0);
    CHECK(fit.report.total_mass <= 1.0 + 1e-9);
    CHECK(fit.report.total_mass >= 0.93);
    CHECK(fit.report.l2 / std::sqrt(static_cast<double>(t_grid.size())) < 0.05);  // rms misfit
    MESSAGE("arcsine fit: l2=", fit.report.l2, " sup=", fit.report.sup, " mass=", fit.report.total_mass);
}

TEST_CASE("fit_mixture of the zero curve is the empty measure") {
    DensityCurve zero;
    zero.t_grid = uniform_t_grid(50);
    zero.values.assign(50, 0.0);
    const auto fit = fit_mixture(zero, default_v_grid(49), 1.0);
    CHECK(fit.measure.atoms.empty());
    CHECK(fit.report.total_mass == 0.0);
    CHECK(fit.report.l2 == 0.0);
}

TEST_CASE("refining the atom grid never increases the misfit") {
    const auto t_grid = uniform_t_grid(150);
    DensityCurve target;
    target.t_grid = t_grid;
    for (double t : t_grid)
        target.values.push_back(1.0 / (std::numbers::pi * std::sqrt(t * (1.0 - t))));

    // 39-atom grid is a subset of the 79-atom grid (j/40 == 2j/80)
    const auto coarse = fit_mixture(target, default_v_grid(39), 1.0);
    const auto fine = fit_mixture(target, default_v_grid(79), 1.0);
    CHECK(fine.report.l2 <= coarse.report.l2 + 1e-10);
}

TEST_CASE("reproduction matches the reported residual") {
    MixtureMeasure truth{{{0.25, 0.4}, {0.7, 0.35}}};
    const auto curve = curve_from_mixture(truth, uniform_t_grid(128));
    const auto fit = fit_mixture(curve, default_v_grid(63), 1.0);
    REQUIRE(fit.report.reproduced.size() == curve.values.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < curve.values.size(); ++i)
        sup = std::max(sup, std::abs(fit.report.reproduced[i] - curve.values[i]));
    CHECK(sup == doctest::Approx(fit.report.sup).epsilon(1e-12));
    CHECK(fit.report.total_mass <= 1.0 + 1e-9);
    // reproduced curve re-evaluates from the recovered measure
    for (std::size_t i = 0; i < curve.t_grid.size(); i += 10)
        CHECK(mixture_density(fit.measure, curve.t_grid[i]) ==
              doctest::Approx(fit.report.reproduced[i]).epsilon(1e-9));
}

TEST_CASE("sub-probability output for sub-probability input") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uv(0.05, 0.95), uw(0.0, 1.0);
    for (int it = 0; it < 10; ++it) {
        MixtureMeasure mu;
        double total = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double w = uw(rng);
            mu.atoms.push_back({uv(rng), w});
            total += w;
        }
        const double target_mass = 0.2 + 0.8 * uw(rng);  // <= 1
        for (auto& a : mu.atoms) a.mass *= target_mass / total;

        const auto curve = curve_from_mixture(mu, uniform_t_grid(160));
        const auto fit = fit_mixture(curve, default_v_grid(79), 1.0);
        CHECK(fit.report.total_mass <= 1.0 + 1e-9);
        CHECK(fit.report.total_mass == doctest::Approx(target_mass).epsilon(0.02));
    }
}

TEST_CASE("ridge damping is available and keeps feasibility") {
    MixtureMeasure truth{{{0.5, 0.8}}};
    const auto curve = curve_from_mixture(truth, uniform_t_grid(100));
    NnlsOptions opts;
    opts.ridge = 1e-6;
    const auto fit = fit_mixture(curve, default_v_grid(99), 1.0, opts);
    CHECK(fit.report.total_mass <= 1.0 + 1e-9);
    CHECK(fit.report.l2 < 0.01);
}
