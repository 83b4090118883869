#pragma once

#include <optional>
#include <span>
#include <vector>

namespace suploc {

// Binary entropy in nats: Z(v) = -v ln v - (1-v) ln(1-v), v in (0,1).
double entropy_Z(double v);

// Two-branch basis density on (0,1):
//   f_v(t) = (1-v)/Z(v) * (1-t)^-1   for t <= v
//   f_v(t) =     v/Z(v) *  t^-1      for t  > v
// Each f_v integrates to 1 and attains the entropy bound at t = v.
double basis_density(double v, double t);

// Antiderivative: F_v(t) = integral of f_v over (0, t], closed form.
double basis_cdf(double v, double t);

// Threshold curve: the rectangle [t,inf) x [1-t,inf) in (l,r) maps under
// (l,r) -> (u,v) = (l, l/(l+r)) to { u >= h(v,t) } with
//   h(v,t) = t            for v <  t
//   h(v,t) = v(1-t)/(1-v) for v >= t
double h_threshold(double v, double t);

// Universal density bound 1/Z(t); tight along the basis at t = v.
double entropy_bound(double t);

// Symmetrized basis for time-reversible processes, v in (0, 1/2]:
// equals (f_v(t) + f_{1-v}(t)) / 2.
double basis_density_reversible(double v, double t);

// Density bound for time-reversible processes:
//   1/(2(1-t)) / Z(t) for t < 1/2,  1/(2t) / Z(t) for t >= 1/2.
double reversible_bound(double t);

struct MixtureAtom {
    double v = 0.5;
    double mass = 0.0;
};

// Discrete sub-probability measure on (0,1).
struct MixtureMeasure {
    std::vector<MixtureAtom> atoms;

    double total_mass() const;
    void validate(double mass_tol = 1e-9) const;  // v in (0,1), mass >= 0, total <= 1 + tol
};

// Pointwise mixture density: sum_j mass_j * f_{v_j}(t).
double mixture_density(const MixtureMeasure& mu, double t);

// Exact integral of the mixture density over (a, b] via basis antiderivatives.
double mixture_integral(const MixtureMeasure& mu, double a, double b);

// A density curve sampled on a strictly increasing grid inside (0,1).
struct DensityCurve {
    std::vector<double> t_grid;
    std::vector<double> values;

    void validate() const;
};

// A function sampled on [0,1] including both endpoints.
struct SampledFunction {
    std::vector<double> t;
    std::vector<double> g;
};

// Trapezoid quadrature of integral g(t) f_v(t) dt on the sample grid of g
// (f_v extended continuously to the endpoints, where it is bounded).
double basis_expectation(const SampledFunction& g, double v);

// Envelope for E[g(location)] over all laws in the mixture class:
//   lower = min{ g(0), g(1), min_v integral(g f_v) }, upper analogous.
std::pair<double, double> expectation_bounds(const SampledFunction& g, std::span<const double> v_grid);

struct ShapeOptions {
    double rel_tol = 1e-12;  // "exact" slack for closed-form curves
    double abs_tol = 1e-12;
    std::vector<double> std_errors;  // per-point, empirical curves only
    double se_mult = 3.0;
    bool one_bin_shift = false;  // tolerate one-bin misalignment of empirical curves
};

struct ShapeReport {
    double pairwise_worst = 0.0;     // worst margin of f(t) <= f(s) max(s/t, (1-s)/(1-t))
    double left_deriv_worst = 0.0;   // worst margin of backward difference <= f(t)/(1-t)
    double right_deriv_worst = 0.0;  // worst margin of forward difference >= -f(t)/t
    long long violations = 0;
    bool pass = true;
};

// Checks the pairwise density inequality and the discrete one-sided
// derivative bounds on a uniform-grid curve.
ShapeReport check_shape_constraints(const DensityCurve& curve, const ShapeOptions& options = {});

}  // namespace suploc
