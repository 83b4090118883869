#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "suploc/locations.hpp"
#include "suploc/spectral.hpp"

namespace suploc {

// Interior histogram of a random location plus exact point masses at the
// two boundaries. Mass identity: mass_at_0 + mass_at_1 + sum h * width = 1.
struct DensityEstimate {
    int n_bins = 0;
    double mass_at_0 = 0.0;
    double mass_at_1 = 0.0;
    std::vector<double> heights;
    std::vector<double> std_errors;
    long long n_samples = 0;

    double bin_width() const { return 1.0 / n_bins; }
    double bin_center(int i) const { return (i + 0.5) / n_bins; }
    DensityCurve to_curve() const;
};

DensityEstimate estimate_location_density(std::span<const LocationSample> samples, int bins);

// Rectangle estimates of the mean measure of the local-maxima point
// process: value[k] = mean count per replicate of points with s in [0,1],
// l >= thresholds[k].first, r >= thresholds[k].second. Censored
// coordinates count as exceeding a threshold only when the censor bound
// already does; indeterminate points are dropped and tallied.
struct EmpiricalNu {
    std::vector<std::pair<double, double>> thresholds;
    std::vector<double> values;
    std::vector<double> std_errors;
    std::vector<long long> censor_drops;
    long long n_replicates = 0;
};

// Streaming accumulator (counts are integers, so merges commute exactly
// and results do not depend on worker count or order).
class NuAccumulator {
  public:
    explicit NuAccumulator(std::vector<std::pair<double, double>> thresholds);

    void add(const PointCloud& cloud);
    void merge(const NuAccumulator& other);
    EmpiricalNu finalize() const;

  private:
    std::vector<std::pair<double, double>> thresholds_;
    std::vector<long long> sum_, sum_sq_, drops_;
    long long n_ = 0;
    bool have_window_ = false;
    double w_start_ = 0.0, w_end_ = 0.0, w_step_ = 0.0;

    void check_window(const PointCloud& cloud);
};

EmpiricalNu estimate_nu(std::span<const PointCloud> clouds,
                        const std::vector<std::pair<double, double>>& thresholds);

struct TailFitWindow {
    double lo = 0.0;
    double hi = 0.0;
};

// Log-log least-squares slope of the empirical survival over [lo, hi];
// returns the estimated tail exponent (-slope). Censored bounds w count
// as observations >= w.
double tail_exponent_fit(std::span<const double> values, std::span<const double> censored_bounds,
                         TailFitWindow window);

// Tail exponent of the u-marginal of the point process under the map
// (l,r) -> (u,v) = (l, l/(l+r)). The (u,v) product structure makes the
// u-law independent of the v-window, so the survival is counted over the
// sub-population with a certified v <= v_cap (for grid clouds, counting
// {l >= x} with only the grid floor on r would measure the rectangle
// exponent c1 instead). Default u-window is [4 * step, censor_ceiling/4].
double u_marginal_tail_exponent(std::span<const PointCloud> clouds,
                                std::optional<TailFitWindow> window = {}, double v_cap = 0.5);

// Marginal tail exponents and a product-form check for the factorization
// of the mean measure of a Levy-family point process.
struct FactorizationReport {
    double c1_hat = 0.0;
    double c2_hat = 0.0;
    double product_max_rel_err = 0.0;
    double product_mean_rel_err = 0.0;
    long long n_uncensored = 0;
    long long product_cells_checked = 0;
};

FactorizationReport levy_factorization_check(std::span<const PointCloud> clouds,
                                             std::optional<TailFitWindow> window = {});

// Regularized incomplete beta I_x(a, b) by continued fraction.
double beta_cdf(double a, double b, double x);

struct BetaLaw {
    double a = 1.0;
    double b = 1.0;
    double cdf(double x) const { return beta_cdf(a, b, x); }
};

// Method-of-moments Beta fit: a = m (m(1-m)/s^2 - 1), b analogous.
BetaLaw fit_beta_moments(std::span<const double> samples);

struct KsResult {
    double d = 0.0;
    long long n = 0;
};

// Two-sided Kolmogorov-Smirnov distance against a cdf, evaluating the
// empirical cdf from both sides at tied sample values.
KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

}  // namespace suploc
