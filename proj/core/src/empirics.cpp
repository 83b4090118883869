#include "suploc/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace suploc {

namespace {

// Censor-aware threshold test: returns whether the coordinate certainly
// exceeds thr; `indeterminate` is set when censoring leaves it unknown.
bool exceeds(const ReturnDistance& d, double thr, bool& indeterminate) {
    indeterminate = false;
    if (!d.censored) return d.value >= thr;
    if (d.value >= thr) return true;  // true distance is beyond the scanned bound
    indeterminate = true;
    return false;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> x(n);
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < n; ++i) x[i] = std::exp(la + (lb - la) * i / (n - 1));
    return x;
}

// least-squares slope of y on x
double ls_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw std::runtime_error("tail fit: degenerate threshold grid");
    return sxy / sxx;
}

double survival_slope(const std::vector<double>& sorted_values, const std::vector<double>& sorted_bounds,
                      TailFitWindow window, int n_thresholds) {
    if (!(window.lo > 0.0 && window.hi > window.lo))
        throw std::invalid_argument("tail fit: need 0 < lo < hi");
    const auto thresholds = log_spaced(window.lo, window.hi, n_thresholds);
    std::vector<double> lx, ly;
    for (double x : thresholds) {
        auto count_ge = [&](const std::vector<double>& v) {
            return v.end() - std::lower_bound(v.begin(), v.end(), x);
        };
        const long long count = count_ge(sorted_values) + count_ge(sorted_bounds);
        if (count <= 0) continue;
        lx.push_back(std::log(x));
        ly.push_back(std::log(static_cast<double>(count)));
    }
    if (lx.size() < 5) throw std::runtime_error("tail fit: insufficient occupied thresholds");
    return -ls_slope(lx, ly);
}

TailFitWindow default_fit_window(const PointCloud& cloud) {
    double ceiling = std::min(0.0 - cloud.window_start, cloud.window_end - 1.0);
    if (ceiling <= 0.0) ceiling = cloud.window_end - cloud.window_start;
    return {4.0 * cloud.step, ceiling / 4.0};
}

}  // namespace

DensityCurve DensityEstimate::to_curve() const {
    DensityCurve c;
    c.t_grid.resize(n_bins);
    c.values = heights;
    for (int i = 0; i < n_bins; ++i) c.t_grid[i] = bin_center(i);
    return c;
}

DensityEstimate estimate_location_density(std::span<const LocationSample> samples, int bins) {
    if (samples.empty()) throw std::invalid_argument("estimate_location_density: no samples");
    if (bins < 2) throw std::invalid_argument("estimate_location_density: bins must be >= 2");

    DensityEstimate est;
    est.n_bins = bins;
    est.n_samples = static_cast<long long>(samples.size());
    std::vector<long long> counts(bins, 0);
    long long n0 = 0, n1 = 0;
    for (const auto& s : samples) {
        if (!(s.value >= 0.0 && s.value <= 1.0))
            throw std::invalid_argument("estimate_location_density: sample outside [0,1]");
        if (s.at_zero) {
            ++n0;
        } else if (s.at_one) {
            ++n1;
        } else {
            int k = static_cast<int>(s.value * bins);
            k = std::clamp(k, 0, bins - 1);
            ++counts[k];
        }
    }

    const double n = static_cast<double>(est.n_samples);
    const double w = est.bin_width();
    est.mass_at_0 = n0 / n;
    est.mass_at_1 = n1 / n;
    est.heights.resize(bins);
    est.std_errors.resize(bins);
    for (int k = 0; k < bins; ++k) {
        const double p = counts[k] / n;
        est.heights[k] = p / w;
        est.std_errors[k] = std::sqrt(p * (1.0 - p) / n) / w;
    }
    return est;
}

NuAccumulator::NuAccumulator(std::vector<std::pair<double, double>> thresholds)
    : thresholds_(std::move(thresholds)) {
    if (thresholds_.empty()) throw std::invalid_argument("NuAccumulator: no thresholds");
    sum_.assign(thresholds_.size(), 0);
    sum_sq_.assign(thresholds_.size(), 0);
    drops_.assign(thresholds_.size(), 0);
}

void NuAccumulator::check_window(const PointCloud& cloud) {
    if (!have_window_) {
        have_window_ = true;
        w_start_ = cloud.window_start;
        w_end_ = cloud.window_end;
        w_step_ = cloud.step;
        for (const auto& [tl, tr] : thresholds_)
            if (tl < 2.0 * w_step_ || tr < 2.0 * w_step_)
                throw std::invalid_argument("estimate_nu: thresholds below 2 grid steps");
        return;
    }
    if (cloud.window_start != w_start_ || cloud.window_end != w_end_ || cloud.step != w_step_)
        throw std::invalid_argument("estimate_nu: clouds extracted with different windows");
}

void NuAccumulator::add(const PointCloud& cloud) {
    check_window(cloud);
    std::vector<long long> counts(thresholds_.size(), 0);
    for (const auto& p : cloud.points) {
        if (p.s < 0.0 || p.s > 1.0) continue;
        for (std::size_t k = 0; k < thresholds_.size(); ++k) {
            bool l_unknown = false, r_unknown = false;
            const bool l_ok = exceeds(p.left, thresholds_[k].first, l_unknown);
            const bool r_ok = exceeds(p.right, thresholds_[k].second, r_unknown);
            if (l_ok && r_ok) {
                ++counts[k];
            } else if ((l_ok || l_unknown) && (r_ok || r_unknown)) {
                ++drops_[k];  // only censoring kept this point out of the rectangle
            }
        }
    }
    for (std::size_t k = 0; k < thresholds_.size(); ++k) {
        sum_[k] += counts[k];
        sum_sq_[k] += counts[k] * counts[k];
    }
    ++n_;
}

void NuAccumulator::merge(const NuAccumulator& other) {
    if (other.thresholds_ != thresholds_) throw std::invalid_argument("NuAccumulator: threshold mismatch");
    if (other.n_ == 0) return;
    if (have_window_ && other.have_window_ &&
        (other.w_start_ != w_start_ || other.w_end_ != w_end_ || other.w_step_ != w_step_))
        throw std::invalid_argument("NuAccumulator: window mismatch");
    if (!have_window_) {
        have_window_ = other.have_window_;
        w_start_ = other.w_start_;
        w_end_ = other.w_end_;
        w_step_ = other.w_step_;
    }
    for (std::size_t k = 0; k < thresholds_.size(); ++k) {
        sum_[k] += other.sum_[k];
        sum_sq_[k] += other.sum_sq_[k];
        drops_[k] += other.drops_[k];
    }
    n_ += other.n_;
}

EmpiricalNu NuAccumulator::finalize() const {
    if (n_ == 0) throw std::runtime_error("NuAccumulator: no replicates added");
    EmpiricalNu out;
    out.thresholds = thresholds_;
    out.n_replicates = n_;
    out.censor_drops = drops_;
    out.values.resize(thresholds_.size());
    out.std_errors.resize(thresholds_.size());
    const double n = static_cast<double>(n_);
    for (std::size_t k = 0; k < thresholds_.size(); ++k) {
        const double mean = sum_[k] / n;
        out.values[k] = mean;
        if (n_ > 1) {
            const double var = (sum_sq_[k] - n * mean * mean) / (n - 1.0);
            out.std_errors[k] = std::sqrt(std::max(0.0, var) / n);
        }
    }
    return out;
}

EmpiricalNu estimate_nu(std::span<const PointCloud> clouds,
                        const std::vector<std::pair<double, double>>& thresholds) {
    if (clouds.empty()) throw std::invalid_argument("estimate_nu: no point clouds");
    NuAccumulator acc(thresholds);
    for (const auto& c : clouds) acc.add(c);
    return acc.finalize();
}

double tail_exponent_fit(std::span<const double> values, std::span<const double> censored_bounds,
                         TailFitWindow window) {
    std::vector<double> v(values.begin(), values.end());
    std::vector<double> c(censored_bounds.begin(), censored_bounds.end());
    std::sort(v.begin(), v.end());
    std::sort(c.begin(), c.end());
    return survival_slope(v, c, window, 25);
}

double u_marginal_tail_exponent(std::span<const PointCloud> clouds, std::optional<TailFitWindow> window,
                                double v_cap) {
    if (clouds.empty()) throw std::invalid_argument("u_marginal_tail_exponent: no point clouds");
    if (!(v_cap > 0.0 && v_cap < 1.0)) throw std::invalid_argument("u_marginal_tail_exponent: v_cap in (0,1)");
    std::vector<double> u;
    const double ratio = (1.0 - v_cap) / v_cap;  // v <= v_cap  iff  r >= l * ratio
    for (const auto& cloud : clouds) {
        for (const auto& p : cloud.points) {
            if (p.s < 0.0 || p.s > 1.0) continue;
            if (p.left.censored) continue;  // u unknown, v not certifiable
            // r (or its censor bound, a lower bound on the true r) certifies v <= v_cap
            if (p.right.value >= p.left.value * ratio) u.push_back(p.left.value);
        }
    }
    if (u.size() < 500) throw std::runtime_error("u_marginal_tail_exponent: need >= 500 uncensored points");
    const TailFitWindow w = window ? *window : default_fit_window(clouds.front());
    return tail_exponent_fit(u, {}, w);
}

FactorizationReport levy_factorization_check(std::span<const PointCloud> clouds,
                                             std::optional<TailFitWindow> window) {
    if (clouds.empty()) throw std::invalid_argument("levy_factorization_check: no point clouds");
    const TailFitWindow w = window ? *window : default_fit_window(clouds.front());
    if (!(w.lo > 0.0 && w.hi > w.lo)) throw std::invalid_argument("levy_factorization_check: bad fit window");

    constexpr int kGrid = 9;
    const auto grid = log_spaced(w.lo, w.hi, kGrid);

    // joint exceedance counts over the threshold grid, censor rule as in estimate_nu
    std::vector<long long> counts(kGrid * kGrid, 0);
    long long n_uncensored = 0;
    for (const auto& cloud : clouds) {
        for (const auto& p : cloud.points) {
            if (p.s < 0.0 || p.s > 1.0) continue;
            if (!p.left.censored && !p.right.censored) ++n_uncensored;
            for (int i = 0; i < kGrid; ++i) {
                bool lu = false, ru = false;
                if (!exceeds(p.left, grid[i], lu)) continue;
                for (int j = 0; j < kGrid; ++j) {
                    if (!exceeds(p.right, grid[j], ru)) break;  // grid is increasing
                    ++counts[i * kGrid + j];
                }
            }
        }
    }
    if (n_uncensored < 1000)
        throw std::runtime_error("levy_factorization_check: need >= 1000 uncensored points");

    auto count_at = [&](int i, int j) { return counts[i * kGrid + j]; };

    std::vector<double> lx1, ly1, lx2, ly2;
    for (int i = 0; i < kGrid; ++i) {
        if (count_at(i, 0) > 0) {
            lx1.push_back(std::log(grid[i]));
            ly1.push_back(std::log(static_cast<double>(count_at(i, 0))));
        }
        if (count_at(0, i) > 0) {
            lx2.push_back(std::log(grid[i]));
            ly2.push_back(std::log(static_cast<double>(count_at(0, i))));
        }
    }
    if (lx1.size() < 5 || lx2.size() < 5)
        throw std::runtime_error("levy_factorization_check: insufficient occupied thresholds");

    FactorizationReport rep;
    rep.n_uncensored = n_uncensored;
    rep.c1_hat = -ls_slope(lx1, ly1);
    rep.c2_hat = -ls_slope(lx2, ly2);

    // product form: N(i,j) N(0,0) == N(i,0) N(0,j) under a factorized measure
    const double base = static_cast<double>(count_at(0, 0));
    double max_err = 0.0, sum_err = 0.0;
    long long cells = 0;
    for (int i = 1; i < kGrid; ++i) {
        for (int j = 1; j < kGrid; ++j) {
            const double joint = static_cast<double>(count_at(i, j));
            const double mi = static_cast<double>(count_at(i, 0));
            const double mj = static_cast<double>(count_at(0, j));
            if (joint < 30.0 || mi < 30.0 || mj < 30.0) continue;  // skip noise-dominated cells
            const double expected = mi * mj / base;
            const double err = std::abs(joint - expected) / expected;
            max_err = std::max(max_err, err);
            sum_err += err;
            ++cells;
        }
    }
    rep.product_cells_checked = cells;
    rep.product_max_rel_err = max_err;
    rep.product_mean_rel_err = cells > 0 ? sum_err / cells : 0.0;
    return rep;
}

double beta_cdf(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw std::domain_error("beta_cdf: a, b must be > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("beta_cdf: x must be in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    // modified Lentz continued fraction for the incomplete beta
    auto betacf = [](double a_, double b_, double x_) {
        constexpr int kMaxIt = 300;
        constexpr double kEps = 1e-16;
        constexpr double kFpMin = 1e-300;
        const double qab = a_ + b_, qap = a_ + 1.0, qam = a_ - 1.0;
        double c = 1.0;
        double d = 1.0 - qab * x_ / qap;
        if (std::abs(d) < kFpMin) d = kFpMin;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= kMaxIt; ++m) {
            const int m2 = 2 * m;
            double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < kFpMin) d = kFpMin;
            c = 1.0 + aa / c;
            if (std::abs(c) < kFpMin) c = kFpMin;
            d = 1.0 / d;
            h *= d * c;
            aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < kFpMin) d = kFpMin;
            c = 1.0 + aa / c;
            if (std::abs(c) < kFpMin) c = kFpMin;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < kEps) return h;
        }
        throw std::runtime_error("beta_cdf: continued fraction did not converge");
    };

    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                         b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

BetaLaw fit_beta_moments(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("fit_beta_moments: need >= 2 samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double x : samples) var += (x - mean) * (x - mean);
    var /= static_cast<double>(samples.size() - 1);

    if (!(mean > 0.0 && mean < 1.0)) throw std::invalid_argument("fit_beta_moments: mean must be in (0,1)");
    if (!(var > 0.0)) throw std::invalid_argument("fit_beta_moments: need positive sample variance");
    const double common = mean * (1.0 - mean) / var - 1.0;
    if (common <= 0.0) throw std::invalid_argument("fit_beta_moments: not a Beta-feasible moment pair");
    return {mean * common, (1.0 - mean) * common};
}

KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());

    double d = 0.0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j + 1 < s.size() && s[j + 1] == s[i]) ++j;
        const double fx = cdf(s[i]);
        const double lo = static_cast<double>(i) / n;        // F_n just below the tie group
        const double hi = static_cast<double>(j + 1) / n;    // F_n at the tie group
        d = std::max({d, fx - lo, hi - fx});
        i = j + 1;
    }
    return {d, static_cast<long long>(s.size())};
}

}  // namespace suploc
