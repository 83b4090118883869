#include "suploc/process_sim.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>

namespace suploc {

namespace {

// FFTW plan creation/destruction is not thread-safe; executions via the
// new-array interface are. Plans are cached per transform size and built
// with FFTW_UNALIGNED so any caller buffer is acceptable.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan get_r2c_plan(int m) {
    static std::map<int, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    std::vector<double> in(m);
    std::vector<std::complex<double>> out(m / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(m, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw r2c planning failed");
    cache.emplace(m, p);
    return p;
}

fftw_plan get_c2r_plan(int m) {
    static std::map<int, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> in(m / 2 + 1);
    std::vector<double> out(m);
    fftw_plan p = fftw_plan_dft_c2r_1d(m, reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw c2r planning failed");
    cache.emplace(m, p);
    return p;
}

// fGn autocovariance at integer lag k for step delta:
//   gamma(k) = delta^{2H} (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2
double fgn_autocov(double hurst, double delta, long long k) {
    const double p = 2.0 * hurst;
    const double ka = static_cast<double>(std::llabs(k));
    return 0.5 * std::pow(delta, p) *
           (std::pow(ka + 1.0, p) - 2.0 * std::pow(ka, p) + std::pow(std::abs(ka - 1.0), p));
}

void cumsum_anchored(std::span<const double> increments, std::vector<double>& values) {
    values.resize(increments.size() + 1);
    values[0] = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        acc += increments[i];
        values[i + 1] = acc;
    }
}

void check_finite_anchored(const PathGrid& path) {
    if (path.values.empty() || path.values[0] != 0.0)
        throw std::logic_error("generated path is not anchored at 0");
    for (double v : path.values)
        if (!std::isfinite(v)) throw std::runtime_error("generated path contains non-finite values");
}

}  // namespace

void GridSpec::validate() const {
    if (!(t_start < t_end) || !std::isfinite(t_start) || !std::isfinite(t_end))
        throw std::invalid_argument("GridSpec: need finite t_start < t_end");
    if (n_points < 2) throw std::invalid_argument("GridSpec: n_points must be >= 2");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::brownian: return "brownian";
        case Family::fbm: return "fbm";
        case Family::stable_levy: return "stable_levy";
    }
    return "unknown";
}

double SimSpec::hurst_exponent() const {
    switch (family) {
        case Family::brownian: return 0.5;
        case Family::fbm: return hurst;
        case Family::stable_levy: return 1.0 / alpha;
    }
    return 0.5;
}

void SimSpec::validate() const {
    grid.validate();
    if (replicates < 1) throw std::invalid_argument("SimSpec: replicates must be >= 1");
    if (family == Family::fbm && !(hurst > 0.0 && hurst < 1.0))
        throw std::domain_error("SimSpec: fbm requires 0 < H < 1");
    if (family == Family::stable_levy) {
        if (!(alpha > 0.0 && alpha <= 2.0)) throw std::domain_error("SimSpec: stable requires 0 < alpha <= 2");
        if (!(beta >= -1.0 && beta <= 1.0)) throw std::domain_error("SimSpec: stable requires |beta| <= 1");
    }
}

double fbm_cov(double hurst, double s, double t) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::domain_error("fbm_cov: H must be in (0,1)");
    const double p = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(s), p) + std::pow(std::abs(t), p) - std::pow(std::abs(s - t), p));
}

FbmSampler::FbmSampler(GridSpec grid, double hurst, std::optional<Method> force)
    : grid_(grid), hurst_(hurst) {
    grid_.validate();
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::domain_error("FbmSampler: H must be in (0,1)");

    const int n_inc = grid_.increments();
    const double delta = grid_.step();

    if (force != Method::cholesky) {
        // Minimal even circulant embedding of the Toeplitz increment covariance.
        m_ = std::max(2, 2 * n_inc);
        std::vector<double> row(m_);
        for (int k = 0; k <= n_inc; ++k) row[k] = fgn_autocov(hurst_, delta, k);
        for (int k = 1; k < n_inc; ++k) row[m_ - k] = row[k];

        std::vector<std::complex<double>> freq(m_ / 2 + 1);
        fftw_execute_dft_r2c(get_r2c_plan(m_), row.data(), reinterpret_cast<fftw_complex*>(freq.data()));

        double lambda_max = 0.0, lambda_min = 0.0;
        for (const auto& z : freq) {
            lambda_max = std::max(lambda_max, z.real());
            lambda_min = std::min(lambda_min, z.real());
        }

        // The minimal fGn embedding is nonnegative in theory; tolerate
        // roundoff, fall back to Cholesky on a genuine failure.
        if (lambda_min >= -1e-9 * lambda_max) {
            method_ = Method::davies_harte;
            spectrum_sd_.resize(freq.size());
            for (std::size_t j = 0; j < freq.size(); ++j)
                spectrum_sd_[j] = std::sqrt(std::max(0.0, freq[j].real()) / m_);
            return;
        }
        if (force == Method::davies_harte)
            throw std::runtime_error("FbmSampler: circulant embedding not nonnegative");
    }

    method_ = Method::cholesky;
    if (n_inc > 4096)
        throw std::runtime_error("FbmSampler: circulant embedding not nonnegative and grid too large for Cholesky fallback");
    Eigen::MatrixXd cov(n_inc, n_inc);
    for (int i = 0; i < n_inc; ++i)
        for (int j = 0; j < n_inc; ++j) cov(i, j) = fgn_autocov(hurst_, delta, i - j);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("FbmSampler: Cholesky factorization of increment covariance failed");
    Eigen::MatrixXd L = llt.matrixL();
    chol_.assign(n_inc * static_cast<std::size_t>(n_inc), 0.0);
    for (int i = 0; i < n_inc; ++i)
        for (int j = 0; j <= i; ++j) chol_[static_cast<std::size_t>(i) * n_inc + j] = L(i, j);
}

PathGrid FbmSampler::sample(std::uint64_t master_seed, std::uint64_t replicate_index) const {
    const int n_inc = grid_.increments();
    std::mt19937_64 rng(replicate_seed(master_seed, replicate_index));
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> fgn(n_inc);
    if (method_ == Method::davies_harte) {
        const int half = m_ / 2;
        std::vector<std::complex<double>> freq(half + 1);
        freq[0] = spectrum_sd_[0] * normal(rng);
        const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
        for (int j = 1; j < half; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            freq[j] = spectrum_sd_[j] * inv_sqrt2 * std::complex<double>(re, im);
        }
        freq[half] = spectrum_sd_[half] * normal(rng);

        std::vector<double> out(m_);
        fftw_execute_dft_c2r(get_c2r_plan(m_), reinterpret_cast<fftw_complex*>(freq.data()), out.data());
        std::copy_n(out.begin(), n_inc, fgn.begin());
    } else {
        std::vector<double> z(n_inc);
        for (auto& g : z) g = normal(rng);
        for (int i = 0; i < n_inc; ++i) {
            double acc = 0.0;
            const double* row = &chol_[static_cast<std::size_t>(i) * n_inc];
            for (int j = 0; j <= i; ++j) acc += row[j] * z[j];
            fgn[i] = acc;
        }
    }

    PathGrid path;
    path.grid = grid_;
    path.hurst = hurst_;
    cumsum_anchored(fgn, path.values);
    check_finite_anchored(path);
    return path;
}

double sample_standard_stable(double alpha, double beta, std::mt19937_64& rng) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::domain_error("sample_standard_stable: alpha out of (0,2]");
    if (!(beta >= -1.0 && beta <= 1.0)) throw std::domain_error("sample_standard_stable: |beta| must be <= 1");

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double pi = std::numbers::pi;
    const double v = pi * (unif(rng) - 0.5);          // Uniform(-pi/2, pi/2)
    const double w = -std::log(1.0 - unif(rng));      // Exp(1)

    if (alpha == 1.0) {
        const double half_pi = pi / 2.0;
        const double a = half_pi + beta * v;
        return (a * std::tan(v) - beta * std::log((half_pi * w * std::cos(v)) / a)) / half_pi;
    }

    const double tb = beta * std::tan(pi * alpha / 2.0);
    const double b = std::atan(tb) / alpha;
    const double s = std::pow(1.0 + tb * tb, 0.5 / alpha);
    const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                     std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
    // CMS at alpha = 2 yields N(0,2); normalize to the standard Brownian scale.
    return alpha == 2.0 ? x / std::numbers::sqrt2 : x;
}

PathGrid gen_fbm(const SimSpec& spec, long long replicate_index) {
    if (spec.family != Family::fbm) throw std::invalid_argument("gen_fbm: spec.family must be fbm");
    spec.validate();
    FbmSampler sampler(spec.grid, spec.hurst);
    return sampler.sample(spec.master_seed, static_cast<std::uint64_t>(replicate_index));
}

PathGrid gen_stable_levy(const SimSpec& spec, long long replicate_index) {
    if (spec.family != Family::stable_levy)
        throw std::invalid_argument("gen_stable_levy: spec.family must be stable_levy");
    spec.validate();

    const int n_inc = spec.grid.increments();
    const double scale = std::pow(spec.grid.step(), 1.0 / spec.alpha);
    std::mt19937_64 rng(replicate_seed(spec.master_seed, static_cast<std::uint64_t>(replicate_index)));

    std::vector<double> inc(n_inc);
    for (auto& x : inc) x = scale * sample_standard_stable(spec.alpha, spec.beta, rng);

    PathGrid path;
    path.grid = spec.grid;
    path.hurst = 1.0 / spec.alpha;
    cumsum_anchored(inc, path.values);
    check_finite_anchored(path);
    return path;
}

PathGrid gen_brownian(const SimSpec& spec, long long replicate_index) {
    spec.validate();
    const int n_inc = spec.grid.increments();
    const double sqrt_dt = std::sqrt(spec.grid.step());
    std::mt19937_64 rng(replicate_seed(spec.master_seed, static_cast<std::uint64_t>(replicate_index)));
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> inc(n_inc);
    for (auto& x : inc) x = sqrt_dt * normal(rng);

    PathGrid path;
    path.grid = spec.grid;
    path.hurst = 0.5;
    cumsum_anchored(inc, path.values);
    check_finite_anchored(path);
    return path;
}

PathGrid gen_path(const SimSpec& spec, long long replicate_index) {
    switch (spec.family) {
        case Family::brownian: return gen_brownian(spec, replicate_index);
        case Family::fbm: return gen_fbm(spec, replicate_index);
        case Family::stable_levy: return gen_stable_levy(spec, replicate_index);
    }
    throw std::invalid_argument("gen_path: unknown family");
}

PathSampler::PathSampler(SimSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    if (spec_.family == Family::fbm)
        fbm_ = std::make_shared<const FbmSampler>(spec_.grid, spec_.hurst);
}

PathGrid PathSampler::operator()(long long replicate_index) const {
    if (fbm_) return fbm_->sample(spec_.master_seed, static_cast<std::uint64_t>(replicate_index));
    return gen_path(spec_, replicate_index);
}

std::string PathSampler::method_note() const {
    if (!fbm_) return "";
    return fbm_->method() == FbmSampler::Method::davies_harte ? "davies_harte" : "cholesky";
}

}  // namespace suploc
