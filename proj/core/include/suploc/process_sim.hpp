#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace suploc {

// Uniform sampling grid on [t_start, t_end] with n_points >= 2.
struct GridSpec {
    double t_start = 0.0;
    double t_end = 1.0;
    int n_points = 2;

    double step() const { return (t_end - t_start) / (n_points - 1); }
    double point(int k) const { return t_start + k * step(); }
    int increments() const { return n_points - 1; }
    void validate() const;  // throws std::invalid_argument

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// A sampled path, anchored so values[0] == 0. hurst is the
// self-similarity exponent of the generating family (metadata).
struct PathGrid {
    GridSpec grid;
    std::vector<double> values;
    double hurst = 0.5;
};

enum class Family { brownian, fbm, stable_levy };

std::string family_name(Family f);

struct SimSpec {
    Family family = Family::brownian;
    double hurst = 0.5;  // fbm: H in (0,1)
    double alpha = 2.0;  // stable: alpha in (0,2]
    double beta = 0.0;   // stable: skewness in [-1,1]
    GridSpec grid;
    std::uint64_t master_seed = 0;
    long long replicates = 1;

    // H for fbm, 1/alpha for stable, 1/2 for brownian
    double hurst_exponent() const;
    void validate() const;  // throws std::domain_error / std::invalid_argument
};

// SplitMix64 finalizer; full-avalanche mix of 64 bits.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-replicate seed as an avalanche mix of (master_seed, replicate_index),
// so replicate streams do not depend on scheduling or worker count.
inline std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate_index) {
    return mix64(master_seed + 0x9e3779b97f4a7c15ULL * (replicate_index + 1));
}

// Fractional Brownian motion covariance, Var X(1) = 1 normalization:
//   cov(s,t) = (|s|^{2H} + |t|^{2H} - |s-t|^{2H}) / 2
double fbm_cov(double hurst, double s, double t);

// Reusable fractional-Gaussian-noise sampler over a fixed (grid, H).
// Precomputes the circulant-embedding spectrum (Davies-Harte) once;
// falls back to a Cholesky factor of the increment covariance if the
// embedding has a negative eigenvalue. Immutable after construction,
// safe to call sample() concurrently.
class FbmSampler {
  public:
    enum class Method { davies_harte, cholesky };

    // `force` pins the generation method (Cholesky is the cross-check /
    // fallback route); by default Davies-Harte is used whenever the
    // circulant embedding is nonnegative.
    FbmSampler(GridSpec grid, double hurst, std::optional<Method> force = {});

    PathGrid sample(std::uint64_t master_seed, std::uint64_t replicate_index) const;
    Method method() const { return method_; }
    const GridSpec& grid() const { return grid_; }

  private:
    GridSpec grid_;
    double hurst_;
    Method method_;
    int m_ = 0;                           // embedding size, 2 * increments
    std::vector<double> spectrum_sd_;     // sqrt(lambda_j / m), j = 0..m/2
    std::vector<double> chol_;            // row-major lower triangle, fallback only
};

// One-shot generators; a pure function of (spec, replicate_index).
PathGrid gen_fbm(const SimSpec& spec, long long replicate_index);
PathGrid gen_stable_levy(const SimSpec& spec, long long replicate_index);
PathGrid gen_brownian(const SimSpec& spec, long long replicate_index);
PathGrid gen_path(const SimSpec& spec, long long replicate_index);

// Standard strictly stable variate (Chambers-Mallows-Stuck), unit scale.
// At alpha == 2 the raw CMS output is N(0,2); it is rescaled by 1/sqrt(2)
// so alpha = 2 coincides in law with a standard normal.
double sample_standard_stable(double alpha, double beta, std::mt19937_64& rng);

// Shared-spectrum path factory for Monte Carlo loops: construction cost is
// paid once, operator() is safe to call from many threads.
class PathSampler {
  public:
    explicit PathSampler(SimSpec spec);
    PathGrid operator()(long long replicate_index) const;
    const SimSpec& spec() const { return spec_; }
    // non-empty for fbm: which generation method the sampler settled on
    std::string method_note() const;

  private:
    SimSpec spec_;
    std::shared_ptr<const FbmSampler> fbm_;
};

}  // namespace suploc
