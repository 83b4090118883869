#include "suploc/process_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "suploc/runner.hpp"

using namespace suploc;

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// two-sided KS distance of a sample against a cdf (local copy to keep the
// generator tests independent of the empirics module)
double ks_distance(std::vector<double> s, double (*cdf)(double)) {
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(i / static_cast<double>(a.size()) - j / static_cast<double>(b.size())));
    }
    return d;
}

std::vector<double> increments(const PathGrid& p) {
    std::vector<double> inc(p.values.size() - 1);
    for (std::size_t i = 0; i + 1 < p.values.size(); ++i) inc[i] = p.values[i + 1] - p.values[i];
    return inc;
}

// increment covariance derived from the fbm covariance function (the
// four-term route, independent of the generator's autocovariance formula)
double oracle_inc_cov(double h, const GridSpec& g, int i, int j) {
    return fbm_cov(h, g.point(i + 1), g.point(j + 1)) - fbm_cov(h, g.point(i + 1), g.point(j)) -
           fbm_cov(h, g.point(i), g.point(j + 1)) + fbm_cov(h, g.point(i), g.point(j));
}

}  // namespace

TEST_CASE("fbm_cov closed form") {
    CHECK(fbm_cov(0.5, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fbm_cov(0.3, 0.0, 2.0) == 0.0);
    CHECK(fbm_cov(0.8, 0.0, 0.7) == 0.0);
    // 0.5 * (1 + 2^1.4 - 1) = 2^0.4
    CHECK(fbm_cov(0.7, 1.0, 2.0) == doctest::Approx(1.3195079107728943).epsilon(1e-14));
    CHECK_THROWS_AS(fbm_cov(0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(fbm_cov(1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(fbm_cov(1.3, 1.0, 1.0), std::domain_error);
}

TEST_CASE("replicate seeds are scheduling-free and distinct") {
    CHECK(replicate_seed(42, 0) == replicate_seed(42, 0));
    CHECK(replicate_seed(42, 0) != replicate_seed(42, 1));
    CHECK(replicate_seed(42, 7) != replicate_seed(43, 7));
}

TEST_CASE("generators are deterministic and anchored") {
    SimSpec spec;
    spec.grid = {0.0, 1.0, 257};
    spec.master_seed = 123;

    for (Family fam : {Family::brownian, Family::fbm, Family::stable_levy}) {
        spec.family = fam;
        spec.hurst = 0.7;
        spec.alpha = 1.5;
        const PathGrid a = gen_path(spec, 3);
        const PathGrid b = gen_path(spec, 3);
        CHECK(a.values == b.values);  // bit-identical
        CHECK(a.values[0] == 0.0);
        CHECK(static_cast<int>(a.values.size()) == spec.grid.n_points);
        const PathGrid c = gen_path(spec, 4);
        CHECK(a.values != c.values);
    }
}

TEST_CASE("degenerate two-point grid") {
    SimSpec spec;
    spec.grid = {0.0, 1.0, 2};
    spec.family = Family::fbm;
    spec.hurst = 0.6;
    const PathGrid p = gen_path(spec, 0);
    REQUIRE(p.values.size() == 2);
    CHECK(p.values[0] == 0.0);
    CHECK(std::isfinite(p.values[1]));
}

TEST_CASE("fbm H=0.5 increments are uncorrelated") {
    SimSpec spec;
    spec.family = Family::fbm;
    spec.hurst = 0.5;
    spec.grid = {0.0, 1.0, 8193};
    spec.master_seed = 7;

    std::vector<double> inc;
    for (int rep = 0; rep < 4; ++rep) {
        auto i = increments(gen_fbm(spec, rep));
        inc.insert(inc.end(), i.begin(), i.end());
    }
    const double n = static_cast<double>(inc.size());
    const double mean = std::accumulate(inc.begin(), inc.end(), 0.0) / n;
    double var = 0.0;
    for (double x : inc) var += (x - mean) * (x - mean);
    var /= n;
    for (int lag = 1; lag <= 5; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < inc.size(); ++i) acc += (inc[i] - mean) * (inc[i + lag] - mean);
        const double rho = acc / n / var;
        CHECK(std::abs(rho) < 4.0 / std::sqrt(n));
    }
}

TEST_CASE("fbm ensemble covariance matches the fbm_cov oracle (H=0.7)") {
    const int n_points = 129;  // 128 increments keeps the z-score field small
    const int reps = 10000;
    const double h = 0.7;
    GridSpec grid{0.0, 1.0, n_points};
    FbmSampler sampler(grid, h);
    REQUIRE(sampler.method() == FbmSampler::Method::davies_harte);

    const int n_inc = n_points - 1;
    std::vector<double> cov(n_inc * n_inc, 0.0);
    for (int rep = 0; rep < reps; ++rep) {
        const auto inc = increments(sampler.sample(99, rep));
        for (int i = 0; i < n_inc; ++i)
            for (int j = 0; j <= i; ++j) cov[i * n_inc + j] += inc[i] * inc[j];
    }

    // z-scores against the oracle covariance; with ~8k distinct entries a
    // literal 3-sigma bound on every entry is statistically impossible, so
    // assert max |z| <= 6 and at most 1% of entries beyond 3 sigma.
    long long beyond3 = 0, total = 0;
    double worst = 0.0;
    for (int i = 0; i < n_inc; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double sample = cov[i * n_inc + j] / reps;
            const double truth = oracle_inc_cov(h, grid, i, j);
            const double vii = oracle_inc_cov(h, grid, i, i);
            const double vjj = oracle_inc_cov(h, grid, j, j);
            const double se = std::sqrt((vii * vjj + truth * truth) / reps);
            const double z = (sample - truth) / se;
            worst = std::max(worst, std::abs(z));
            beyond3 += std::abs(z) > 3.0;
            ++total;
        }
    }
    CHECK(worst <= 6.0);
    CHECK(static_cast<double>(beyond3) / static_cast<double>(total) <= 0.01);
}

TEST_CASE("Davies-Harte and Cholesky ensembles agree (n <= 512)") {
    GridSpec grid{0.0, 1.0, 65};
    const double h = 0.3;
    FbmSampler dh(grid, h, FbmSampler::Method::davies_harte);
    FbmSampler ch(grid, h, FbmSampler::Method::cholesky);
    REQUIRE(dh.method() == FbmSampler::Method::davies_harte);
    REQUIRE(ch.method() == FbmSampler::Method::cholesky);

    const int reps = 6000;
    const int n_inc = grid.increments();
    std::vector<double> cov_a(n_inc * n_inc, 0.0), cov_b(n_inc * n_inc, 0.0);
    for (int rep = 0; rep < reps; ++rep) {
        const auto ia = increments(dh.sample(5, rep));
        const auto ib = increments(ch.sample(6, rep));
        for (int i = 0; i < n_inc; ++i)
            for (int j = 0; j <= i; ++j) {
                cov_a[i * n_inc + j] += ia[i] * ia[j];
                cov_b[i * n_inc + j] += ib[i] * ib[j];
            }
    }
    long long beyond3 = 0, total = 0;
    double worst = 0.0;
    for (int i = 0; i < n_inc; ++i)
        for (int j = 0; j <= i; ++j) {
            const double a = cov_a[i * n_inc + j] / reps;
            const double b = cov_b[i * n_inc + j] / reps;
            const double truth = oracle_inc_cov(h, grid, i, j);
            const double vii = oracle_inc_cov(h, grid, i, i);
            const double vjj = oracle_inc_cov(h, grid, j, j);
            const double se_each = std::sqrt((vii * vjj + truth * truth) / reps);
            const double z = (a - b) / (se_each * std::numbers::sqrt2);
            worst = std::max(worst, std::abs(z));
            beyond3 += std::abs(z) > 3.0;
            ++total;
        }
    CHECK(worst <= 6.0);
    CHECK(static_cast<double>(beyond3) / static_cast<double>(total) <= 0.01);
}

TEST_CASE("fbm terminal value is Gaussian") {
    SimSpec spec;
    spec.family = Family::fbm;
    spec.hurst = 0.7;
    spec.grid = {0.0, 2.0, 129};
    spec.master_seed = 21;

    const double sd = std::sqrt(fbm_cov(spec.hurst, 2.0, 2.0));
    std::vector<double> z(10000);
    for (int rep = 0; rep < 10000; ++rep) z[rep] = gen_fbm(spec, rep).values.back() / sd;
    const double d = ks_distance(std::move(z), std_normal_cdf);
    CHECK(std::sqrt(10000.0) * d < 1.63);  // 1% Kolmogorov critical value
}

TEST_CASE("stable alpha=2 equals Brownian scaling") {
    SimSpec spec;
    spec.family = Family::stable_levy;
    spec.alpha = 2.0;
    spec.grid = {0.0, 1.0, 100001};
    spec.master_seed = 11;

    const auto inc = increments(gen_stable_levy(spec, 0));
    double var = 0.0;
    for (double x : inc) var += x * x;
    var /= static_cast<double>(inc.size());
    const double delta = spec.grid.step();
    CHECK(std::abs(var - delta) / delta < 0.05);
    CHECK(gen_stable_levy(spec, 0).hurst == doctest::Approx(0.5));
}

TEST_CASE("stable alpha=1 symmetric has median zero") {
    SimSpec spec;
    spec.family = Family::stable_levy;
    spec.alpha = 1.0;
    spec.beta = 0.0;
    spec.grid = {0.0, 1.0, 100001};
    spec.master_seed = 13;

    auto inc = increments(gen_stable_levy(spec, 0));
    std::nth_element(inc.begin(), inc.begin() + inc.size() / 2, inc.end());
    const double median = inc[inc.size() / 2] / spec.grid.step();  // back to unit scale
    // median SE for unit Cauchy is (pi/2)/sqrt(n) ~ 0.005
    CHECK(std::abs(median) < 0.02);
}

TEST_CASE("stable self-similarity: X(a t) =d a^{1/alpha} X(t)") {
    const double alpha = 1.5, a = 2.0;
    const int reps = 4000;

    SimSpec unit;
    unit.family = Family::stable_levy;
    unit.alpha = alpha;
    unit.grid = {0.0, 1.0, 513};
    unit.master_seed = 31;

    SimSpec stretched = unit;
    stretched.grid = {0.0, a, 1025};  // same step
    stretched.master_seed = 32;

    std::vector<double> x1(reps), x2(reps);
    for (int rep = 0; rep < reps; ++rep) {
        x1[rep] = gen_stable_levy(unit, rep).values.back();
        x2[rep] = std::pow(a, -1.0 / alpha) * gen_stable_levy(stretched, rep).values.back();
    }
    const double d = ks_two_sample(std::move(x1), std::move(x2));
    CHECK(d < 1.628 * std::sqrt(2.0 / reps));  // 1% two-sample critical value
}

TEST_CASE("invalid stable parameters") {
    SimSpec spec;
    spec.family = Family::stable_levy;
    spec.grid = {0.0, 1.0, 16};
    spec.alpha = 2.5;
    CHECK_THROWS_AS(gen_stable_levy(spec, 0), std::domain_error);
    spec.alpha = 0.0;
    CHECK_THROWS_AS(gen_stable_levy(spec, 0), std::domain_error);
    spec.alpha = 1.0;
    spec.beta = 1.5;
    CHECK_THROWS_AS(gen_stable_levy(spec, 0), std::domain_error);
}

TEST_CASE("brownian fast path agrees in law with fbm(0.5)") {
    const int reps = 4000;
    SimSpec bm;
    bm.family = Family::brownian;
    bm.grid = {0.0, 1.0, 257};
    bm.master_seed = 17;

    SimSpec fbm_half = bm;
    fbm_half.family = Family::fbm;
    fbm_half.hurst = 0.5;

    std::vector<double> x1(reps), x2(reps);
    for (int rep = 0; rep < reps; ++rep) {
        x1[rep] = gen_path(bm, rep).values.back();
        x2[rep] = gen_path(fbm_half, rep).values.back();
    }
    const double d = ks_two_sample(std::move(x1), std::move(x2));
    CHECK(d < 1.628 * std::sqrt(2.0 / reps));
}

TEST_CASE("replicates partitioned across workers match the serial run") {
    SimSpec spec;
    spec.family = Family::fbm;
    spec.hurst = 0.6;
    spec.grid = {0.0, 1.0, 65};
    spec.master_seed = 77;
    PathSampler sampler(spec);

    auto serial = map_replicates<std::vector<double>>(40, 1, [&](long long r) { return sampler(r).values; });
    auto parallel = map_replicates<std::vector<double>>(40, 3, [&](long long r) { return sampler(r).values; });
    CHECK(serial == parallel);
}
