// suploc: simulation and verification toolkit for the location of the
// path supremum of self-similar processes with stationary increments.
//
// Subcommands: simulate, tau, jump, nu, levy-check, spectral, fit,
// bound-check. Exit codes: 0 pass, 1 assertion failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "suploc/empirics.hpp"
#include "suploc/io.hpp"
#include "suploc/locations.hpp"
#include "suploc/mixture_inverse.hpp"
#include "suploc/process_sim.hpp"
#include "suploc/runner.hpp"
#include "suploc/spectral.hpp"
#include "suploc/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace suploc;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertFailed = 1;
constexpr int kExitUsage = 2;

json load_manifest(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    json m;
    in >> m;
    return m;
}

template <typename T>
void manifest_default(const json& m, const CLI::App& cmd, const std::string& flag, const char* key, T& var) {
    if (m.contains(key) && cmd.count(flag) == 0) var = m.at(key).get<T>();
}

std::string timestamp_utc() {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json(const fs::path& file, const json& j) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    out << j.dump(2) << '\n';
}

// Simulation options shared by the Monte Carlo subcommands.
struct SimCli {
    std::string family = "brownian";
    double hurst = 0.5;
    double alpha = 2.0;
    double beta = 0.0;
    int n = 4096;         // grid points per unit interval
    double window = 0.0;  // simulate on [-window, 1+window]
    long long reps = 1;
    std::uint64_t seed = 0;
    int workers = 0;  // 0 -> SUPLOC_WORKERS or hardware concurrency
    std::string out = ".";

    void add_options(CLI::App* cmd, double default_window, long long default_reps) {
        window = default_window;
        reps = default_reps;
        cmd->add_option("--family", family, "process family: brownian | fbm | stable")
            ->check(CLI::IsMember({"brownian", "fbm", "stable", "stable_levy"}));
        cmd->add_option("--hurst,--H", hurst, "Hurst exponent for fbm, in (0,1)");
        cmd->add_option("--alpha", alpha, "stable index in (0,2]");
        cmd->add_option("--beta", beta, "stable skewness in [-1,1]");
        cmd->add_option("--n", n, "grid points per unit interval")->check(CLI::Range(2, 1 << 24));
        cmd->add_option("--window,-W", window, "simulate on [-W, 1+W]")->check(CLI::NonNegativeNumber);
        cmd->add_option("--reps", reps, "number of replicates")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--workers", workers, "worker threads (0 = auto)");
        cmd->add_option("--out", out, "output directory");
    }

    void apply_manifest(const json& m, const CLI::App& cmd) {
        manifest_default(m, cmd, "--family", "family", family);
        manifest_default(m, cmd, "--hurst", "hurst", hurst);
        manifest_default(m, cmd, "--alpha", "alpha", alpha);
        manifest_default(m, cmd, "--beta", "beta", beta);
        manifest_default(m, cmd, "--n", "n", n);
        manifest_default(m, cmd, "--window", "window", window);
        manifest_default(m, cmd, "--reps", "replicates", reps);
        manifest_default(m, cmd, "--seed", "master_seed", seed);
        manifest_default(m, cmd, "--out", "out", out);
    }

    SimSpec spec() const {
        SimSpec s;
        if (family == "brownian")
            s.family = Family::brownian;
        else if (family == "fbm")
            s.family = Family::fbm;
        else
            s.family = Family::stable_levy;
        s.hurst = hurst;
        s.alpha = alpha;
        s.beta = beta;
        s.master_seed = seed;
        s.replicates = reps;
        if (window <= 0.0) {
            s.grid = {0.0, 1.0, n};
        } else {
            const int n_points = static_cast<int>(std::llround((1.0 + 2.0 * window) * (n - 1))) + 1;
            s.grid = {-window, 1.0 + window, n_points};
        }
        return s;
    }

    int resolved_workers() const { return workers > 0 ? workers : default_worker_count(); }

    json to_json() const {
        json j;
        j["family"] = family;
        if (family == "fbm") j["hurst"] = hurst;
        if (family == "stable" || family == "stable_levy") {
            j["alpha"] = alpha;
            j["beta"] = beta;
        }
        j["n"] = n;
        j["window"] = window;
        j["replicates"] = reps;
        j["master_seed"] = seed;
        j["out"] = out;
        return j;
    }
};

fs::path prepare_out(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& dir, const char* command, json config, const json& extra = {}) {
    config["command"] = command;
    config["toolkit_version"] = kVersion;
    config["timestamp"] = timestamp_utc();
    for (auto it = extra.begin(); it != extra.end(); ++it) config[it.key()] = it.value();
    write_json(dir / "manifest.json", config);
}

// Beta reference when the exact law is known: Beta(1/2,1/2) for Brownian
// motion, fbm(1/2) and symmetric stable.
std::optional<BetaLaw> exact_beta_reference(const SimSpec& spec) {
    switch (spec.family) {
        case Family::brownian: return BetaLaw{0.5, 0.5};
        case Family::fbm:
            if (spec.hurst == 0.5) return BetaLaw{0.5, 0.5};
            return {};
        case Family::stable_levy:
            if (spec.beta == 0.0) return BetaLaw{0.5, 0.5};
            return {};
    }
    return {};
}

bool time_reversible(const SimSpec& spec) {
    return spec.family != Family::stable_levy || spec.beta == 0.0;
}

struct BoundCheck {
    bool pass = true;
    double worst_excess = -1.0;  // max over bins of height/bound - 1 - 3*se_rel; <= 0 passes
};

BoundCheck check_density_bound(const DensityEstimate& est, bool reversible) {
    BoundCheck out;
    for (int i = 0; i < est.n_bins; ++i) {
        const double h = est.heights[i];
        if (h <= 0.0) continue;
        const double c = est.bin_center(i);
        const double bound = reversible ? reversible_bound(c) : entropy_bound(c);
        const double rel_se = est.std_errors[i] / h;
        const double excess = h / bound - 1.0 - 3.0 * rel_se;
        out.worst_excess = std::max(out.worst_excess, excess);
        if (excess > 0.0) out.pass = false;
    }
    return out;
}

json bound_json(const BoundCheck& b) { return json{{"pass", b.pass}, {"worst_excess", b.worst_excess}}; }

int run_location_analysis(const SimCli& cli, LocationKind kind, int bins, double ks_tol,
                          const char* command) {
    SimSpec spec = cli.spec();
    spec.validate();
    const fs::path dir = prepare_out(cli.out);
    const PathSampler sampler(spec);

    std::vector<LocationSample> samples(static_cast<std::size_t>(cli.reps));
    for_each_replicate(cli.reps, cli.resolved_workers(), [&](long long rep) {
        const PathGrid path = sampler(rep);
        samples[static_cast<std::size_t>(rep)] = kind == LocationKind::supremum
                                                     ? argmax_location(path, 0.0, 1.0)
                                                     : largest_jump_location(path, 0.0, 1.0);
    });

    {
        std::ofstream out(dir / "samples.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write samples.csv");
        out << "replicate,value,at_zero,at_one\n";
        for (std::size_t i = 0; i < samples.size(); ++i)
            out << i << ',' << format_full(samples[i].value) << ',' << (samples[i].at_zero ? 1 : 0) << ','
                << (samples[i].at_one ? 1 : 0) << '\n';
    }

    const DensityEstimate est = estimate_location_density(samples, bins);
    export_density_csv(dir / "density_bins.csv", est);
    export_curve_csv(dir / "density_curve.csv", est.to_curve());

    json verdict;
    verdict["kind"] = kind == LocationKind::supremum ? "supremum" : "largest_jump";
    verdict["n_samples"] = est.n_samples;
    verdict["mass_at_0"] = est.mass_at_0;
    verdict["mass_at_1"] = est.mass_at_1;
    verdict["generator"] = sampler.method_note().empty() ? "direct" : sampler.method_note();

    bool pass = true;

    const BoundCheck entropy = check_density_bound(est, false);
    verdict["entropy_bound"] = bound_json(entropy);
    pass = pass && entropy.pass;

    if (time_reversible(spec)) {
        const BoundCheck rev = check_density_bound(est, true);
        verdict["reversible_bound"] = bound_json(rev);
        pass = pass && rev.pass;
    }

    std::vector<double> values(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) values[i] = samples[i].value;
    try {
        const BetaLaw fitted = fit_beta_moments(values);
        verdict["beta_moments"] = json{{"a", fitted.a}, {"b", fitted.b}, {"sum", fitted.a + fitted.b}};
    } catch (const std::exception& e) {
        verdict["beta_moments"] = json{{"error", e.what()}};
    }

    if (kind == LocationKind::supremum) {
        if (const auto ref = exact_beta_reference(spec)) {
            const auto ks = ks_statistic(values, [&](double x) { return ref->cdf(x); });
            // default: 1% Kolmogorov critical value plus the boundary-atom
            // discretization budget (the arcsine mass within one grid step)
            const double tol = ks_tol > 0.0 ? ks_tol
                                            : 1.628 / std::sqrt(static_cast<double>(ks.n)) +
                                                  0.64 / std::sqrt(spec.grid.n_points - 1.0);
            verdict["ks"] = json{{"reference", {{"a", ref->a}, {"b", ref->b}}},
                                 {"d", ks.d},
                                 {"threshold", tol},
                                 {"pass", ks.d <= tol}};
            pass = pass && ks.d <= tol;
        }
    }

    verdict["pass"] = pass;
    write_json(dir / (std::string(command) + "_verdict.json"), verdict);
    write_manifest(dir, command, cli.to_json(), json{{"bins", bins}});
    std::cout << (pass ? "PASS" : "FAIL") << ": " << command << " analysis, artifacts in " << dir << "\n";
    return pass ? kExitPass : kExitAssertFailed;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

int run_nu(const SimCli& cli, const std::string& t_list, double frame_halfwidth, long long dump_cloud) {
    SimSpec spec = cli.spec();
    spec.validate();
    if (cli.window <= 0.0) throw CLI::ValidationError("--window must be positive for nu analysis");
    const fs::path dir = prepare_out(cli.out);
    const PathSampler sampler(spec);

    const std::vector<double> ts = parse_double_list(t_list);
    if (ts.empty()) throw CLI::ValidationError("--t-list is empty");
    std::vector<std::pair<double, double>> thresholds;
    for (double t : ts) {
        if (!(t > 0.0 && t < 1.0)) throw CLI::ValidationError("--t-list entries must be in (0,1)");
        thresholds.emplace_back(t, 1.0 - t);
    }

    NuAccumulator total(thresholds);
    std::vector<LocationSample> taus(static_cast<std::size_t>(cli.reps));
    std::mutex merge_mutex;
    for_each_replicate(cli.reps, cli.resolved_workers(), [&](long long rep) {
        const PathGrid path = sampler(rep);
        const PointCloud cloud = extract_local_maxima(path);
        taus[static_cast<std::size_t>(rep)] = argmax_location(path, 0.0, 1.0);
        if (rep == dump_cloud) export_cloud_csv(dir / "cloud_sample.csv", cloud);
        NuAccumulator local(thresholds);
        local.add(cloud);
        std::lock_guard<std::mutex> lock(merge_mutex);
        total.merge(local);  // integer merge: independent of arrival order
    });

    const EmpiricalNu nu = total.finalize();
    export_nu_csv(dir / "nu.csv", nu);

    // frame identity: nu([t,inf) x [1-t,inf)) against a centered-window
    // density estimate of the supremum location at the same t
    const double n = static_cast<double>(cli.reps);
    json frame = json::array();
    bool pass = true;
    {
        std::ofstream out(dir / "frame.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write frame.csv");
        out << "t,nu_hat,nu_se,f_hat,f_se,rel_gap,pass\n";
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            const double t = thresholds[k].first;
            long long count = 0;
            for (const auto& s : taus)
                count += !s.at_zero && !s.at_one && std::abs(s.value - t) <= frame_halfwidth;
            const double p = count / n;
            const double f_hat = p / (2.0 * frame_halfwidth);
            const double f_se = std::sqrt(p * (1.0 - p) / n) / (2.0 * frame_halfwidth);
            const double gap = std::abs(nu.values[k] - f_hat);
            const double rel_gap = f_hat > 0.0 ? gap / f_hat : std::numeric_limits<double>::infinity();
            const bool ok = rel_gap <= 0.05 || gap <= 3.0 * std::hypot(nu.std_errors[k], f_se);
            pass = pass && ok;
            out << format_full(t) << ',' << format_full(nu.values[k]) << ','
                << format_full(nu.std_errors[k]) << ',' << format_full(f_hat) << ',' << format_full(f_se)
                << ',' << format_full(rel_gap) << ',' << (ok ? 1 : 0) << '\n';
            frame.push_back(json{{"t", t},
                                 {"nu_hat", nu.values[k]},
                                 {"f_hat", f_hat},
                                 {"rel_gap", rel_gap},
                                 {"censor_drops", nu.censor_drops[k]},
                                 {"pass", ok}});
        }
    }

    json verdict;
    verdict["frame_identity"] = frame;
    verdict["pass"] = pass;
    write_json(dir / "nu_verdict.json", verdict);
    write_manifest(dir, "nu", cli.to_json(), json{{"t_list", ts}, {"frame_halfwidth", frame_halfwidth}});
    std::cout << (pass ? "PASS" : "FAIL") << ": frame identity, artifacts in " << dir << "\n";
    return pass ? kExitPass : kExitAssertFailed;
}

int run_levy_check(const SimCli& cli, double fit_lo, double fit_hi, double sum_tol, double exponent_tol) {
    SimSpec spec = cli.spec();
    spec.validate();
    if (cli.window <= 0.0) throw CLI::ValidationError("--window must be positive for levy-check");
    const fs::path dir = prepare_out(cli.out);
    const PathSampler sampler(spec);

    auto clouds = map_replicates<PointCloud>(cli.reps, cli.resolved_workers(),
                                             [&](long long rep) { return extract_local_maxima(sampler(rep)); });

    std::optional<TailFitWindow> window;
    if (fit_lo > 0.0 && fit_hi > fit_lo) window = TailFitWindow{fit_lo, fit_hi};

    const FactorizationReport rep = levy_factorization_check(clouds, window);
    const double u_exponent = u_marginal_tail_exponent(clouds, window);

    const bool is_levy = spec.family != Family::fbm || spec.hurst == 0.5;
    const bool sum_ok = std::abs(rep.c1_hat + rep.c2_hat - 1.0) <= sum_tol;
    const bool exponent_ok = std::abs(u_exponent - 1.0) <= exponent_tol;
    const bool pass = !is_levy || (sum_ok && exponent_ok);

    json verdict;
    verdict["c1_hat"] = rep.c1_hat;
    verdict["c2_hat"] = rep.c2_hat;
    verdict["c_sum"] = rep.c1_hat + rep.c2_hat;
    verdict["u_tail_exponent"] = u_exponent;
    verdict["product_max_rel_err"] = rep.product_max_rel_err;
    verdict["product_mean_rel_err"] = rep.product_mean_rel_err;
    verdict["product_cells_checked"] = rep.product_cells_checked;
    verdict["n_uncensored"] = rep.n_uncensored;
    verdict["asserted"] = is_levy;
    verdict["pass"] = pass;
    write_json(dir / "levy_check.json", verdict);
    write_manifest(dir, "levy-check", cli.to_json(),
                   json{{"sum_tol", sum_tol}, {"exponent_tol", exponent_tol}});
    std::cout << (pass ? "PASS" : "FAIL") << ": levy factorization (c1=" << rep.c1_hat
              << ", c2=" << rep.c2_hat << ", u exponent=" << u_exponent << ")\n";
    return pass ? kExitPass : kExitAssertFailed;
}

int run_spectral(const std::string& curve, double v, int points, const std::string& out) {
    const fs::path dir = prepare_out(out);
    if (points < 2) throw CLI::ValidationError("--points must be >= 2");

    std::ofstream file(dir / "spectral.csv", std::ios::binary);
    if (!file) throw std::runtime_error("cannot write spectral.csv");
    if (curve == "bound") {
        file << "t,entropy_bound,reversible_bound\n";
        for (int i = 1; i <= points; ++i) {
            const double t = static_cast<double>(i) / (points + 1);
            file << format_full(t) << ',' << format_full(entropy_bound(t)) << ','
                 << format_full(reversible_bound(t)) << '\n';
        }
    } else {
        file << "t,f,bound\n";
        for (int i = 1; i <= points; ++i) {
            const double t = static_cast<double>(i) / (points + 1);
            const double f = curve == "basis" ? basis_density(v, t) : basis_density_reversible(v, t);
            const double b = curve == "basis" ? entropy_bound(t) : reversible_bound(t);
            file << format_full(t) << ',' << format_full(f) << ',' << format_full(b) << '\n';
        }
    }
    json config{{"curve", curve}, {"v", v}, {"points", points}, {"out", out}};
    write_manifest(dir, "spectral", config);
    std::cout << "wrote " << (dir / "spectral.csv") << "\n";
    return kExitPass;
}

int run_fit(const std::string& input, int atoms, double mass_cap, double ridge, const std::string& out) {
    const fs::path dir = prepare_out(out);

    const DensityCurve curve = read_curve_csv(input);
    NnlsOptions opts;
    opts.ridge = ridge;
    const FitResult fit = fit_mixture(curve, default_v_grid(atoms), mass_cap, opts);

    export_mixture_csv(dir / "mixture.csv", fit.measure);
    DensityCurve reproduced;
    reproduced.t_grid = curve.t_grid;
    reproduced.values = fit.report.reproduced;
    export_curve_csv(dir / "reproduced_curve.csv", reproduced);

    json residual;
    residual["l2"] = fit.report.l2;
    residual["sup"] = fit.report.sup;
    residual["total_mass"] = fit.report.total_mass;
    residual["iterations"] = fit.report.iterations;
    residual["atoms_recovered"] = fit.measure.atoms.size();
    write_json(dir / "residual.json", residual);

    json config{{"input", input}, {"atoms", atoms}, {"mass_cap", mass_cap}, {"ridge", ridge}, {"out", out}};
    write_manifest(dir, "fit", config);
    std::cout << "fit: l2=" << fit.report.l2 << " sup=" << fit.report.sup
              << " total_mass=" << fit.report.total_mass << "\n";
    return kExitPass;
}

// optional std_error column for bound-check slack
std::vector<double> read_se_column(const std::string& file) {
    std::ifstream in(file);
    if (!in) return {};
    std::string line;
    if (!std::getline(in, line)) return {};
    int se_col = -1, col = 0;
    {
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            if (f == "std_error" || f == "se") se_col = col;
            ++col;
        }
    }
    if (se_col < 0) return {};
    std::vector<double> se;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f;
        for (int c = 0; std::getline(ss, f, ','); ++c)
            if (c == se_col) se.push_back(std::stod(f));
    }
    return se;
}

int run_bound_check(const std::string& input, bool use_se, bool one_bin_shift, const std::string& out) {
    const fs::path dir = prepare_out(out);

    const DensityCurve curve = read_curve_csv(input);
    ShapeOptions opts;
    opts.one_bin_shift = one_bin_shift;
    if (use_se) {
        opts.std_errors = read_se_column(input);
        if (opts.std_errors.size() != curve.values.size())
            throw std::runtime_error("bound-check: --use-se set but no std_error column of matching size");
    }
    const ShapeReport report = check_shape_constraints(curve, opts);

    // entropy-bound compliance at the curve nodes, with the same slack
    bool entropy_ok = true;
    double entropy_worst = 0.0;
    for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
        const double bound = entropy_bound(curve.t_grid[i]);
        const double slack = use_se && !opts.std_errors.empty() ? 3.0 * opts.std_errors[i] : 0.0;
        const double excess = (curve.values[i] - slack) / bound - 1.0;
        entropy_worst = std::max(entropy_worst, excess);
        if (excess > 1e-12) entropy_ok = false;
    }

    const bool pass = report.pass && entropy_ok;
    json j;
    j["pairwise_worst"] = report.pairwise_worst;
    j["left_deriv_worst"] = report.left_deriv_worst;
    j["right_deriv_worst"] = report.right_deriv_worst;
    j["violations"] = report.violations;
    j["entropy_bound_worst_excess"] = entropy_worst;
    j["entropy_bound_pass"] = entropy_ok;
    j["pass"] = pass;
    write_json(dir / "shape_report.json", j);

    json config{{"input", input}, {"use_se", use_se}, {"one_bin_shift", one_bin_shift}, {"out", out}};
    write_manifest(dir, "bound-check", config);
    std::cout << (pass ? "PASS" : "FAIL") << ": shape constraints, report in " << (dir / "shape_report.json")
              << "\n";
    return pass ? kExitPass : kExitAssertFailed;
}

int run_simulate(const SimCli& cli) {
    SimSpec spec = cli.spec();
    spec.validate();
    const fs::path dir = prepare_out(cli.out);
    const PathSampler sampler(spec);
    for (long long rep = 0; rep < cli.reps; ++rep) {
        char name[64];
        std::snprintf(name, sizeof(name), "path_r%05lld.csv", rep);
        export_path_csv(dir / name, sampler(rep));
    }
    write_manifest(dir, "simulate", cli.to_json());
    if (!sampler.method_note().empty()) std::cout << "fbm method: " << sampler.method_note() << "\n";
    std::cout << "wrote " << cli.reps << " path file(s) in " << dir << "\n";
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"supremum-location toolkit for self-similar processes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string manifest_path;
    app.add_option("--manifest", manifest_path, "JSON manifest with defaults (flags override)");

    auto* sim_cmd = app.add_subcommand("simulate", "generate sample paths and dump them as CSV");
    SimCli sim_cli;
    sim_cli.add_options(sim_cmd, 0.0, 1);

    auto* tau_cmd = app.add_subcommand("tau", "supremum-location Monte Carlo and verification");
    SimCli tau_cli;
    tau_cli.add_options(tau_cmd, 0.0, 50000);
    int tau_bins = 50;
    double tau_ks_tol = 0.0;
    tau_cmd->add_option("--bins", tau_bins, "histogram bins")->check(CLI::Range(2, 100000));
    tau_cmd->add_option("--ks-tol", tau_ks_tol, "KS tolerance (0 = auto)");

    auto* jump_cmd = app.add_subcommand("jump", "largest-jump-location Monte Carlo and verification");
    SimCli jump_cli;
    jump_cli.add_options(jump_cmd, 0.0, 50000);
    int jump_bins = 50;
    jump_cmd->add_option("--bins", jump_bins, "histogram bins")->check(CLI::Range(2, 100000));

    auto* nu_cmd = app.add_subcommand("nu", "mean-measure estimation and the frame identity");
    SimCli nu_cli;
    nu_cli.add_options(nu_cmd, 3.0, 20000);
    std::string nu_t_list = "0.2,0.3,0.4,0.5,0.6,0.7,0.8";
    double nu_halfwidth = 0.025;
    long long nu_dump_cloud = 0;
    nu_cmd->add_option("--t-list", nu_t_list, "comma-separated t values");
    nu_cmd->add_option("--frame-halfwidth", nu_halfwidth, "half-width of the density window at each t");
    nu_cmd->add_option("--dump-cloud", nu_dump_cloud, "replicate whose point cloud is exported");

    auto* levy_cmd = app.add_subcommand("levy-check", "factorization and marginal tail exponents");
    SimCli levy_cli;
    levy_cli.add_options(levy_cmd, 3.0, 300);
    levy_cli.n = 1024;
    double levy_fit_lo = 0.0, levy_fit_hi = 0.0, levy_sum_tol = 0.1, levy_exp_tol = 0.15;
    levy_cmd->add_option("--fit-lo", levy_fit_lo, "tail fit window lower edge (0 = auto)");
    levy_cmd->add_option("--fit-hi", levy_fit_hi, "tail fit window upper edge (0 = auto)");
    levy_cmd->add_option("--sum-tol", levy_sum_tol, "tolerance on c1+c2 = 1");
    levy_cmd->add_option("--exponent-tol", levy_exp_tol, "tolerance on the u tail exponent = 1");

    auto* spec_cmd = app.add_subcommand("spectral", "dump closed-form basis/bound curves as CSV");
    std::string spec_curve = "basis";
    double spec_v = 0.5;
    int spec_points = 1000;
    std::string spec_out = ".";
    spec_cmd->add_option("--curve", spec_curve, "basis | reversible | bound")
        ->check(CLI::IsMember({"basis", "reversible", "bound"}));
    spec_cmd->add_option("--v", spec_v, "basis parameter in (0,1)");
    spec_cmd->add_option("--points", spec_points, "grid points");
    spec_cmd->add_option("--out", spec_out, "output directory");

    auto* fit_cmd = app.add_subcommand("fit", "recover the mixing measure from a density curve");
    std::string fit_input;
    int fit_atoms = 199;
    double fit_mass_cap = 1.0, fit_ridge = 0.0;
    std::string fit_out = ".";
    fit_cmd->add_option("--input", fit_input, "density curve CSV")->required();
    fit_cmd->add_option("--atoms", fit_atoms, "number of atom-grid points")->check(CLI::Range(1, 100000));
    fit_cmd->add_option("--mass-cap", fit_mass_cap, "total-mass cap");
    fit_cmd->add_option("--ridge", fit_ridge, "Tikhonov damping");
    fit_cmd->add_option("--out", fit_out, "output directory");

    auto* bc_cmd = app.add_subcommand("bound-check", "shape-constraint and bound report for a curve");
    std::string bc_input;
    bool bc_use_se = false, bc_shift = false;
    std::string bc_out = ".";
    bc_cmd->add_option("--input", bc_input, "density curve CSV")->required();
    bc_cmd->add_flag("--use-se", bc_use_se, "use the std_error column as slack");
    bc_cmd->add_flag("--one-bin-shift", bc_shift, "tolerate one-bin misalignment");
    bc_cmd->add_option("--out", bc_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const json manifest = load_manifest(manifest_path);

        if (sim_cmd->parsed()) {
            sim_cli.apply_manifest(manifest, *sim_cmd);
            return run_simulate(sim_cli);
        }
        if (tau_cmd->parsed()) {
            tau_cli.apply_manifest(manifest, *tau_cmd);
            manifest_default(manifest, *tau_cmd, "--bins", "bins", tau_bins);
            return run_location_analysis(tau_cli, LocationKind::supremum, tau_bins, tau_ks_tol, "tau");
        }
        if (jump_cmd->parsed()) {
            jump_cli.apply_manifest(manifest, *jump_cmd);
            manifest_default(manifest, *jump_cmd, "--bins", "bins", jump_bins);
            return run_location_analysis(jump_cli, LocationKind::largest_jump, jump_bins, 0.0, "jump");
        }
        if (nu_cmd->parsed()) {
            nu_cli.apply_manifest(manifest, *nu_cmd);
            return run_nu(nu_cli, nu_t_list, nu_halfwidth, nu_dump_cloud);
        }
        if (levy_cmd->parsed()) {
            levy_cli.apply_manifest(manifest, *levy_cmd);
            return run_levy_check(levy_cli, levy_fit_lo, levy_fit_hi, levy_sum_tol, levy_exp_tol);
        }
        if (spec_cmd->parsed()) return run_spectral(spec_curve, spec_v, spec_points, spec_out);
        if (fit_cmd->parsed()) return run_fit(fit_input, fit_atoms, fit_mass_cap, fit_ridge, fit_out);
        if (bc_cmd->parsed()) return run_bound_check(bc_input, bc_use_se, bc_shift, bc_out);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
