#include "suploc/mixture_inverse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace suploc {

namespace {

// One Lawson-Hanson solve of min |A w - b|^2 + lambda sum(w) + ridge |w|^2, w >= 0.
// Passive-set subproblems go through the normal equations (the sets stay
// small for mixture designs); tol is the absolute dual tolerance.
struct LawsonHanson {
    const Eigen::MatrixXd& A;
    const Eigen::VectorXd& b;
    double ridge;
    double tol;
    int max_iterations;

    Eigen::VectorXd solve(double lambda, int& iterations_used) const {
        const int n = static_cast<int>(A.cols());
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        std::vector<char> passive(n, 0);
        std::vector<int> pidx;
        pidx.reserve(16);

        auto subproblem = [&]() -> Eigen::VectorXd {
            const int k = static_cast<int>(pidx.size());
            Eigen::MatrixXd Ap(A.rows(), k);
            for (int c = 0; c < k; ++c) Ap.col(c) = A.col(pidx[c]);
            Eigen::MatrixXd N = Ap.transpose() * Ap;
            if (ridge > 0.0) N.diagonal().array() += ridge;
            Eigen::VectorXd rhs = Ap.transpose() * b;
            rhs.array() -= 0.5 * lambda;
            Eigen::VectorXd z = N.ldlt().solve(rhs);
            if (!z.allFinite()) {
                // near-singular passive block: retry with a tiny diagonal lift
                N.diagonal().array() += 1e-12 * N.trace() / std::max(1, k);
                z = N.ldlt().solve(rhs);
            }
            return z;
        };

        int iter = 0;
        while (true) {
            Eigen::VectorXd dual = A.transpose() * (b - A * x);
            dual.array() -= 0.5 * lambda;
            if (ridge > 0.0) dual -= ridge * x;

            int best = -1;
            double best_val = tol;
            for (int j = 0; j < n; ++j) {
                if (passive[j]) continue;
                if (dual[j] > best_val) {
                    best_val = dual[j];
                    best = j;
                }
            }
            if (best < 0) break;

            passive[best] = 1;
            pidx.push_back(best);

            while (true) {
                if (++iter > max_iterations)
                    throw std::runtime_error("nnls_solve: iteration limit exceeded, residual " +
                                             std::to_string((A * x - b).norm()));
                Eigen::VectorXd z = subproblem();
                bool all_positive = true;
                for (int c = 0; c < static_cast<int>(pidx.size()); ++c)
                    if (z[c] <= 0.0) all_positive = false;
                if (all_positive) {
                    for (int c = 0; c < static_cast<int>(pidx.size()); ++c) x[pidx[c]] = z[c];
                    break;
                }
                // step toward z until the first passive coordinate hits zero
                double alpha = 1.0;
                for (int c = 0; c < static_cast<int>(pidx.size()); ++c) {
                    if (z[c] > 0.0) continue;
                    const double xc = x[pidx[c]];
                    const double a = xc / (xc - z[c]);
                    alpha = std::min(alpha, a);
                }
                for (int c = 0; c < static_cast<int>(pidx.size()); ++c) {
                    const int j = pidx[c];
                    x[j] += alpha * (z[c] - x[j]);
                }
                for (std::size_t c = 0; c < pidx.size();) {
                    const int j = pidx[c];
                    if (x[j] <= 1e-14 * std::abs(x.maxCoeff()) || x[j] <= 0.0) {
                        x[j] = 0.0;
                        passive[j] = 0;
                        pidx.erase(pidx.begin() + static_cast<long>(c));
                    } else {
                        ++c;
                    }
                }
                if (pidx.empty()) break;
            }
        }
        iterations_used = iter;
        return x;
    }
};

}  // namespace

DesignMatrix build_design(std::span<const double> t_grid, std::span<const double> v_grid) {
    if (t_grid.empty() || v_grid.empty()) throw std::invalid_argument("build_design: empty grid");
    for (double t : t_grid)
        if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("build_design: t_grid must lie strictly in (0,1)");
    for (double v : v_grid)
        if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("build_design: v_grid must lie strictly in (0,1)");

    DesignMatrix d;
    d.t_grid.assign(t_grid.begin(), t_grid.end());
    d.v_grid.assign(v_grid.begin(), v_grid.end());
    d.entries.resize(t_grid.size() * v_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        for (std::size_t j = 0; j < v_grid.size(); ++j)
            d.entries[i * v_grid.size() + j] = basis_density(v_grid[j], t_grid[i]);
    return d;
}

std::vector<double> default_v_grid(int atoms) {
    if (atoms < 1) throw std::invalid_argument("default_v_grid: atoms must be >= 1");
    std::vector<double> v(atoms);
    for (int j = 1; j <= atoms; ++j) v[j - 1] = static_cast<double>(j) / (atoms + 1);
    return v;
}

NnlsResult nnls_solve(const DesignMatrix& design, std::span<const double> b, const NnlsOptions& options) {
    const int m = design.rows();
    const int n = design.cols();
    if (static_cast<int>(b.size()) != m) throw std::invalid_argument("nnls_solve: dimension mismatch");
    for (double x : b)
        if (x < 0.0 || !std::isfinite(x)) throw std::invalid_argument("nnls_solve: b must be finite and >= 0");

    Eigen::MatrixXd A(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = design.at(i, j);
    Eigen::VectorXd bv(m);
    for (int i = 0; i < m; ++i) bv[i] = b[i];

    const double dual_scale = std::max(1.0, (A.transpose() * bv).cwiseAbs().maxCoeff());
    const int max_iter = options.max_iterations > 0 ? options.max_iterations : std::max(30, 3 * n);
    LawsonHanson lh{A, bv, options.ridge, options.kkt_tol * dual_scale, max_iter};

    int iters = 0;
    Eigen::VectorXd w = lh.solve(0.0, iters);
    int total_iters = iters;

    if (options.mass_cap) {
        const double cap = *options.mass_cap;
        if (cap < 0.0) throw std::invalid_argument("nnls_solve: mass_cap must be >= 0");
        if (w.sum() > cap + 1e-12 * std::max(1.0, cap)) {
            // bracket: at lambda_hi the dual at w = 0 is nonpositive, so w = 0
            double lo = 0.0, hi = 2.0 * dual_scale + 1.0;
            Eigen::VectorXd w_hi = Eigen::VectorXd::Zero(n);
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                Eigen::VectorXd wm = lh.solve(mid, iters);
                total_iters += iters;
                const double mass = wm.sum();
                if (mass > cap) {
                    lo = mid;
                } else {
                    hi = mid;
                    w_hi = wm;
                    if (cap - mass <= 1e-10 * std::max(1.0, cap)) break;
                }
                if (hi - lo <= 1e-15 * (1.0 + hi)) break;
            }
            w = w_hi;  // feasible side of the bracket
        }
    }

    NnlsResult res;
    res.weights.assign(w.data(), w.data() + n);
    res.residual_l2 = (A * w - bv).norm();
    res.iterations = total_iters;
    return res;
}

FitResult fit_mixture(const DensityCurve& curve, std::span<const double> v_grid, double mass_cap,
                      const NnlsOptions& options) {
    curve.validate();
    DesignMatrix design = build_design(curve.t_grid, v_grid);

    NnlsOptions opts = options;
    opts.mass_cap = mass_cap;
    NnlsResult sol = nnls_solve(design, curve.values, opts);

    FitResult out;
    for (int j = 0; j < design.cols(); ++j)
        if (sol.weights[j] > 0.0) out.measure.atoms.push_back({design.v_grid[j], sol.weights[j]});

    out.report.l2 = sol.residual_l2;
    out.report.iterations = sol.iterations;
    out.report.total_mass = out.measure.total_mass();
    out.report.reproduced.assign(curve.t_grid.size(), 0.0);
    double sup = 0.0;
    for (int i = 0; i < design.rows(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < design.cols(); ++j) acc += design.at(i, j) * sol.weights[j];
        out.report.reproduced[i] = acc;
        sup = std::max(sup, std::abs(acc - curve.values[i]));
    }
    out.report.sup = sup;
    return out;
}

}  // namespace suploc
