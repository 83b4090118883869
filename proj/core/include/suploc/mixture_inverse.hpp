#pragma once

#include <optional>
#include <span>
#include <vector>

#include "suploc/spectral.hpp"

namespace suploc {

// Discretized mixture kernel: entry (i,j) = f_{v_j}(t_i).
struct DesignMatrix {
    std::vector<double> t_grid;
    std::vector<double> v_grid;
    std::vector<double> entries;  // row-major, rows() x cols()

    int rows() const { return static_cast<int>(t_grid.size()); }
    int cols() const { return static_cast<int>(v_grid.size()); }
    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * v_grid.size() + j]; }
};

DesignMatrix build_design(std::span<const double> t_grid, std::span<const double> v_grid);

// Default atom grid: midpoints j/(atoms+1), j = 1..atoms.
std::vector<double> default_v_grid(int atoms = 199);

struct NnlsOptions {
    double kkt_tol = 1e-10;          // on the dual (KKT) residual, relative to |A^T b|_inf
    int max_iterations = 0;          // 0 -> 3 * cols
    std::optional<double> mass_cap;  // enforce sum(w) <= cap
    double ridge = 0.0;              // optional Tikhonov damping on w
};

struct NnlsResult {
    std::vector<double> weights;
    double residual_l2 = 0.0;
    int iterations = 0;
};

// Nonnegative least squares min |A w - b|_2, w >= 0, by Lawson-Hanson
// active sets. An optional total-mass cap sum(w) <= cap is enforced
// exactly through the Lagrangian: w(lambda) solves the shifted problem
// min |A w - b|^2 + lambda sum(w), and lambda is found by bisection on
// the monotone map lambda -> sum(w(lambda)).
NnlsResult nnls_solve(const DesignMatrix& design, std::span<const double> b, const NnlsOptions& options = {});

struct ResidualReport {
    double l2 = 0.0;
    double sup = 0.0;
    double total_mass = 0.0;
    int iterations = 0;
    std::vector<double> reproduced;  // A w on the input t_grid
};

struct FitResult {
    MixtureMeasure measure;
    ResidualReport report;
};

// Recovers a discrete mixing measure from a density curve. Quadrature
// weights are folded into the unknowns, so atom weights are masses and
// the sub-probability constraint is the linear cap sum(w) <= mass_cap.
FitResult fit_mixture(const DensityCurve& curve, std::span<const double> v_grid, double mass_cap = 1.0,
                      const NnlsOptions& options = {});

}  // namespace suploc
