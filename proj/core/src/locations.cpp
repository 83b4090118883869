#include "suploc/locations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace suploc {

namespace {

// Indices of the grid points inside [a,b], with a little slack for float
// fuzz on aligned sub-intervals.
std::pair<int, int> index_range(const GridSpec& grid, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("sub-interval: need a < b");
    const double delta = grid.step();
    const double tol = 1e-9 * delta;
    if (a < grid.t_start - tol || b > grid.t_end + tol)
        throw std::invalid_argument("sub-interval not covered by the grid");
    int lo = static_cast<int>(std::ceil((a - grid.t_start) / delta - 1e-9));
    int hi = static_cast<int>(std::floor((b - grid.t_start) / delta + 1e-9));
    lo = std::clamp(lo, 0, grid.n_points - 1);
    hi = std::clamp(hi, 0, grid.n_points - 1);
    if (lo > hi) throw std::invalid_argument("sub-interval contains no grid point");
    return {lo, hi};
}

double rescale(const GridSpec& grid, int idx, double a, double b) {
    return std::clamp((grid.point(idx) - a) / (b - a), 0.0, 1.0);
}

}  // namespace

LocationSample argmax_location(const PathGrid& path, double a, double b) {
    const auto [lo, hi] = index_range(path.grid, a, b);
    int best = lo;
    for (int i = lo + 1; i <= hi; ++i)
        if (path.values[i] > path.values[best]) best = i;  // strict: keeps the leftmost
    LocationSample out;
    out.kind = LocationKind::supremum;
    out.value = rescale(path.grid, best, a, b);
    out.at_zero = (best == lo);
    out.at_one = (best == hi);
    return out;
}

LocationSample largest_jump_location(const PathGrid& path, double a, double b) {
    const auto [lo, hi] = index_range(path.grid, a, b);
    if (hi - lo < 1) throw std::invalid_argument("largest_jump_location: need >= 2 grid points in [a,b]");
    int best = lo + 1;
    double best_jump = std::abs(path.values[lo + 1] - path.values[lo]);
    for (int i = lo + 2; i <= hi; ++i) {
        const double jump = std::abs(path.values[i] - path.values[i - 1]);
        if (jump > best_jump) {
            best_jump = jump;
            best = i;
        }
    }
    LocationSample out;
    out.kind = LocationKind::largest_jump;
    out.value = rescale(path.grid, best, a, b);
    out.at_zero = (best == lo);
    out.at_one = (best == hi);
    return out;
}

PointCloud extract_local_maxima(const PathGrid& path) {
    const int n = path.grid.n_points;
    if (n < 3) throw std::invalid_argument("extract_local_maxima: path length must be >= 3");
    const auto& v = path.values;
    const double delta = path.grid.step();

    // Nearest index to the left/right with value >= v[i], via monotonic
    // stacks; -1 / n when the scan runs off the window.
    std::vector<int> prev_ge(n), next_ge(n), stack;
    stack.reserve(64);
    for (int i = 0; i < n; ++i) {
        while (!stack.empty() && v[stack.back()] < v[i]) stack.pop_back();
        prev_ge[i] = stack.empty() ? -1 : stack.back();
        stack.push_back(i);
    }
    stack.clear();
    for (int i = n - 1; i >= 0; --i) {
        while (!stack.empty() && v[stack.back()] < v[i]) stack.pop_back();
        next_ge[i] = stack.empty() ? n : stack.back();
        stack.push_back(i);
    }

    PointCloud cloud;
    cloud.window_start = path.grid.t_start;
    cloud.window_end = path.grid.t_end;
    cloud.step = delta;
    for (int i = 1; i + 1 < n; ++i) {
        if (!(v[i] > v[i - 1] && v[i] > v[i + 1])) continue;
        LocalMaxPoint p;
        p.s = path.grid.point(i);
        if (prev_ge[i] >= 0)
            p.left = {delta * (i - prev_ge[i]), false};
        else
            p.left = {delta * i, true};
        if (next_ge[i] < n)
            p.right = {delta * (next_ge[i] - i), false};
        else
            p.right = {delta * (n - 1 - i), true};
        cloud.points.push_back(p);
    }
    return cloud;
}

PsiPoint psi_transform(const LocalMaxPoint& point) {
    if (point.left.censored || point.right.censored)
        throw std::invalid_argument("psi_transform: point has a censored return distance");
    const double l = point.left.value;
    const double r = point.right.value;
    if (!(l > 0.0 && r > 0.0)) throw std::invalid_argument("psi_transform: return distances must be positive");
    return {l, l / (l + r)};
}

}  // namespace suploc
