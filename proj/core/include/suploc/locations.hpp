#pragma once

#include <vector>

#include "suploc/process_sim.hpp"

namespace suploc {

enum class LocationKind { supremum, largest_jump };

// A random location rescaled to [0,1], with boundary flags. A location is
// flagged at a boundary iff it sits on the first/last grid point of the
// queried sub-interval (no boundary band).
struct LocationSample {
    double value = 0.0;
    LocationKind kind = LocationKind::supremum;
    bool at_zero = false;
    bool at_one = false;
};

// First return distance to the level of a local maximum on one side.
// When the scan runs off the window edge the distance is censored and
// `value` holds the scanned distance to the edge instead.
struct ReturnDistance {
    double value = 0.0;
    bool censored = false;
};

struct LocalMaxPoint {
    double s = 0.0;  // location of the local maximum, window coordinates
    ReturnDistance left;
    ReturnDistance right;
};

// All local maxima of one path plus the window metadata needed by the
// estimators (censor ceilings, discretization floor).
struct PointCloud {
    double window_start = 0.0;
    double window_end = 1.0;
    double step = 0.0;
    std::vector<LocalMaxPoint> points;
};

// Leftmost location of the maximum of the path over [a,b], rescaled to
// [0,1] via (t - a)/(b - a).
LocationSample argmax_location(const PathGrid& path, double a, double b);

// Leftmost grid point i in [a,b] maximizing |values[i] - values[i-1]|,
// reported at grid point i (grid increments proxy jumps X(t) - X(t-)).
LocationSample largest_jump_location(const PathGrid& path, double a, double b);

// Strict interior local maxima with left/right return distances. Return
// scans use weak inequality (first j with values[j] >= values[i]); a scan
// that runs off the window is censored at the edge distance.
PointCloud extract_local_maxima(const PathGrid& path);

// (l, r) -> (u, v) = (l, l / (l + r)); requires both sides uncensored.
struct PsiPoint {
    double u = 0.0;
    double v = 0.0;
};
PsiPoint psi_transform(const LocalMaxPoint& point);

}  // namespace suploc
