#pragma once

#include <filesystem>
#include <string>

#include "suploc/empirics.hpp"
#include "suploc/locations.hpp"
#include "suploc/process_sim.hpp"
#include "suploc/spectral.hpp"

namespace suploc {

// Full-precision scientific notation (17 significant digits), so CSV
// artifacts round-trip bit-exactly.
std::string format_full(double x);

void export_path_csv(const std::filesystem::path& file, const PathGrid& path);
void export_cloud_csv(const std::filesystem::path& file, const PointCloud& cloud);
void export_density_csv(const std::filesystem::path& file, const DensityEstimate& est);
void export_curve_csv(const std::filesystem::path& file, const DensityCurve& curve,
                      const std::string& header = "t,value");
void export_nu_csv(const std::filesystem::path& file, const EmpiricalNu& nu);
void export_mixture_csv(const std::filesystem::path& file, const MixtureMeasure& mu);

// Reads a curve from CSV. Understands a (t,value)-style two-column file
// as well as density-estimate exports (uses the t_center/height columns).
DensityCurve read_curve_csv(const std::filesystem::path& file);

}  // namespace suploc
