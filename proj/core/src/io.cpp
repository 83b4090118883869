#include "suploc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace suploc {

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);  // LF line endings everywhere
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) fields.push_back(cur);
    return fields;
}

}  // namespace

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

void export_path_csv(const std::filesystem::path& file, const PathGrid& path) {
    auto out = open_out(file);
    out << "t,x\n";
    for (int k = 0; k < path.grid.n_points; ++k)
        out << format_full(path.grid.point(k)) << ',' << format_full(path.values[k]) << '\n';
}

void export_cloud_csv(const std::filesystem::path& file, const PointCloud& cloud) {
    auto out = open_out(file);
    out << "s,l,l_censored,r,r_censored\n";
    for (const auto& p : cloud.points)
        out << format_full(p.s) << ',' << format_full(p.left.value) << ',' << (p.left.censored ? 1 : 0)
            << ',' << format_full(p.right.value) << ',' << (p.right.censored ? 1 : 0) << '\n';
}

void export_density_csv(const std::filesystem::path& file, const DensityEstimate& est) {
    auto out = open_out(file);
    out << "t_lo,t_center,t_hi,height,std_error\n";
    for (int i = 0; i < est.n_bins; ++i) {
        const double w = est.bin_width();
        out << format_full(i * w) << ',' << format_full(est.bin_center(i)) << ',' << format_full((i + 1) * w)
            << ',' << format_full(est.heights[i]) << ',' << format_full(est.std_errors[i]) << '\n';
    }
}

void export_curve_csv(const std::filesystem::path& file, const DensityCurve& curve, const std::string& header) {
    auto out = open_out(file);
    out << header << '\n';
    for (std::size_t i = 0; i < curve.t_grid.size(); ++i)
        out << format_full(curve.t_grid[i]) << ',' << format_full(curve.values[i]) << '\n';
}

void export_nu_csv(const std::filesystem::path& file, const EmpiricalNu& nu) {
    auto out = open_out(file);
    out << "l_threshold,r_threshold,nu_hat,std_error,censor_drops\n";
    for (std::size_t k = 0; k < nu.thresholds.size(); ++k)
        out << format_full(nu.thresholds[k].first) << ',' << format_full(nu.thresholds[k].second) << ','
            << format_full(nu.values[k]) << ',' << format_full(nu.std_errors[k]) << ',' << nu.censor_drops[k]
            << '\n';
}

void export_mixture_csv(const std::filesystem::path& file, const MixtureMeasure& mu) {
    auto out = open_out(file);
    out << "v,mass\n";
    for (const auto& a : mu.atoms) out << format_full(a.v) << ',' << format_full(a.mass) << '\n';
}

DensityCurve read_curve_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open for reading: " + file.string());

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty curve file: " + file.string());

    // locate the x/y columns from the header; default to the first two
    int xcol = 0, ycol = 1;
    bool header = false;
    {
        const auto fields = split_csv(line);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string& f = fields[i];
            if (f == "t" || f == "t_center" || f == "bin_center") {
                xcol = static_cast<int>(i);
                header = true;
            }
            if (f == "value" || f == "f" || f == "height" || f == "x") {
                ycol = static_cast<int>(i);
                header = true;
            }
        }
        char* end = nullptr;
        std::strtod(fields.empty() ? "" : fields[0].c_str(), &end);
        if (!fields.empty() && (end == fields[0].c_str() || *end != '\0')) header = true;
    }

    DensityCurve curve;
    auto consume = [&](const std::string& row) {
        if (row.empty()) return;
        const auto fields = split_csv(row);
        const int need = std::max(xcol, ycol);
        if (static_cast<int>(fields.size()) <= need)
            throw std::runtime_error("bad curve row in " + file.string() + ": " + row);
        curve.t_grid.push_back(std::stod(fields[xcol]));
        curve.values.push_back(std::stod(fields[ycol]));
    };
    if (!header) consume(line);
    while (std::getline(in, line)) consume(line);
    curve.validate();
    return curve;
}

}  // namespace suploc
