#include "levyfem/surface.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace levyfem {

double PriceSurface::value_u(const Eigen::Vector2d& x) const {
    SmoothedBoundary ext(payoff);
    const double t = tau;
    return interpolate(space, u, x, [&](const Eigen::Vector2d& p) { return ext(t, p); });
}

double PriceSurface::price(double S1, double S2) const {
    if (!(S1 > 0.0) || !(S2 > 0.0))
        throw std::invalid_argument("PriceSurface::price: spots must be positive");
    return std::exp(-payoff.params.r * tau) * value_u({std::log(S1), std::log(S2)});
}

namespace {

std::vector<double> window_grid(double lo, double hi, int points) {
    std::vector<double> g;
    if (points <= 0) return g;
    if (points == 1) {
        g.push_back(0.5 * (lo + hi));
        return g;
    }
    g.reserve(points);
    for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
    return g;
}

nlohmann::json meta_json(const PriceSurface& s) {
    return {{"scheme", s.meta.scheme},
            {"dt", s.meta.dt},
            {"n_steps", s.meta.n_steps},
            {"domain_half_width", s.meta.domain_half_width},
            {"n_per_side", s.meta.n_per_side},
            {"delta", s.meta.delta},
            {"quad_nodes", s.meta.quad_nodes},
            {"quad_window", s.meta.quad_window},
            {"payoff", payoff_kind_name(s.payoff.kind)},
            {"tau", s.tau},
            {"solver_iterations", s.meta.solver_iterations}};
}

}  // namespace

void export_surface(const PriceSurface& surface, const ReportWindow& window, std::ostream& os,
                    ExportFormat format) {
    const auto g1 = window_grid(window.s1_lo, window.s1_hi, window.points);
    const auto g2 = window_grid(window.s2_lo, window.s2_hi, window.points);

    if (format == ExportFormat::Csv) {
        os << "S1,S2,V\n";
        char buf[128];
        for (double s2 : g2) {
            for (double s1 : g1) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s1, s2,
                              surface.price(s1, s2));
                os << buf;
            }
        }
        return;
    }

    nlohmann::json doc;
    doc["metadata"] = meta_json(surface);
    doc["s1"] = g1;
    doc["s2"] = g2;
    std::vector<double> vals;
    vals.reserve(g1.size() * g2.size());
    for (double s2 : g2)
        for (double s1 : g1) vals.push_back(surface.price(s1, s2));
    doc["values"] = vals;
    os << doc.dump(2) << '\n';
}

void export_surface(const PriceSurface& surface, const ReportWindow& window,
                    const std::string& path, ExportFormat format) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("export_surface: cannot open " + tmp.string());
        export_surface(surface, window, os, format);
        if (!os) throw std::runtime_error("export_surface: write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::vector<SurfaceSample> import_surface_csv(std::istream& is) {
    std::vector<SurfaceSample> out;
    std::string line;
    if (!std::getline(is, line)) return out;  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        SurfaceSample s{};
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &s.s1, &s.s2, &s.value) != 3)
            throw std::runtime_error("import_surface_csv: malformed row: " + line);
        out.push_back(s);
    }
    return out;
}

}  // namespace levyfem
