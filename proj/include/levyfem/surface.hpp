#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "levyfem/mesh.hpp"
#include "levyfem/payoff.hpp"

namespace levyfem {

/// Rectangular reporting window in original price coordinates.
struct ReportWindow {
    double s1_lo = 1.0, s1_hi = 80.0;
    double s2_lo = 1.0, s2_hi = 80.0;
    int points = 80;  ///< grid points per side; 0 gives a header-only export
};

struct SurfaceMeta {
    std::string scheme;
    double dt = 0.0;
    int n_steps = 0;
    double domain_half_width = 0.0;
    int n_per_side = 0;
    double delta = 0.0;
    int quad_nodes = 0;
    double quad_window = 0.0;
    double setup_ms = 0.0;
    double step_ms = 0.0;
    long solver_iterations = 0;
};

/// Final-time nodal solution in log coordinates plus everything needed to
/// read money prices off it.
struct PriceSurface {
    FemSpace space;
    Eigen::VectorXd u;      ///< nodal values of the forward-grown transform at tau
    double tau = 0.0;
    PayoffSpec payoff;
    SurfaceMeta meta;

    /// Transform value at a log point, extended by the smoothed boundary
    /// function outside the box.
    double value_u(const Eigen::Vector2d& x) const;

    /// Money price V(T - tau, S1, S2) = e^{-r tau} u(tau, ln S).
    double price(double S1, double S2) const;
};

enum class ExportFormat { Csv, Json };

/// Writes (S1,S2,V) rows over the window grid (CSV) or a JSON document with
/// metadata and the flattened grid. Doubles are emitted with 17 significant
/// digits; files are written atomically (temp + rename).
void export_surface(const PriceSurface& surface, const ReportWindow& window,
                    const std::string& path, ExportFormat format);
void export_surface(const PriceSurface& surface, const ReportWindow& window, std::ostream& os,
                    ExportFormat format);

/// Re-reads an exported CSV; used by the round-trip checks.
struct SurfaceSample {
    double s1, s2, value;
};
std::vector<SurfaceSample> import_surface_csv(std::istream& is);

}  // namespace levyfem
