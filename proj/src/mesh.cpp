#include "levyfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace levyfem {

FemSpace build_mesh(double M, int n_per_side) {
    if (!(M > 0.0)) throw std::invalid_argument("build_mesh: M must be > 0");
    if (n_per_side < 3) throw std::invalid_argument("build_mesh: n_per_side must be >= 3");

    FemSpace s;
    s.M = M;
    s.n_per_side = n_per_side;
    s.spacing = 2.0 * M / (n_per_side - 1);
    s.h = s.spacing * std::sqrt(2.0);

    const int n = n_per_side;
    s.vertices.reserve(static_cast<std::size_t>(n) * n);
    s.boundary_mask.reserve(static_cast<std::size_t>(n) * n);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            s.vertices.emplace_back(-M + ix * s.spacing, -M + iy * s.spacing);
            s.boundary_mask.push_back(ix == 0 || ix == n - 1 || iy == 0 || iy == n - 1 ? 1 : 0);
        }
    }
    // Exact corners (guard against -M + (n-1)*spacing rounding).
    for (int iy = 0; iy < n; ++iy) {
        s.vertices[s.index(n - 1, iy)][0] = M;
        s.vertices[s.index(0, iy)][0] = -M;
    }
    for (int ix = 0; ix < n; ++ix) {
        s.vertices[s.index(ix, n - 1)][1] = M;
        s.vertices[s.index(ix, 0)][1] = -M;
    }

    s.triangles.reserve(2u * (n - 1) * (n - 1));
    for (int iy = 0; iy + 1 < n; ++iy) {
        for (int ix = 0; ix + 1 < n; ++ix) {
            const int v00 = s.index(ix, iy);
            const int v10 = s.index(ix + 1, iy);
            const int v01 = s.index(ix, iy + 1);
            const int v11 = s.index(ix + 1, iy + 1);
            s.triangles.push_back({v00, v10, v11});
            s.triangles.push_back({v00, v11, v01});
        }
    }
    return s;
}

double interpolate(const FemSpace& space, const Eigen::VectorXd& nodal,
                   const Eigen::Vector2d& point, const ExtensionFn& extension) {
    if (nodal.size() != space.num_vertices())
        throw std::invalid_argument("interpolate: nodal vector length mismatch");
    if (!space.contains(point)) {
        if (!extension) throw std::invalid_argument("interpolate: point outside box and no extension");
        return extension(point);
    }
    const int n = space.n_per_side;
    const double c = space.spacing;
    auto cell = [&](double v) {
        int k = static_cast<int>(std::floor((v + space.M) / c));
        return std::clamp(k, 0, n - 2);
    };
    const int cx = cell(point[0]);
    const int cy = cell(point[1]);
    const double xi = (point[0] + space.M) / c - cx;
    const double et = (point[1] + space.M) / c - cy;
    const double a00 = nodal[space.index(cx, cy)];
    const double a10 = nodal[space.index(cx + 1, cy)];
    const double a01 = nodal[space.index(cx, cy + 1)];
    const double a11 = nodal[space.index(cx + 1, cy + 1)];
    // Fixed-diagonal split: lower triangle holds xi >= eta.
    if (xi >= et) return a00 + (a10 - a00) * xi + (a11 - a10) * et;
    return a00 + (a11 - a01) * xi + (a01 - a00) * et;
}

void dump_mesh_csv(const FemSpace& space, std::ostream& os) {
    os << "# vertices: id,x1,x2,boundary\n";
    char buf[128];
    for (int i = 0; i < space.num_vertices(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d\n", i, space.vertices[i][0],
                      space.vertices[i][1], static_cast<int>(space.boundary_mask[i]));
        os << buf;
    }
    os << "# triangles: v0,v1,v2\n";
    for (const auto& t : space.triangles) os << t[0] << ',' << t[1] << ',' << t[2] << '\n';
}

WeightEta::WeightEta(double e1, double e2) : eta1(e1), eta2(e2) {
    if (!(e1 > 1.0) || !(e2 > 1.0))
        throw std::invalid_argument("WeightEta: eta1 and eta2 must exceed 1");
}

WeightEta WeightEta::unweighted() { return WeightEta{}; }

double eta_weight(const WeightEta& w, const Eigen::Vector2d& x) {
    const double a1 = std::abs(x[0]);
    const double a2 = std::abs(x[1]);
    if (x[0] < 0.0 && x[1] < 0.0) return w.eta1 * (a1 + a2);
    if (x[0] < 0.0) return w.eta1 * a1 + w.eta2 * a2;
    if (x[1] < 0.0) return w.eta2 * a1 + w.eta1 * a2;
    return w.eta2 * (a1 + a2);
}

double weighted_norm(const FemSpace& space, const Eigen::VectorXd& nodal,
                     const WeightEta& w, NormKind kind) {
    if (nodal.size() != space.num_vertices())
        throw std::invalid_argument("weighted_norm: nodal vector length mismatch");
    auto decaying = [&](const Eigen::Vector2d& x) {
        return -(w.eta1 * std::abs(x[0]) + w.eta2 * std::abs(x[1]));
    };
    double acc = 0.0;
    for (const auto& t : space.triangles) {
        const Eigen::Vector2d& p0 = space.vertices[t[0]];
        const Eigen::Vector2d& p1 = space.vertices[t[1]];
        const Eigen::Vector2d& p2 = space.vertices[t[2]];
        const double area = 0.5 * std::abs((p1[0] - p0[0]) * (p2[1] - p0[1]) -
                                           (p2[0] - p0[0]) * (p1[1] - p0[1]));
        const double u0 = nodal[t[0]], u1 = nodal[t[1]], u2 = nodal[t[2]];
        double grad2 = 0.0;
        if (kind == NormKind::H1) {
            const double twoA = 2.0 * area;
            const double gx = (u0 * (p1[1] - p2[1]) + u1 * (p2[1] - p0[1]) + u2 * (p0[1] - p1[1])) / twoA;
            const double gy = (u0 * (p2[0] - p1[0]) + u1 * (p0[0] - p2[0]) + u2 * (p1[0] - p0[0])) / twoA;
            grad2 = gx * gx + gy * gy;
        }
        // Edge-midpoint rule, exact for quadratics of the P1 data.
        const Eigen::Vector2d m01 = 0.5 * (p0 + p1), m12 = 0.5 * (p1 + p2), m20 = 0.5 * (p2 + p0);
        const double v01 = 0.5 * (u0 + u1), v12 = 0.5 * (u1 + u2), v20 = 0.5 * (u2 + u0);
        double s = 0.0;
        s += std::exp(2.0 * decaying(m01)) * (v01 * v01 + grad2);
        s += std::exp(2.0 * decaying(m12)) * (v12 * v12 + grad2);
        s += std::exp(2.0 * decaying(m20)) * (v20 * v20 + grad2);
        acc += area / 3.0 * s;
    }
    return std::sqrt(acc);
}

}  // namespace levyfem
