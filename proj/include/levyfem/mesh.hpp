#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace levyfem {

/// Uniform P1 triangulation of the truncated log-price box [-M,M]^2.
///
/// Vertices are laid out row-major (x fastest), each grid cell is split into
/// two triangles along the fixed bottom-left -> top-right diagonal, and every
/// vertex on the box perimeter carries the Dirichlet flag. The ordering is
/// deterministic so that assembled operators and exported surfaces are
/// byte-reproducible.
struct FemSpace {
    double M = 0.0;                             ///< half-width of the box
    int n_per_side = 0;                         ///< vertices per side
    double spacing = 0.0;                       ///< grid cell side, 2M/(n-1)
    double h = 0.0;                             ///< mesh size = longest edge = spacing*sqrt(2)
    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::uint8_t> boundary_mask;    ///< 1 on the perimeter

    int index(int ix, int iy) const { return iy * n_per_side + ix; }
    int num_vertices() const { return static_cast<int>(vertices.size()); }
    bool contains(const Eigen::Vector2d& x) const {
        return x[0] >= -M && x[0] <= M && x[1] >= -M && x[1] <= M;
    }
};

FemSpace build_mesh(double M, int n_per_side);

/// Point evaluation callback used wherever a field must exist outside the box.
using ExtensionFn = std::function<double(const Eigen::Vector2d&)>;

/// P1 interpolation of a nodal vector; outside the box the extension callback
/// supplies the far-field value, so the result is total.
double interpolate(const FemSpace& space, const Eigen::VectorXd& nodal,
                   const Eigen::Vector2d& point, const ExtensionFn& extension);

/// Writes vertices then triangles as CSV (header lines mark the sections).
void dump_mesh_csv(const FemSpace& space, std::ostream& os);

/// Exponential weight exponents. The growing quadrant-piecewise eta of the
/// localization analysis requires eta1, eta2 > 1; the unweighted() instance
/// (both zero) is admitted for plain-norm diagnostics only.
struct WeightEta {
    double eta1;
    double eta2;

    WeightEta(double e1, double e2);
    static WeightEta unweighted();

private:
    WeightEta() : eta1(0.0), eta2(0.0) {}
};

/// Quadrant-piecewise growing weight exponent:
///   eta1(|x1|+|x2|)        x1<0, x2<0
///   eta1|x1| + eta2|x2|    x1<0, x2>0
///   eta2|x1| + eta1|x2|    x1>0, x2<0
///   eta2(|x1|+|x2|)        x1>0, x2>0
/// Continuous (value 0) across the axes.
double eta_weight(const WeightEta& w, const Eigen::Vector2d& x);

enum class NormKind { L2, H1 };

/// Mesh quadrature of ||u e^{eta}|| with the decaying convention
/// eta(x) = -(eta1|x1| + eta2|x2|), so integrals stay bounded; eta = 0
/// reduces to the plain L2/H1 norm.
double weighted_norm(const FemSpace& space, const Eigen::VectorXd& nodal,
                     const WeightEta& w, NormKind kind);

}  // namespace levyfem
