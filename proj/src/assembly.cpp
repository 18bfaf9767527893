#include "levyfem/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace levyfem {

namespace detail {

namespace {
double signed_area2(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                    const Eigen::Vector2d& p2) {
    return (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
}

/// Constant P1 basis gradients on the triangle, one per column.
Eigen::Matrix<double, 2, 3> p1_gradients(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                         const Eigen::Vector2d& p2) {
    const double twoA = signed_area2(p0, p1, p2);
    Eigen::Matrix<double, 2, 3> g;
    g.col(0) << (p1[1] - p2[1]) / twoA, (p2[0] - p1[0]) / twoA;
    g.col(1) << (p2[1] - p0[1]) / twoA, (p0[0] - p2[0]) / twoA;
    g.col(2) << (p0[1] - p1[1]) / twoA, (p1[0] - p0[0]) / twoA;
    return g;
}
}  // namespace

Eigen::Matrix3d p1_local_mass(double area) {
    Eigen::Matrix3d m;
    m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    return (area / 12.0) * m;
}

Eigen::Matrix3d p1_local_diffusion(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                   const Eigen::Vector2d& p2, const Eigen::Matrix2d& kappa) {
    const double area = 0.5 * std::abs(signed_area2(p0, p1, p2));
    const auto g = p1_gradients(p0, p1, p2);
    return area * (g.transpose() * kappa * g);
}

Eigen::Matrix3d p1_local_convection(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                    const Eigen::Vector2d& p2, const Eigen::Vector2d& alpha) {
    const double area = 0.5 * std::abs(signed_area2(p0, p1, p2));
    const auto g = p1_gradients(p0, p1, p2);
    // (i,j) = -(alpha . grad phi_j) * integral phi_i, integral phi_i = area/3.
    Eigen::Matrix3d c;
    for (int j = 0; j < 3; ++j) {
        const double aj = alpha.dot(g.col(j));
        for (int i = 0; i < 3; ++i) c(i, j) = -aj * area / 3.0;
    }
    return c;
}

}  // namespace detail

namespace {

template <typename LocalFn>
SparseOperator assemble(const FemSpace& space, const LocalFn& local) {
    const int nv = space.num_vertices();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(space.triangles.size() * 9);
    for (const auto& t : space.triangles) {
        const Eigen::Matrix3d loc =
            local(space.vertices[t[0]], space.vertices[t[1]], space.vertices[t[2]]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trip.emplace_back(t[i], t[j], loc(i, j));
    }
    SparseOperator op(nv, nv);
    op.setFromTriplets(trip.begin(), trip.end());
    op.makeCompressed();
    return op;
}

}  // namespace

SparseOperator assemble_mass(const FemSpace& space) {
    return assemble(space, [](const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                              const Eigen::Vector2d& p2) {
        const double area = 0.5 * std::abs((p1[0] - p0[0]) * (p2[1] - p0[1]) -
                                           (p2[0] - p0[0]) * (p1[1] - p0[1]));
        return detail::p1_local_mass(area);
    });
}

SparseOperator assemble_diffusion(const FemSpace& space, const Eigen::Matrix2d& kappa) {
    if ((kappa - kappa.transpose()).norm() > 1e-14 * (1.0 + kappa.norm()))
        throw std::invalid_argument("assemble_diffusion: kappa must be symmetric");
    const double tr = kappa.trace();
    const double det = kappa.determinant();
    if (!(tr > 0.0) || !(det > 0.0))
        throw std::invalid_argument("assemble_diffusion: kappa must be positive definite");
    return assemble(space, [&](const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                               const Eigen::Vector2d& p2) {
        return detail::p1_local_diffusion(p0, p1, p2, kappa);
    });
}

SparseOperator assemble_convection(const FemSpace& space, const Eigen::Vector2d& alpha) {
    return assemble(space, [&](const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                               const Eigen::Vector2d& p2) {
        return detail::p1_local_convection(p0, p1, p2, alpha);
    });
}

void dump_operator_coo(const SparseOperator& op, std::ostream& os) {
    os << "# row,col,value\n";
    char buf[96];
    for (int k = 0; k < op.outerSize(); ++k) {
        for (SparseOperator::InnerIterator it(op, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g\n", static_cast<long>(it.row()),
                          static_cast<long>(it.col()), it.value());
            os << buf;
        }
    }
}

}  // namespace levyfem
