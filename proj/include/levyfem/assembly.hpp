#pragma once

#include <iosfwd>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "levyfem/mesh.hpp"

namespace levyfem {

/// Assembled operators are plain compressed sparse matrices; entries are sums
/// of exact per-triangle contributions accumulated in deterministic order.
using SparseOperator = Eigen::SparseMatrix<double>;

/// Mass matrix: (i,j) -> integral phi_i phi_j. Symmetric positive definite.
SparseOperator assemble_mass(const FemSpace& space);

/// Stiffness for the anisotropic diffusion form integral (grad u)^t kappa grad v.
/// kappa must be symmetric positive definite; kernel = constants before
/// boundary conditions.
SparseOperator assemble_diffusion(const FemSpace& space, const Eigen::Matrix2d& kappa);

/// Convection realizing -integral alpha^t grad(u) v for constant alpha.
SparseOperator assemble_convection(const FemSpace& space, const Eigen::Vector2d& alpha);

/// Coordinate-list dump "row,col,value" with 17 significant digits.
void dump_operator_coo(const SparseOperator& op, std::ostream& os);

namespace detail {
/// Exact local P1 element integrals on one triangle (exposed for testing).
Eigen::Matrix3d p1_local_mass(double area);
Eigen::Matrix3d p1_local_diffusion(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                   const Eigen::Vector2d& p2, const Eigen::Matrix2d& kappa);
Eigen::Matrix3d p1_local_convection(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                    const Eigen::Vector2d& p2, const Eigen::Vector2d& alpha);
}  // namespace detail

}  // namespace levyfem
